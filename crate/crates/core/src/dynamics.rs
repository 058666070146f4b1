//! Real-time evolution and half-chain observables along quench trajectories.

use std::sync::Arc;

use faer::Mat;

use crate::entanglement::{entropy, CutPlan};
use crate::ergotropy::{ergotropy_with_plan, SubsystemHamiltonian};
use crate::hilbert::{CutGeometry, Inversion, Momentum, SectorBasis};
use crate::operators::{pxp_sector_hamiltonian, SparseOperator};
use crate::spectra::{dense_eigh, dense_eigh_matrix, SpectralDecomposition};
use crate::states::{expand_amplitudes, inner, norm, rotated_state_sector, RotationAngle};
use crate::{Error, Result, C64};

/// Sector dimension up to which dense eigenbasis propagation is used.
pub const EIGENBASIS_MAX_DIM: usize = 4000;

/// Exact propagation `psi(t) = V exp(-i Lambda t) V^T psi0` in a fixed eigenbasis.
#[derive(Debug, Clone)]
pub struct EigenPropagator<'a> {
    dec: &'a SpectralDecomposition,
    coeffs: Vec<C64>,
}

impl<'a> EigenPropagator<'a> {
    pub fn new(dec: &'a SpectralDecomposition, psi0: &[C64]) -> Result<Self> {
        let n = dec.dim();
        if psi0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: psi0.len(),
            });
        }
        let v = dec.vectors();
        let coeffs = (0..n)
            .map(|k| (0..n).map(|i| psi0[i] * v[(i, k)]).sum())
            .collect();
        Ok(Self { dec, coeffs })
    }

    pub fn state_at(&self, t: f64) -> Vec<C64> {
        let n = self.dec.dim();
        let v = self.dec.vectors();
        let phased: Vec<C64> = self
            .coeffs
            .iter()
            .zip(self.dec.values())
            .map(|(c, &e)| c * C64::from_polar(1.0, -e * t))
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, p) in phased.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += p * v[(i, k)];
            }
        }
        out
    }
}

/// States at every time in `times`.
pub fn evolve_eigenbasis(
    dec: &SpectralDecomposition,
    psi0: &[C64],
    times: &[f64],
) -> Result<Vec<Vec<C64>>> {
    let prop = EigenPropagator::new(dec, psi0)?;
    Ok(times.iter().map(|&t| prop.state_at(t)).collect())
}

/// Settings of the Lanczos exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovSettings {
    /// Largest subspace built in one step before the step is halved.
    pub max_dim: usize,
    /// Bound on the a posteriori error estimate of one step.
    pub tol: f64,
}

impl Default for KrylovSettings {
    fn default() -> Self {
        Self {
            max_dim: 40,
            tol: 1e-12,
        }
    }
}

const MAX_HALVINGS: u32 = 16;

/// One step `exp(-i H dt) psi` by an adaptive Lanczos subspace.
pub fn evolve_krylov(
    h: &SparseOperator,
    psi: &[C64],
    dt: f64,
    settings: KrylovSettings,
) -> Result<Vec<C64>> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian(h.max_asymmetry()));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: psi.len(),
        });
    }
    krylov_step(h, psi, dt, settings, 0)
}

fn krylov_step(
    h: &SparseOperator,
    psi: &[C64],
    dt: f64,
    settings: KrylovSettings,
    depth: u32,
) -> Result<Vec<C64>> {
    match lanczos_exp(h, psi, dt, settings)? {
        Some(out) => Ok(out),
        None if depth < MAX_HALVINGS => {
            let half = krylov_step(h, psi, dt / 2.0, settings, depth + 1)?;
            krylov_step(h, &half, dt / 2.0, settings, depth + 1)
        }
        None => Err(Error::KrylovNotConverged {
            dim: settings.max_dim.min(h.dim()),
            residual: f64::NAN,
        }),
    }
}

// Returns None when the subspace cap is reached before the error estimate drops below tol.
fn lanczos_exp(
    h: &SparseOperator,
    psi: &[C64],
    dt: f64,
    settings: KrylovSettings,
) -> Result<Option<Vec<C64>>> {
    let n = h.dim();
    let beta0 = norm(psi);
    if beta0 == 0.0 {
        return Ok(Some(psi.to_vec()));
    }
    let cap = settings.max_dim.min(n).max(1);
    let mut basis: Vec<Vec<C64>> = vec![psi.iter().map(|a| a / beta0).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut last_residual = f64::INFINITY;

    for j in 0..cap {
        h.apply_into(&basis[j], &mut w)?;
        let a = inner(&basis[j], &w).re;
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for v in &basis {
                let proj = inner(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= proj * vi;
                }
            }
        }
        let b = norm(&w);
        let m = j + 1;
        let (y, last) = tridiagonal_exp(&alpha, &beta, dt)?;
        let breakdown = b < 1e-13 * (1.0 + a.abs());
        let residual = b * last;
        if breakdown || residual < settings.tol {
            let mut out = vec![C64::new(0.0, 0.0); n];
            for (k, v) in basis.iter().enumerate().take(m) {
                let c = y[k] * beta0;
                for (o, vi) in out.iter_mut().zip(v) {
                    *o += c * vi;
                }
            }
            return Ok(Some(out));
        }
        last_residual = residual;
        if m == n {
            return Err(Error::KrylovNotConverged {
                dim: m,
                residual,
            });
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    log::debug!("Lanczos cap {cap} reached with residual {last_residual:.2e}; halving dt");
    Ok(None)
}

// exp(-i T dt) e_1 for the symmetric tridiagonal T, plus |last component|.
fn tridiagonal_exp(alpha: &[f64], beta: &[f64], dt: f64) -> Result<(Vec<C64>, f64)> {
    let m = alpha.len();
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let dec = dense_eigh_matrix(&t)?;
    let v = dec.vectors();
    let y: Vec<C64> = (0..m)
        .map(|i| {
            (0..m)
                .map(|k| C64::from_polar(v[(0, k)], -dec.values()[k] * dt) * v[(i, k)])
                .sum()
        })
        .collect();
    let last = y[m - 1].norm();
    Ok((y, last))
}

/// Propagator choice for [`quench_series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Eigenbasis up to [`EIGENBASIS_MAX_DIM`], Krylov above.
    Auto,
    Eigenbasis,
    Krylov,
}

impl Method {
    pub fn resolve(self, dim: usize) -> Method {
        match self {
            Method::Auto if dim <= EIGENBASIS_MAX_DIM => Method::Eigenbasis,
            Method::Auto => Method::Krylov,
            m => m,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Eigenbasis => "eigenbasis",
            Method::Krylov => "krylov",
        }
    }
}

/// Half-chain observables at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub energy: f64,
    pub ergotropy: f64,
    pub bound: f64,
    pub entropy: f64,
}

/// Trajectory of `E_A`, `W`, `Q` and `S_vN` on a uniform time grid.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub length: usize,
    pub theta: f64,
    pub method: Method,
    pub samples: Vec<Sample>,
}

impl TimeSeries {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn ergotropy(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.ergotropy).collect()
    }

    pub fn entropy(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.entropy).collect()
    }

    /// `max_t |E_A(t) - E_A(0)|`.
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples.first().map_or(0.0, |s| s.energy);
        self.samples
            .iter()
            .map(|s| (s.energy - e0).abs())
            .fold(0.0, f64::max)
    }

    /// Samples with `t` in `[t1, t2]`.
    pub fn window(&self, t1: f64, t2: f64) -> impl Iterator<Item = &Sample> {
        self.samples
            .iter()
            .filter(move |s| s.t >= t1 - 1e-9 && s.t <= t2 + 1e-9)
    }
}

/// `0, dt, 2 dt, ...` up to `t_max` inclusive.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !(t_max >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bad time grid: dt = {dt}, t_max = {t_max}"
        )));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// Everything needed to measure half-chain observables of sector states.
#[derive(Debug, Clone)]
pub struct QuenchSetup {
    pub sector: Arc<SectorBasis>,
    pub hamiltonian: SparseOperator,
    pub plan: CutPlan,
    pub subsystem: SubsystemHamiltonian,
}

impl QuenchSetup {
    pub fn new(length: usize) -> Result<Self> {
        if !length.is_multiple_of(4) || length == 0 {
            return Err(Error::InvalidArgument(format!(
                "quench lengths must be multiples of 4, got {length}"
            )));
        }
        let sector = Arc::new(crate::hilbert::build_symmetric_sector(
            length,
            Momentum::Zero,
            Inversion::Even,
        )?);
        let hamiltonian = pxp_sector_hamiltonian(&sector)?;
        let plan = CutPlan::new(sector.parent(), &CutGeometry::half_chain(length))?;
        let subsystem = SubsystemHamiltonian::new(length / 2)?;
        Ok(Self {
            sector,
            hamiltonian,
            plan,
            subsystem,
        })
    }

    /// Observables of a sector state at time `t`.
    pub fn measure(&self, t: f64, sector_amps: &[C64]) -> Result<Sample> {
        let full = expand_amplitudes(&self.sector, sector_amps)?;
        let (erg, spec) = ergotropy_with_plan(&self.plan, &full, &self.subsystem)?;
        Ok(Sample {
            t,
            energy: erg.energy,
            ergotropy: erg.ergotropy,
            bound: erg.bound,
            entropy: entropy(&spec),
        })
    }

    /// Evolves the rotated state from `theta` and records every grid time.
    pub fn run(&self, theta: RotationAngle, times: &[f64], method: Method) -> Result<TimeSeries> {
        let psi0 = rotated_state_sector(&self.sector, theta)?;
        let method = method.resolve(self.sector.dim());
        let mut samples = Vec::with_capacity(times.len());
        match method {
            Method::Eigenbasis | Method::Auto => {
                let dec = dense_eigh(&self.hamiltonian)?;
                let prop = EigenPropagator::new(&dec, psi0.amps())?;
                for &t in times {
                    samples.push(self.measure(t, &prop.state_at(t))?);
                }
            }
            Method::Krylov => {
                let settings = KrylovSettings::default();
                let mut psi = psi0.amps().to_vec();
                let mut now = 0.0;
                for &t in times {
                    if t > now {
                        psi = evolve_krylov(&self.hamiltonian, &psi, t - now, settings)?;
                        now = t;
                    }
                    samples.push(self.measure(t, &psi)?);
                }
            }
        }
        Ok(TimeSeries {
            length: self.sector.parent().length(),
            theta: theta.radians(),
            method,
            samples,
        })
    }
}

/// Quench from the projected rotated state in the `k = 0, I = +1` sector.
pub fn quench_series(
    length: usize,
    theta: RotationAngle,
    t_max: f64,
    dt: f64,
    method: Method,
) -> Result<TimeSeries> {
    let setup = QuenchSetup::new(length)?;
    setup.run(theta, &time_grid(t_max, dt)?, method)
}

/// Window means `(W, Q, S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub ergotropy: f64,
    pub bound: f64,
    pub entropy: f64,
}

/// Arithmetic means over samples in `[t1, t2]`.
pub fn steady_average(series: &TimeSeries, window: (f64, f64)) -> Result<SteadyState> {
    let (t1, t2) = window;
    let t_last = series.samples.last().map_or(f64::NEG_INFINITY, |s| s.t);
    if t2 > t_last + 1e-9 || t1 > t2 {
        return Err(Error::EmptyWindow(t1, t2));
    }
    let picked: Vec<&Sample> = series.window(t1, t2).collect();
    if picked.is_empty() {
        return Err(Error::EmptyWindow(t1, t2));
    }
    let n = picked.len() as f64;
    Ok(SteadyState {
        ergotropy: picked.iter().map(|s| s.ergotropy).sum::<f64>() / n,
        bound: picked.iter().map(|s| s.bound).sum::<f64>() / n,
        entropy: picked.iter().map(|s| s.entropy).sum::<f64>() / n,
    })
}

/// Mean-subtracted autocorrelation normalized to 1 at zero lag.
pub fn autocorrelation(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = d.iter().map(|v| v * v).sum();
    if c0 == 0.0 {
        return vec![1.0; n];
    }
    (0..n)
        .map(|lag| d[..n - lag].iter().zip(&d[lag..]).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect()
}

/// Largest autocorrelation after its first zero crossing, searched up to half
/// the record, with the corresponding lag index. `None` if it never crosses.
pub fn revival_peak(ac: &[f64]) -> Option<(usize, f64)> {
    let half = ac.len() / 2;
    let first_zero = (1..half).find(|&i| ac[i] <= 0.0)?;
    (first_zero..half)
        .map(|i| (i, ac[i]))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_chain_basis, Boundary};
    use crate::operators::pxp_hamiltonian;
    use crate::states::rotated_state;

    #[test]
    fn eigen_propagation_is_unitary_and_starts_at_psi0() {
        let b = Arc::new(build_chain_basis(8, Boundary::Periodic));
        let h = pxp_hamiltonian(&b).unwrap();
        let dec = dense_eigh(&h).unwrap();
        let (psi, _) = rotated_state(&b, RotationAngle::new(0.6).unwrap()).unwrap();
        let states = evolve_eigenbasis(&dec, psi.amps(), &[0.0, 1.3, 7.0]).unwrap();
        for (a, b) in states[0].iter().zip(psi.amps()) {
            assert!((a - b).norm() < 1e-13);
        }
        for s in &states {
            assert!((norm(s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn krylov_half_steps_compose() {
        let b = Arc::new(build_chain_basis(10, Boundary::Periodic));
        let h = pxp_hamiltonian(&b).unwrap();
        let (psi, _) = rotated_state(&b, RotationAngle::new(1.0).unwrap()).unwrap();
        let s = KrylovSettings::default();
        let one = evolve_krylov(&h, psi.amps(), 0.5, s).unwrap();
        let half = evolve_krylov(&h, psi.amps(), 0.25, s).unwrap();
        let two = evolve_krylov(&h, &half, 0.25, s).unwrap();
        let diff = one.iter().zip(&two).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 2.0 * s.tol);
        assert!((norm(&one) - 1.0).abs() < 1e-12);
        assert!(evolve_krylov(&h, psi.amps(), 0.0, s).is_err());
    }

    #[test]
    fn steady_average_of_constant_series() {
        let samples = (0..5)
            .map(|k| Sample {
                t: k as f64,
                energy: 1.0,
                ergotropy: 0.25,
                bound: 0.75,
                entropy: 2.0,
            })
            .collect();
        let ts = TimeSeries {
            length: 4,
            theta: 0.0,
            method: Method::Eigenbasis,
            samples,
        };
        let avg = steady_average(&ts, (1.0, 3.0)).unwrap();
        assert_eq!((avg.ergotropy, avg.bound, avg.entropy), (0.25, 0.75, 2.0));
        assert!(steady_average(&ts, (1.2, 1.8)).is_err());
        assert!(steady_average(&ts, (1.0, 9.0)).is_err());
    }

    #[test]
    fn autocorrelation_of_cosine_revives() {
        let x: Vec<f64> = (0..200).map(|k| (k as f64 * 0.3).cos()).collect();
        let ac = autocorrelation(&x);
        assert_eq!(ac[0], 1.0);
        let (_, peak) = revival_peak(&ac).unwrap();
        assert!(peak > 0.8);
    }

    #[test]
    fn slow_drift_with_ripple_has_no_early_revival() {
        // A monotone decay never crosses zero before the half-record mark.
        let x: Vec<f64> = (0..200).map(|k| (-(k as f64) / 400.0).exp() + 1e-3 * (k as f64 * 2.1).sin()).collect();
        let ac = autocorrelation(&x);
        if let Some((lag, _)) = revival_peak(&ac) {
            assert!(lag > 20);
        }
    }

    #[test]
    fn quench_rejects_lengths_off_the_4n_grid() {
        assert!(QuenchSetup::new(10).is_err());
    }
}
