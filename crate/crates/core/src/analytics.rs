//! Closed-form transfer-matrix results for the projected rotated state and
//! their numerical cross-checks.
//!
//! The rotated state is a bond-dimension-2 product of alternating `A`, `B`
//! tensors; its transfer blocks `E_AB`, `E_BA` are 4x4 with two nonzero rows.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;

use crate::entanglement::CutPlan;
use crate::hilbert::{Boundary, ConstrainedBasis, CutGeometry};
use crate::operators::pxp_hamiltonian;
use crate::states::{rotated_state, RotationAngle};
use crate::{Error, Result, C64};

/// Ratio between `<psi|H|psi>/L` and the transfer expression normalized per `2L`.
/// Fixed by [`calibrate_energy`] at `L = 8`.
pub const ENERGY_CALIBRATION: f64 = 2.0;

/// Upper bound of `h(theta)`, reached at `theta = pi/2`.
pub fn h_max() -> f64 {
    2.0 / (15.0 + 5.0 * 5f64.sqrt())
}

/// `f(theta) = sqrt(2) sqrt(44 cos 2theta - 3 cos 4theta + 87)`.
pub fn f_of(theta: f64) -> f64 {
    2f64.sqrt() * (44.0 * (2.0 * theta).cos() - 3.0 * (4.0 * theta).cos() + 87.0).sqrt()
}

/// Closed-form transfer quantities at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferAnalytics {
    pub theta: f64,
    pub f: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Correlation length `-1 / ln(lambda2 / lambda1)`; zero when `lambda2 = 0`.
    pub xi: f64,
    pub h: f64,
    /// Single-cut entanglement spectrum, descending.
    pub single_cut: [f64; 2],
    /// Two-cut entanglement spectrum, descending.
    pub two_cut: [f64; 4],
    /// Thermodynamic-limit energy density.
    pub energy_density: f64,
}

pub fn transfer_analytics(theta: f64) -> Result<TransferAnalytics> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "angle {theta} outside [0, pi]"
        )));
    }
    let f = f_of(theta);
    let c2 = (2.0 * theta).cos();
    let lambda1 = (2.0 * c2 + f + 14.0) / 32.0;
    let lambda2 = ((2.0 * c2 - f + 14.0) / 32.0).max(0.0);
    let ratio = lambda2 / lambda1;
    let xi = if ratio > 0.0 { -1.0 / ratio.ln() } else { 0.0 };
    let h = 128.0 * theta.sin().powi(6) / ((2.0 * c2 + f + 14.0) * f * f);
    let root = (0.25 - h).max(0.0).sqrt();
    let single_cut = [0.5 + root, 0.5 - root];
    let two_cut = [0.5 - h + root, h, h, 0.5 - h - root];
    Ok(TransferAnalytics {
        theta,
        f,
        lambda1,
        lambda2,
        xi,
        h,
        single_cut,
        two_cut,
        energy_density: infinite_energy_density(theta),
    })
}

/// The four transfer blocks `(E_AB, E_BA, E^O_AB, E^O_BA)`.
pub fn transfer_blocks(theta: f64) -> [Mat<f64>; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    let (s2, c2) = (s * s, c * c);
    let two_row = |top: [f64; 4], bottom: f64| {
        Mat::<f64>::from_fn(4, 4, |i, j| match i {
            0 => top[j],
            3 => bottom,
            _ => 0.0,
        })
    };
    let e_ab = two_row([s2, c2 * s2, c2 * s2, c2 * s2], c2 * c2);
    let e_ba = two_row([c2, c2 * s2, c2 * s2, c2 * s2], s2 * s2);
    let corner = |v: f64| Mat::<f64>::from_fn(4, 4, |i, j| if i == 0 && j == 0 { v } else { 0.0 });
    let o_ab = corner(2.0 * s2 * s * c);
    let o_ba = corner(-2.0 * c2 * c * s);
    [e_ab, e_ba, o_ab, o_ba]
}

fn mat_power(m: &Mat<f64>, k: usize) -> Mat<f64> {
    let mut out = Mat::<f64>::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

fn trace(m: &Mat<f64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// The finite-size transfer expression for the energy per `2L`, with `L/2`
/// insertion positions of each block type. Requires `L` divisible by 4.
pub fn transfer_energy_expression(theta: f64, length: usize) -> Result<f64> {
    if !length.is_multiple_of(4) || length == 0 {
        return Err(Error::InvalidArgument(format!(
            "transfer energy needs L divisible by 4, got {length}"
        )));
    }
    let m = length / 2;
    let [e_ab, e_ba, o_ab, o_ba] = transfer_blocks(theta);
    let insert = trace(&(mat_power(&e_ba, m - 1) * &o_ba)) + trace(&(mat_power(&e_ab, m - 1) * &o_ab));
    let norm = trace(&mat_power(&e_ab, m));
    Ok(m as f64 * insert / (norm * 2.0 * length as f64))
}

/// Calibrated energy density `<psi(theta)|H|psi(theta)> / L` from the transfer expression.
pub fn analytic_energy_density(theta: f64, length: usize) -> Result<f64> {
    Ok(ENERGY_CALIBRATION * transfer_energy_expression(theta, length)?)
}

/// `<psi(theta)|H|psi(theta)> / L` by building the projected rotated state.
pub fn numeric_energy_density(theta: f64, length: usize) -> Result<f64> {
    let basis = Arc::new(ConstrainedBasis::new(length, Boundary::Periodic));
    let h = pxp_hamiltonian(&basis)?;
    let (psi, _) = rotated_state(&basis, RotationAngle::new(theta)?)?;
    Ok(h.expectation(psi.amps())? / length as f64)
}

/// Ratio of numeric energy density to the transfer expression at each angle
/// where the latter is not negligible.
pub fn calibrate_energy(thetas: &[f64], length: usize) -> Result<Vec<f64>> {
    let mut ratios = Vec::new();
    for &theta in thetas {
        let expr = transfer_energy_expression(theta, length)?;
        if expr.abs() > 1e-6 {
            ratios.push(numeric_energy_density(theta, length)? / expr);
        }
    }
    Ok(ratios)
}

// Dominant right and left eigenvectors of the 2x2 block [[a, b], [c, d]].
fn dominant_pair(a: f64, b: f64, c: f64, d: f64) -> (f64, [f64; 2], [f64; 2]) {
    let tr = a + d;
    let det = a * d - b * c;
    let lambda = 0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt());
    let right = if b.abs() > 1e-300 || (lambda - a).abs() > 1e-300 {
        [b, lambda - a]
    } else {
        [1.0, 0.0]
    };
    let left = if c.abs() > 1e-300 || (lambda - a).abs() > 1e-300 {
        [c, lambda - a]
    } else {
        [1.0, 0.0]
    };
    (lambda, right, left)
}

/// Energy density in the limit of an infinite chain.
pub fn infinite_energy_density(theta: f64) -> f64 {
    let (s, c) = (theta / 2.0).sin_cos();
    let (s2, c2) = (s * s, c * c);
    // reduced blocks on the two nonzero rows/columns
    let blocks = [
        ([s2, c2 * s2, c2 * c2, c2 * c2], 2.0 * s2 * s * c),
        ([c2, c2 * s2, s2 * s2, s2 * s2], -2.0 * c2 * c * s),
    ];
    let mut total = 0.0;
    for ([a, b, cc, d], o) in blocks {
        let (lambda, r, l) = dominant_pair(a, b, cc, d);
        let lr = l[0] * r[0] + l[1] * r[1];
        if lr.abs() < 1e-300 || lambda == 0.0 {
            continue;
        }
        total += o * l[0] * r[0] / (lr * lambda);
    }
    // per-2L expression times the calibration, with L/2 insertions per block type
    ENERGY_CALIBRATION * total / 4.0
}

/// Leading two eigenvalues of the 4x4 blocks found by a general eigensolver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericTransfer {
    pub ab: [f64; 2],
    pub ba: [f64; 2],
}

fn leading_eigenvalues(m: &Mat<f64>) -> Result<[f64; 2]> {
    let mut vals: Vec<C64> = m
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    vals.sort_by(|a, b| b.re.total_cmp(&a.re));
    Ok([vals[0].re, vals[1].re])
}

pub fn numeric_transfer(theta: f64) -> Result<NumericTransfer> {
    let [e_ab, e_ba, _, _] = transfer_blocks(theta);
    Ok(NumericTransfer {
        ab: leading_eigenvalues(&e_ab)?,
        ba: leading_eigenvalues(&e_ba)?,
    })
}

fn dominant_eigenvector(m: &Mat<f64>) -> Result<Vec<C64>> {
    let evd = m.eigen().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S();
    let k = (0..m.nrows())
        .max_by(|&i, &j| s[i].re.total_cmp(&s[j].re))
        .expect("nonempty");
    Ok(evd.U().col(k).iter().copied().collect())
}

/// Single-cut spectrum from the dominant right and left eigenvectors of the
/// 4x4 `E_AB`, each reshaped to 2x2: `eig(R L) / tr(R L)`, descending.
pub fn numeric_single_cut(theta: f64) -> Result<[f64; 2]> {
    let [e_ab, _, _, _] = transfer_blocks(theta);
    let right = dominant_eigenvector(&e_ab)?;
    let left = dominant_eigenvector(&e_ab.transpose().to_owned())?;
    let reshape = |v: &[C64]| Mat::<C64>::from_fn(2, 2, |i, j| v[2 * i + j]);
    let prod = reshape(&right) * reshape(&left);
    let tr = prod[(0, 0)] + prod[(1, 1)];
    let det = prod[(0, 0)] * prod[(1, 1)] - prod[(0, 1)] * prod[(1, 0)];
    let disc = (tr * tr - det * 4.0).sqrt();
    let mut p = [((tr + disc) / (tr * 2.0)).re, ((tr - disc) / (tr * 2.0)).re];
    p.sort_by(|a, b| b.total_cmp(a));
    Ok(p)
}

/// One row of the analytic/numeric comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub analytics: TransferAnalytics,
    pub e_analytic: f64,
    pub e_numeric: f64,
    /// Four largest half-chain entanglement eigenvalues of the numeric state.
    pub numeric_spectrum: [f64; 4],
    pub spectrum_deviation: f64,
}

/// Analytic vs numeric energy density and half-chain spectrum at length `L`.
pub fn compare_analytic_numeric(thetas: &[f64], length: usize) -> Result<Vec<ComparisonRow>> {
    let basis = Arc::new(ConstrainedBasis::new(length, Boundary::Periodic));
    let h = pxp_hamiltonian(&basis)?;
    let plan = CutPlan::new(&basis, &CutGeometry::half_chain(length))?;
    thetas
        .iter()
        .map(|&theta| {
            let analytics = transfer_analytics(theta)?;
            let (psi, _) = rotated_state(&basis, RotationAngle::new(theta)?)?;
            let e_numeric = h.expectation(psi.amps())? / length as f64;
            let spec = plan.spectrum(psi.amps())?;
            let mut numeric_spectrum = [0.0; 4];
            for (slot, p) in numeric_spectrum.iter_mut().zip(spec.probs()) {
                *slot = *p;
            }
            let spectrum_deviation = numeric_spectrum
                .iter()
                .zip(&analytics.two_cut)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(ComparisonRow {
                analytics,
                e_analytic: analytic_energy_density(theta, length)?,
                e_numeric,
                numeric_spectrum,
                spectrum_deviation,
            })
        })
        .collect()
}
