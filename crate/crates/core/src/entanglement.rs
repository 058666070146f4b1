//! Reduced density matrices of constrained regions and the entropies built on them.
//!
//! A region is a product of open-chain bases, one per interval. The amplitude
//! matrix `M[region, complement]` holds the global amplitude of each compatible
//! pair and zero elsewhere, so `rho = M M^dagger`.

use faer::{Mat, Side};

use crate::hilbert::{Boundary, ConstrainedBasis, CutGeometry, Interval};
use crate::operators::staggered_z;
use crate::states::StateVector;
use crate::{Error, Result, C64};

/// Eigenvalues below this magnitude are dropped from spectra.
pub const TRIM: f64 = 1e-14;
/// Most negative eigenvalue tolerated (and clipped to zero).
pub const NEGATIVE_TOL: f64 = 1e-12;

// Mixed-radix product of per-interval open-chain bases.
#[derive(Debug, Clone)]
struct ProductBasis {
    intervals: Vec<Interval>,
    bases: Vec<ConstrainedBasis>,
    dim: usize,
}

impl ProductBasis {
    fn new(intervals: &[Interval]) -> Self {
        let bases: Vec<_> = intervals
            .iter()
            .map(|iv| ConstrainedBasis::new(iv.len, Boundary::Open))
            .collect();
        let dim = bases.iter().map(|b| b.dim()).product();
        Self {
            intervals: intervals.to_vec(),
            bases,
            dim,
        }
    }

    fn index(&self, config: u64, length: usize) -> usize {
        self.intervals
            .iter()
            .zip(&self.bases)
            .fold(0, |acc, (iv, b)| {
                let bits = iv.extract(config, length);
                acc * b.dim() + b.index_of(bits).expect("segment of a legal config is legal")
            })
    }
}

/// Precomputed `(row, column)` of every parent configuration in the amplitude matrix.
#[derive(Debug, Clone)]
pub struct CutPlan {
    geometry: CutGeometry,
    region: ProductBasis,
    complement: ProductBasis,
    positions: Vec<(usize, usize)>,
}

impl CutPlan {
    pub fn new(basis: &ConstrainedBasis, geometry: &CutGeometry) -> Result<Self> {
        if basis.boundary() != Boundary::Periodic {
            return Err(Error::InvalidArgument("cuts are taken on periodic chains".into()));
        }
        if basis.length() != geometry.length() {
            return Err(Error::BadGeometry(format!(
                "geometry for {} sites applied to a {}-site chain",
                geometry.length(),
                basis.length()
            )));
        }
        let length = basis.length();
        let region = ProductBasis::new(geometry.region());
        let complement = ProductBasis::new(geometry.complement());
        let positions = basis
            .configs()
            .iter()
            .map(|&c| (region.index(c, length), complement.index(c, length)))
            .collect();
        Ok(Self {
            geometry: geometry.clone(),
            region,
            complement,
            positions,
        })
    }

    pub fn geometry(&self) -> &CutGeometry {
        &self.geometry
    }

    pub fn region_dim(&self) -> usize {
        self.region.dim
    }

    pub fn complement_dim(&self) -> usize {
        self.complement.dim
    }

    fn check(&self, amps: &[C64]) -> Result<()> {
        if amps.len() != self.positions.len() {
            return Err(Error::DimensionMismatch {
                expected: self.positions.len(),
                got: amps.len(),
            });
        }
        Ok(())
    }

    /// `M[region, complement]`.
    pub fn amplitude_matrix(&self, amps: &[C64]) -> Result<Mat<C64>> {
        self.check(amps)?;
        let mut m = Mat::<C64>::zeros(self.region.dim, self.complement.dim);
        for (&(r, c), &a) in self.positions.iter().zip(amps) {
            m[(r, c)] = a;
        }
        Ok(m)
    }

    pub fn reduced_density(&self, amps: &[C64]) -> Result<ReducedDensity> {
        let m = self.amplitude_matrix(amps)?;
        Ok(ReducedDensity {
            matrix: &m * m.adjoint(),
        })
    }

    /// Entanglement spectrum from the smaller of `M M^dagger` and `M^dagger M`.
    pub fn spectrum(&self, amps: &[C64]) -> Result<EntanglementSpectrum> {
        let m = self.amplitude_matrix(amps)?;
        let gram = if m.nrows() <= m.ncols() {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        };
        EntanglementSpectrum::from_hermitian(&gram)
    }

    pub fn entropy(&self, amps: &[C64]) -> Result<f64> {
        Ok(entropy(&self.spectrum(amps)?))
    }

    /// `tr(rho_A H_A)` for an operator on the region basis, without forming `rho_A`.
    /// Only single-interval regions have a meaningful ordering for `H_A`.
    pub fn region_expectation(
        &self,
        amps: &[C64],
        op: &crate::operators::SparseOperator,
    ) -> Result<f64> {
        self.check(amps)?;
        if op.dim() != self.region.dim {
            return Err(Error::DimensionMismatch {
                expected: self.region.dim,
                got: op.dim(),
            });
        }
        // Group amplitudes by complement column, then sum <M_b|H|M_b>.
        let mut columns: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.complement.dim];
        for (&(r, c), &a) in self.positions.iter().zip(amps) {
            columns[c].push((r, a));
        }
        let mut dense = vec![C64::new(0.0, 0.0); self.region.dim];
        let mut total = 0.0;
        for col in &columns {
            if col.is_empty() {
                continue;
            }
            for &(r, a) in col {
                dense[r] = a;
            }
            for &(r, a) in col {
                let hr: C64 = op.row(r).map(|(c, v)| dense[c] * v).sum();
                total += (a.conj() * hr).re;
            }
            for &(r, _) in col {
                dense[r] = C64::new(0.0, 0.0);
            }
        }
        Ok(total)
    }
}

/// Hermitian positive semidefinite reduced density matrix.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    matrix: Mat<C64>,
}

impl ReducedDensity {
    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn spectrum(&self) -> Result<EntanglementSpectrum> {
        EntanglementSpectrum::from_hermitian(&self.matrix)
    }
}

/// Nonzero eigenvalues of a reduced density matrix, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSpectrum {
    probs: Vec<f64>,
}

impl EntanglementSpectrum {
    /// Clips small negatives, rejects larger ones, trims values below [`TRIM`] and sorts descending.
    pub fn from_eigenvalues(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut probs = Vec::new();
        for v in values {
            if v < -NEGATIVE_TOL {
                return Err(Error::NegativeEigenvalue(v));
            }
            if v >= TRIM {
                probs.push(v);
            }
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { probs })
    }

    pub fn from_hermitian(m: &Mat<C64>) -> Result<Self> {
        let vals = m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Self::from_eigenvalues(vals)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Von Neumann entropy in nats.
pub fn entropy(spec: &EntanglementSpectrum) -> f64 {
    spec.probs.iter().map(|&p| -p * p.ln()).sum()
}

fn chain_of(state: &StateVector) -> Result<&ConstrainedBasis> {
    state
        .chain_basis()
        .map(|b| b.as_ref())
        .ok_or_else(|| Error::InvalidArgument("expand sector states before tracing out".into()))
}

pub fn reduced_density(state: &StateVector, geometry: &CutGeometry) -> Result<ReducedDensity> {
    CutPlan::new(chain_of(state)?, geometry)?.reduced_density(state.amps())
}

pub fn entanglement_spectrum(state: &StateVector, geometry: &CutGeometry) -> Result<EntanglementSpectrum> {
    CutPlan::new(chain_of(state)?, geometry)?.spectrum(state.amps())
}

/// Entropy of the region spanned by `intervals`.
pub fn region_entropy(state: &StateVector, intervals: &[Interval]) -> Result<f64> {
    let basis = chain_of(state)?;
    let geometry = CutGeometry::new(basis.length(), intervals)?;
    CutPlan::new(basis, &geometry)?.entropy(state.amps())
}

/// `I(A:C) = S(A) + S(C) - S(A u C)`.
pub fn mutual_information(state: &StateVector, a: &[Interval], c: &[Interval]) -> Result<f64> {
    let union: Vec<_> = a.iter().chain(c).copied().collect();
    Ok(region_entropy(state, a)? + region_entropy(state, c)? - region_entropy(state, &union)?)
}

/// `I3 = S_A + S_B + S_C - S_AB - S_BC - S_AC + S_ABC`.
pub fn tripartite_mi(state: &StateVector, a: &[Interval], b: &[Interval], c: &[Interval]) -> Result<f64> {
    let join = |x: &[Interval], y: &[Interval]| -> Vec<Interval> { x.iter().chain(y).copied().collect() };
    let abc: Vec<_> = join(&join(a, b), c);
    Ok(region_entropy(state, a)? + region_entropy(state, b)? + region_entropy(state, c)?
        - region_entropy(state, &join(a, b))?
        - region_entropy(state, &join(b, c))?
        - region_entropy(state, &join(a, c))?
        + region_entropy(state, &abc)?)
}

/// Variance of the staggered magnetization per site.
pub fn qfi_density(state: &StateVector) -> Result<f64> {
    let basis = chain_of(state)?;
    let o = staggered_z(basis);
    Ok(o.variance(state.amps())? / basis.length() as f64)
}

/// Cut plans for the four-quarter diagnostics, built once per chain length.
#[derive(Debug, Clone)]
pub struct QuarterPlans {
    singles: [CutPlan; 3],
    ab: CutPlan,
    bc: CutPlan,
    ac: CutPlan,
    abc: CutPlan,
}

impl QuarterPlans {
    pub fn new(basis: &ConstrainedBasis) -> Result<Self> {
        let length = basis.length();
        let [a, b, c, _] = crate::hilbert::quarters(length);
        let plan = |ivs: &[Interval]| CutPlan::new(basis, &CutGeometry::new(length, ivs)?);
        Ok(Self {
            singles: [plan(&[a])?, plan(&[b])?, plan(&[c])?],
            ab: plan(&[a, b])?,
            bc: plan(&[b, c])?,
            ac: plan(&[a, c])?,
            abc: plan(&[a, b, c])?,
        })
    }

    /// `(I(A:C), I3(A:B:C))` for consecutive quarters `A, B, C`.
    pub fn evaluate(&self, amps: &[C64]) -> Result<(f64, f64)> {
        let [sa, sb, sc] = [
            self.singles[0].entropy(amps)?,
            self.singles[1].entropy(amps)?,
            self.singles[2].entropy(amps)?,
        ];
        let sab = self.ab.entropy(amps)?;
        let sbc = self.bc.entropy(amps)?;
        let sac = self.ac.entropy(amps)?;
        let sabc = self.abc.entropy(amps)?;
        Ok((sa + sc - sac, sa + sb + sc - sab - sbc - sac + sabc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::build_chain_basis;
    use crate::states::{z2_state, Space};
    use std::sync::Arc;

    #[test]
    fn neel_half_cut_is_pure() {
        let b = Arc::new(build_chain_basis(4, Boundary::Periodic));
        let z2 = z2_state(&b).unwrap();
        let g = CutGeometry::half_chain(4);
        let rho = reduced_density(&z2, &g).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        // open basis of 2 sites is {00, 01, 10}; sites 1,2 = "10" is bits 0b01, index 1
        assert_eq!(rho.matrix()[(1, 1)].re, 1.0);
        let spec = rho.spectrum().unwrap();
        assert_eq!(spec.probs().len(), 1);
        assert_eq!(entropy(&spec), 0.0);
        assert_eq!(qfi_density(&z2).unwrap(), 0.0);
    }

    #[test]
    fn uniform_spectrum_entropy() {
        let spec = EntanglementSpectrum::from_eigenvalues([0.25; 4]).unwrap();
        assert!((entropy(&spec) - 4f64.ln()).abs() < 1e-15);
        assert!(EntanglementSpectrum::from_eigenvalues([1.0, -1e-9]).is_err());
        assert_eq!(
            EntanglementSpectrum::from_eigenvalues([1.0, -1e-13]).unwrap().probs(),
            &[1.0]
        );
    }

    #[test]
    fn cat_state_qfi() {
        let l = 8;
        let b = Arc::new(build_chain_basis(l, Boundary::Periodic));
        let mut amps = vec![0.0; b.dim()];
        amps[b.index_of(0b0101_0101).unwrap()] = 1.0;
        amps[b.index_of(0b1010_1010).unwrap()] = 1.0;
        let cat = StateVector::from_real(Space::Chain(b), &amps).unwrap();
        assert!((qfi_density(&cat).unwrap() - l as f64).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_mutual_information() {
        let l = 8;
        let b = Arc::new(build_chain_basis(l, Boundary::Periodic));
        let z2 = z2_state(&b).unwrap();
        let plans = QuarterPlans::new(&b).unwrap();
        let (i2, i3) = plans.evaluate(z2.amps()).unwrap();
        assert_eq!((i2, i3), (0.0, 0.0));
    }
}
