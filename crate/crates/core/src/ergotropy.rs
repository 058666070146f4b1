//! Passive energy, ergotropy and the unitary that reaches the passive state.
//!
//! All energies are measured from the ground energy of the open-chain
//! subsystem Hamiltonian.

use faer::{Mat, Side};

use crate::entanglement::{CutPlan, EntanglementSpectrum};
use crate::hilbert::{Boundary, ConstrainedBasis, CutGeometry};
use crate::operators::{subsystem_hamiltonian, SparseOperator};
use crate::spectra::{dense_eigh, SpectralDecomposition};
use crate::states::StateVector;
use crate::{Error, Result, C64};

/// `Q = sum_k p_k e_k` for descending populations against ascending, ground-shifted energies.
pub fn passive_energy(probs: &[f64], energies: &[f64]) -> Result<f64> {
    if probs.len() > energies.len() {
        return Err(Error::LengthMismatch {
            probs: probs.len(),
            energies: energies.len(),
        });
    }
    Ok(probs.iter().zip(energies).map(|(p, e)| p * e).sum())
}

/// Open-chain Hamiltonian of a subsystem together with its spectrum.
#[derive(Debug, Clone)]
pub struct SubsystemHamiltonian {
    op: SparseOperator,
    spectrum: SpectralDecomposition,
    shifted: Vec<f64>,
}

impl SubsystemHamiltonian {
    pub fn new(l: usize) -> Result<Self> {
        let op = subsystem_hamiltonian(l)?;
        let spectrum = dense_eigh(&op)?;
        let ground = spectrum.values()[0];
        let shifted = spectrum.values().iter().map(|e| e - ground).collect();
        Ok(Self {
            op,
            spectrum,
            shifted,
        })
    }

    pub fn op(&self) -> &SparseOperator {
        &self.op
    }

    pub fn ground_energy(&self) -> f64 {
        self.spectrum.values()[0]
    }

    /// Ascending eigenvalues minus the ground energy.
    pub fn shifted_energies(&self) -> &[f64] {
        &self.shifted
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }
}

/// Ground-shifted subsystem energy split into ergotropy and bound energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgotropyBreakdown {
    pub energy: f64,
    pub ergotropy: f64,
    pub bound: f64,
    /// `tr(rho_A H_A)` before the ground shift.
    pub raw_energy: f64,
}

/// Ergotropy of amplitudes `amps` across `plan`, also returning the entanglement spectrum.
pub fn ergotropy_with_plan(
    plan: &CutPlan,
    amps: &[C64],
    h_a: &SubsystemHamiltonian,
) -> Result<(ErgotropyBreakdown, EntanglementSpectrum)> {
    check_geometry(plan.geometry(), h_a)?;
    let raw_energy = plan.region_expectation(amps, h_a.op())?;
    let energy = raw_energy - h_a.ground_energy();
    let spec = plan.spectrum(amps)?;
    let bound = passive_energy(spec.probs(), h_a.shifted_energies())?;
    Ok((
        ErgotropyBreakdown {
            energy,
            ergotropy: energy - bound,
            bound,
            raw_energy,
        },
        spec,
    ))
}

fn check_geometry(geometry: &CutGeometry, h_a: &SubsystemHamiltonian) -> Result<()> {
    let region = geometry.region();
    if region.len() != 1 {
        return Err(Error::BadGeometry(
            "ergotropy needs a single contiguous region".into(),
        ));
    }
    let expected = ConstrainedBasis::new(region[0].len, Boundary::Open).dim();
    if expected != h_a.op().dim() {
        return Err(Error::DimensionMismatch {
            expected,
            got: h_a.op().dim(),
        });
    }
    Ok(())
}

fn plan_for(state: &StateVector, geometry: &CutGeometry) -> Result<CutPlan> {
    let basis = state
        .chain_basis()
        .ok_or_else(|| Error::InvalidArgument("expand sector states before tracing out".into()))?;
    CutPlan::new(basis, geometry)
}

/// `tr(rho_A H_A) - E_GS(H_A)`.
pub fn subsystem_energy(
    state: &StateVector,
    geometry: &CutGeometry,
    h_a: &SubsystemHamiltonian,
) -> Result<f64> {
    check_geometry(geometry, h_a)?;
    let plan = plan_for(state, geometry)?;
    Ok(plan.region_expectation(state.amps(), h_a.op())? - h_a.ground_energy())
}

pub fn ergotropy(
    state: &StateVector,
    geometry: &CutGeometry,
    h_a: &SubsystemHamiltonian,
) -> Result<ErgotropyBreakdown> {
    let plan = plan_for(state, geometry)?;
    Ok(ergotropy_with_plan(&plan, state.amps(), h_a)?.0)
}

/// Unitary mapping the `k`-th most populated eigenvector of `rho` onto the
/// `k`-th lowest eigenvector of `H_A`; zero-population directions are paired
/// with the remaining levels in index order.
pub fn optimal_unitary(rho: &Mat<C64>, h_a: &SubsystemHamiltonian) -> Result<Mat<C64>> {
    let n = rho.nrows();
    if n != h_a.op().dim() || rho.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: h_a.op().dim(),
            got: n,
        });
    }
    let evd = rho
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let r = evd.U();
    let e = h_a.spectrum().vectors();
    // U = sum_k |e_k><r_{n-1-k}|, rho eigenvalues being ascending
    Ok(Mat::<C64>::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| r[(j, n - 1 - k)].conj() * e[(i, k)])
            .sum()
    }))
}

/// `tr(rho H)` for a dense `rho` and a sparse real `H`.
pub fn trace_with(rho: &Mat<C64>, h: &SparseOperator) -> f64 {
    (0..h.dim())
        .map(|r| h.row(r).map(|(c, v)| (rho[(c, r)] * v).re).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn passive_energy_examples() {
        let e = [0.0, SQRT_2, 2.0 * SQRT_2];
        assert_eq!(passive_energy(&[1.0, 0.0, 0.0], &e).unwrap(), 0.0);
        let q = passive_energy(&[0.5, 0.3, 0.2], &e).unwrap();
        assert!((q - 0.7 * SQRT_2).abs() < 1e-15);
        let uniform = passive_energy(&[1.0 / 3.0; 3], &e).unwrap();
        assert!((uniform - SQRT_2).abs() < 1e-15);
        assert!(passive_energy(&[0.25; 4], &e).is_err());
    }

    #[test]
    fn rearrangement_minimum() {
        // brute force over all orderings of three populations
        let e = [0.0, SQRT_2, 2.0 * SQRT_2];
        let p = [0.5, 0.3, 0.2];
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let min = perms
            .iter()
            .map(|pm| pm.iter().enumerate().map(|(k, &j)| p[j] * e[k]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert!((passive_energy(&p, &e).unwrap() - min).abs() < 1e-15);
    }

    #[test]
    fn subsystem_l2_energies() {
        let h = SubsystemHamiltonian::new(2).unwrap();
        assert!((h.ground_energy() + SQRT_2).abs() < 1e-14);
        assert!((h.shifted_energies()[2] - 2.0 * SQRT_2).abs() < 1e-14);
    }
}
