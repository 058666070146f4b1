//! Dense diagonalization and extraction of the degenerate zero-energy shell.

use faer::{Mat, Side};

use crate::operators::SparseOperator;
use crate::{Error, Result};

/// Default half-width of the zero-energy window.
pub const SHELL_TOL: f64 = 1e-10;

/// Full eigendecomposition of a real symmetric operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: Mat<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Orthonormal eigenvectors as columns, aligned with [`Self::values`].
    pub fn vectors(&self) -> &Mat<f64> {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.col(k).iter().copied().collect()
    }

    /// `max_k |H v_k - lambda_k v_k|_2`.
    pub fn max_residual(&self, op: &SparseOperator) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..self.dim() {
            let v = self.vector(k);
            let hv = op.apply_real(&v)?;
            let r: f64 = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - self.values[k] * b).powi(2))
                .sum();
            worst = worst.max(r.sqrt());
        }
        Ok(worst)
    }
}

/// Diagonalizes a Hermitian operator densely.
pub fn dense_eigh(op: &SparseOperator) -> Result<SpectralDecomposition> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian(op.max_asymmetry()));
    }
    dense_eigh_matrix(&op.to_dense())
}

/// Diagonalizes a dense real symmetric matrix (lower triangle is read).
pub fn dense_eigh_matrix(m: &Mat<f64>) -> Result<SpectralDecomposition> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let vectors = evd.U().to_owned();
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    Ok(SpectralDecomposition { values, vectors })
}

/// Indices of eigenvalues with `|lambda| < tol` (strict, so `tol = 0` yields nothing).
pub fn zero_energy_shell(dec: &SpectralDecomposition, tol: f64) -> Vec<usize> {
    dec.values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() < tol)
        .map(|(i, _)| i)
        .collect()
}

/// Checks that the shell size does not change between the two tolerances and
/// returns the shell extracted at `tol`.
pub fn stable_zero_shell(dec: &SpectralDecomposition, tol: f64) -> Result<Vec<usize>> {
    let small = zero_energy_shell(dec, 1e-12);
    let large = zero_energy_shell(dec, 1e-8);
    if small.len() != large.len() {
        return Err(Error::UnstableShell {
            small: small.len(),
            large: large.len(),
            tol_small: 1e-12,
            tol_large: 1e-8,
        });
    }
    let shell = zero_energy_shell(dec, tol);
    if shell.is_empty() {
        return Err(Error::EmptyShell);
    }
    Ok(shell)
}

/// Smallest eigenvalue.
pub fn ground_energy(op: &SparseOperator) -> Result<f64> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian(op.max_asymmetry()));
    }
    let vals = op
        .to_dense()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

/// Largest `|lambda_k + lambda_{n-1-k}|` over the sorted spectrum, zero for a `±E` paired spectrum.
pub fn pairing_residual(values: &[f64]) -> f64 {
    let n = values.len();
    (0..n)
        .map(|k| (values[k] + values[n - 1 - k]).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_chain_basis, Boundary};
    use crate::operators::{pxp_hamiltonian, subsystem_hamiltonian, DiagonalOperator};

    #[test]
    fn l2_subsystem_spectrum() {
        let h = subsystem_hamiltonian(2).unwrap();
        let dec = dense_eigh(&h).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        for (got, want) in dec.values().iter().zip([-s2, 0.0, s2]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!((ground_energy(&h).unwrap() + s2).abs() < 1e-14);
    }

    #[test]
    fn l4_pairing_shell_and_reconstruction() {
        let basis = build_chain_basis(4, Boundary::Periodic);
        let h = pxp_hamiltonian(&basis).unwrap();
        let dec = dense_eigh(&h).unwrap();
        assert!(pairing_residual(dec.values()) < 1e-12);
        assert!(!zero_energy_shell(&dec, 1e-10).is_empty());
        assert!(zero_energy_shell(&dec, 0.0).is_empty());
        assert!(dec.max_residual(&h).unwrap() < 1e-12);
        let v = dec.vectors();
        let n = dec.dim();
        let dense = h.to_dense();
        for r in 0..n {
            for c in 0..n {
                let rec: f64 = (0..n).map(|k| v[(r, k)] * dec.values()[k] * v[(c, k)]).sum();
                assert!((rec - dense[(r, c)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_ground_energy_is_min_entry() {
        let d = DiagonalOperator::new(vec![0.5, -1.25, 3.0]).to_sparse();
        assert_eq!(ground_energy(&d).unwrap(), -1.25);
    }

    #[test]
    fn non_hermitian_rejected() {
        let basis = build_chain_basis(4, Boundary::Periodic);
        let (hp, _) = crate::operators::fsa_raising(&basis).unwrap();
        assert!(matches!(dense_eigh(&hp), Err(Error::NotHermitian(_))));
    }
}
