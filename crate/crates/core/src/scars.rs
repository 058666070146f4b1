//! Forward-scattering tower and scar/thermal separation inside the `E = 0` shell.

use std::sync::Arc;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hilbert::{Boundary, ConstrainedBasis};
use crate::operators::{fsa_raising, pxp_hamiltonian, SparseOperator};
use crate::spectra::{dense_eigh, dense_eigh_matrix, stable_zero_shell, SpectralDecomposition};
use crate::{Error, Result};

/// Weight above which a second shell direction is also considered scar-like.
pub const MULTI_SCAR_THRESHOLD: f64 = 0.5;

/// Normalized states `(H+)^n |Z2>`, `n = 0, 1, ...`.
#[derive(Debug, Clone)]
pub struct FsaTower {
    vectors: Vec<Vec<f64>>,
}

impl FsaTower {
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Builds the tower on a periodic even-length basis. It stops after `L`
/// raisings or as soon as the raising annihilates the state.
pub fn fsa_basis(basis: &ConstrainedBasis) -> Result<FsaTower> {
    let (plus, _) = fsa_raising(basis)?;
    let mut v = vec![0.0; basis.dim()];
    v[basis.state_index(basis.z2_config())?] = 1.0;
    let mut vectors = vec![v.clone()];
    for _ in 0..basis.length() {
        let mut next = plus.apply_real(&v)?;
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            break;
        }
        next.iter_mut().for_each(|x| *x /= norm);
        vectors.push(next.clone());
        v = next;
    }
    Ok(FsaTower { vectors })
}

/// Shell directions ordered by their weight in the FSA subspace.
#[derive(Debug, Clone)]
pub struct ScarSplit {
    /// Largest-weight combination, signed so that its `Z2` amplitude is non-negative.
    pub scar: Vec<f64>,
    /// Remaining orthonormal combinations, descending weight.
    pub thermal: Vec<Vec<f64>>,
    /// Eigenvalues of the projected FSA projector, descending.
    pub fsa_weights: Vec<f64>,
    /// Set when the two largest weights both exceed [`MULTI_SCAR_THRESHOLD`].
    pub multi_scar: bool,
}

/// Diagonalizes `G_ij = sum_n <E_i|n><n|E_j>` over the shell (columns of `shell`).
pub fn separate_scar(shell: &Mat<f64>, tower: &FsaTower) -> Result<ScarSplit> {
    let s = shell.ncols();
    if s == 0 {
        return Err(Error::EmptyShell);
    }
    let dim = shell.nrows();
    if let Some(v) = tower.vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    // overlaps[n, i] = <n|E_i>
    let overlaps = Mat::<f64>::from_fn(tower.len(), s, |n, i| {
        tower.vectors[n]
            .iter()
            .enumerate()
            .map(|(k, x)| x * shell[(k, i)])
            .sum()
    });
    let g = overlaps.transpose() * &overlaps;
    let dec = dense_eigh_matrix(&g)?;
    let order: Vec<usize> = (0..s).rev().collect();
    let fsa_weights: Vec<f64> = order.iter().map(|&k| dec.values()[k]).collect();
    let combine = |k: usize| -> Vec<f64> {
        (0..dim)
            .map(|r| (0..s).map(|i| shell[(r, i)] * dec.vectors()[(i, k)]).sum())
            .collect()
    };
    let mut scar = combine(order[0]);
    let z2_overlap: f64 = tower.vectors[0].iter().zip(&scar).map(|(a, b)| a * b).sum();
    if z2_overlap < 0.0 {
        scar.iter_mut().for_each(|x| *x = -*x);
    }
    let thermal = order[1..].iter().map(|&k| combine(k)).collect();
    let multi_scar = s > 1 && fsa_weights[1] > MULTI_SCAR_THRESHOLD;
    if multi_scar {
        log::warn!(
            "two shell directions carry FSA weight above {MULTI_SCAR_THRESHOLD}: {:.4}, {:.4}; keeping the first",
            fsa_weights[0],
            fsa_weights[1]
        );
    }
    Ok(ScarSplit {
        scar,
        thermal,
        fsa_weights,
        multi_scar,
    })
}

/// Indices of the thermal vectors to use: all of them when there are at most
/// `max_thermal`, otherwise a sorted uniform sample drawn from `seed`.
pub fn thermal_subsample(n_thermal: usize, max_thermal: usize, seed: u64) -> Vec<usize> {
    if n_thermal <= max_thermal {
        return (0..n_thermal).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, n_thermal, max_thermal).into_vec();
    picked.sort_unstable();
    picked
}

/// Everything produced by diagonalizing one chain length and splitting its shell.
#[derive(Debug, Clone)]
pub struct Separation {
    pub basis: Arc<ConstrainedBasis>,
    pub hamiltonian: SparseOperator,
    pub spectrum: SpectralDecomposition,
    pub shell: Vec<usize>,
    /// Smallest `|E|` outside the shell.
    pub shell_gap: f64,
    pub split: ScarSplit,
}

/// Full-space diagonalization, gap-checked shell extraction and scar separation.
pub fn separate_for_length(length: usize, shell_tol: f64) -> Result<Separation> {
    let basis = Arc::new(ConstrainedBasis::new(length, Boundary::Periodic));
    let hamiltonian = pxp_hamiltonian(&basis)?;
    let spectrum = dense_eigh(&hamiltonian)?;
    let shell = stable_zero_shell(&spectrum, shell_tol)?;
    let shell_gap = spectrum
        .values()
        .iter()
        .filter(|v| v.abs() >= shell_tol)
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let vectors = Mat::<f64>::from_fn(basis.dim(), shell.len(), |r, i| {
        spectrum.vectors()[(r, shell[i])]
    });
    let tower = fsa_basis(&basis)?;
    let split = separate_scar(&vectors, &tower)?;
    log::info!(
        "L={length}: dim {}, shell {}, gap {shell_gap:.3e}, top FSA weight {:.4}",
        basis.dim(),
        shell.len(),
        split.fsa_weights[0]
    );
    Ok(Separation {
        basis,
        hamiltonian,
        spectrum,
        shell,
        shell_gap,
        split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::build_chain_basis;

    #[test]
    fn tower_l4() {
        let basis = build_chain_basis(4, Boundary::Periodic);
        let tower = fsa_basis(&basis).unwrap();
        let z2 = basis.index_of(0b0101).unwrap();
        assert_eq!(tower.vectors()[0][z2], 1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v1 = &tower.vectors()[1];
        assert!((v1[basis.index_of(0b0100).unwrap()] - h).abs() < 1e-15);
        assert!((v1[basis.index_of(0b0001).unwrap()] - h).abs() < 1e-15);
        for (m, a) in tower.vectors().iter().enumerate() {
            for (n, b) in tower.vectors().iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
        // the last state is the partner Neel state
        let last = tower.vectors().last().unwrap();
        let anti = basis.index_of(0b1010).unwrap();
        let best = (0..basis.dim())
            .max_by(|&i, &j| last[i].abs().total_cmp(&last[j].abs()))
            .unwrap();
        assert_eq!(best, anti);
    }

    #[test]
    fn subsample_is_deterministic() {
        assert_eq!(thermal_subsample(5, 10, 1), vec![0, 1, 2, 3, 4]);
        let a = thermal_subsample(100, 10, 7);
        assert_eq!(a, thermal_subsample(100, 10, 7));
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn separation_l10() {
        let sep = separate_for_length(10, 1e-10).unwrap();
        let split = &sep.split;
        assert!(split.fsa_weights[0] > 0.9);
        assert!(split.fsa_weights.windows(2).all(|w| w[0] >= w[1] - 1e-14));
        assert!(split.fsa_weights.iter().all(|&w| (-1e-10..=1.0 + 1e-10).contains(&w)));
        assert!(!split.multi_scar);
        for t in &split.thermal {
            let dot: f64 = t.iter().zip(&split.scar).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-10);
            let ht = sep.hamiltonian.apply_real(t).unwrap();
            assert!(ht.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-8);
        }
        assert!(split.fsa_weights[1] < 0.1);
    }
}
