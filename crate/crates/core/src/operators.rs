//! Sparse Hamiltonians and diagonal observables on constrained bases.
//!
//! All matrix elements are real. States are complex because time evolution
//! makes them so, and the products below accept either.

use std::collections::BTreeMap;

use faer::Mat;

use crate::hilbert::{Boundary, ConstrainedBasis, SectorBasis};
use crate::{Error, Result, C64};

/// Real operator in compressed sparse row form, without duplicate entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Builds an operator from `(row, col, value)` triplets; repeated positions are summed.
    ///
    /// When `hermitian` is set the assembled matrix is checked for symmetry.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
        hermitian: bool,
    ) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.max(c) + 1,
                });
            }
            *rows[r].entry(c).or_insert(0.0) += v;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        let op = Self {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian,
        };
        if hermitian {
            let asym = op.max_asymmetry();
            if asym >= 1e-12 {
                return Err(Error::NotHermitian(asym));
            }
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored `(column, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// Matrix element, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// Largest `|M_rc - M_cr|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = (0..self.dim)
            .flat_map(|r| self.row(r).map(move |(c, v)| (c, r, v)))
            .collect();
        Self::from_triplets(self.dim, triplets, false)
            .map(|mut t| {
                t.hermitian = self.hermitian;
                t
            })
            .expect("transpose keeps indices in range")
    }

    /// Elementwise sum of two operators of equal dimension.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let triplets = (0..self.dim)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .chain((0..other.dim).flat_map(|r| other.row(r).map(move |(c, v)| (r, c, v))));
        let mut sum = Self::from_triplets(self.dim, triplets, false)?;
        sum.hermitian = sum.max_asymmetry() < 1e-12;
        Ok(sum)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }

    /// `out = M x` without allocating.
    pub fn apply_into(&self, x: &[C64], out: &mut [C64]) -> Result<()> {
        self.check_len(x.len())?;
        self.check_len(out.len())?;
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k]] * self.vals[k];
            }
            *o = acc;
        }
        Ok(())
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    pub fn apply_real(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok((0..self.dim)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect())
    }

    /// `Re <x|M|x>`; the imaginary part vanishes for Hermitian `M`.
    pub fn expectation(&self, x: &[C64]) -> Result<f64> {
        let mx = self.apply(x)?;
        Ok(x.iter().zip(&mx).map(|(a, b)| (a.conj() * b).re).sum())
    }
}

/// Real diagonal operator, one value per basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    values: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                got: x.len(),
            });
        }
        Ok(x.iter().zip(&self.values).map(|(a, d)| a * d).collect())
    }

    /// `<x|D^power|x>` for a normalized `x`.
    pub fn moment(&self, x: &[C64], power: i32) -> Result<f64> {
        if x.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.values)
            .map(|(a, d)| a.norm_sqr() * d.powi(power))
            .sum())
    }

    pub fn expectation(&self, x: &[C64]) -> Result<f64> {
        self.moment(x, 1)
    }

    pub fn variance(&self, x: &[C64]) -> Result<f64> {
        let m1 = self.moment(x, 1)?;
        Ok(self.moment(x, 2)? - m1 * m1)
    }

    pub fn to_sparse(&self) -> SparseOperator {
        SparseOperator::from_triplets(
            self.dim(),
            self.values.iter().enumerate().map(|(i, &v)| (i, i, v)),
            true,
        )
        .expect("diagonal is symmetric")
    }
}

// Emits every constrained flip of `basis` as (target, source) pairs.
// `flip_allowed(config, bit)` decides whether bit may toggle.
fn constrained_flips(
    basis: &ConstrainedBasis,
    mut flip_allowed: impl FnMut(u64, usize) -> bool,
) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for (j, &c) in basis.configs().iter().enumerate() {
        for bit in 0..basis.length() {
            if !flip_allowed(c, bit) {
                continue;
            }
            let target = c ^ (1 << bit);
            if let Some(i) = basis.index_of(target) {
                out.push((i, j, 1.0));
            }
        }
    }
    out
}

#[inline]
fn neighbours_empty(config: u64, bit: usize, length: usize, boundary: Boundary) -> bool {
    let occupied = |b: usize| (config >> b) & 1 == 1;
    match boundary {
        Boundary::Periodic => {
            if length == 1 {
                return true;
            }
            let left = (bit + length - 1) % length;
            let right = (bit + 1) % length;
            !occupied(left) && !occupied(right)
        }
        Boundary::Open => {
            let left_ok = bit == 0 || !occupied(bit - 1);
            let right_ok = bit + 1 == length || !occupied(bit + 1);
            left_ok && right_ok
        }
    }
}

/// `H = sum_i P_{i-1} X_i P_{i+1}` on a periodic chain.
pub fn pxp_hamiltonian(basis: &ConstrainedBasis) -> Result<SparseOperator> {
    if basis.boundary() != Boundary::Periodic {
        return Err(Error::InvalidArgument(
            "pxp_hamiltonian needs a periodic basis".into(),
        ));
    }
    let length = basis.length();
    let triplets = constrained_flips(basis, |c, b| {
        neighbours_empty(c, b, length, Boundary::Periodic)
    });
    SparseOperator::from_triplets(basis.dim(), triplets, true)
}

/// The PXP Hamiltonian restricted to a symmetry sector.
pub fn pxp_sector_hamiltonian(sector: &SectorBasis) -> Result<SparseOperator> {
    let parent = sector.parent();
    let length = parent.length();
    let mut triplets = Vec::new();
    // <r_b|H|a> = h_ba * w_b(r_b), and <r_b|H|a> sums w_a over the flips of r_b.
    for (b, (&rep, &norm)) in sector
        .representatives()
        .iter()
        .zip(sector.norms())
        .enumerate()
    {
        for bit in 0..length {
            if !neighbours_empty(rep, bit, length, Boundary::Periodic) {
                continue;
            }
            let target = rep ^ (1 << bit);
            let idx = parent
                .index_of(target)
                .expect("constrained flip stays legal");
            if let Some((a, w)) = sector.member(idx) {
                triplets.push((b, a, w / norm));
            }
        }
    }
    let mut op = SparseOperator::from_triplets(sector.dim(), triplets, false)?;
    let asym = op.max_asymmetry();
    if asym >= 1e-12 {
        return Err(Error::NotHermitian(asym));
    }
    op.hermitian = true;
    Ok(op)
}

/// Open-chain PXP on `l` sites with bare edge flips `X_1 P_2` and `P_{l-1} X_l`.
pub fn subsystem_hamiltonian(l: usize) -> Result<SparseOperator> {
    if l < 2 {
        return Err(Error::InvalidArgument(format!(
            "subsystem needs at least 2 sites, got {l}"
        )));
    }
    let basis = ConstrainedBasis::new(l, Boundary::Open);
    let triplets = constrained_flips(&basis, |c, b| neighbours_empty(c, b, l, Boundary::Open));
    SparseOperator::from_triplets(basis.dim(), triplets, true)
}

/// FSA raising and lowering parts `(H+, H-)` of the periodic PXP Hamiltonian.
///
/// `H+` raises on even (1-indexed) sites and lowers on odd ones, so it carries
/// the Néel state with 1s on odd sites toward its partner.
pub fn fsa_raising(basis: &ConstrainedBasis) -> Result<(SparseOperator, SparseOperator)> {
    if basis.boundary() != Boundary::Periodic || !basis.length().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "FSA raising needs a periodic chain of even length".into(),
        ));
    }
    let length = basis.length();
    let triplets = constrained_flips(basis, |c, b| {
        if !neighbours_empty(c, b, length, Boundary::Periodic) {
            return false;
        }
        let occupied = (c >> b) & 1 == 1;
        // bit b is site b + 1: odd bit -> even site -> raise
        if b % 2 == 1 {
            !occupied
        } else {
            occupied
        }
    });
    let plus = SparseOperator::from_triplets(basis.dim(), triplets, false)?;
    let minus = plus.transpose();
    Ok((plus, minus))
}

/// Staggered magnetization `O = sum_i (-1)^{i+1} Z_i` with `Z = +1` on an empty site.
pub fn staggered_z(basis: &ConstrainedBasis) -> DiagonalOperator {
    let values = basis
        .configs()
        .iter()
        .map(|&c| {
            (0..basis.length())
                .map(|b| {
                    let z = if (c >> b) & 1 == 1 { -1.0 } else { 1.0 };
                    if b % 2 == 0 {
                        z
                    } else {
                        -z
                    }
                })
                .sum()
        })
        .collect();
    DiagonalOperator::new(values)
}

/// Particle-hole operator `prod_i Z_i`, which anticommutes with the PXP Hamiltonian.
pub fn particle_hole(basis: &ConstrainedBasis) -> DiagonalOperator {
    DiagonalOperator::new(
        basis
            .configs()
            .iter()
            .map(|&c| if c.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
            .collect(),
    )
}

/// Exact sparse product; see [`SparseOperator::apply`].
pub fn apply(op: &SparseOperator, state: &[C64]) -> Result<Vec<C64>> {
    op.apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::build_chain_basis;

    fn cvec(x: &[f64]) -> Vec<C64> {
        x.iter().map(|&v| C64::new(v, 0.0)).collect()
    }

    #[test]
    fn pxp_on_vacuum_l4() {
        let basis = build_chain_basis(4, Boundary::Periodic);
        let h = pxp_hamiltonian(&basis).unwrap();
        let mut e = vec![0.0; basis.dim()];
        e[0] = 1.0;
        let out = h.apply_real(&e).unwrap();
        for (i, &c) in basis.configs().iter().enumerate() {
            let expected = if c.count_ones() == 1 { 1.0 } else { 0.0 };
            assert_eq!(out[i], expected);
        }
        let z2 = basis.index_of(0b0101).unwrap();
        assert_eq!(h.get(z2, z2), 0.0);
    }

    #[test]
    fn subsystem_l2_matrix() {
        let h = subsystem_hamiltonian(2).unwrap();
        let dense = h.to_dense();
        let expected = [[0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        for (r, row) in expected.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(dense[(r, c)], v);
            }
        }
        assert!(subsystem_hamiltonian(1).is_err());
    }

    #[test]
    fn subsystem_l3_has_three_terms() {
        // On the empty state each of X1P2, P1X2P3, P2X3 fires once.
        let h = subsystem_hamiltonian(3).unwrap();
        let basis = build_chain_basis(3, Boundary::Open);
        let mut e = vec![0.0; basis.dim()];
        e[0] = 1.0;
        let out = h.apply_real(&e).unwrap();
        assert_eq!(out.iter().sum::<f64>(), 3.0);
        assert!(h.is_hermitian());
    }

    #[test]
    fn fsa_lowering_on_neel() {
        let basis = build_chain_basis(4, Boundary::Periodic);
        let (hp, hm) = fsa_raising(&basis).unwrap();
        let mut e = vec![0.0; basis.dim()];
        e[basis.index_of(0b0101).unwrap()] = 1.0;
        let out = hp.apply_real(&e).unwrap();
        for (i, &c) in basis.configs().iter().enumerate() {
            let expected = if c == 0b0100 || c == 0b0001 { 1.0 } else { 0.0 };
            assert_eq!(out[i], expected);
        }
        let h = pxp_hamiltonian(&basis).unwrap();
        let sum = hp.add(&hm).unwrap();
        assert_eq!(sum.to_dense(), h.to_dense());
    }

    #[test]
    fn staggered_values() {
        let basis = build_chain_basis(4, Boundary::Periodic);
        let o = staggered_z(&basis);
        assert_eq!(o.values()[basis.index_of(0b0101).unwrap()], -4.0);
        assert_eq!(o.values()[0], 0.0);
        assert_eq!(o.values()[basis.index_of(0b1010).unwrap()], 4.0);
    }

    #[test]
    fn duplicates_are_merged_and_dimension_checked() {
        let op = SparseOperator::from_triplets(2, [(0, 1, 1.0), (0, 1, 1.0), (1, 0, 2.0)], true)
            .unwrap();
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(0, 1), 2.0);
        assert!(SparseOperator::from_triplets(2, [(0, 1, 1.0)], true).is_err());
        assert!(op.apply(&cvec(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn diagonal_identity_apply() {
        let d = DiagonalOperator::new(vec![1.0; 3]);
        let x = vec![C64::new(0.3, -0.1), C64::new(1.0, 2.0), C64::new(0.0, 0.5)];
        assert_eq!(d.apply(&x).unwrap(), x);
    }
}
