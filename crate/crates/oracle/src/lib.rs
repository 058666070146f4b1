//! Brute-force reference constructions in the full `2^L` tensor-product space.
//!
//! Everything here is deliberately naive: operators are dense Kronecker
//! products, states are full product vectors, and constrained objects are
//! obtained only by projecting afterwards. Site `i` (1-indexed) is bit `i - 1`
//! of a configuration index. Used by tests to check the constrained-space code.

pub type Matrix = Vec<Vec<f64>>;

/// Single-site operators in the `(|0>, |1>)` basis, `|1>` being the excited state.
pub const IDENTITY: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];
pub const PAULI_X: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
/// Projector onto the ground state `|0>`.
pub const PROJ_DOWN: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 0.0]];

/// Whether no two neighbouring sites are both excited.
pub fn is_blockade_legal(config: u64, length: usize, periodic: bool) -> bool {
    let bit = |i: usize| (config >> i) & 1 == 1;
    if length < 64 && config >> length != 0 {
        return false;
    }
    for i in 0..length {
        let j = i + 1;
        let neighbour = if j < length {
            Some(j)
        } else if periodic && length >= 3 {
            Some(0)
        } else {
            None
        };
        if let Some(j) = neighbour {
            if bit(i) && bit(j) {
                return false;
            }
        }
    }
    true
}

/// All legal configurations by filtering every bitstring.
pub fn legal_configs(length: usize, periodic: bool) -> Vec<u64> {
    (0..1u64 << length)
        .filter(|&c| is_blockade_legal(c, length, periodic))
        .collect()
}

pub fn fibonacci(n: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

pub fn lucas(n: usize) -> u64 {
    let (mut a, mut b) = (2u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca) = (a.len(), a[0].len());
    let (rb, cb) = (b.len(), b[0].len());
    let mut out = vec![vec![0.0; ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            if a[i][j] == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `ops[L-1] x ... x ops[0]`, so that `ops[b]` acts on bit `b`.
pub fn kron_chain(ops: &[[[f64; 2]; 2]]) -> Matrix {
    let to_mat = |m: &[[f64; 2]; 2]| vec![m[0].to_vec(), m[1].to_vec()];
    let mut out = vec![vec![1.0]];
    for op in ops.iter().rev() {
        out = kron(&out, &to_mat(op));
    }
    out
}

fn add_into(acc: &mut Matrix, term: &Matrix) {
    for (ra, rt) in acc.iter_mut().zip(term) {
        for (a, t) in ra.iter_mut().zip(rt) {
            *a += t;
        }
    }
}

/// `sum_i P_{i-1} X_i P_{i+1}` on the full periodic chain.
pub fn full_pxp(length: usize) -> Matrix {
    let dim = 1usize << length;
    let mut h = vec![vec![0.0; dim]; dim];
    for site in 0..length {
        let mut ops = vec![IDENTITY; length];
        ops[site] = PAULI_X;
        let left = (site + length - 1) % length;
        let right = (site + 1) % length;
        ops[left] = PROJ_DOWN;
        ops[right] = PROJ_DOWN;
        add_into(&mut h, &kron_chain(&ops));
    }
    h
}

/// Open-chain PXP with bare edge terms on `length` sites.
pub fn full_open_pxp(length: usize) -> Matrix {
    let dim = 1usize << length;
    let mut h = vec![vec![0.0; dim]; dim];
    for site in 0..length {
        let mut ops = vec![IDENTITY; length];
        ops[site] = PAULI_X;
        if site > 0 {
            ops[site - 1] = PROJ_DOWN;
        }
        if site + 1 < length {
            ops[site + 1] = PROJ_DOWN;
        }
        add_into(&mut h, &kron_chain(&ops));
    }
    h
}

/// Restricts a full-space matrix to rows and columns in `configs`.
pub fn restrict(full: &Matrix, configs: &[u64]) -> Matrix {
    configs
        .iter()
        .map(|&r| configs.iter().map(|&c| full[r as usize][c as usize]).collect())
        .collect()
}

/// `exp(-i theta Y / 2) = cos(theta/2) I - i sin(theta/2) Y`, a real matrix.
pub fn rotation(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    // -iY = [[0, -1], [1, 0]]
    [[c, -s], [s, c]]
}

/// The rotated Néel product state `prod_i R |z_i>` in the full space, with
/// `z = 1` on odd (1-indexed) sites.
pub fn full_rotated_neel(length: usize, theta: f64) -> Vec<f64> {
    let r = rotation(theta);
    let site_vec = |b: usize| -> [f64; 2] {
        let excited = b.is_multiple_of(2);
        let col = if excited { 1 } else { 0 };
        [r[0][col], r[1][col]]
    };
    let mut psi = vec![1.0];
    for b in (0..length).rev() {
        let v = site_vec(b);
        psi = psi.iter().flat_map(|&a| [a * v[0], a * v[1]]).collect();
    }
    psi
}

/// Projects a full-space vector onto `configs`; returns the normalized
/// projection and the retained weight.
pub fn project_and_normalize(full: &[f64], configs: &[u64]) -> (Vec<f64>, f64) {
    let kept: Vec<f64> = configs.iter().map(|&c| full[c as usize]).collect();
    let weight: f64 = kept.iter().map(|x| x * x).sum();
    let n = weight.sqrt();
    (kept.iter().map(|x| x / n).collect(), weight)
}

/// Reduced density matrix `(re, im)` on `region` sites of a full-space state.
/// Row index bit `k` is the occupation of `region[k]`.
pub fn full_partial_trace(re: &[f64], im: &[f64], length: usize, region: &[usize]) -> (Matrix, Matrix) {
    let rest: Vec<usize> = (0..length).filter(|s| !region.contains(s)).collect();
    let da = 1usize << region.len();
    let db = 1usize << rest.len();
    let compose = |a: usize, b: usize| -> usize {
        let mut idx = 0usize;
        for (k, &s) in region.iter().enumerate() {
            idx |= ((a >> k) & 1) << s;
        }
        for (k, &s) in rest.iter().enumerate() {
            idx |= ((b >> k) & 1) << s;
        }
        idx
    };
    let mut rho_re = vec![vec![0.0; da]; da];
    let mut rho_im = vec![vec![0.0; da]; da];
    for a in 0..da {
        for a2 in 0..da {
            let (mut sr, mut si) = (0.0, 0.0);
            for b in 0..db {
                let i = compose(a, b);
                let j = compose(a2, b);
                // psi_i conj(psi_j)
                sr += re[i] * re[j] + im[i] * im[j];
                si += im[i] * re[j] - re[i] * im[j];
            }
            rho_re[a][a2] = sr;
            rho_im[a][a2] = si;
        }
    }
    (rho_re, rho_im)
}

/// Embeds constrained amplitudes into the full space.
pub fn embed(amps: &[f64], configs: &[u64], length: usize) -> Vec<f64> {
    let mut full = vec![0.0; 1 << length];
    for (&c, &a) in configs.iter().zip(amps) {
        full[c as usize] = a;
    }
    full
}

fn shift(config: u64, length: usize, by: usize) -> u64 {
    let mut out = 0;
    for b in 0..length {
        if (config >> b) & 1 == 1 {
            out |= 1 << ((b + by) % length);
        }
    }
    out
}

fn mirror(config: u64, length: usize) -> u64 {
    let mut out = 0;
    for b in 0..length {
        if (config >> b) & 1 == 1 {
            out |= 1 << (length - 1 - b);
        }
    }
    out
}

/// Rank of the dihedral projector with characters `T -> t_char`, `I -> i_char`
/// (each +1 or -1) on the legal periodic space, computed as its trace
/// `(1/2L) sum_g chi(g) #fix(g)`.
pub fn sector_rank(length: usize, t_char: f64, i_char: f64) -> usize {
    let configs = legal_configs(length, true);
    let mut tr = 0.0;
    for j in 0..length {
        let chi_t = t_char.powi(j as i32);
        let fixed_t = configs.iter().filter(|&&c| shift(c, length, j) == c).count();
        let fixed_it = configs
            .iter()
            .filter(|&&c| mirror(shift(c, length, j), length) == c)
            .count();
        tr += chi_t * fixed_t as f64 + chi_t * i_char * fixed_it as f64;
    }
    (tr / (2 * length) as f64).round() as usize
}

/// Orbits of two-site translation on the legal periodic configurations.
pub fn two_site_orbits(length: usize) -> Vec<Vec<u64>> {
    let configs = legal_configs(length, true);
    let mut seen = std::collections::HashSet::new();
    let mut orbits = Vec::new();
    for &c in &configs {
        if seen.contains(&c) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = c;
        loop {
            if !orbit.contains(&x) {
                orbit.push(x);
                seen.insert(x);
            }
            x = shift(x, length, 2);
            if x == c {
                break;
            }
        }
        orbits.push(orbit);
    }
    orbits
}

/// The PXP Hamiltonian on the subspace invariant under two-site translation
/// (momenta 0 and pi), in the basis of normalized orbit sums.
pub fn two_site_invariant_pxp(length: usize) -> Matrix {
    let full = full_pxp(length);
    let orbits = two_site_orbits(length);
    let n = orbits.len();
    let mut h = vec![vec![0.0; n]; n];
    for (a, oa) in orbits.iter().enumerate() {
        for (b, ob) in orbits.iter().enumerate() {
            let mut acc = 0.0;
            for &x in oa {
                for &y in ob {
                    acc += full[x as usize][y as usize];
                }
            }
            h[a][b] = acc / ((oa.len() * ob.len()) as f64).sqrt();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences() {
        assert_eq!((0..8).map(fibonacci).collect::<Vec<_>>(), [0, 1, 1, 2, 3, 5, 8, 13]);
        assert_eq!((0..6).map(lucas).collect::<Vec<_>>(), [2, 1, 3, 4, 7, 11]);
    }

    #[test]
    fn counts() {
        assert_eq!(legal_configs(4, true).len(), 7);
        assert_eq!(legal_configs(5, false).len(), 13);
        assert_eq!(legal_configs(2, true), vec![0, 1, 2]);
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = rotation(0.77);
        let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        assert!((det - 1.0).abs() < 1e-15);
        let psi = full_rotated_neel(6, 0.77);
        assert!((psi.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_of_l4_symmetric_sector() {
        assert_eq!(sector_rank(4, 1.0, 1.0), 3);
    }
}
