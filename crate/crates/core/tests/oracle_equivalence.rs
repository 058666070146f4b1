//! Constrained-space constructions against brute-force full-space ones.

use std::sync::Arc;

use pxp_core::entanglement::CutPlan;
use pxp_core::hilbert::{
    build_chain_basis, build_symmetric_sector, Boundary, ConstrainedBasis, CutGeometry, Interval,
    Inversion, Momentum,
};
use pxp_core::operators::{pxp_hamiltonian, pxp_sector_hamiltonian, subsystem_hamiltonian};
use pxp_core::spectra::{dense_eigh, dense_eigh_matrix};
use pxp_core::states::{rotated_state, RotationAngle};
use pxp_core::C64;
use pxp_oracle as oracle;

#[test]
fn dimensions_match_brute_force_counts() {
    for l in 2..=14 {
        let periodic = build_chain_basis(l, Boundary::Periodic);
        let open = build_chain_basis(l, Boundary::Open);
        assert_eq!(periodic.configs(), oracle::legal_configs(l, true).as_slice());
        assert_eq!(open.configs(), oracle::legal_configs(l, false).as_slice());
        assert_eq!(periodic.dim() as u64, oracle::lucas(l));
        assert_eq!(open.dim() as u64, oracle::fibonacci(l + 2));
    }
}

#[test]
fn hamiltonian_matches_full_space_projection() {
    for l in 3..=10 {
        let basis = build_chain_basis(l, Boundary::Periodic);
        let dense = pxp_hamiltonian(&basis).unwrap().to_dense();
        let reference = oracle::restrict(&oracle::full_pxp(l), basis.configs());
        for (r, row) in reference.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(dense[(r, c)], v, "L={l} ({r},{c})");
            }
        }
    }
}

#[test]
fn subsystem_hamiltonian_matches_full_space_projection() {
    for l in 2..=8 {
        let basis = build_chain_basis(l, Boundary::Open);
        let dense = subsystem_hamiltonian(l).unwrap().to_dense();
        let reference = oracle::restrict(&oracle::full_open_pxp(l), basis.configs());
        for (r, row) in reference.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(dense[(r, c)], v);
            }
        }
    }
}

#[test]
fn rotated_state_matches_full_space_rotation() {
    for l in [2, 4, 6, 8, 10] {
        let basis = Arc::new(build_chain_basis(l, Boundary::Periodic));
        for k in 0..=8 {
            let theta = k as f64 * std::f64::consts::PI / 8.0;
            let (psi, survival) = rotated_state(&basis, RotationAngle::new(theta).unwrap()).unwrap();
            let full = oracle::full_rotated_neel(l, theta);
            let (reference, weight) = oracle::project_and_normalize(&full, basis.configs());
            assert!((survival - weight).abs() < 1e-12);
            for (a, b) in psi.amps().iter().zip(&reference) {
                assert!((a.re - b).abs() < 1e-12 && a.im == 0.0, "L={l} theta={theta}");
            }
            // theta = pi maps the Neel state onto its partner, which is legal
            if k > 0 && k < 8 {
                assert!(survival < 1.0);
            }
        }
    }
}

fn region_sites(geometry: &CutGeometry) -> Vec<usize> {
    geometry
        .region()
        .iter()
        .flat_map(|iv| (0..iv.len).map(move |k| (iv.start + k) % geometry.length()))
        .collect()
}

// Concatenated region bits of each product-basis row, in row order.
fn region_rows(geometry: &CutGeometry) -> Vec<u64> {
    let mut rows = vec![0u64];
    let mut offset = 0;
    for iv in geometry.region() {
        let seg = build_chain_basis(iv.len, Boundary::Open);
        rows = rows
            .iter()
            .flat_map(|&r| seg.configs().iter().map(move |&c| r | (c << offset)))
            .collect();
        offset += iv.len;
    }
    rows
}

fn check_rho(basis: &ConstrainedBasis, geometry: &CutGeometry, amps: &[C64]) {
    let l = basis.length();
    let plan = CutPlan::new(basis, geometry).unwrap();
    let rho = plan.reduced_density(amps).unwrap();
    let re: Vec<f64> = amps.iter().map(|a| a.re).collect();
    let im: Vec<f64> = amps.iter().map(|a| a.im).collect();
    let (fr, fi) = oracle::full_partial_trace(
        &oracle::embed(&re, basis.configs(), l),
        &oracle::embed(&im, basis.configs(), l),
        l,
        &region_sites(geometry),
    );
    let rows = region_rows(geometry);
    assert_eq!(rows.len(), rho.dim());
    for (i, &a) in rows.iter().enumerate() {
        for (j, &b) in rows.iter().enumerate() {
            let got = rho.matrix()[(i, j)];
            assert!((got.re - fr[a as usize][b as usize]).abs() < 1e-12);
            assert!((got.im - fi[a as usize][b as usize]).abs() < 1e-12);
        }
    }
    // everything outside the product of open-chain segments must vanish
    let total: f64 = rows.iter().map(|&a| fr[a as usize][a as usize]).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn reduced_density_matches_full_partial_trace() {
    for l in [6, 8, 10] {
        let basis = Arc::new(build_chain_basis(l, Boundary::Periodic));
        let h = pxp_hamiltonian(&basis).unwrap();
        let dec = dense_eigh(&h).unwrap();
        let (psi, _) = rotated_state(&basis, RotationAngle::new(0.9).unwrap()).unwrap();
        // a genuinely complex state: psi evolved for a while
        let evolved = pxp_core::dynamics::evolve_eigenbasis(&dec, psi.amps(), &[1.7])
            .unwrap()
            .remove(0);
        let q = l / 4;
        let geometries = [
            CutGeometry::half_chain(l),
            CutGeometry::new(l, &[Interval::new(1, l / 2)]).unwrap(),
            CutGeometry::new(l, &[Interval::new(l - 1, 3)]).unwrap(),
            CutGeometry::new(l, &[Interval::new(0, q), Interval::new(l / 2, q)]).unwrap(),
        ];
        for g in &geometries {
            check_rho(&basis, g, psi.amps());
            check_rho(&basis, g, &evolved);
        }
    }
}

#[test]
fn sector_dimensions_match_projector_ranks() {
    for l in [2, 4, 6, 8, 10, 12] {
        for (k, t) in [(Momentum::Zero, 1.0), (Momentum::Pi, -1.0)] {
            for (p, i) in [(Inversion::Even, 1.0), (Inversion::Odd, -1.0)] {
                let sector = build_symmetric_sector(l, k, p).unwrap();
                assert_eq!(sector.dim(), oracle::sector_rank(l, t, i), "L={l} {k:?} {p:?}");
            }
        }
    }
    assert_eq!(build_symmetric_sector(4, Momentum::Zero, Inversion::Even).unwrap().dim(), 3);
}

#[test]
fn merged_sector_spectra_match_two_site_invariant_space() {
    for l in [4, 6, 8, 10, 12] {
        let mut merged: Vec<f64> = Vec::new();
        let mut total = 0;
        for k in [Momentum::Zero, Momentum::Pi] {
            for p in [Inversion::Even, Inversion::Odd] {
                let sector = build_symmetric_sector(l, k, p).unwrap();
                total += sector.dim();
                if sector.dim() == 0 {
                    continue;
                }
                let h = pxp_sector_hamiltonian(&sector).unwrap();
                merged.extend(dense_eigh(&h).unwrap().values());
            }
        }
        let reference = oracle::two_site_invariant_pxp(l);
        assert_eq!(total, reference.len());
        let m = faer::Mat::<f64>::from_fn(reference.len(), reference.len(), |i, j| reference[i][j]);
        let expected = dense_eigh_matrix(&m).unwrap();
        merged.sort_by(f64::total_cmp);
        for (a, b) in merged.iter().zip(expected.values()) {
            assert!((a - b).abs() < 1e-8, "L={l}: {a} vs {b}");
        }
    }
}

#[test]
fn l2_sectors_are_complete() {
    let parent = build_chain_basis(2, Boundary::Periodic);
    let mut values = Vec::new();
    for k in [Momentum::Zero, Momentum::Pi] {
        for p in [Inversion::Even, Inversion::Odd] {
            let s = build_symmetric_sector(2, k, p).unwrap();
            if s.dim() > 0 {
                values.extend(dense_eigh(&pxp_sector_hamiltonian(&s).unwrap()).unwrap().values());
            }
        }
    }
    values.sort_by(f64::total_cmp);
    let full = dense_eigh(&pxp_hamiltonian(&parent).unwrap()).unwrap();
    assert_eq!(values.len(), full.dim());
    for (a, b) in values.iter().zip(full.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}
