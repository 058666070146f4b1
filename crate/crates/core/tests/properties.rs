//! Randomized invariants of the constrained-space toolkit.

use std::sync::Arc;

use faer::Mat;
use proptest::prelude::*;

use pxp_core::entanglement::{entropy, CutPlan, EntanglementSpectrum};
use pxp_core::ergotropy::{ergotropy_with_plan, optimal_unitary, passive_energy, trace_with, SubsystemHamiltonian};
use pxp_core::fits::{fit_entropy_scaling, least_squares};
use pxp_core::hilbert::{
    build_chain_basis, invert, is_legal, translate, Boundary, ConstrainedBasis, CutGeometry, Interval,
};
use pxp_core::operators::{particle_hole, pxp_hamiltonian};
use pxp_core::states::norm;
use pxp_core::C64;

fn complex_state(dim: usize, raw: &[(f64, f64)]) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|i| {
            let (a, b) = raw[i % raw.len()];
            // fold the index in so repeated raw entries still differ
            C64::new(a + 0.01 * i as f64, b - 0.007 * (i * i % 13) as f64)
        })
        .collect();
    let n = norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

fn raw_amps() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8..64)
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Periodic), Just(Boundary::Open)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_is_sorted_legal_and_indexable(l in 2usize..15, b in boundary()) {
        let basis = ConstrainedBasis::new(l, b);
        prop_assert!(basis.configs().windows(2).all(|w| w[0] < w[1]));
        for (i, &c) in basis.configs().iter().enumerate() {
            prop_assert!(is_legal(c, l, b));
            prop_assert_eq!(basis.index_of(c), Some(i));
        }
        let illegal = (0..1u64 << l).find(|&c| !is_legal(c, l, b));
        if let Some(c) = illegal {
            prop_assert!(basis.state_index(c).is_err());
        }
    }

    #[test]
    fn periodic_basis_closed_under_symmetries(l in 3usize..15) {
        let basis = ConstrainedBasis::new(l, Boundary::Periodic);
        for &c in basis.configs() {
            prop_assert!(basis.index_of(translate(c, l)).is_some());
            prop_assert!(basis.index_of(invert(c, l)).is_some());
        }
        let mut t = basis.translation_map().unwrap();
        t.sort_unstable();
        prop_assert_eq!(t, (0..basis.dim()).collect::<Vec<_>>());
    }

    #[test]
    fn split_merge_roundtrip(l in 4usize..13, start in 0usize..12, len in 1usize..12) {
        let start = start % l;
        let len = 1 + len % (l - 1);
        let g = CutGeometry::new(l, &[Interval::new(start, len)]).unwrap();
        let basis = build_chain_basis(l, Boundary::Periodic);
        for &c in basis.configs() {
            let (a, b) = g.split(c);
            prop_assert_eq!(g.merge(a, b), c);
        }
    }

    #[test]
    fn hamiltonian_commutes_with_lattice_symmetries(l in 3usize..13) {
        let basis = build_chain_basis(l, Boundary::Periodic);
        let h = pxp_hamiltonian(&basis).unwrap();
        let t = basis.translation_map().unwrap();
        let p = basis.inversion_map().unwrap();
        for r in 0..h.dim() {
            for (c, v) in h.row(r) {
                prop_assert_eq!(h.get(t[r], t[c]), v);
                prop_assert_eq!(h.get(p[r], p[c]), v);
            }
        }
    }

    #[test]
    fn particle_hole_anticommutes(l in 3usize..13) {
        let basis = build_chain_basis(l, Boundary::Periodic);
        let h = pxp_hamiltonian(&basis).unwrap();
        let ph = particle_hole(&basis);
        for r in 0..h.dim() {
            for (c, v) in h.row(r) {
                prop_assert_eq!(ph.values()[r] * v * ph.values()[c], -v);
            }
        }
    }

    #[test]
    fn apply_is_linear(l in 4usize..11, raw_x in raw_amps(), raw_y in raw_amps(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let basis = build_chain_basis(l, Boundary::Periodic);
        let h = pxp_hamiltonian(&basis).unwrap();
        let x = complex_state(basis.dim(), &raw_x);
        let y = complex_state(basis.dim(), &raw_y);
        let combo: Vec<C64> = x.iter().zip(&y).map(|(p, q)| p * a + q * b).collect();
        let lhs = h.apply(&combo).unwrap();
        let hx = h.apply(&x).unwrap();
        let hy = h.apply(&y).unwrap();
        for k in 0..lhs.len() {
            prop_assert!((lhs[k] - (hx[k] * a + hy[k] * b)).norm() < 1e-12);
        }
    }

    #[test]
    fn complementary_entropies_agree_and_mi_is_nonnegative(
        raw in raw_amps(), start in 0usize..8, len in 1usize..4, gap in 1usize..3
    ) {
        let l = 8;
        let basis = build_chain_basis(l, Boundary::Periodic);
        let psi = complex_state(basis.dim(), &raw);
        let a = Interval::new(start, len);
        let g = CutGeometry::new(l, &[a]).unwrap();
        let plan = CutPlan::new(&basis, &g).unwrap();
        let comp = CutGeometry::new(l, g.complement()).unwrap();
        let comp_plan = CutPlan::new(&basis, &comp).unwrap();
        let s_a = plan.entropy(&psi).unwrap();
        prop_assert!((s_a - comp_plan.entropy(&psi).unwrap()).abs() < 1e-10);

        let c = Interval::new((start + len + gap) % l, 2);
        let gc = CutGeometry::new(l, &[c]).unwrap();
        let gac = CutGeometry::new(l, &[a, c]).unwrap();
        let s_c = CutPlan::new(&basis, &gc).unwrap().entropy(&psi).unwrap();
        let s_ac = CutPlan::new(&basis, &gac).unwrap().entropy(&psi).unwrap();
        prop_assert!(s_a + s_c - s_ac >= -1e-10);
    }

    #[test]
    fn spectrum_is_squared_singular_values(raw in raw_amps(), start in 0usize..10, len in 1usize..6) {
        let l = 10;
        let basis = build_chain_basis(l, Boundary::Periodic);
        let psi = complex_state(basis.dim(), &raw);
        let g = CutGeometry::new(l, &[Interval::new(start, len)]).unwrap();
        let plan = CutPlan::new(&basis, &g).unwrap();
        let spec = plan.spectrum(&psi).unwrap();
        let m = plan.amplitude_matrix(&psi).unwrap();
        let mut sv: Vec<f64> = m.singular_values().unwrap().iter().map(|s| s * s).filter(|&p| p > 1e-14).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let probs: Vec<f64> = spec.probs().iter().copied().filter(|&p| p > 1e-14).collect();
        prop_assert_eq!(probs.len(), sv.len());
        for (p, s) in probs.iter().zip(&sv) {
            prop_assert!((p - s).abs() < 1e-12);
        }
        let total: f64 = spec.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_splits_into_nonnegative_parts(raw in raw_amps(), l in prop_oneof![Just(8usize), Just(10), Just(12)]) {
        let basis = build_chain_basis(l, Boundary::Periodic);
        let psi = complex_state(basis.dim(), &raw);
        let plan = CutPlan::new(&basis, &CutGeometry::half_chain(l)).unwrap();
        let h_a = SubsystemHamiltonian::new(l / 2).unwrap();
        let (erg, _) = ergotropy_with_plan(&plan, &psi, &h_a).unwrap();
        prop_assert!((erg.energy - erg.ergotropy - erg.bound).abs() < 1e-12);
        prop_assert!(erg.ergotropy >= -1e-10);
        prop_assert!(erg.bound >= -1e-10);
        prop_assert!(erg.energy >= -1e-10);
    }

    #[test]
    fn optimal_unitary_reaches_passive_energy_and_beats_random_ones(
        raw in raw_amps(), gen in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64)
    ) {
        let l = 8;
        let basis = build_chain_basis(l, Boundary::Periodic);
        let psi = complex_state(basis.dim(), &raw);
        let plan = CutPlan::new(&basis, &CutGeometry::half_chain(l)).unwrap();
        let h_a = SubsystemHamiltonian::new(l / 2).unwrap();
        let (erg, _) = ergotropy_with_plan(&plan, &psi, &h_a).unwrap();
        let rho = plan.reduced_density(&psi).unwrap().matrix().clone();
        let n = rho.nrows();

        let conj_by = |u: &Mat<C64>| -> f64 {
            let rotated = u * &rho * u.adjoint();
            trace_with(&rotated, h_a.op()) - h_a.ground_energy()
        };
        let u = optimal_unitary(&rho, &h_a).unwrap();
        let uu = &u * u.adjoint();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((uu[(i, j)] - C64::new(target, 0.0)).norm() < 1e-10);
            }
        }
        prop_assert!((conj_by(&u) - erg.bound).abs() < 1e-10);

        let g = Mat::<C64>::from_fn(n, n, |i, j| {
            let (a, b) = gen[(i * n + j) % gen.len()];
            C64::new(a + 0.1 * i as f64, b - 0.1 * j as f64)
        });
        let q = g.qr().compute_Q();
        prop_assert!(conj_by(&q) >= erg.bound - 1e-10);
    }

    #[test]
    fn passive_energy_ignores_order_within_ties(
        probs in prop::collection::vec(prop_oneof![Just(0.1f64), Just(0.2), Just(0.05)], 1..8),
        seed in any::<u64>()
    ) {
        let energies: Vec<f64> = (0..8).map(|k| (k / 2) as f64).collect();
        let spec = EntanglementSpectrum::from_eigenvalues(probs.clone()).unwrap();
        let mut shuffled = probs.clone();
        let k = shuffled.len();
        shuffled.rotate_left((seed as usize) % k);
        let spec2 = EntanglementSpectrum::from_eigenvalues(shuffled).unwrap();
        prop_assert_eq!(spec.probs(), spec2.probs());
        let q1 = passive_energy(spec.probs(), &energies).unwrap();
        let q2 = passive_energy(spec2.probs(), &energies).unwrap();
        prop_assert_eq!(q1, q2);
        prop_assert_eq!(entropy(&spec), entropy(&spec2));
    }

    #[test]
    fn fits_do_not_depend_on_point_order(ys in prop::collection::vec(-3.0f64..3.0, 5), rot in 0usize..5) {
        let pts: Vec<(f64, f64)> = [8.0, 10.0, 12.0, 14.0, 16.0].iter().zip(&ys).map(|(&l, &y)| (l, y)).collect();
        let mut perm = pts.clone();
        perm.rotate_left(rot);
        perm.swap(0, 4);
        prop_assert_eq!(fit_entropy_scaling(&pts).unwrap(), fit_entropy_scaling(&perm).unwrap());
        let quad = |x: f64| vec![1.0, x, x * x];
        prop_assert_eq!(
            least_squares("q", &["a", "b", "c"], &pts, quad).unwrap(),
            least_squares("q", &["a", "b", "c"], &perm, quad).unwrap()
        );
    }
}

#[test]
fn shared_basis_arc_is_reusable() {
    let basis = Arc::new(build_chain_basis(6, Boundary::Periodic));
    let plan = CutPlan::new(&basis, &CutGeometry::half_chain(6)).unwrap();
    let psi = complex_state(basis.dim(), &[(0.3, 0.1), (-0.2, 0.4)]);
    assert_eq!(plan.entropy(&psi).unwrap(), plan.entropy(&psi).unwrap());
}
