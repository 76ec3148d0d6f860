//! Property tests over seeded random inputs.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use spt_z2::hamiltonian::{chain_hamiltonian, ed_report, parent_interaction, Boundary, ChainSpec};
use spt_z2::linalg::{frob, frob_diff, trace, ComplexMatrix};
use spt_z2::modular::{bond_vector, modular_data, swap_sign, BipartiteVector};
use spt_z2::mps::{self, invariant_state, marginal, normalize, primitivity, RawTuple};
use spt_z2::random::{random_matrix, random_phase, random_unitary, rng};
use spt_z2::reflection::{z2_index, z2_index_run};
use spt_z2::status::Status;
use spt_z2::{io, zoo, Config};

fn random_tuple(seed: u64, d: usize, k: usize) -> RawTuple {
    let mut r = rng(seed);
    RawTuple::new((0..d).map(|_| random_matrix(&mut r, k, k)).collect()).unwrap()
}

/// `Tr_{last}` of an operator on `(ℂ^d)^{⊗(l+1)}`, site 0 most significant.
fn trace_last_site(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let n = m.nrows() / d;
    ComplexMatrix::from_fn(n, n, |a, b| (0..d).map(|c| m[(a * d + c, b * d + c)]).sum())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn index_is_gauge_invariant(seed in any::<u64>(), s in 0.0f64..1.0) {
        let cfg = Config::default();
        let base = zoo::deformed_aklt(s);
        let zeta = z2_index(&base, &cfg).unwrap().zeta;
        let mut r = rng(seed);
        let w = random_unitary(&mut r, 2);
        let ph = random_phase(&mut r);
        let scale = 0.5 + seed as f64 / u64::MAX as f64;
        let mats = base.mats().iter().map(|m| (&w * m * w.adjoint()) * (ph * scale)).collect();
        let moved = z2_index(&RawTuple::new(mats).unwrap(), &cfg).unwrap();
        prop_assert_eq!(moved.zeta, zeta);
        prop_assert_eq!(zeta, -1);
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), d in 2usize..4, k in 1usize..4) {
        let cfg = Config::default();
        let v = normalize(&random_tuple(seed, d, k), &cfg).unwrap();
        prop_assert!(v.normalization_residual() < cfg.eps_norm);
        let again = normalize(&RawTuple::new(v.mats().to_vec()).unwrap(), &cfg).unwrap();
        for (a, b) in v.mats().iter().zip(again.mats()) {
            prop_assert!(frob_diff(a, b) < 1e-9);
        }
    }

    #[test]
    fn transfer_and_adjoint_are_dual(seed in any::<u64>(), d in 2usize..4, k in 1usize..5) {
        let cfg = Config::default();
        let v = normalize(&random_tuple(seed, d, k), &cfg).unwrap();
        let mut r = rng(seed ^ 0xa5a5);
        let x = random_matrix(&mut r, k, k);
        let y = random_matrix(&mut r, k, k);
        let lhs = trace(&(y.adjoint() * v.transfer().apply(&x)));
        let rhs = trace(&(v.adjoint_transfer().apply(&y).adjoint() * &x));
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
        // Σ v v† = 1 makes E unital and its dual trace preserving
        let one = ComplexMatrix::identity(k, k);
        prop_assert!(frob_diff(&v.transfer().apply(&one), &one) < 1e-9);
        prop_assert!((trace(&v.adjoint_transfer().apply(&x)) - trace(&x)).norm() < 1e-9);
    }

    #[test]
    fn marginals_are_consistent_states(seed in any::<u64>(), k in 1usize..4) {
        let cfg = Config::default();
        let d = 2;
        let v = normalize(&random_tuple(seed, d, k), &cfg).unwrap();
        prop_assume!(primitivity(&v, &cfg).unwrap().is_primitive);
        let rho = invariant_state(&v, &cfg).unwrap();
        let mut prev = marginal(&v, &rho, 1, &cfg).unwrap().matrix;
        prop_assert!((trace(&prev) - C64::new(1.0, 0.0)).norm() < 1e-9);
        for l in 2..=4 {
            let next = marginal(&v, &rho, l, &cfg).unwrap().matrix;
            prop_assert!(frob_diff(&trace_last_site(&next, d), &prev) < 1e-9);
            // translation invariance: tracing the first site gives the same state
            let n = prev.nrows();
            let first = ComplexMatrix::from_fn(n, n, |a, b| (0..d).map(|c| next[(c * n + a, c * n + b)]).sum());
            prop_assert!(frob_diff(&first, &prev) < 1e-9);
            prev = next;
        }
    }

    #[test]
    fn kappa_matches_swap_sign(seed in any::<u64>(), m in 2usize..7, antisym in any::<bool>()) {
        let cfg = Config::default();
        let mut r = rng(seed);
        let g = random_matrix(&mut r, m, m);
        let sign = if antisym { -1.0 } else { 1.0 };
        let omega = BipartiteVector::normalized(&g + g.transpose().scale(sign)).unwrap();
        let rep = modular_data(&omega, &cfg).unwrap();
        prop_assert_eq!(rep.sigma, Some(if antisym { -1 } else { 1 }));
        prop_assert_eq!(rep.kappa, rep.sigma);
        prop_assert!(rep.identities_hold, "max residual {}", rep.max_residual);
    }

    #[test]
    fn generic_vectors_satisfy_modular_identities(seed in any::<u64>(), m in 1usize..6) {
        let cfg = Config::default();
        let mut r = rng(seed);
        let omega = BipartiteVector::normalized(random_matrix(&mut r, m, m)).unwrap();
        let rep = modular_data(&omega, &cfg).unwrap();
        prop_assert!(rep.residuals.j_square < 1e-8);
        prop_assert!(rep.residuals.s_action < 1e-8);
        prop_assert!(rep.residuals.delta_formula < 1e-8);
    }

    #[test]
    fn bond_vector_swap_sign_is_the_index(s in 0.0f64..1.0) {
        let cfg = Config::default();
        let run = z2_index_run(&zoo::deformed_aklt(s), &cfg).unwrap();
        let omega = bond_vector(&run.report, &run.rho.rho).unwrap();
        prop_assert_eq!(swap_sign(&omega, cfg.swap_tol).value(), Some(run.report.zeta));
    }

    #[test]
    fn parent_chains_are_frustration_free(seed in any::<u64>(), n in 3usize..7) {
        let cfg = Config::default();
        let v = normalize(&random_tuple(seed, 2, 2), &cfg).unwrap();
        let cert = primitivity(&v, &cfg).unwrap();
        prop_assume!(cert.is_primitive);
        let m = cert.injectivity_length.unwrap() + 1;
        prop_assume!(n >= m);
        let hint = parent_interaction(&v, m, &cfg).unwrap();
        prop_assert!(hint.projector_residual < 1e-9);
        prop_assert!(hint.annihilation_residual < 1e-9);
        let open = ed_report(&chain_hamiltonian(&hint, ChainSpec { n, boundary: Boundary::Open }, cfg.ed_cap).unwrap(), cfg.kernel_tol_rel, cfg.ed_cap).unwrap();
        let periodic = ed_report(&chain_hamiltonian(&hint, ChainSpec { n, boundary: Boundary::Periodic }, cfg.ed_cap).unwrap(), cfg.kernel_tol_rel, cfg.ed_cap).unwrap();
        prop_assert!(open.ground_energy.abs() < 1e-9);
        prop_assert!(periodic.ground_energy.abs() < 1e-9);
        prop_assert!(open.kernel_dim >= 1);
        // periodic terms only add constraints
        prop_assert!(periodic.kernel_dim <= open.kernel_dim);
        prop_assert!(open.kernel_dim <= v.k() * v.k());
    }

    #[test]
    fn open_kernel_never_grows_with_length(seed in any::<u64>()) {
        let cfg = Config::default();
        let v = normalize(&random_tuple(seed, 2, 2), &cfg).unwrap();
        let cert = primitivity(&v, &cfg).unwrap();
        prop_assume!(cert.is_primitive);
        let m = cert.injectivity_length.unwrap() + 1;
        let hint = parent_interaction(&v, m, &cfg).unwrap();
        let mut last = usize::MAX;
        for n in m..=7 {
            let h = chain_hamiltonian(&hint, ChainSpec { n, boundary: Boundary::Open }, cfg.ed_cap).unwrap();
            let dim = ed_report(&h, cfg.kernel_tol_rel, cfg.ed_cap).unwrap().kernel_dim;
            prop_assert!(dim <= last);
            last = dim;
        }
        prop_assert_eq!(last, v.k() * v.k());
    }

    #[test]
    fn blocking_preserves_normalization(seed in any::<u64>(), b in 1usize..4) {
        let cfg = Config::default();
        let v = normalize(&random_tuple(seed, 2, 2), &cfg).unwrap();
        let w = mps::block(&v, b, cfg.window_cap).unwrap();
        prop_assert_eq!(w.d(), 1 << b);
        prop_assert!(w.normalization_residual() < 1e-9);
    }

    #[test]
    fn status_codes_round_trip(code in 0i32..10) {
        let status = Status::from_code(code).unwrap();
        prop_assert_eq!(status.code(), code);
        prop_assert_eq!(status.as_str().parse::<Status>().unwrap(), status);
    }

    #[test]
    fn tuple_files_round_trip_exactly(seed in any::<u64>(), d in 2usize..4, k in 1usize..4) {
        let raw = random_tuple(seed, d, k);
        let file = io::TupleFile::from_raw(&raw);
        let text = serde_json::to_string(&file).unwrap();
        let back: io::TupleFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_raw().unwrap(), raw);
        prop_assert_eq!(io::digest(&back), io::digest(&file));
    }
}

#[test]
fn unit_norm_vectors_are_unchanged_by_normalization() {
    let mut r = rng(1);
    let g = random_matrix(&mut r, 3, 3);
    let omega = BipartiteVector::normalized(g).unwrap();
    assert!((frob(omega.matrix()) - 1.0).abs() < 1e-15);
    let again = BipartiteVector::new(omega.matrix().clone()).unwrap();
    assert_eq!(again, omega);
}
