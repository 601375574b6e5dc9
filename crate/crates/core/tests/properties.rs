mod common;

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phid_core::linalg::{complexify, max_abs, real_part, sym_eigenvalues, CMatrix, RMatrix};
use phid_core::loewner::{assemble_realization, build_pencil, svd_truncate};
use phid_core::passivity::{check_certificate, kyp_matrix, positive_real_sweep};
use phid_core::ph::{algorithm1, algorithm1_trace, extract_ph, from_certificate, reconstruct};
use phid_core::realify::{build_realifier, realify_pencil};
use phid_core::spectral_zeros::{compute_spectral_zeros, filter_rhp, spectral_data_from_model};
use phid_core::tangential::{conjugate_closure, left_from_spectral, RightDatum};
use phid_core::{dof_count, DofKind, DofQuery, StateSpace};

use common::{log_grid, max_zero_mismatch, random_ph, random_transform, uniform};

fn source(seed: u64, n: usize, m: usize) -> (ChaCha8Rng, StateSpace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ph = random_ph(&mut rng, n, m, seed.is_multiple_of(2));
    (rng, reconstruct(&ph))
}

fn test_points() -> Vec<Complex64> {
    (0..8).map(|k| Complex64::new(0.2 * k as f64 - 0.3, 0.5 + 1.3 * k as f64)).collect()
}

fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn random_rights(rng: &mut ChaCha8Rng, k: usize, m: usize) -> Vec<RightDatum> {
    (0..k)
        .map(|_| {
            let lambda = Complex64::new(rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0));
            let r = DVector::from_fn(m, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let w = DVector::from_fn(m, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            RightDatum::new(lambda, r, w)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn real_models_are_conjugate_symmetric(seed in any::<u64>(), n in 1usize..6, m in 1usize..3) {
        let (_, model) = source(seed, n, m);
        for s in test_points() {
            let z = model.eval_transfer(s).unwrap();
            let zc = model.eval_transfer(s.conj()).unwrap();
            prop_assert!(rel_diff(&zc, &z.map(|v| v.conj())) <= 1e-12);
            let phi = model.eval_phi(s).unwrap();
            let phi_mirror = model.eval_phi(-s).unwrap().transpose();
            prop_assert!(rel_diff(&phi_mirror, &phi) <= 1e-12);
        }
    }

    #[test]
    fn closure_is_idempotent_and_order_free(seed in any::<u64>(), k in 1usize..6, m in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rights = random_rights(&mut rng, k, m);
        let closed = conjugate_closure(&rights);
        prop_assert_eq!(closed.len() % 2, 0);
        prop_assert_eq!(conjugate_closure(&closed), closed.clone());
        let mut reversed = rights.clone();
        reversed.reverse();
        prop_assert_eq!(conjugate_closure(&reversed), closed);
    }

    #[test]
    fn symmetric_pencil_structure(seed in any::<u64>(), k in 1usize..5, m in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rights = conjugate_closure(&random_rights(&mut rng, k, m));
        let ds = left_from_spectral(rights, RMatrix::identity(m, m)).unwrap();
        let p = build_pencil(&ds).unwrap();
        prop_assert!((p.l() - p.l().adjoint()).norm() <= 1e-12 * p.l().norm());
        prop_assert!((p.ls() + p.ls().adjoint()).norm() <= 1e-12 * p.ls().norm());
    }

    #[test]
    fn permutation_equivariance(seed in any::<u64>(), n in 2usize..6, m in 1usize..3) {
        let (mut rng, model) = source(seed, n, m);
        let rights = spectral_data_from_model(&model, n).unwrap();
        let d = real_part(model.d());
        let p = build_pencil(&left_from_spectral(rights.clone(), d.clone()).unwrap()).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let shuffled: Vec<RightDatum> = perm.iter().map(|&i| rights[i].clone()).collect();
        let q = build_pencil(&left_from_spectral(shuffled, d.clone()).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((q.l()[(i, j)] - p.l()[(perm[i], perm[j])]).norm() <= 1e-14 * p.l().norm());
                prop_assert!((q.ls()[(i, j)] - p.ls()[(perm[i], perm[j])]).norm() <= 1e-14 * p.ls().norm());
            }
        }
        let a = assemble_realization(&p, &d).unwrap();
        let b = assemble_realization(&q, &d).unwrap();
        for s in test_points() {
            prop_assert!(rel_diff(&b.eval_transfer(s).unwrap(), &a.eval_transfer(s).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn realification_preserves_spectrum_and_transfer(seed in any::<u64>(), n in 1usize..7, m in 1usize..3) {
        let (_, model) = source(seed, n, m);
        let rights = spectral_data_from_model(&model, n).unwrap();
        let d = real_part(model.d());
        let ds = left_from_spectral(rights, d.clone()).unwrap();
        let p = build_pencil(&ds).unwrap();
        let map = build_realifier(&ds).unwrap();
        prop_assert!((map.u_right.adjoint() * &map.u_right - CMatrix::identity(n, n)).norm() <= 1e-12);
        let pr = realify_pencil(&p, &map).unwrap();
        let mut complex_eigs: Vec<f64> = phid_core::linalg::herm_eigenvalues(p.l());
        let mut real_eigs = sym_eigenvalues(&real_part(pr.l()));
        complex_eigs.sort_by(f64::total_cmp);
        real_eigs.sort_by(f64::total_cmp);
        for (x, y) in complex_eigs.iter().zip(&real_eigs) {
            prop_assert!((x - y).abs() <= 1e-10 * complex_eigs.last().unwrap().abs());
        }
        let a = assemble_realization(&p, &d).unwrap();
        let b = assemble_realization(&pr, &d).unwrap();
        prop_assert!(b.is_real());
        for s in test_points() {
            prop_assert!(rel_diff(&b.eval_transfer(s).unwrap(), &a.eval_transfer(s).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn untruncated_svd_keeps_transfer(seed in any::<u64>(), n in 1usize..6, m in 1usize..3) {
        let (_, model) = source(seed, n, m);
        let rights = spectral_data_from_model(&model, n).unwrap();
        let d = real_part(model.d());
        let p = build_pencil(&left_from_spectral(rights, d.clone()).unwrap()).unwrap();
        let full = assemble_realization(&p, &d).unwrap();
        let t = svd_truncate(&p, &d, 0.0).unwrap();
        prop_assert_eq!(t.order, n);
        for s in test_points() {
            prop_assert!(rel_diff(&t.model.eval_transfer(s).unwrap(), &full.eval_transfer(s).unwrap()) <= 1e-8);
        }
    }

    #[test]
    fn algorithm1_interpolates_and_is_passive(seed in any::<u64>(), n in 1usize..7, m in 1usize..4) {
        let (_, model) = source(seed, n, m);
        let rights = spectral_data_from_model(&model, n).unwrap();
        let d = real_part(model.d());
        let t = algorithm1_trace(&rights, &d).unwrap();
        let out = reconstruct(&t.ph);
        for datum in &rights {
            let got = out.eval_transfer(datum.lambda).unwrap() * &datum.r;
            prop_assert!((got - &datum.w).norm() <= 1e-8 * datum.w.norm());
        }
        // sym(D) + skew(D) recovers D up to rounding
        prop_assert!(max_abs(&(out.d() - complexify(&d))) <= 4.0 * f64::EPSILON * d.amax());
        let sweep = positive_real_sweep(&out, &log_grid(1e-2, 1e2, 100));
        prop_assert!(sweep.iter().all(|p| p.lambda_min.unwrap() >= -1e-8));

        let zs = filter_rhp(&compute_spectral_zeros(&out).unwrap(), n).unwrap();
        let expected: Vec<Complex64> = rights.iter().map(|r| r.lambda).collect();
        prop_assert!(max_zero_mismatch(&zs.zeros, &expected).unwrap() <= 1e-8);

        // closed forms in terms of the normalized right data
        let g_inv = t.gamma.clone().try_inverse().unwrap();
        let r_g = real_part(t.realified.right_dirs()) * &g_inv;
        let w_g = real_part(t.realified.right_values()) * &g_inv;
        let s = (&d + d.transpose()) * 0.5;
        let skew_d = (&d - d.transpose()) * 0.5;
        let scale = 1.0 + t.ph.r().amax() + t.ph.g().amax();
        prop_assert!((t.ph.r() - r_g.transpose() * &s * &r_g).amax() <= 1e-10 * scale);
        prop_assert!((t.ph.p() - r_g.transpose() * &s).amax() <= 1e-10 * scale);
        prop_assert!((t.ph.g() + w_g.transpose() + r_g.transpose() * &skew_d).amax() <= 1e-10 * scale);
        let ls_g = g_inv.transpose() * real_part(t.realified.ls()) * &g_inv;
        prop_assert!((t.ph.j() - (ls_g - r_g.transpose() * &skew_d * &r_g)).amax() <= 1e-10 * scale);
    }

    #[test]
    fn extract_reconstruct_round_trip(seed in any::<u64>(), n in 1usize..8, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ph = random_ph(&mut rng, n, m, true);
        let back = extract_ph(&reconstruct(&ph)).unwrap();
        for (x, y) in [(back.j(), ph.j()), (back.r(), ph.r()), (back.g(), ph.g()), (back.p(), ph.p()), (back.s(), ph.s()), (back.n_feed(), ph.n_feed())] {
            prop_assert!((x - y).amax() <= 1e-14);
        }
        let kyp = kyp_matrix(&reconstruct(&ph), &RMatrix::identity(n, n)).unwrap();
        prop_assert!((kyp - ph.dissipation_block() * 2.0).amax() <= 1e-12);
    }

    #[test]
    fn certificate_congruence(seed in any::<u64>(), n in 1usize..6, m in 1usize..3) {
        let (mut rng, model) = source(seed, n, m);
        let h = uniform(&mut rng, n, n);
        let x = &h * h.transpose() + RMatrix::identity(n, n) * 0.2;
        let report = check_certificate(&model, &x).unwrap();
        let chol = x.clone().cholesky().unwrap();
        let t = complexify(&chol.l().transpose());
        let moved = model.similarity(&t).unwrap();
        let moved_report = check_certificate(&moved, &RMatrix::identity(n, n)).unwrap();
        prop_assert_eq!(report.verdict, moved_report.verdict);
        if let Ok(ph) = from_certificate(&model, &x) {
            let out = reconstruct(&ph);
            for s in test_points() {
                prop_assert!(rel_diff(&out.eval_transfer(s).unwrap(), &model.eval_transfer(s).unwrap()) <= 1e-10);
            }
        }
    }

    #[test]
    fn zeros_pair_and_survive_similarity(seed in any::<u64>(), n in 1usize..7, m in 1usize..3) {
        let (mut rng, model) = source(seed, n, m);
        let zs = compute_spectral_zeros(&model).unwrap();
        prop_assert_eq!(zs.len(), 2 * n);
        let mirrored: Vec<Complex64> = zs.zeros.iter().map(|z| -z.conj()).collect();
        prop_assert!(max_zero_mismatch(&mirrored, &zs.zeros).unwrap() <= 1e-8);
        for r in &zs.directions {
            prop_assert!((r.norm() - 1.0).abs() <= 1e-12);
        }
        let rhp = filter_rhp(&zs, n).unwrap();
        let moved = model.similarity(&random_transform(&mut rng, n)).unwrap();
        let rhp2 = filter_rhp(&compute_spectral_zeros(&moved).unwrap(), n).unwrap();
        for (a, b) in rhp.zeros.iter().zip(&rhp2.zeros) {
            prop_assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm()));
        }
        for (a, b) in rhp.directions.iter().zip(&rhp2.directions) {
            prop_assert!((a - b).norm() <= 1e-6);
        }
    }

    #[test]
    fn algorithm1_dissipation_rank(seed in any::<u64>(), n in 1usize..7, m in 1usize..4) {
        let (_, model) = source(seed, n, m);
        let rights = spectral_data_from_model(&model, n).unwrap();
        let ph = algorithm1(&rights, &real_part(model.d())).unwrap();
        let mut sv: Vec<f64> = ph.dissipation_block().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        if sv.len() > m {
            prop_assert!(sv[m] <= 1e-10 * sv[0]);
        }
    }

    #[test]
    fn dof_formulas(n in 0usize..200, m in 1usize..10, r_frac in 0.0f64..=1.0) {
        let r = ((m as f64) * r_frac).floor() as usize;
        prop_assert_eq!(dof_count(DofQuery::new(n, m, DofKind::StrictlyProper).unwrap()), (2 * m * n) as u64);
        prop_assert_eq!(
            dof_count(DofQuery::new(n, m, DofKind::ProperWithRank(r)).unwrap()),
            (2 * m * (n + r) - r * r) as u64
        );
    }
}
