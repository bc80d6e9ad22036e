mod common;

use aluthge_core::aluthge::{aluthge, aluthge_powers, iterate, IterationConfig, StopReason};
use aluthge_core::analysis::{normality_defect, yamazaki_radius};
use aluthge_core::generators::{random_normal, random_unitary, seeded_rng};
use aluthge_core::linalg::{op_norm, svd};
use aluthge_core::{ComplexMatrix, C64};
use common::{dist, gaussian, mixed, rank_deficient, real};
use proptest::prelude::*;

fn unipotent() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap()
}

fn capped(max_iter: usize) -> IterationConfig {
    IterationConfig {
        max_iter,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_never_increase(t in mixed(2..=10)) {
        let mut prev = op_norm(&t);
        for (n, s) in aluthge_powers(&t, 30).unwrap().iter().enumerate() {
            let cur = op_norm(s);
            prop_assert!(cur <= prev * (1.0 + 1e-12), "step {n}: {prev} -> {cur}");
            prev = cur;
        }
    }

    #[test]
    fn normal_matrices_are_fixed(seed in any::<u64>(), parts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..=12)) {
        let eigs: Vec<C64> = parts.iter().map(|&(re, im)| C64::new(re, im)).collect();
        let t = random_normal(&eigs, &mut seeded_rng(seed)).unwrap();
        prop_assert!(dist(&aluthge(&t).unwrap(), &t) <= 1e-10 * op_norm(&t));
    }

    #[test]
    fn commutes_with_unitary_conjugation(t in mixed(2..=12), seed in any::<u64>()) {
        let v = random_unitary(t.dim(), &mut seeded_rng(seed)).unwrap();
        let conj = |m: &ComplexMatrix| &(&v * m) * &v.adjoint();
        let lhs = aluthge(&conj(&t)).unwrap();
        let rhs = conj(&aluthge(&t).unwrap());
        prop_assert!(dist(&lhs, &rhs) <= 1e-10 * op_norm(&t));
    }

    #[test]
    fn commutes_with_direct_sums(a in mixed(1..=8), b in mixed(1..=8)) {
        let lhs = aluthge(&ComplexMatrix::direct_sum(&a, &b)).unwrap();
        let rhs = ComplexMatrix::direct_sum(&aluthge(&a).unwrap(), &aluthge(&b).unwrap());
        prop_assert!(dist(&lhs, &rhs) <= 1e-10 * op_norm(&a).max(op_norm(&b)));
    }

    #[test]
    fn positive_scaling_is_linear(t in mixed(2..=12), c in 1e-3f64..1e3) {
        let lhs = aluthge(&t.scale(real(c))).unwrap();
        let rhs = aluthge(&t).unwrap().scale(real(c));
        prop_assert!(dist(&lhs, &rhs) <= 1e-12 * c * op_norm(&t));
    }

    #[test]
    fn complex_scaling_scales_the_norm(t in mixed(2..=12), r in 1e-3f64..1e3, arg in -std::f64::consts::PI..std::f64::consts::PI) {
        let c = C64::from_polar(r, arg);
        let lhs = op_norm(&aluthge(&t.scale(c)).unwrap());
        let rhs = r * op_norm(&aluthge(&t).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * r * op_norm(&t));
    }

    #[test]
    fn kernel_is_preserved((t, rank) in rank_deficient(2..=12)) {
        let s = svd(&t).unwrap();
        let dt = aluthge(&t).unwrap();
        let v = s.right.as_matrix();
        for k in rank..t.dim() {
            let x = v.column(k).into_owned();
            prop_assert!((dt.as_matrix() * &x).norm() <= 1e-10 * op_norm(&t) * x.norm());
        }
    }

    #[test]
    fn converged_traces_meet_their_contract(t in gaussian(2..=6)) {
        let cfg = IterationConfig::default();
        let trace = iterate(&t, &cfg).unwrap();
        let scale = trace.initial_norm.max(1.0);
        prop_assert!(trace.worst_norm_growth() <= 1e-12);
        if trace.converged {
            prop_assert_eq!(trace.stop_reason, StopReason::StepTolerance);
            let tail = &trace.steps[trace.steps.len() - cfg.consecutive_hits..];
            prop_assert!(tail.iter().all(|s| s.step_delta <= cfg.tol_step * scale));
        }
    }
}

#[test]
fn unipotent_block_approaches_identity_slowly() {
    let t = unipotent();
    let id = ComplexMatrix::identity(2).unwrap();
    let mut prev = dist(&t, &id);
    for max_iter in [100, 1_000, 10_000] {
        let trace = iterate(&t, &capped(max_iter)).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.stop_reason, StopReason::MaxIter);
        assert_eq!(trace.iterations(), max_iter);
        let gap = dist(&trace.limit, &id);
        assert!(gap < prev / 2.0, "{max_iter}: {gap} vs {prev}");
        prev = gap;
        assert!((trace.limit.trace() - real(2.0)).norm() <= 1e-10);
        assert!((trace.limit.determinant() - real(1.0)).norm() <= 1e-10);
        assert!(trace.worst_norm_growth() <= 1e-12);
    }
    assert!(prev < 0.05, "{prev}");
}

#[test]
#[ignore = "unattainable: the distance to I decays roughly like n^(-1/2)"]
fn unipotent_block_limit_is_identity() {
    let trace = iterate(&unipotent(), &IterationConfig::default()).unwrap();
    assert!(trace.converged);
    assert!(dist(&trace.limit, &ComplexMatrix::identity(2).unwrap()) <= 1e-8);
}

#[test]
#[ignore = "unattainable: the final norm is still about 4.5e-3 above 1 after 50000 steps"]
fn unipotent_block_radius_estimate() {
    let trace = iterate(&unipotent(), &IterationConfig::default()).unwrap();
    assert!((yamazaki_radius(&trace) - 1.0).abs() <= 1e-6);
}

#[test]
fn limits_of_random_matrices_are_normal() {
    for seed in 0..10u64 {
        let t = common::gaussian_at(2 + seed as usize, seed);
        let trace = iterate(&t, &IterationConfig::default()).unwrap();
        assert!(trace.converged, "seed {seed}: {:?}", trace.stop_reason);
        assert!(normality_defect(&trace.limit) <= 1e-8 * trace.initial_norm);
    }
}
