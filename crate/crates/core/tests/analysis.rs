mod common;

use aluthge_core::aluthge::{aluthge_powers, iterate, IterationConfig};
use aluthge_core::analysis::{
    continuity_probe, finite_section_study, gelfand_radius, riesz_split, spectrum_distance,
    yamazaki_radius, Perturbation,
};
use aluthge_core::generators::{
    random_normal, random_rank_deficient, seeded_rng, OperatorFamily, SequenceRule, Term,
};
use aluthge_core::linalg::{eigenvalues, op_norm, spectral_radius};
use aluthge_core::{ComplexMatrix, C64};
use common::{dist, gaussian, gaussian_at};
use proptest::prelude::*;

/// Normal block with eigenvalue moduli in `[lo, hi]`.
fn annulus_block(dim: usize, lo: f64, hi: f64, seed: u64) -> ComplexMatrix {
    let mut rng = seeded_rng(seed);
    let eigs: Vec<C64> = (0..dim)
        .map(|k| {
            let r = lo + (hi - lo) * (k as f64 + 0.5) / dim as f64;
            C64::from_polar(r, 2.0 * k as f64 + seed as f64)
        })
        .collect();
    let n = random_normal(&eigs, &mut rng).unwrap();
    // a nilpotent perturbation keeps the spectrum and breaks normality
    let mut m = n.into_matrix();
    if dim > 1 {
        m[(0, dim - 1)] += C64::new(0.3, 0.0);
    }
    ComplexMatrix::new(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matching_dominates_hausdorff(a in gaussian(1..=10), seed in any::<u64>()) {
        let b = gaussian_at(a.dim(), seed);
        let r = spectrum_distance(&a, &b).unwrap();
        prop_assert!(r.matching_distance >= r.hausdorff);
        prop_assert!(r.hausdorff >= 0.0);
        prop_assert_eq!(r.input_eigs.len(), a.dim());
        prop_assert_eq!(r.limit_eigs.len(), a.dim());
    }

    #[test]
    fn split_partitions_the_spectrum(t in gaussian(2..=12)) {
        let mut moduli: Vec<f64> = eigenvalues(&t).unwrap().iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        let (k, gap) = moduli
            .windows(2)
            .enumerate()
            .map(|(k, w)| (k, w[1] - w[0]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        prop_assume!(gap > 1e-3 * op_norm(&t).max(1.0));
        let r = 0.5 * (moduli[k] + moduli[k + 1]);
        let split = riesz_split(&t, r).unwrap();
        prop_assert_eq!(split.outer_dim(), moduli.iter().filter(|&&m| m > r).count());
        prop_assert!(split.outer_eigs.iter().all(|z| z.norm() > r));
        prop_assert!(split.inner_eigs.iter().all(|z| z.norm() <= r));
        prop_assert!(split.residual <= 1e-8 * op_norm(&t));
    }
}

#[test]
fn split_blocks_follow_the_iteration() {
    for seed in 0..10u64 {
        let a = annulus_block(2 + seed as usize % 4, 1.5, 3.0, seed);
        let b = annulus_block(2 + (seed as usize + 1) % 4, 0.1, 0.6, seed + 100);
        let t = ComplexMatrix::direct_sum(&a, &b);
        let scale = op_norm(&t);
        let split = riesz_split(&t, 1.0).unwrap();
        assert_eq!(split.outer_dim(), a.dim());
        let outer = aluthge_powers(split.outer.as_ref().unwrap(), 20).unwrap();
        let inner = aluthge_powers(split.inner.as_ref().unwrap(), 20).unwrap();
        let whole = aluthge_powers(&t, 20).unwrap();
        let v = &split.transform;
        let v_inv = &split.transform_inverse;
        for m in 0..20 {
            let blocks = ComplexMatrix::direct_sum(&outer[m], &inner[m]);
            let similar = &(v_inv * &whole[m]) * v;
            assert!(
                dist(&similar, &blocks) <= 1e-8 * scale,
                "seed {seed} m {}",
                m + 1
            );
        }
    }
}

#[test]
fn iteration_radius_matches_spectral_radius() {
    for seed in 0..20u64 {
        let t = gaussian_at(2 + seed as usize % 11, seed);
        let trace = iterate(&t, &IterationConfig::default()).unwrap();
        assert!(trace.converged);
        let rho = spectral_radius(&t).unwrap();
        assert!((yamazaki_radius(&trace) - rho).abs() <= 1e-6 * op_norm(&t).max(1.0));
    }
}

#[test]
fn gelfand_sequence_is_bounded_by_the_norm_and_approaches_rho() {
    for seed in 0..20u64 {
        let t = gaussian_at(2 + seed as usize % 11, seed);
        let g = gelfand_radius(&t, 64).unwrap();
        let rho = spectral_radius(&t).unwrap();
        assert_eq!(g.len(), 64);
        assert!((g[0] - op_norm(&t)).abs() <= 1e-12 * g[0]);
        assert!(g.iter().all(|&x| x >= rho * (1.0 - 1e-10)));
        assert!(g[63] - rho < g[0] - rho);
    }
}

#[test]
fn continuity_displacements_shrink() {
    let eps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
    for seed in 0..3u64 {
        let t = gaussian_at(8, seed);
        let rows = continuity_probe(&t, &eps, 5, seed, Perturbation::Dense).unwrap();
        let d: Vec<f64> = rows.iter().map(|r| r.displacement).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        assert!(d[6] > 0.0 && d[6] <= 1e-4 * op_norm(&t));
    }
    let t = random_rank_deficient(8, 5, &mut seeded_rng(9)).unwrap();
    let rows = continuity_probe(&t, &eps, 5, 9, Perturbation::Compact).unwrap();
    assert!(rows[6].displacement <= 1e-3 * op_norm(&t));
    assert!(rows[6].displacement < rows[0].displacement);
}

#[test]
fn perturbed_diagonal_sections_stabilise() {
    let family = OperatorFamily::Combination {
        terms: vec![
            Term {
                coefficient: 1.0,
                family: OperatorFamily::Diagonal {
                    diagonal: SequenceRule::harmonic(),
                },
            },
            Term {
                coefficient: 0.2,
                family: OperatorFamily::WeightedShift {
                    weights: SequenceRule::Harmonic {
                        power: 2.0,
                        scale: 1.0,
                    },
                },
            },
        ],
    };
    let records = finite_section_study(&family, &[4, 8, 16], &IterationConfig::default()).unwrap();
    let mut prev = f64::INFINITY;
    for r in &records {
        assert!(r.converged);
        assert!(r.normality_defect <= 1e-8);
        assert!(r.spectrum.matching_distance <= 1e-6);
        if let Some(d) = r.corner_deviation {
            assert!(d < prev, "dim {}: {d} vs {prev}", r.dim);
            prev = d;
        }
    }
}
