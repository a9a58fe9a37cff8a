//! Property tests for the structural invariants: normalization, monotone
//! weight families, apportionment conservation, fit identities, ANOVA
//! sum-of-squares behavior, and special-function identities.

use hiersel_core::dist::{make_pmf, DistributionSpec, Orientation};
use hiersel_core::fitkit::{fit_power_loglog, fit_two_term_power, rank_series, RankedSeries};
use hiersel_core::hsmodel::{
    build_instance, exact_pmf, expected_frequencies, simulate, HierarchySpec,
};
use hiersel_core::statkit::{incomplete_beta, kde, one_way_anova, pearson};
use proptest::prelude::*;

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::Ascending), Just(Orientation::Descending)]
}

/// Any family, with explicit weight lists sized for the given support.
fn family(k: usize) -> BoxedStrategy<DistributionSpec> {
    prop_oneof![
        Just(DistributionSpec::Uniform),
        (1.0..50.0f64, orientation())
            .prop_map(|(ratio, orientation)| DistributionSpec::Triangular { ratio, orientation }),
        (0.05..4.0f64).prop_map(|exponent| DistributionSpec::Power { exponent }),
        (0.05..4.0f64).prop_map(|exponent| DistributionSpec::ShiftedPower { exponent }),
        (0.01..2.0f64, orientation())
            .prop_map(|(rate, orientation)| DistributionSpec::Exponential { rate, orientation }),
        proptest::collection::vec(0.01..100.0f64, k)
            .prop_map(|weights| DistributionSpec::Explicit { weights }),
    ]
    .boxed()
}

fn spec_and_support() -> impl Strategy<Value = (DistributionSpec, usize)> {
    (1usize..2048).prop_flat_map(|k| (family(k), Just(k)))
}

proptest! {
    #[test]
    fn pmf_mass_is_one((spec, k) in spec_and_support()) {
        let pmf = make_pmf(&spec, k).unwrap();
        let total: f64 = pmf.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "mass {total} for {spec} over {k}");
        prop_assert!(pmf.probs().iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn closed_families_are_monotone(
        k in 1usize..512,
        ratio in 1.0..50.0f64,
        exponent in 0.05..4.0f64,
        rate in 0.01..2.0f64,
    ) {
        let descending = [
            DistributionSpec::Triangular { ratio, orientation: Orientation::Descending },
            DistributionSpec::Power { exponent },
            DistributionSpec::Exponential { rate, orientation: Orientation::Descending },
        ];
        for spec in descending {
            let p = make_pmf(&spec, k).unwrap();
            prop_assert!(
                p.probs().windows(2).all(|w| w[0] >= w[1]),
                "{spec} not non-increasing"
            );
        }
        let ascending = [
            DistributionSpec::Triangular { ratio, orientation: Orientation::Ascending },
            DistributionSpec::ShiftedPower { exponent },
            DistributionSpec::Exponential { rate, orientation: Orientation::Ascending },
        ];
        for spec in ascending {
            let p = make_pmf(&spec, k).unwrap();
            prop_assert!(
                p.probs().windows(2).all(|w| w[0] <= w[1]),
                "{spec} not non-decreasing"
            );
        }
    }

    #[test]
    fn triangular_hits_the_requested_ratio(k in 2usize..512, ratio in 1.0..100.0f64) {
        let spec = DistributionSpec::Triangular { ratio, orientation: Orientation::Descending };
        let p = make_pmf(&spec, k).unwrap();
        let realized = p.probs()[0] / p.probs()[k - 1];
        prop_assert!((realized - ratio).abs() <= 1e-9 * ratio, "realized {realized} want {ratio}");
    }

    #[test]
    fn unit_ratio_triangle_is_uniform(k in 1usize..512, orient in orientation()) {
        let tri = make_pmf(
            &DistributionSpec::Triangular { ratio: 1.0, orientation: orient },
            k,
        )
        .unwrap();
        let uniform = make_pmf(&DistributionSpec::Uniform, k).unwrap();
        prop_assert_eq!(tri.probs(), uniform.probs());
    }

    #[test]
    fn spec_strings_round_trip((spec, _) in spec_and_support()) {
        let rendered = spec.to_string();
        let parsed: DistributionSpec = rendered.parse().unwrap();
        prop_assert_eq!(spec, parsed, "via {}", rendered);
    }

    #[test]
    fn apportionment_conserves_objects(
        m in 1usize..64,
        extra in 0usize..5000,
        seed_family in 0usize..6,
    ) {
        let n = m + extra;
        let fm = match seed_family {
            0 => DistributionSpec::Uniform,
            1 => DistributionSpec::Triangular { ratio: 25.0, orientation: Orientation::Descending },
            2 => DistributionSpec::Triangular { ratio: 9.0, orientation: Orientation::Ascending },
            3 => DistributionSpec::Power { exponent: 3.0 },
            4 => DistributionSpec::ShiftedPower { exponent: 2.0 },
            _ => DistributionSpec::Exponential { rate: 1.5, orientation: Orientation::Descending },
        };
        let inst = build_instance(&HierarchySpec {
            n_objects: n,
            n_hierarchies: m,
            fm,
            fw: DistributionSpec::Uniform,
            fc: DistributionSpec::Uniform,
        })
        .unwrap();
        prop_assert_eq!(inst.counts().iter().sum::<usize>(), n);
        prop_assert!(inst.counts().iter().all(|&c| c >= 1));
    }

    #[test]
    fn exact_probabilities_sum_to_one(
        m in 1usize..8,
        extra in 0usize..600,
        fc_exp in 0.1..4.0f64,
        fw_exp in 0.1..2.0f64,
    ) {
        let inst = build_instance(&HierarchySpec {
            n_objects: m + extra,
            n_hierarchies: m,
            fm: DistributionSpec::ShiftedPower { exponent: 2.0 },
            fw: DistributionSpec::Power { exponent: fw_exp },
            fc: DistributionSpec::Power { exponent: fc_exp },
        })
        .unwrap();
        let total: f64 = exact_pmf(&inst).iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "total {total}");
        let expected = expected_frequencies(&inst, 1000);
        let mass: f64 = expected.rows.iter().map(|r| r.count).sum();
        prop_assert!((mass - 1000.0).abs() < 1e-7);
    }

    #[test]
    fn simulation_conserves_draws(draws in 1u64..5000, seed in any::<u64>()) {
        let inst = build_instance(&HierarchySpec {
            n_objects: 40,
            n_hierarchies: 4,
            fm: DistributionSpec::Uniform,
            fw: DistributionSpec::Power { exponent: 0.82 },
            fc: DistributionSpec::Power { exponent: 2.0 },
        })
        .unwrap();
        let table = simulate(&inst, draws, seed);
        let total: f64 = table.rows.iter().map(|r| r.count).sum();
        prop_assert_eq!(total, draws as f64);
        prop_assert_eq!(table.rows.len(), 40);
    }

    #[test]
    fn ranked_series_is_sorted_and_conserves_mass(
        counts in proptest::collection::vec(0u32..1000, 1..100),
    ) {
        prop_assume!(counts.iter().any(|&c| c > 0));
        let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let series = RankedSeries::from_frequencies(&as_f64).unwrap();
        prop_assert!(series.frequencies().windows(2).all(|w| w[0] >= w[1]));
        let kept: f64 = series.frequencies().iter().sum();
        let original: f64 = as_f64.iter().sum();
        prop_assert_eq!(kept, original);
        prop_assert_eq!(
            series.n_zero() + series.len(),
            counts.len()
        );
    }

    #[test]
    fn loglog_fit_is_scale_invariant(
        freqs in proptest::collection::vec(1e-3..1e6f64, 3..50),
        scale in 1e-3..1e3f64,
    ) {
        let scaled: Vec<f64> = freqs.iter().map(|f| f * scale).collect();
        let f1 = fit_power_loglog(&RankedSeries::from_frequencies(&freqs).unwrap()).unwrap();
        let f2 = fit_power_loglog(&RankedSeries::from_frequencies(&scaled).unwrap()).unwrap();
        prop_assert!((f1.alpha - f2.alpha).abs() < 1e-9);
        prop_assert!((f1.r2 - f2.r2).abs() < 1e-9);
        prop_assert!((f1.adj_r2 - f2.adj_r2).abs() < 1e-9);
        prop_assert!(
            ((f2.log_intercept - f1.log_intercept) - scale.ln()).abs() < 1e-9
        );
        prop_assert!(f1.adj_r2 <= f1.r2 + 1e-15 && f1.r2 <= 1.0);
    }

    #[test]
    fn adjusted_r2_definition_holds(
        freqs in proptest::collection::vec(0.5..1e4f64, 3..30),
    ) {
        let fit = fit_power_loglog(&RankedSeries::from_frequencies(&freqs).unwrap()).unwrap();
        let n = fit.n_points as f64;
        let direct = 1.0 - (1.0 - fit.r2) * (n - 1.0) / (n - 2.0);
        prop_assert!((fit.adj_r2 - direct).abs() < 1e-12);
    }

    #[test]
    fn anova_p_values_are_probabilities(
        groups in proptest::collection::vec(
            proptest::collection::vec(-10.0..10.0f64, 2..8),
            2..5,
        ),
    ) {
        let r = one_way_anova("factor", &groups).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        prop_assert!(r.f_stat >= 0.0);
    }

    #[test]
    fn merging_identical_groups_preserves_sums_of_squares(
        first in proptest::collection::vec(-10.0..10.0f64, 2..6),
        rest in proptest::collection::vec(
            proptest::collection::vec(-10.0..10.0f64, 2..6),
            1..3,
        ),
    ) {
        let mut split = vec![first.clone(), first.clone()];
        split.extend(rest.iter().cloned());
        let mut merged = vec![[first.clone(), first.clone()].concat()];
        merged.extend(rest.iter().cloned());

        let a = one_way_anova("factor", &split).unwrap();
        let b = one_way_anova("factor", &merged).unwrap();
        let tol = 1e-9 * (1.0 + a.ss_between.abs() + a.ss_within.abs());
        prop_assert!((a.ss_between - b.ss_between).abs() < tol);
        prop_assert!((a.ss_within - b.ss_within).abs() < tol);
        // The F statistic itself shifts with the changed degrees of freedom.
        prop_assert_eq!(a.df_between, b.df_between + 1);
        prop_assert_eq!(a.df_within + 1, b.df_within);
    }

    #[test]
    fn pearson_is_affine_invariant(
        xs in proptest::collection::vec(-100.0..100.0f64, 3..30),
        slope in 0.1..10.0f64,
        offset in -100.0..100.0f64,
    ) {
        let ys: Vec<f64> = xs.iter().rev().map(|x| x * x + 1.0).collect();
        let spread = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        };
        prop_assume!(spread(&xs) > 1e-6 && spread(&ys) > 1e-6);
        let transformed: Vec<f64> = xs.iter().map(|x| slope * x + offset).collect();
        let r1 = pearson(&xs, &ys).unwrap();
        let r2 = pearson(&transformed, &ys).unwrap();
        prop_assert!((r1 - r2).abs() < 1e-12, "{r1} vs {r2}");
    }

    #[test]
    fn incomplete_beta_reflection(
        x in 0.001..0.999f64,
        a in 0.1..20.0f64,
        b in 0.1..20.0f64,
    ) {
        let lhs = incomplete_beta(x, a, b).unwrap();
        let rhs = incomplete_beta(1.0 - x, b, a).unwrap();
        prop_assert!((lhs + rhs - 1.0).abs() < 1e-10, "{lhs} + {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_term_fit_never_loses_to_a_single_term(
        ys in proptest::collection::vec(0.1..1e4f64, 5..10),
    ) {
        let xs: Vec<f64> = (1..=ys.len()).map(|x| x as f64).collect();
        let fit = fit_two_term_power(&xs, &ys).unwrap();
        prop_assert!(fit.a >= 0.0 && fit.c >= 0.0 && fit.b > 0.0 && fit.d > 0.0);

        // Independent dense-grid single-term oracles.
        let single = |sign: f64| -> f64 {
            let mut best = f64::INFINITY;
            for i in 0..=1590 {
                let e = 0.05 + i as f64 * 0.005;
                let (mut vv, mut vy) = (0.0, 0.0);
                for (&x, &y) in xs.iter().zip(&ys) {
                    let v = x.powf(sign * e);
                    vv += v * v;
                    vy += v * y;
                }
                let amp = (vy / vv).max(0.0);
                let sse: f64 = xs
                    .iter()
                    .zip(&ys)
                    .map(|(&x, &y)| {
                        let r = y - amp * x.powf(sign * e);
                        r * r
                    })
                    .sum();
                best = best.min(sse);
            }
            best
        };
        let tol = 1e-9 * (1.0 + fit.sse);
        prop_assert!(fit.sse <= single(-1.0) + tol, "worse than pure decay");
        prop_assert!(fit.sse <= single(1.0) + tol, "worse than pure growth");
    }

    #[test]
    fn kde_mass_is_one_on_a_wide_grid(
        points in proptest::collection::vec(-5.0..5.0f64, 2..40),
        bandwidth in 0.1..2.0f64,
    ) {
        let lo = points.iter().fold(f64::INFINITY, |m, &p| m.min(p)) - 3.0 * bandwidth;
        let hi = points.iter().fold(f64::NEG_INFINITY, |m, &p| m.max(p)) + 3.0 * bandwidth;
        let grid: Vec<f64> = (0..400).map(|i| lo + i as f64 * (hi - lo) / 399.0).collect();
        let curve = kde(&points, Some(bandwidth), &grid).unwrap();
        prop_assert!(curve.density.iter().all(|&d| d >= 0.0));
        let mut integral = 0.0;
        for i in 1..grid.len() {
            integral += 0.5 * (curve.density[i] + curve.density[i - 1]) * (grid[i] - grid[i - 1]);
        }
        prop_assert!((integral - 1.0).abs() < 0.02, "mass {integral}");
    }

    #[test]
    fn monte_carlo_matches_expectation(seed in any::<u64>()) {
        let inst = build_instance(&HierarchySpec {
            n_objects: 12,
            n_hierarchies: 3,
            fm: DistributionSpec::Uniform,
            fw: DistributionSpec::Power { exponent: 0.5 },
            fc: DistributionSpec::Triangular { ratio: 3.0, orientation: Orientation::Descending },
        })
        .unwrap();
        let draws = 200_000u64;
        let sim = simulate(&inst, draws, seed);
        let probs = exact_pmf(&inst);
        for (row, p) in sim.rows.iter().zip(probs) {
            let expect = draws as f64 * p;
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
            prop_assert!(
                (row.count - expect).abs() <= 6.0 * sigma + 1.0,
                "object {} count {} expected {expect} (sigma {sigma})",
                row.object_id,
                row.count,
            );
        }
    }

    #[test]
    fn ranking_a_simulated_table_reconstructs_mass(
        seed in any::<u64>(),
        draws in 100u64..20_000,
    ) {
        let inst = build_instance(&HierarchySpec {
            n_objects: 30,
            n_hierarchies: 3,
            fm: DistributionSpec::Uniform,
            fw: DistributionSpec::Power { exponent: 1.2 },
            fc: DistributionSpec::Power { exponent: 2.5 },
        })
        .unwrap();
        let table = simulate(&inst, draws, seed);
        let series = rank_series(&table).unwrap();
        let kept: f64 = series.frequencies().iter().sum();
        prop_assert_eq!(kept, draws as f64);
        prop_assert_eq!(series.len() + series.n_zero(), 30);
    }
}
