//! Built-in sweep presets. Each preset pins a full factorial design whose
//! outcome bands are checked by the acceptance suite, so the grids, weight
//! families, draw counts, and replicate counts here are deliberately frozen.

use anyhow::{bail, Result};
use hiersel_core::dist::{DistributionSpec, Orientation};

use crate::config::{FamilyTemplate, Mode, RatioSource, SweepConfig, DEFAULT_MASTER_SEED};

/// A named preset plus prose recorded into `meta.txt` next to the results.
pub struct Preset {
    pub name: &'static str,
    pub config: SweepConfig,
    pub notes: &'static [&'static str],
}

/// 1.0, 1.5, 2.0, ..., 10.0 — the ratio grid used by the contour sweep.
fn half_step_ratios() -> Vec<f64> {
    (0..19).map(|i| 1.0 + 0.5 * i as f64).collect()
}

/// Contour of fit quality over the (ratio_m, ratio_c) plane: a peaked
/// apportionment profile against a descending selection ramp, with uniform
/// within-hierarchy weights.
fn fig3() -> SweepConfig {
    SweepConfig {
        m_levels: vec![5],
        n_levels: vec![50_000],
        draws: 2_000_000,
        ratio_m_levels: half_step_ratios(),
        ratio_w_levels: vec![1.0],
        ratio_c_levels: half_step_ratios(),
        fm: FamilyTemplate::Peaked {
            source: RatioSource::M,
        },
        fw: FamilyTemplate::Fixed(DistributionSpec::Uniform),
        fc: FamilyTemplate::TriRatio {
            source: RatioSource::C,
            orientation: Orientation::Descending,
        },
        replicates: 1,
        master_seed: DEFAULT_MASTER_SEED,
        mode: Mode::MonteCarlo,
    }
}

/// Goodness-of-fit versus apportionment skew at three ratio levels, with the
/// selection ramp held at 3. `vary_both` instead re-derives the selection
/// ramp from the same ratio level as the apportionment profile.
fn fig4(vary_both: bool) -> SweepConfig {
    let fc = if vary_both {
        FamilyTemplate::TriRatio {
            source: RatioSource::M,
            orientation: Orientation::Descending,
        }
    } else {
        FamilyTemplate::Fixed(DistributionSpec::Triangular {
            ratio: 3.0,
            orientation: Orientation::Descending,
        })
    };
    SweepConfig {
        m_levels: vec![5],
        n_levels: vec![50_000],
        draws: 2_000_000,
        ratio_m_levels: vec![5.0, 7.0, 9.0],
        ratio_w_levels: vec![1.0],
        ratio_c_levels: vec![1.0],
        fm: FamilyTemplate::Peaked {
            source: RatioSource::M,
        },
        fw: FamilyTemplate::Fixed(DistributionSpec::Uniform),
        fc,
        replicates: 10,
        master_seed: DEFAULT_MASTER_SEED,
        mode: Mode::MonteCarlo,
    }
}

/// Exponent trends across hierarchy and object counts under the calibrated
/// power-family weights.
fn fig5() -> SweepConfig {
    SweepConfig {
        m_levels: vec![4, 5, 6, 7, 8],
        n_levels: vec![2_000, 5_000, 10_000, 20_000, 50_000],
        draws: 100_000,
        ratio_m_levels: vec![1.0],
        ratio_w_levels: vec![1.0],
        ratio_c_levels: vec![1.0],
        fm: FamilyTemplate::Fixed(DistributionSpec::ShiftedPower { exponent: 2.094 }),
        fw: FamilyTemplate::Fixed(DistributionSpec::Power { exponent: 0.82 }),
        fc: FamilyTemplate::Fixed(DistributionSpec::Power { exponent: 3.791 }),
        replicates: 1,
        master_seed: DEFAULT_MASTER_SEED,
        mode: Mode::MonteCarlo,
    }
}

/// The same grid as `fig5` with exponential weight profiles of matching
/// rates, for contrasting family shapes at identical steepness parameters.
fn fig5_exp() -> SweepConfig {
    SweepConfig {
        fm: FamilyTemplate::Fixed(DistributionSpec::Exponential {
            rate: 2.094,
            orientation: Orientation::Ascending,
        }),
        fw: FamilyTemplate::Fixed(DistributionSpec::Exponential {
            rate: 0.82,
            orientation: Orientation::Descending,
        }),
        fc: FamilyTemplate::Fixed(DistributionSpec::Exponential {
            rate: 3.791,
            orientation: Orientation::Descending,
        }),
        ..fig5()
    }
}

/// Four-factor factorial designed for the ANOVA/regression pipeline: the
/// hierarchy count and the three family steepness scales each take three
/// well-separated levels, with enough replication for stable F statistics.
fn table2_anova() -> SweepConfig {
    SweepConfig {
        m_levels: vec![2, 5, 8],
        n_levels: vec![10_000],
        draws: 200_000,
        ratio_m_levels: vec![0.5, 1.0, 1.5],
        ratio_w_levels: vec![0.5, 1.75, 3.0],
        ratio_c_levels: vec![0.5, 1.0, 1.5],
        fm: FamilyTemplate::SpowScaled {
            base: 2.094,
            source: RatioSource::M,
        },
        fw: FamilyTemplate::PowScaled {
            base: 0.82,
            source: RatioSource::W,
        },
        fc: FamilyTemplate::PowScaled {
            base: 3.791,
            source: RatioSource::C,
        },
        replicates: 10,
        master_seed: DEFAULT_MASTER_SEED,
        mode: Mode::MonteCarlo,
    }
}

/// Look up a preset by name. `table2` is an alias for `fig5`, and
/// `table2-exp` is its exponential-family variant.
pub fn preset(name: &str, fig4_vary_both: bool) -> Result<Preset> {
    let preset = match name {
        "fig3" => Preset {
            name: "fig3",
            config: fig3(),
            notes: &[
                "goodness contour over the (ratio_m, ratio_c) plane",
                "fm: peaked tent profile, ratio from ratio_m",
                "fw: uniform within every hierarchy",
                "fc: descending ramp, ratio from ratio_c (top hierarchy most likely)",
            ],
        },
        "fig4" => Preset {
            name: "fig4",
            config: fig4(fig4_vary_both),
            notes: if fig4_vary_both {
                &[
                    "goodness versus apportionment skew at ratio levels 5, 7, 9",
                    "fm: peaked tent profile, ratio from ratio_m",
                    "fc: descending ramp re-derived from the same ratio level (--vary-both)",
                ]
            } else {
                &[
                    "goodness versus apportionment skew at ratio levels 5, 7, 9",
                    "fm: peaked tent profile, ratio from ratio_m",
                    "fc: fixed descending ramp with ratio 3",
                ]
            },
        },
        "fig5" | "table2" => Preset {
            name: "fig5",
            config: fig5(),
            notes: &[
                "exponent trends over 5 hierarchy-count levels x 5 object-count levels",
                "fm: spow:2.094 (top hierarchy receives the smallest share of objects)",
                "fw: pow:0.82 (low within-hierarchy ranks weighted hardest)",
                "fc: pow:3.791 (top hierarchy selected most often)",
            ],
        },
        "table2-exp" => Preset {
            name: "table2-exp",
            config: fig5_exp(),
            notes: &[
                "exponential-family variant of the fig5 grid at matching rates",
                "fm: exp:2.094:asc, fw: exp:0.82:desc, fc: exp:3.791:desc",
            ],
        },
        "table2-anova" => Preset {
            name: "table2-anova",
            config: table2_anova(),
            notes: &[
                "four-factor factorial for ANOVA and regression on fit outcomes",
                "factors: M in {2,5,8}; steepness scales ratio_m in {0.5,1,1.5},",
                "ratio_w in {0.5,1.75,3}, ratio_c in {0.5,1,1.5}; 10 replicates",
                "fm: spow:{2.094*rm}, fw: pow:{0.82*rw}, fc: pow:{3.791*rc}",
            ],
        },
        other => bail!(
            "unknown preset '{other}' (available: fig3, fig4, fig5, table2, table2-exp, table2-anova)"
        ),
    };
    Ok(preset)
}

/// Names accepted by `preset`, for help text.
pub const PRESET_NAMES: &[&str] = &[
    "fig3",
    "fig4",
    "fig5",
    "table2",
    "table2-exp",
    "table2-anova",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for name in PRESET_NAMES {
            let p = preset(name, false).unwrap();
            p.config.validate().unwrap();
            assert!(p.config.n_cells() >= 1);
        }
        preset("fig4", true).unwrap().config.validate().unwrap();
        assert!(preset("fig9", false).is_err());
    }

    #[test]
    fn preset_shapes_match_their_designs() {
        assert_eq!(preset("fig3", false).unwrap().config.n_cells(), 19 * 19);
        assert_eq!(preset("fig4", false).unwrap().config.n_cells(), 30);
        assert_eq!(preset("fig5", false).unwrap().config.n_cells(), 25);
        assert_eq!(
            preset("table2", false).unwrap().config,
            preset("fig5", false).unwrap().config
        );
        assert_eq!(
            preset("table2-anova", false).unwrap().config.n_cells(),
            3 * 3 * 3 * 3 * 10
        );
    }

    #[test]
    fn fig4_flag_switches_the_selection_ramp() {
        let fixed = preset("fig4", false).unwrap().config;
        assert_eq!(
            fixed.fc,
            FamilyTemplate::Fixed(DistributionSpec::Triangular {
                ratio: 3.0,
                orientation: Orientation::Descending
            })
        );
        let both = preset("fig4", true).unwrap().config;
        assert_eq!(
            both.fc,
            FamilyTemplate::TriRatio {
                source: RatioSource::M,
                orientation: Orientation::Descending
            }
        );
    }
}
