//! Factorial sweep execution: enumerate every cell of the design, run the
//! model in each, fit the resulting rank series, and collect per-cell rows.
//!
//! Cell identity is positional: cells are numbered 0, 1, 2, ... in nested
//! loop order (hierarchy count, object count, ratio_m, ratio_w, ratio_c,
//! replicate), and each cell draws with seed `mix_seed(master_seed, cell_id)`.
//! That makes every cell's stream independent of scheduling, so results are
//! byte-identical whether cells run serially or across a thread pool.

use anyhow::Result;
use rayon::prelude::*;

use hiersel_core::fitkit::{fit_power_loglog, rank_series};
use hiersel_core::hsmodel::{build_instance, expected_frequencies, simulate, HierarchySpec};
use hiersel_core::rng::mix_seed;

use crate::config::{Mode, RatioValues, SweepConfig};

/// Fit summary for one successful cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellFit {
    pub alpha: f64,
    pub log_intercept: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub n_points: usize,
    pub n_zero: usize,
}

/// One executed cell. `outcome` is `Err` when the cell could not run (for
/// example an instance with fewer objects than hierarchies); failed cells are
/// kept in the output rather than dropped.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub cell_id: u64,
    pub m: usize,
    pub n: usize,
    pub draws: u64,
    pub ratio_m: f64,
    pub ratio_w: f64,
    pub ratio_c: f64,
    pub replicate: u32,
    pub seed: u64,
    pub outcome: Result<CellFit, String>,
}

impl SweepCell {
    pub fn fit(&self) -> Option<&CellFit> {
        self.outcome.as_ref().ok()
    }

    /// Flatten to the CSV row shape (fit fields become NaN on failure).
    pub fn row(&self) -> SweepRow {
        let (alpha, adj_r2, n_zero) = match &self.outcome {
            Ok(fit) => (fit.alpha, fit.adj_r2, fit.n_zero as f64),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        SweepRow {
            cell_id: self.cell_id,
            m: self.m,
            n: self.n,
            draws: self.draws,
            ratio_m: self.ratio_m,
            ratio_w: self.ratio_w,
            ratio_c: self.ratio_c,
            replicate: self.replicate,
            seed: self.seed,
            alpha,
            adj_r2,
            n_zero,
        }
    }
}

/// The flat record stored in `sweep.csv`, one per cell. Failed cells carry
/// NaN in the fit columns so they stay visible without poisoning analysis
/// (readers skip non-finite rows).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub cell_id: u64,
    pub m: usize,
    pub n: usize,
    pub draws: u64,
    pub ratio_m: f64,
    pub ratio_w: f64,
    pub ratio_c: f64,
    pub replicate: u32,
    pub seed: u64,
    pub alpha: f64,
    pub adj_r2: f64,
    pub n_zero: f64,
}

impl SweepRow {
    pub fn succeeded(&self) -> bool {
        self.alpha.is_finite() && self.adj_r2.is_finite()
    }
}

struct CellPlan {
    cell_id: u64,
    m: usize,
    n: usize,
    ratios: RatioValues,
    replicate: u32,
    seed: u64,
}

/// Run every cell of the design. The returned vector is ordered by
/// `cell_id`, and a given configuration always produces identical results.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepCell>> {
    config.validate()?;

    let mut plans = Vec::with_capacity(config.n_cells() as usize);
    let mut cell_id = 0u64;
    for &m in &config.m_levels {
        for &n in &config.n_levels {
            for &rm in &config.ratio_m_levels {
                for &rw in &config.ratio_w_levels {
                    for &rc in &config.ratio_c_levels {
                        for replicate in 1..=config.replicates {
                            plans.push(CellPlan {
                                cell_id,
                                m,
                                n,
                                ratios: RatioValues { rm, rw, rc },
                                replicate,
                                seed: mix_seed(config.master_seed, cell_id),
                            });
                            cell_id += 1;
                        }
                    }
                }
            }
        }
    }

    Ok(plans
        .par_iter()
        .map(|plan| execute_cell(config, plan))
        .collect())
}

fn execute_cell(config: &SweepConfig, plan: &CellPlan) -> SweepCell {
    let outcome = run_one(config, plan).map_err(|e| format!("{e:#}"));
    SweepCell {
        cell_id: plan.cell_id,
        m: plan.m,
        n: plan.n,
        draws: config.draws,
        ratio_m: plan.ratios.rm,
        ratio_w: plan.ratios.rw,
        ratio_c: plan.ratios.rc,
        replicate: plan.replicate,
        seed: plan.seed,
        outcome,
    }
}

fn run_one(config: &SweepConfig, plan: &CellPlan) -> Result<CellFit> {
    let spec = HierarchySpec {
        n_objects: plan.n,
        n_hierarchies: plan.m,
        fm: config.fm.realize(&plan.ratios, plan.m)?,
        fw: config.fw.realize(&plan.ratios, plan.m)?,
        fc: config.fc.realize(&plan.ratios, plan.m)?,
    };
    let instance = build_instance(&spec)?;
    let table = match config.mode {
        Mode::MonteCarlo => simulate(&instance, config.draws, plan.seed),
        Mode::Expected => expected_frequencies(&instance, config.draws),
    };
    let series = rank_series(&table)?;
    let fit = fit_power_loglog(&series)?;
    Ok(CellFit {
        alpha: fit.alpha,
        log_intercept: fit.log_intercept,
        r2: fit.r2,
        adj_r2: fit.adj_r2,
        n_points: fit.n_points,
        n_zero: fit.n_zero,
    })
}
