//! Analysis over completed sweeps: contour grids of mean fit quality,
//! exponent trend curves, one-way ANOVA per design factor, and a linear
//! regression of the fitted exponent on the ratio levels.
//!
//! All functions take the flat row form (`SweepRow`), so they work the same
//! on freshly run sweeps and on `sweep.csv` files read back from disk.
//! Failed cells (NaN fit columns) are excluded from every statistic.

use anyhow::{anyhow, bail, ensure, Context, Result};

use hiersel_core::statkit::{self, AnovaResult, Regression, StatError};

use crate::sweep::SweepRow;

/// A sweep design factor, addressable by name in CLI flags and CSV output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    M,
    N,
    RatioM,
    RatioW,
    RatioC,
}

impl Factor {
    pub fn name(self) -> &'static str {
        match self {
            Factor::M => "M",
            Factor::N => "N",
            Factor::RatioM => "ratio_m",
            Factor::RatioW => "ratio_w",
            Factor::RatioC => "ratio_c",
        }
    }

    pub fn value(self, row: &SweepRow) -> f64 {
        match self {
            Factor::M => row.m as f64,
            Factor::N => row.n as f64,
            Factor::RatioM => row.ratio_m,
            Factor::RatioW => row.ratio_w,
            Factor::RatioC => row.ratio_c,
        }
    }

    pub const ALL: [Factor; 5] = [
        Factor::M,
        Factor::N,
        Factor::RatioM,
        Factor::RatioW,
        Factor::RatioC,
    ];
}

/// Which fitted quantity an analysis summarizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Response {
    Alpha,
    AdjR2,
}

impl Response {
    pub fn name(self) -> &'static str {
        match self {
            Response::Alpha => "alpha",
            Response::AdjR2 => "adj_r2",
        }
    }

    fn value(self, row: &SweepRow) -> f64 {
        match self {
            Response::Alpha => row.alpha,
            Response::AdjR2 => row.adj_r2,
        }
    }
}

fn successful(rows: &[SweepRow]) -> impl Iterator<Item = &SweepRow> {
    rows.iter().filter(|r| r.succeeded())
}

/// Distinct values in ascending order. Inputs come from shared config level
/// lists, so equal levels are bitwise identical.
fn distinct_levels(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut levels: Vec<f64> = values.collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

fn level_index(levels: &[f64], value: f64) -> Option<usize> {
    levels.binary_search_by(|l| l.total_cmp(&value)).ok()
}

/// Mean fit quality arranged on the (x, y) factor grid, `mean[yi][xi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourGrid {
    pub x_name: &'static str,
    pub y_name: &'static str,
    pub x_levels: Vec<f64>,
    pub y_levels: Vec<f64>,
    pub mean_adj_r2: Vec<Vec<f64>>,
}

/// Average `adj_r2` per (x, y) factor combination. Every combination of the
/// observed levels must have at least one successful cell; a ragged grid is
/// reported as an error listing the empty combinations.
pub fn contour_grid(rows: &[SweepRow], x: Factor, y: Factor) -> Result<ContourGrid> {
    ensure!(x != y, "contour axes must be two different factors");
    let x_levels = distinct_levels(successful(rows).map(|r| x.value(r)));
    let y_levels = distinct_levels(successful(rows).map(|r| y.value(r)));
    ensure!(
        !x_levels.is_empty(),
        "no successful cells to build a contour from"
    );

    let mut sums = vec![vec![0.0f64; x_levels.len()]; y_levels.len()];
    let mut counts = vec![vec![0u64; x_levels.len()]; y_levels.len()];
    for row in successful(rows) {
        let xi = level_index(&x_levels, x.value(row)).expect("level from distinct set");
        let yi = level_index(&y_levels, y.value(row)).expect("level from distinct set");
        sums[yi][xi] += row.adj_r2;
        counts[yi][xi] += 1;
    }

    let mut missing = Vec::new();
    let mut mean = vec![vec![0.0f64; x_levels.len()]; y_levels.len()];
    for (yi, y_level) in y_levels.iter().enumerate() {
        for (xi, x_level) in x_levels.iter().enumerate() {
            if counts[yi][xi] == 0 {
                missing.push(format!(
                    "({}={}, {}={})",
                    x.name(),
                    x_level,
                    y.name(),
                    y_level
                ));
            } else {
                mean[yi][xi] = sums[yi][xi] / counts[yi][xi] as f64;
            }
        }
    }
    if !missing.is_empty() {
        bail!(
            "contour grid is ragged; no successful cells at: {}",
            missing.join(", ")
        );
    }
    Ok(ContourGrid {
        x_name: x.name(),
        y_name: y.name(),
        x_levels,
        y_levels,
        mean_adj_r2: mean,
    })
}

/// Mean exponent along one varied factor at a fixed level of another.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendCurve {
    pub fixed_name: &'static str,
    pub fixed_level: f64,
    pub varied_name: &'static str,
    /// (varied level, mean alpha) in ascending level order.
    pub points: Vec<(f64, f64)>,
    /// Spearman rank correlation of mean alpha against the varied level;
    /// exactly one curve value per level. A flat curve reports 0.
    pub spearman: f64,
}

/// Both trend tables: alpha versus object count at each hierarchy count, and
/// alpha versus hierarchy count at each object count.
#[derive(Clone, Debug, PartialEq)]
pub struct Trends {
    pub alpha_vs_n: Vec<TrendCurve>,
    pub alpha_vs_m: Vec<TrendCurve>,
}

fn trend_family(rows: &[SweepRow], fixed: Factor, varied: Factor) -> Result<Vec<TrendCurve>> {
    let varied_levels = distinct_levels(successful(rows).map(|r| varied.value(r)));
    ensure!(
        varied_levels.len() >= 3,
        "need at least 3 {} levels for a trend, found {}",
        varied.name(),
        varied_levels.len()
    );
    let fixed_levels = distinct_levels(successful(rows).map(|r| fixed.value(r)));

    let mut curves = Vec::with_capacity(fixed_levels.len());
    for &fixed_level in &fixed_levels {
        let mut points = Vec::with_capacity(varied_levels.len());
        for &level in &varied_levels {
            let alphas: Vec<f64> = successful(rows)
                .filter(|r| fixed.value(r) == fixed_level && varied.value(r) == level)
                .map(|r| r.alpha)
                .collect();
            if alphas.is_empty() {
                bail!(
                    "no successful cells at {}={}, {}={}",
                    fixed.name(),
                    fixed_level,
                    varied.name(),
                    level
                );
            }
            points.push((level, statkit::mean(&alphas)));
        }
        let levels: Vec<f64> = points.iter().map(|p| p.0).collect();
        let means: Vec<f64> = points.iter().map(|p| p.1).collect();
        let spearman = match statkit::spearman(&levels, &means) {
            Ok(rho) => rho,
            // A perfectly flat curve has no rank order; report no trend.
            Err(StatError::ZeroVariance) => 0.0,
            Err(e) => return Err(anyhow!(e)).context("spearman over trend curve"),
        };
        curves.push(TrendCurve {
            fixed_name: fixed.name(),
            fixed_level,
            varied_name: varied.name(),
            points,
            spearman,
        });
    }
    Ok(curves)
}

/// Build both exponent trend tables from a sweep over M and N grids.
pub fn exponent_trends(rows: &[SweepRow]) -> Result<Trends> {
    Ok(Trends {
        alpha_vs_n: trend_family(rows, Factor::M, Factor::N)?,
        alpha_vs_m: trend_family(rows, Factor::N, Factor::M)?,
    })
}

/// One-way ANOVA of a fitted response against each requested factor.
/// Factors must have at least two observed levels; statkit group-size
/// requirements propagate as errors.
pub fn anova_over_sweep(
    rows: &[SweepRow],
    factors: &[Factor],
    response: Response,
) -> Result<Vec<AnovaResult>> {
    let mut results = Vec::with_capacity(factors.len());
    for &factor in factors {
        let levels = distinct_levels(successful(rows).map(|r| factor.value(r)));
        ensure!(
            levels.len() >= 2,
            "factor '{}' has {} level(s); ANOVA needs at least 2",
            factor.name(),
            levels.len()
        );
        let groups: Vec<Vec<f64>> = levels
            .iter()
            .map(|&level| {
                successful(rows)
                    .filter(|r| factor.value(r) == level)
                    .map(|r| response.value(r))
                    .collect()
            })
            .collect();
        let result = statkit::one_way_anova(factor.name(), &groups)
            .map_err(|e| anyhow!("ANOVA of {} on '{}': {e}", response.name(), factor.name()))?;
        results.push(result);
    }
    Ok(results)
}

/// Regression of the fitted exponent on the three ratio levels, intercept
/// first. Each ratio must vary across the sweep or the design is singular.
pub fn exponent_regression(rows: &[SweepRow]) -> Result<Regression> {
    let ok_rows: Vec<&SweepRow> = successful(rows).collect();
    ensure!(
        ok_rows.len() >= 5,
        "need at least 5 successful cells for the exponent regression, found {}",
        ok_rows.len()
    );
    let rm: Vec<f64> = ok_rows.iter().map(|r| r.ratio_m).collect();
    let rw: Vec<f64> = ok_rows.iter().map(|r| r.ratio_w).collect();
    let rc: Vec<f64> = ok_rows.iter().map(|r| r.ratio_c).collect();
    let alpha: Vec<f64> = ok_rows.iter().map(|r| r.alpha).collect();
    statkit::linear_regression(&[rm, rw, rc], &alpha)
        .map_err(|e| anyhow!("exponent regression on ratio levels: {e}"))
}

/// Term names matching `exponent_regression` coefficients.
pub const REGRESSION_TERMS: [&str; 4] = ["intercept", "ratio_m", "ratio_w", "ratio_c"];

/// Overall sweep health: cell counts and the distribution of fit quality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSummary {
    pub n_cells: usize,
    pub n_failed: usize,
    pub mean_alpha: f64,
    pub mean_adj_r2: f64,
    /// Sample standard deviation of adj_r2 across successful cells.
    pub std_adj_r2: f64,
}

pub fn summarize(rows: &[SweepRow]) -> Result<SweepSummary> {
    let alphas: Vec<f64> = successful(rows).map(|r| r.alpha).collect();
    let adjs: Vec<f64> = successful(rows).map(|r| r.adj_r2).collect();
    ensure!(!adjs.is_empty(), "sweep has no successful cells");
    let mean_adj = statkit::mean(&adjs);
    let var = adjs.iter().map(|a| (a - mean_adj).powi(2)).sum::<f64>()
        / (adjs.len().max(2) - 1) as f64;
    Ok(SweepSummary {
        n_cells: rows.len(),
        n_failed: rows.len() - adjs.len(),
        mean_alpha: statkit::mean(&alphas),
        mean_adj_r2: mean_adj,
        std_adj_r2: var.sqrt(),
    })
}

/// Mean and sample standard deviation of a response at each level of one
/// factor: `(level, mean, std, count)` rows in ascending level order.
pub fn response_by_level(
    rows: &[SweepRow],
    factor: Factor,
    response: Response,
) -> Result<Vec<(f64, f64, f64, usize)>> {
    let levels = distinct_levels(successful(rows).map(|r| factor.value(r)));
    ensure!(!levels.is_empty(), "sweep has no successful cells");
    let mut out = Vec::with_capacity(levels.len());
    for &level in &levels {
        let values: Vec<f64> = successful(rows)
            .filter(|r| factor.value(r) == level)
            .map(|r| response.value(r))
            .collect();
        let mean = statkit::mean(&values);
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64)
                .sqrt()
        };
        out.push((level, mean, std, values.len()));
    }
    Ok(out)
}
