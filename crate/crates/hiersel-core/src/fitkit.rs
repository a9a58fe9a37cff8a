//! Rank-series construction and the least-squares fits used throughout:
//! log-log power law with adjusted R², a two-term power model
//! `a·x^(−b) + c·x^(d)`, and a shifted power model `a·(s−x)^(−b)`.

use alloc::vec::Vec;
use core::fmt;

use crate::hsmodel::FrequencyTable;
use crate::numeric::Accumulator;

#[derive(Clone, Debug, PartialEq)]
pub enum FitError {
    /// Fewer usable points than the fit requires.
    InsufficientData { needed: usize, got: usize },
    /// Every frequency in the table was zero.
    AllZero,
    /// A frequency was negative or not finite.
    BadFrequency { index: usize, value: f64 },
    LengthMismatch { xs: usize, ys: usize },
    /// Raw-space fits need strictly positive, finite coordinates.
    NonPositiveValue { index: usize, value: f64 },
    /// All xs identical: no slope information.
    SingularDesign,
    /// Shifted fit needs `shift` strictly above every x.
    ShiftTooSmall { shift: f64, max_x: f64 },
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::InsufficientData { needed, got } => {
                write!(f, "need at least {needed} positive points, got {got}")
            }
            FitError::AllZero => write!(f, "every frequency is zero; nothing to rank"),
            FitError::BadFrequency { index, value } => {
                write!(f, "frequency at index {index} is {value}; must be finite and \u{2265} 0")
            }
            FitError::LengthMismatch { xs, ys } => {
                write!(f, "coordinate lists differ in length: {xs} vs {ys}")
            }
            FitError::NonPositiveValue { index, value } => {
                write!(f, "value at index {index} is {value}; must be finite and > 0")
            }
            FitError::SingularDesign => write!(f, "all x values identical; fit is singular"),
            FitError::ShiftTooSmall { shift, max_x } => {
                write!(f, "shift {shift} must exceed the largest x ({max_x})")
            }
        }
    }
}

impl core::error::Error for FitError {}

/// Frequencies sorted descending, with rank `r` = position + 1. Zero
/// frequencies never enter (logs are undefined there); how many were
/// dropped is kept so callers can monitor coverage.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedSeries {
    frequencies: Vec<f64>,
    n_zero: usize,
}

impl RankedSeries {
    /// Ranks a bag of frequencies, in any order. Zeros are dropped into
    /// `n_zero`; negatives and non-finite values are rejected.
    pub fn from_frequencies(values: &[f64]) -> Result<Self, FitError> {
        let mut frequencies = Vec::with_capacity(values.len());
        let mut n_zero = 0usize;
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(FitError::BadFrequency { index, value });
            }
            if value == 0.0 {
                n_zero += 1;
            } else {
                frequencies.push(value);
            }
        }
        if frequencies.is_empty() {
            return Err(FitError::AllZero);
        }
        frequencies.sort_by(|a, b| b.total_cmp(a));
        Ok(RankedSeries { frequencies, n_zero })
    }

    /// Frequencies in rank order (rank 1 first).
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// How many zero-count entries the source had.
    pub fn n_zero(&self) -> usize {
        self.n_zero
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// `(rank, frequency)` pairs, rank starting at 1.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.frequencies.iter().enumerate().map(|(i, &f)| (i + 1, f))
    }

    /// The head of the series: ranks `1..=max_rank`. `n_zero` is preserved,
    /// since it describes the source table rather than the kept head.
    pub fn truncated(&self, max_rank: usize) -> RankedSeries {
        let keep = max_rank.min(self.frequencies.len());
        RankedSeries { frequencies: self.frequencies[..keep].to_vec(), n_zero: self.n_zero }
    }
}

/// Ranks a frequency table. Objects are ordered by count descending, ties
/// broken by (hierarchy, within_rank, object_id) ascending so reruns and
/// permuted inputs produce the identical series.
pub fn rank_series(table: &FrequencyTable) -> Result<RankedSeries, FitError> {
    let mut rows: Vec<&crate::hsmodel::ObjectRow> = table.rows.iter().collect();
    rows.sort_by(|a, b| {
        b.count
            .total_cmp(&a.count)
            .then(a.hierarchy.cmp(&b.hierarchy))
            .then(a.within_rank.cmp(&b.within_rank))
            .then(a.object_id.cmp(&b.object_id))
    });
    let mut frequencies = Vec::with_capacity(rows.len());
    let mut n_zero = 0usize;
    for row in rows {
        if !row.count.is_finite() || row.count < 0.0 {
            return Err(FitError::BadFrequency { index: row.object_id, value: row.count });
        }
        if row.count == 0.0 {
            n_zero += 1;
        } else {
            frequencies.push(row.count);
        }
    }
    if frequencies.is_empty() {
        return Err(FitError::AllZero);
    }
    Ok(RankedSeries { frequencies, n_zero })
}

/// A fitted power law. `alpha` is reported positive (the fitted slope is
/// `−alpha`); the model is `f(r) = exp(log_intercept) · r^(−alpha)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub alpha: f64,
    pub log_intercept: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub n_points: usize,
    /// Zero-count entries excluded from the fit (0 for coordinate fits).
    pub n_zero: usize,
}

fn adjusted_r2(r2: f64, n: usize, n_params: usize) -> f64 {
    1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - n_params as f64)
}

/// Slope/intercept OLS with compensated accumulation (two-pass: means first,
/// then centered moments). Returns (slope, intercept, r2).
fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64), FitError> {
    let n = xs.len() as f64;
    let mut mx = Accumulator::new();
    let mut my = Accumulator::new();
    for (&x, &y) in xs.iter().zip(ys) {
        mx.add(x);
        my.add(y);
    }
    let (xbar, ybar) = (mx.total() / n, my.total() / n);

    let mut sxx = Accumulator::new();
    let mut sxy = Accumulator::new();
    let mut sst = Accumulator::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - xbar, y - ybar);
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        sst.add(dy * dy);
    }
    let sxx = sxx.total();
    if sxx == 0.0 {
        return Err(FitError::SingularDesign);
    }
    let slope = sxy.total() / sxx;
    let intercept = ybar - slope * xbar;

    let mut sse = Accumulator::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        sse.add(r * r);
    }
    let (sse, sst) = (sse.total(), sst.total());
    // Flat data fits itself perfectly: the zero-slope line has zero residual.
    let r2 = if sst == 0.0 { 1.0 } else { 1.0 - sse / sst };
    Ok((slope, intercept, r2))
}

/// OLS of `ln(frequency)` on `ln(rank)`. `alpha = −slope`;
/// `adj_r2 = 1 − (1−r2)(n−1)/(n−2)`.
pub fn fit_power_loglog(series: &RankedSeries) -> Result<FitResult, FitError> {
    let n = series.len();
    if n < 3 {
        return Err(FitError::InsufficientData { needed: 3, got: n });
    }
    let xs: Vec<f64> = (1..=n).map(|r| libm::log(r as f64)).collect();
    let ys: Vec<f64> = series.frequencies().iter().map(|&f| libm::log(f)).collect();
    if ys.iter().all(|&y| y == ys[0]) {
        // A constant series is fit exactly by the zero-slope line.
        return Ok(FitResult {
            alpha: 0.0,
            log_intercept: ys[0],
            r2: 1.0,
            adj_r2: 1.0,
            n_points: n,
            n_zero: series.n_zero(),
        });
    }
    let (slope, intercept, r2) = ols(&xs, &ys)?;
    let alpha = if slope == 0.0 { 0.0 } else { -slope };
    Ok(FitResult {
        alpha,
        log_intercept: intercept,
        r2,
        adj_r2: adjusted_r2(r2, n, 2),
        n_points: n,
        n_zero: series.n_zero(),
    })
}

/// Two-term power model `f(x) = a·x^(−b) + c·x^(d)`: a decaying head plus a
/// rising tail. `a, c ≥ 0` and `b, d > 0` always hold; a term that the data
/// does not support is dropped (its amplitude set to 0, exponent to 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoTermFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub sse: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub n_points: usize,
}

/// Signed single-term model `amp · x^(sign·e)`.
#[derive(Clone, Copy)]
enum Term {
    Decay,
    Grow,
}

impl Term {
    fn sign(self) -> f64 {
        match self {
            Term::Decay => -1.0,
            Term::Grow => 1.0,
        }
    }
}

/// Best nonnegative amplitude for a fixed exponent: the projection
/// `amp = Σ v·y / Σ v²` clamped at zero. Returns (sse, amp).
fn amplitude_at(xs: &[f64], ys: &[f64], term: Term, e: f64) -> (f64, f64) {
    let sign = term.sign();
    let mut vv = Accumulator::new();
    let mut vy = Accumulator::new();
    let mut v = Vec::with_capacity(xs.len());
    for (&x, &y) in xs.iter().zip(ys) {
        let vi = libm::pow(x, sign * e);
        v.push(vi);
        vv.add(vi * vi);
        vy.add(vi * y);
    }
    let vv = vv.total();
    let amp = if vv > 0.0 { (vy.total() / vv).max(0.0) } else { 0.0 };
    let mut sse = Accumulator::new();
    for (&y, &vi) in ys.iter().zip(&v) {
        let r = y - amp * vi;
        sse.add(r * r);
    }
    (sse.total(), amp)
}

const EXP_GRID_START: f64 = 0.05;
const EXP_GRID_STEP: f64 = 0.01;
const EXP_GRID_CELLS: usize = 795; // start + 795 steps = 8.0

/// Nonlinear least squares for one power term: exponent grid search with the
/// amplitude projected out at every step, then ternary refinement of the best
/// cell. Returns (amp, exponent, sse).
fn single_power_nls(xs: &[f64], ys: &[f64], term: Term) -> (f64, f64, f64) {
    let mut best_e = EXP_GRID_START;
    let mut best_sse = f64::INFINITY;
    for i in 0..=EXP_GRID_CELLS {
        let e = EXP_GRID_START + i as f64 * EXP_GRID_STEP;
        let (sse, _) = amplitude_at(xs, ys, term, e);
        if sse < best_sse {
            best_sse = sse;
            best_e = e;
        }
    }
    let mut lo = (best_e - EXP_GRID_STEP).max(1e-9);
    let mut hi = best_e + EXP_GRID_STEP;
    for _ in 0..300 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if amplitude_at(xs, ys, term, m1).0 < amplitude_at(xs, ys, term, m2).0 {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let e = (lo + hi) / 2.0;
    let (sse, amp) = amplitude_at(xs, ys, term, e);
    (amp, e, sse)
}

/// Full-model residual sum of squares.
fn two_term_sse(xs: &[f64], ys: &[f64], fit: (f64, f64, f64, f64)) -> f64 {
    let (a, b, c, d) = fit;
    let mut sse = Accumulator::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (a * libm::pow(x, -b) + c * libm::pow(x, d));
        sse.add(r * r);
    }
    sse.total()
}

/// Both amplitudes for fixed exponents `(b, d)` via the 2×2 normal equations,
/// falling back to the better single term when a solution goes negative.
/// Returns (sse, a, c).
fn amplitudes_at(xs: &[f64], ys: &[f64], b: f64, d: f64) -> (f64, f64, f64) {
    let mut uu = Accumulator::new();
    let mut uw = Accumulator::new();
    let mut ww = Accumulator::new();
    let mut uy = Accumulator::new();
    let mut wy = Accumulator::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let u = libm::pow(x, -b);
        let w = libm::pow(x, d);
        uu.add(u * u);
        uw.add(u * w);
        ww.add(w * w);
        uy.add(u * y);
        wy.add(w * y);
    }
    let (uu, uw, ww, uy, wy) = (uu.total(), uw.total(), ww.total(), uy.total(), wy.total());
    let det = uu * ww - uw * uw;
    let (mut a, mut c) = if det.abs() > 1e-300 {
        ((uy * ww - wy * uw) / det, (wy * uu - uy * uw) / det)
    } else {
        (f64::NEG_INFINITY, f64::NEG_INFINITY)
    };
    if !(a >= 0.0 && c >= 0.0) {
        // Clamp to the axis: keep whichever single term explains more.
        let a_only = if uu > 0.0 { (uy / uu).max(0.0) } else { 0.0 };
        let c_only = if ww > 0.0 { (wy / ww).max(0.0) } else { 0.0 };
        let sse_a = two_term_sse(xs, ys, (a_only, b, 0.0, d));
        let sse_c = two_term_sse(xs, ys, (0.0, b, c_only, d));
        if sse_a <= sse_c {
            (a, c) = (a_only, 0.0);
        } else {
            (a, c) = (0.0, c_only);
        }
    }
    (two_term_sse(xs, ys, (a, b, c, d)), a, c)
}

const JOINT_GRID_START: f64 = 0.1;
const JOINT_GRID_STEP: f64 = 0.01;
const JOINT_GRID_CELLS: usize = 490; // start + 490 steps = 5.0

/// Joint fit over both exponents: grid search with amplitudes projected out,
/// then coordinate descent on (b, d) until the sse improvement per sweep
/// drops below 1e-6. Returns (a, b, c, d).
fn joint_two_term_nls(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let mut best = (f64::INFINITY, JOINT_GRID_START, JOINT_GRID_START, 0.0, 0.0);
    for i in 0..=JOINT_GRID_CELLS {
        let b = JOINT_GRID_START + i as f64 * JOINT_GRID_STEP;
        for j in 0..=JOINT_GRID_CELLS {
            let d = JOINT_GRID_START + j as f64 * JOINT_GRID_STEP;
            let (sse, a, c) = amplitudes_at(xs, ys, b, d);
            if sse < best.0 {
                best = (sse, b, d, a, c);
            }
        }
    }
    let (mut sse, mut b, mut d, mut a, mut c) = best;
    for _ in 0..100 {
        let prev = sse;
        let refine = |fixed_other: f64, along_b: bool, center: f64| -> (f64, f64, f64, f64) {
            let mut lo = (center - JOINT_GRID_STEP).max(1e-9);
            let mut hi = center + JOINT_GRID_STEP;
            let eval = |e: f64| {
                if along_b {
                    amplitudes_at(xs, ys, e, fixed_other)
                } else {
                    amplitudes_at(xs, ys, fixed_other, e)
                }
            };
            for _ in 0..200 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if eval(m1).0 < eval(m2).0 {
                    hi = m2;
                } else {
                    lo = m1;
                }
                if hi - lo < 1e-12 {
                    break;
                }
            }
            let e = (lo + hi) / 2.0;
            let (s, na, nc) = eval(e);
            (s, e, na, nc)
        };
        let (s1, nb, na, nc) = refine(d, true, b);
        if s1 < sse {
            (sse, b, a, c) = (s1, nb, na, nc);
        }
        let (s2, nd, na, nc) = refine(b, false, d);
        if s2 < sse {
            (sse, d, a, c) = (s2, nd, na, nc);
        }
        if prev - sse < 1e-6 {
            break;
        }
    }
    (a, b, c, d)
}

fn check_positive_pairs(xs: &[f64], ys: &[f64]) -> Result<(), FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    for (index, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !x.is_finite() || x <= 0.0 {
            return Err(FitError::NonPositiveValue { index, value: x });
        }
        if !y.is_finite() || y <= 0.0 {
            return Err(FitError::NonPositiveValue { index, value: y });
        }
    }
    Ok(())
}

/// Fits `f(x) = a·x^(−b) + c·x^(d)`.
///
/// U-shaped data (a decaying head and a rising tail, the typical case for
/// this model) is handled by decomposition: the head up to the minimum is
/// fit as pure decay, then the rising term is fit to the tail of the
/// residuals. When the head is too short for that, both exponents are
/// searched jointly on a grid with the amplitudes projected out. Whichever
/// candidate — including each single-term fit — leaves the smallest sse
/// wins, so the result is never worse than either term alone.
pub fn fit_two_term_power(xs: &[f64], ys: &[f64]) -> Result<TwoTermFit, FitError> {
    check_positive_pairs(xs, ys)?;
    let n = xs.len();
    if n < 5 {
        return Err(FitError::InsufficientData { needed: 5, got: n });
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(FitError::SingularDesign);
    }

    let mut candidates: Vec<(f64, f64, f64, f64)> = Vec::new();

    let (a, b, _) = single_power_nls(xs, ys, Term::Decay);
    candidates.push((a, b, 0.0, 1.0));
    let (c, d, _) = single_power_nls(xs, ys, Term::Grow);
    candidates.push((0.0, 1.0, c, d));

    let argmin = ys
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if argmin >= 3 {
        // Decay regime: everything left of the minimum.
        let (a, b, _) = single_power_nls(&xs[..argmin], &ys[..argmin], Term::Decay);
        let residuals: Vec<f64> =
            xs.iter().zip(ys).map(|(&x, &y)| y - a * libm::pow(x, -b)).collect();
        // Rising regime: residuals after the last undershoot.
        let start = residuals
            .iter()
            .rposition(|&r| r < 0.0)
            .map_or(0, |i| i + 1);
        if n - start >= 3 {
            let (c, d, _) = single_power_nls(&xs[start..], &residuals[start..], Term::Grow);
            candidates.push((a, b, c, d));
        } else {
            candidates.push((a, b, 0.0, 1.0));
        }
    } else {
        candidates.push(joint_two_term_nls(xs, ys));
    }

    let (mut best, mut best_sse) = (candidates[0], f64::INFINITY);
    for &cand in &candidates {
        let sse = two_term_sse(xs, ys, cand);
        if sse < best_sse {
            best_sse = sse;
            best = cand;
        }
    }

    let mut sst = Accumulator::new();
    let mean = {
        let mut m = Accumulator::new();
        for &y in ys {
            m.add(y);
        }
        m.total() / n as f64
    };
    for &y in ys {
        sst.add((y - mean) * (y - mean));
    }
    let sst = sst.total();
    let r2 = if sst == 0.0 {
        if best_sse == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - best_sse / sst
    };
    let (a, b, c, d) = best;
    Ok(TwoTermFit {
        a,
        b,
        c,
        d,
        sse: best_sse,
        r2,
        adj_r2: adjusted_r2(r2, n, 4),
        n_points: n,
    })
}

fn shifted_support(xs: &[f64], ys: &[f64], shift: f64) -> Result<Vec<f64>, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.len() < 3 {
        return Err(FitError::InsufficientData { needed: 3, got: xs.len() });
    }
    let max_x = xs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    if !shift.is_finite() || shift <= max_x {
        return Err(FitError::ShiftTooSmall { shift, max_x });
    }
    for (index, &y) in ys.iter().enumerate() {
        if !y.is_finite() || y <= 0.0 {
            return Err(FitError::NonPositiveValue { index, value: y });
        }
    }
    Ok(xs.iter().map(|&x| shift - x).collect())
}

fn raw_r2(ys: &[f64], sse: f64) -> f64 {
    let n = ys.len() as f64;
    let mut m = Accumulator::new();
    for &y in ys {
        m.add(y);
    }
    let mean = m.total() / n;
    let mut sst = Accumulator::new();
    for &y in ys {
        sst.add((y - mean) * (y - mean));
    }
    let sst = sst.total();
    if sst == 0.0 {
        if sse == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - sse / sst
    }
}

/// Fits `f(x) = a·(shift−x)^(−b)` by nonlinear least squares in raw space
/// (exponent search with the amplitude projected out). Raw-space is the
/// primary variant because the far-from-shift points carry almost all of the
/// curve's mass; see [`fit_shifted_power_log`] for the log-space alternative.
///
/// Returned as a [`FitResult`] with `alpha = b` and `log_intercept = ln a`;
/// `r2`/`adj_r2` are computed on raw residuals.
pub fn fit_shifted_power(xs: &[f64], ys: &[f64], shift: f64) -> Result<FitResult, FitError> {
    let g = shifted_support(xs, ys, shift)?;
    let (a, b, sse) = single_power_nls(&g, ys, Term::Decay);
    let r2 = raw_r2(ys, sse);
    Ok(FitResult {
        alpha: b,
        log_intercept: libm::log(a),
        r2,
        adj_r2: adjusted_r2(r2, ys.len(), 2),
        n_points: ys.len(),
        n_zero: 0,
    })
}

/// Log-space variant of [`fit_shifted_power`]: OLS of `ln y` on
/// `ln(shift−x)`. Weights relative rather than absolute error, which can
/// substantially change the exponent on data spanning decades; exposed for
/// sensitivity checks.
pub fn fit_shifted_power_log(xs: &[f64], ys: &[f64], shift: f64) -> Result<FitResult, FitError> {
    let g = shifted_support(xs, ys, shift)?;
    let lx: Vec<f64> = g.iter().map(|&v| libm::log(v)).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| libm::log(y)).collect();
    let (slope, intercept, r2) = ols(&lx, &ly)?;
    let alpha = if slope == 0.0 { 0.0 } else { -slope };
    Ok(FitResult {
        alpha,
        log_intercept: intercept,
        r2,
        adj_r2: adjusted_r2(r2, ys.len(), 2),
        n_points: ys.len(),
        n_zero: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hsmodel::ObjectRow;
    use alloc::vec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn table(counts: &[f64]) -> FrequencyTable {
        let rows = counts
            .iter()
            .enumerate()
            .map(|(i, &count)| ObjectRow {
                object_id: i,
                hierarchy: 1,
                within_rank: i + 1,
                count,
            })
            .collect();
        FrequencyTable { rows, total: counts.iter().sum() }
    }

    #[test]
    fn ranking_sorts_descending_and_keeps_ties() {
        let s = rank_series(&table(&[5.0, 2.0, 2.0])).unwrap();
        assert_eq!(s.frequencies(), &[5.0, 2.0, 2.0]);
        assert_eq!(s.n_zero(), 0);
        let pairs: Vec<(usize, f64)> = s.pairs().collect();
        assert_eq!(pairs, vec![(1, 5.0), (2, 2.0), (3, 2.0)]);
    }

    #[test]
    fn zeros_are_dropped_but_counted() {
        let s = rank_series(&table(&[0.0, 7.0])).unwrap();
        assert_eq!(s.frequencies(), &[7.0]);
        assert_eq!(s.n_zero(), 1);
    }

    #[test]
    fn ranking_is_order_independent() {
        let a = RankedSeries::from_frequencies(&[3.0, 9.0, 1.0, 4.0]).unwrap();
        let b = RankedSeries::from_frequencies(&[9.0, 1.0, 4.0, 3.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ranking_rejects_degenerate_input() {
        assert_eq!(rank_series(&table(&[0.0, 0.0])), Err(FitError::AllZero));
        assert_eq!(
            RankedSeries::from_frequencies(&[1.0, -2.0]),
            Err(FitError::BadFrequency { index: 1, value: -2.0 })
        );
    }

    #[test]
    fn truncation_keeps_the_head() {
        let s = RankedSeries::from_frequencies(&[5.0, 4.0, 3.0, 2.0, 0.0]).unwrap();
        let head = s.truncated(2);
        assert_eq!(head.frequencies(), &[5.0, 4.0]);
        assert_eq!(head.n_zero(), 1);
        assert_eq!(s.truncated(100).len(), 4);
    }

    #[test]
    fn loglog_recovers_an_exact_power_law() {
        let freqs: Vec<f64> = (1..=100).map(|r| 1000.0 * libm::pow(r as f64, -1.5)).collect();
        let fit = fit_power_loglog(&RankedSeries::from_frequencies(&freqs).unwrap()).unwrap();
        assert_abs_diff_eq!(fit.alpha, 1.5, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.adj_r2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.log_intercept, libm::log(1000.0), epsilon = 1e-9);
    }

    #[test]
    fn loglog_handles_flat_series() {
        let fit =
            fit_power_loglog(&RankedSeries::from_frequencies(&[7.0; 5]).unwrap()).unwrap();
        assert_eq!(fit.alpha, 0.0);
        assert_eq!(fit.r2, 1.0);
    }

    #[test]
    fn loglog_four_point_case() {
        let s = RankedSeries::from_frequencies(&[8.0, 4.0, 2.0, 1.0]).unwrap();
        let fit = fit_power_loglog(&s).unwrap();
        assert_abs_diff_eq!(fit.alpha, 1.4590219583, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.log_intercept, 2.1989333516, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.r2, 0.9607604883, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.adj_r2, 0.9411407325, epsilon = 1e-9);
        assert_eq!(fit.n_points, 4);
    }

    #[test]
    fn loglog_is_scale_invariant() {
        let base: Vec<f64> = (1..=50).map(|r| 300.0 * libm::pow(r as f64, -0.9)).collect();
        let scaled: Vec<f64> = base.iter().map(|f| f * 7.0).collect();
        let f1 = fit_power_loglog(&RankedSeries::from_frequencies(&base).unwrap()).unwrap();
        let f2 = fit_power_loglog(&RankedSeries::from_frequencies(&scaled).unwrap()).unwrap();
        assert_abs_diff_eq!(f1.alpha, f2.alpha, epsilon = 1e-9);
        assert_abs_diff_eq!(f1.r2, f2.r2, epsilon = 1e-9);
        assert_abs_diff_eq!(f2.log_intercept - f1.log_intercept, libm::log(7.0), epsilon = 1e-9);
    }

    #[test]
    fn loglog_recovery_stays_tight_at_scale() {
        let freqs: Vec<f64> =
            (1..=100_000).map(|r| 2.0e7 * libm::pow(r as f64, -1.21)).collect();
        let fit = fit_power_loglog(&RankedSeries::from_frequencies(&freqs).unwrap()).unwrap();
        assert_abs_diff_eq!(fit.alpha, 1.21, epsilon = 1e-9);
    }

    #[test]
    fn loglog_needs_three_points() {
        let s = RankedSeries::from_frequencies(&[2.0, 1.0]).unwrap();
        assert_eq!(
            fit_power_loglog(&s),
            Err(FitError::InsufficientData { needed: 3, got: 2 })
        );
    }

    #[test]
    fn adjusted_r2_matches_definition_at_n3() {
        let s = RankedSeries::from_frequencies(&[9.0, 3.0, 2.0]).unwrap();
        let fit = fit_power_loglog(&s).unwrap();
        assert_abs_diff_eq!(fit.adj_r2, 1.0 - (1.0 - fit.r2) * 2.0, epsilon = 1e-12);
    }

    #[test]
    fn two_term_round_trips_noiseless_data() {
        let xs: Vec<f64> = (1..=8).map(|x| x as f64).collect();
        let ys: Vec<f64> =
            xs.iter().map(|&x| 2.0 * libm::pow(x, -1.0) + 0.5 * libm::pow(x, 1.5)).collect();
        let fit = fit_two_term_power(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.a, 2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(fit.b, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(fit.c, 0.5, epsilon = 1e-3);
        assert_abs_diff_eq!(fit.d, 1.5, epsilon = 1e-3);
    }

    #[test]
    fn two_term_u_shaped_reference_case() {
        let xs: Vec<f64> = (1..=8).map(|x| x as f64).collect();
        let ys = [81864.0, 16156.0, 9603.0, 6687.0, 5546.0, 4672.0, 4984.0, 8731.0];
        let fit = fit_two_term_power(&xs, &ys).unwrap();
        assert_relative_eq!(fit.a, 81533.957357, max_relative = 1e-4);
        assert_abs_diff_eq!(fit.b, 2.09393161, epsilon = 1e-5);
        assert_relative_eq!(fit.c, 69.462782, max_relative = 1e-4);
        assert_abs_diff_eq!(fit.d, 2.19273258, epsilon = 1e-5);
        assert_abs_diff_eq!(fit.adj_r2, 0.99446733, epsilon = 1e-6);
    }

    #[test]
    fn two_term_never_loses_to_a_single_term() {
        let xs: Vec<f64> = (1..=8).map(|x| x as f64).collect();
        let ys = [81864.0, 16156.0, 9603.0, 6687.0, 5546.0, 4672.0, 4984.0, 8731.0];
        let fit = fit_two_term_power(&xs, &ys).unwrap();
        let (a, b, s_decay) = single_power_nls(&xs, &ys, Term::Decay);
        let (_, _, s_grow) = single_power_nls(&xs, &ys, Term::Grow);
        assert!(a > 0.0 && b > 0.0);
        assert!(fit.sse <= s_decay && fit.sse <= s_grow);
    }

    #[test]
    fn two_term_drops_the_rising_term_on_pure_decay() {
        let xs: Vec<f64> = (1..=8).map(|x| x as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 10.0 / x).collect();
        let fit = fit_two_term_power(&xs, &ys).unwrap();
        assert_eq!(fit.c, 0.0);
        assert_abs_diff_eq!(fit.a, 10.0, epsilon = 1e-4);
        assert_abs_diff_eq!(fit.b, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn two_term_rejects_bad_input() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(
            fit_two_term_power(&xs, &ys),
            Err(FitError::InsufficientData { needed: 5, got: 4 })
        );
        let xs = [2.0; 5];
        let ys = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(fit_two_term_power(&xs, &ys), Err(FitError::SingularDesign));
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [1.0, 2.0, 0.0, 4.0, 5.0];
        assert_eq!(
            fit_two_term_power(&xs, &ys),
            Err(FitError::NonPositiveValue { index: 2, value: 0.0 })
        );
    }

    #[test]
    fn shifted_fit_recovers_exact_data() {
        let xs: Vec<f64> = (1..=8).map(|x| x as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 5.0 * libm::pow(9.0 - x, -2.0)).collect();
        let fit = fit_shifted_power(&xs, &ys, 9.0).unwrap();
        assert_abs_diff_eq!(fit.alpha, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(libm::exp(fit.log_intercept), 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.adj_r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn shifted_fit_reference_case() {
        let xs: Vec<f64> = (1..=8).map(|x| x as f64).collect();
        let ys = [2.22, 1.27, 1.44, 1.50, 1.89, 2.63, 5.18, 83.87];
        let fit = fit_shifted_power(&xs, &ys, 9.0).unwrap();
        assert_relative_eq!(libm::exp(fit.log_intercept), 83.841062, max_relative = 1e-4);
        assert_abs_diff_eq!(fit.alpha, 3.79152971, epsilon = 1e-5);
        assert_abs_diff_eq!(fit.adj_r2, 0.99711007, epsilon = 1e-6);
    }

    #[test]
    fn shifted_fit_scales_linearly() {
        let xs: Vec<f64> = (1..=8).map(|x| x as f64).collect();
        let ys = [2.22, 1.27, 1.44, 1.50, 1.89, 2.63, 5.18, 83.87];
        let scaled: Vec<f64> = ys.iter().map(|y| y * 10.0).collect();
        let f1 = fit_shifted_power(&xs, &ys, 9.0).unwrap();
        let f2 = fit_shifted_power(&xs, &scaled, 9.0).unwrap();
        assert_abs_diff_eq!(f1.alpha, f2.alpha, epsilon = 1e-6);
        assert_relative_eq!(
            libm::exp(f2.log_intercept),
            10.0 * libm::exp(f1.log_intercept),
            max_relative = 1e-6
        );
        assert_abs_diff_eq!(f1.adj_r2, f2.adj_r2, epsilon = 1e-9);
    }

    #[test]
    fn shifted_fit_requires_shift_above_support() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [1.0, 2.0, 3.0];
        assert_eq!(
            fit_shifted_power(&xs, &ys, 3.0),
            Err(FitError::ShiftTooSmall { shift: 3.0, max_x: 3.0 })
        );
    }

    #[test]
    fn log_variant_matches_pure_data_and_differs_on_skewed() {
        let xs: Vec<f64> = (1..=8).map(|x| x as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 5.0 * libm::pow(9.0 - x, -2.0)).collect();
        let fit = fit_shifted_power_log(&xs, &ys, 9.0).unwrap();
        assert_abs_diff_eq!(fit.alpha, 2.0, epsilon = 1e-9);

        let skewed = [2.22, 1.27, 1.44, 1.50, 1.89, 2.63, 5.18, 83.87];
        let raw = fit_shifted_power(&xs, &skewed, 9.0).unwrap();
        let log = fit_shifted_power_log(&xs, &skewed, 9.0).unwrap();
        assert!((raw.alpha - log.alpha).abs() > 0.5);
    }
}
