//! Supporting statistics: correlation, Gaussian kernel density estimation,
//! one-way ANOVA with F p-values, multiple linear regression, and the
//! special functions behind them.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::numeric::Accumulator;

#[derive(Clone, Debug, PartialEq)]
pub enum StatError {
    LengthMismatch { xs: usize, ys: usize },
    InsufficientData { needed: usize, got: usize },
    /// Correlation is undefined when either variable is constant.
    ZeroVariance,
    /// KDE got identical points and no explicit bandwidth.
    DegenerateData,
    BadBandwidth(f64),
    TooFewGroups { got: usize },
    GroupTooSmall { index: usize, got: usize },
    SingularDesign,
    DomainViolation { name: &'static str, value: f64 },
}

impl fmt::Display for StatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatError::LengthMismatch { xs, ys } => {
                write!(f, "paired samples differ in length: {xs} vs {ys}")
            }
            StatError::InsufficientData { needed, got } => {
                write!(f, "need at least {needed} observations, got {got}")
            }
            StatError::ZeroVariance => {
                write!(f, "correlation undefined: a variable has zero variance")
            }
            StatError::DegenerateData => {
                write!(f, "all points identical; supply an explicit bandwidth")
            }
            StatError::BadBandwidth(b) => write!(f, "bandwidth must be finite and > 0, got {b}"),
            StatError::TooFewGroups { got } => write!(f, "need at least 2 groups, got {got}"),
            StatError::GroupTooSmall { index, got } => {
                write!(f, "group {index} has {got} observations; need at least 2")
            }
            StatError::SingularDesign => write!(f, "design matrix is rank-deficient"),
            StatError::DomainViolation { name, value } => {
                write!(f, "{name} = {value} outside the valid domain")
            }
        }
    }
}

impl core::error::Error for StatError {}

/// Compensated arithmetic mean (NaN for an empty slice).
pub fn mean(values: &[f64]) -> f64 {
    let mut acc = Accumulator::new();
    for &v in values {
        acc.add(v);
    }
    acc.total() / values.len() as f64
}

/// Product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatError> {
    if xs.len() != ys.len() {
        return Err(StatError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.len() < 2 {
        return Err(StatError::InsufficientData { needed: 2, got: xs.len() });
    }
    let (xbar, ybar) = (mean(xs), mean(ys));
    let mut sxx = Accumulator::new();
    let mut syy = Accumulator::new();
    let mut sxy = Accumulator::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - xbar, y - ybar);
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    let (sxx, syy) = (sxx.total(), syy.total());
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatError::ZeroVariance);
    }
    Ok((sxy.total() / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Positions 1..n with tied values sharing their average position.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Rank correlation: Pearson on average-rank-transformed data.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, StatError> {
    if xs.len() != ys.len() {
        return Err(StatError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// A kernel density estimate evaluated on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct KdeCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

/// Linear-interpolation quantile of pre-sorted data (the convention used by
/// most numeric environments).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

fn silverman_bandwidth(points: &[f64]) -> Result<f64, StatError> {
    let n = points.len() as f64;
    let m = mean(points);
    let mut ss = Accumulator::new();
    for &p in points {
        ss.add((p - m) * (p - m));
    }
    let sigma = libm::sqrt(ss.total() / (n - 1.0));
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let bw = 0.9 * sigma.min(iqr / 1.34) * libm::pow(n, -0.2);
    if bw > 0.0 {
        return Ok(bw);
    }
    // Heavily tied data can zero out the IQR; fall back to the range.
    let range = sorted[sorted.len() - 1] - sorted[0];
    let bw = 1.06 * range * libm::pow(n, -0.2);
    if bw > 0.0 {
        Ok(bw)
    } else {
        Err(StatError::DegenerateData)
    }
}

/// Gaussian-kernel density estimate on `grid`. Without an explicit
/// bandwidth, Silverman's rule `0.9·min(σ, IQR/1.34)·n^(−1/5)` is used,
/// falling back to `1.06·range·n^(−1/5)` when ties zero it out.
pub fn kde(points: &[f64], bandwidth: Option<f64>, grid: &[f64]) -> Result<KdeCurve, StatError> {
    if points.len() < 2 {
        return Err(StatError::InsufficientData { needed: 2, got: points.len() });
    }
    let bw = match bandwidth {
        Some(b) if b.is_finite() && b > 0.0 => b,
        Some(b) => return Err(StatError::BadBandwidth(b)),
        None => silverman_bandwidth(points)?,
    };
    let norm = 1.0 / (points.len() as f64 * bw * libm::sqrt(2.0 * PI));
    let density = grid
        .iter()
        .map(|&g| {
            let mut acc = Accumulator::new();
            for &p in points {
                let t = (g - p) / bw;
                acc.add(libm::exp(-0.5 * t * t));
            }
            norm * acc.total()
        })
        .collect();
    Ok(KdeCurve { grid: grid.to_vec(), density, bandwidth: bw })
}

/// A one-way ANOVA table for one factor.
#[derive(Clone, Debug, PartialEq)]
pub struct AnovaResult {
    pub factor_name: String,
    pub f_stat: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: f64,
    pub ss_between: f64,
    pub ss_within: f64,
}

/// One-way ANOVA over `groups`, one sample per factor level.
///
/// `F = MS_between / MS_within`; the p-value is the F survival function via
/// the regularized incomplete beta function. Zero within-group variance
/// yields `F = ∞, p = 0` when any means differ and `F = 0, p = 1` when the
/// data are identical everywhere.
pub fn one_way_anova<S: AsRef<[f64]>>(
    factor_name: &str,
    groups: &[S],
) -> Result<AnovaResult, StatError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatError::TooFewGroups { got: k });
    }
    for (index, g) in groups.iter().enumerate() {
        if g.as_ref().len() < 2 {
            return Err(StatError::GroupTooSmall { index, got: g.as_ref().len() });
        }
    }
    let n_total: usize = groups.iter().map(|g| g.as_ref().len()).sum();

    let mut grand = Accumulator::new();
    for g in groups {
        for &v in g.as_ref() {
            grand.add(v);
        }
    }
    let grand = grand.total() / n_total as f64;

    let mut ssb = Accumulator::new();
    let mut ssw = Accumulator::new();
    for g in groups {
        let g = g.as_ref();
        let gm = mean(g);
        let dg = gm - grand;
        ssb.add(g.len() as f64 * dg * dg);
        for &v in g {
            ssw.add((v - gm) * (v - gm));
        }
    }
    let (ss_between, ss_within) = (ssb.total(), ssw.total());
    let (df_between, df_within) = (k - 1, n_total - k);

    let (f_stat, p_value) = if ss_within == 0.0 {
        if ss_between == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
        (f, f_sf(f, df_between as f64, df_within as f64)?)
    };

    Ok(AnovaResult {
        factor_name: factor_name.to_string(),
        f_stat,
        df_between,
        df_within,
        p_value,
        ss_between,
        ss_within,
    })
}

/// OLS fit with intercept and coefficient standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct Regression {
    /// Intercept first, then one coefficient per predictor column.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
}

/// Multiple linear regression of `ys` on the predictor columns (an
/// intercept column is always prepended). Solved by normal equations with
/// Gauss–Jordan elimination; standard errors come from `σ²·(XᵀX)⁻¹`.
pub fn linear_regression<S: AsRef<[f64]>>(
    predictors: &[S],
    ys: &[f64],
) -> Result<Regression, StatError> {
    let n = ys.len();
    let p = predictors.len() + 1;
    for col in predictors {
        if col.as_ref().len() != n {
            return Err(StatError::LengthMismatch { xs: col.as_ref().len(), ys: n });
        }
    }
    if n < p + 1 {
        return Err(StatError::InsufficientData { needed: p + 1, got: n });
    }

    let x_at = |row: usize, col: usize| -> f64 {
        if col == 0 {
            1.0
        } else {
            predictors[col - 1].as_ref()[row]
        }
    };

    // Normal equations: xtx[i][j] = Σ X_i·X_j, xty[i] = Σ X_i·y.
    let mut xtx = vec![vec![0.0f64; p]; p];
    let mut xty = vec![0.0f64; p];
    // The symmetric fill writes xtx[i][j] and xtx[j][i] across rows, which
    // only index loops can express.
    #[allow(clippy::needless_range_loop)]
    for i in 0..p {
        for j in i..p {
            let mut acc = Accumulator::new();
            for t in 0..n {
                acc.add(x_at(t, i) * x_at(t, j));
            }
            xtx[i][j] = acc.total();
            xtx[j][i] = xtx[i][j];
        }
        let mut acc = Accumulator::new();
        for (t, &y) in ys.iter().enumerate() {
            acc.add(x_at(t, i) * y);
        }
        xty[i] = acc.total();
    }

    let inv = invert(&xtx).ok_or(StatError::SingularDesign)?;
    let coefficients: Vec<f64> = (0..p)
        .map(|i| {
            let mut acc = Accumulator::new();
            for j in 0..p {
                acc.add(inv[i][j] * xty[j]);
            }
            acc.total()
        })
        .collect();

    let mut sse = Accumulator::new();
    for (t, &y) in ys.iter().enumerate() {
        let mut yhat = Accumulator::new();
        for (j, &b) in coefficients.iter().enumerate() {
            yhat.add(b * x_at(t, j));
        }
        let r = y - yhat.total();
        sse.add(r * r);
    }
    let sigma2 = sse.total() / (n - p) as f64;
    let std_errors = (0..p).map(|i| libm::sqrt((sigma2 * inv[i][i]).max(0.0))).collect();

    Ok(Regression { coefficients, std_errors })
}

/// Gauss–Jordan inverse with partial pivoting; `None` when rank-deficient.
fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let p = m.len();
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |s, &v| s.max(v.abs()))
        .max(1.0);
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for col in 0..p {
        let pivot_row = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= scale * 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col];
        for j in 0..p {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for i in 0..p {
            if i == col {
                continue;
            }
            let factor = a[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..p {
                a[i][j] -= factor * a[col][j];
                inv[i][j] -= factor * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Lanczos approximation (g = 7, 9 terms), valid for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        return libm::log(PI / libm::sin(PI * x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        a += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * libm::log(2.0 * PI) + (x + 0.5) * libm::log(t) - t + libm::log(a)
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0f64;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)`, accurate to well under
/// 1e-10 absolute over the tested domain.
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64, StatError> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(StatError::DomainViolation { name: "x", value: x });
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(StatError::DomainViolation { name: "a", value: a });
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(StatError::DomainViolation { name: "b", value: b });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * libm::log(x) + b * libm::log(1.0 - x);
    let front = libm::exp(ln_front);
    // The continued fraction converges fastest below the distribution mean;
    // use the reflection identity on the other side.
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Survival function of the F distribution: `P(F_{df1,df2} > f)`.
pub fn f_sf(f: f64, df1: f64, df2: f64) -> Result<f64, StatError> {
    if df1 <= 0.0 || df2 <= 0.0 {
        return Err(StatError::DomainViolation { name: "df", value: df1.min(df2) });
    }
    if f.is_nan() {
        return Err(StatError::DomainViolation { name: "f", value: f });
    }
    if f <= 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    incomplete_beta(df2 / (df2 + df1 * f), df2 / 2.0, df1 / 2.0)
}
