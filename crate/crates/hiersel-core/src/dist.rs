//! Weight families over ranked supports `1..=k` and seeded sampling.
//!
//! All families produce a normalized [`Pmf`]. "Descending" means the first rank
//! carries the most weight. The triangular family is a discrete linear ramp
//! parameterized by the max/min weight ratio ρ; `power` decays as `i^(−e)`;
//! `shifted_power` is its mirror `(k+1−i)^(−e)`; `exponential` decays as
//! `e^(−λ·i)`. Explicit weight lists are accepted for anything the closed
//! families cannot express.
//!
//! Spec strings (CLI/config): `uniform`, `tri:<ratio>[:asc|:desc]` (descending
//! by default), `pow:<exponent>`, `spow:<exponent>`, `exp:<rate>[:asc|:desc]`,
//! `explicit:<w1,w2,...>`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_core::RngCore;

use crate::numeric::compensated_sum;

use crate::rng::unit_f64;

/// Direction of a ramp-like family over the support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Weight grows with the index.
    Ascending,
    /// Weight shrinks with the index (the default for ramps).
    Descending,
}

/// A weight family, independent of the support size it will be realized on.
#[derive(Clone, Debug, PartialEq)]
pub enum DistributionSpec {
    Uniform,
    Triangular { ratio: f64, orientation: Orientation },
    Power { exponent: f64 },
    ShiftedPower { exponent: f64 },
    Exponential { rate: f64, orientation: Orientation },
    Explicit { weights: Vec<f64> },
}

/// Why a spec could not be realized as a pmf.
#[derive(Clone, Debug, PartialEq)]
pub enum DistError {
    /// Support size k = 0.
    EmptySupport,
    /// Triangular ratio below 1 (the ramp is defined by max/min ≥ 1).
    RatioBelowOne(f64),
    /// Power/shifted-power exponent or exponential rate ≤ 0.
    NonPositiveParameter(f64),
    /// A parameter was NaN or infinite.
    NonFiniteParameter,
    /// An explicit weight was ≤ 0 or non-finite.
    BadExplicitWeight { index: usize, weight: f64 },
    /// Explicit weight list length disagrees with the requested support size.
    ExplicitLengthMismatch { expected: usize, actual: usize },
    /// All realized weights underflowed to zero; nothing left to normalize.
    DegenerateWeights,
    /// A spec string did not parse.
    BadSpecString(String),
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::EmptySupport => write!(f, "support size k must be at least 1"),
            DistError::RatioBelowOne(r) => write!(f, "triangular ratio must be >= 1, got {r}"),
            DistError::NonPositiveParameter(p) => {
                write!(f, "family parameter must be > 0, got {p}")
            }
            DistError::NonFiniteParameter => write!(f, "family parameter must be finite"),
            DistError::BadExplicitWeight { index, weight } => {
                write!(f, "explicit weight #{index} must be a finite positive number, got {weight}")
            }
            DistError::ExplicitLengthMismatch { expected, actual } => {
                write!(f, "explicit weight list has {actual} entries but support size is {expected}")
            }
            DistError::DegenerateWeights => {
                write!(f, "all weights evaluated to zero; distribution is degenerate")
            }
            DistError::BadSpecString(s) => write!(f, "cannot parse distribution spec: {s}"),
        }
    }
}

impl core::error::Error for DistError {}

/// A normalized probability mass function over `0..k` with a precomputed
/// cumulative table for O(log k) sampling.
///
/// Indices are zero-based here; tables and file formats that report
/// within-hierarchy ranks use the one-based value `index + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Pmf {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Draws one index with probability `probs[i]`, consuming exactly one
    /// uniform variate. Zero-probability entries are never returned: the
    /// search is strict, so an empty cumulative interval cannot be hit.
    pub fn sample(&self, rng: &mut impl RngCore) -> usize {
        let u = unit_f64(rng);
        // Smallest i with u < cumulative[i]. The final entry is exactly 1.0
        // and u < 1.0, so the result is always in range.
        self.cumulative.partition_point(|&c| c <= u)
    }
}

fn check_param(value: f64) -> Result<f64, DistError> {
    if !value.is_finite() {
        return Err(DistError::NonFiniteParameter);
    }
    if value <= 0.0 {
        return Err(DistError::NonPositiveParameter(value));
    }
    Ok(value)
}

fn raw_weights(spec: &DistributionSpec, k: usize) -> Result<Vec<f64>, DistError> {
    let weights = match spec {
        DistributionSpec::Uniform => alloc::vec![1.0; k],
        DistributionSpec::Triangular { ratio, orientation } => {
            if !ratio.is_finite() {
                return Err(DistError::NonFiniteParameter);
            }
            if *ratio < 1.0 {
                return Err(DistError::RatioBelowOne(*ratio));
            }
            // weight(1) = ρ, weight(k) = 1, linear in between.
            let mut w: Vec<f64> = (0..k)
                .map(|i| {
                    if k == 1 {
                        1.0
                    } else {
                        ratio - (ratio - 1.0) * i as f64 / (k - 1) as f64
                    }
                })
                .collect();
            if *orientation == Orientation::Ascending {
                w.reverse();
            }
            w
        }
        DistributionSpec::Power { exponent } => {
            let e = check_param(*exponent)?;
            (1..=k).map(|i| libm::pow(i as f64, -e)).collect()
        }
        DistributionSpec::ShiftedPower { exponent } => {
            let e = check_param(*exponent)?;
            (1..=k).map(|i| libm::pow((k + 1 - i) as f64, -e)).collect()
        }
        DistributionSpec::Exponential { rate, orientation } => {
            let r = check_param(*rate)?;
            let mut w: Vec<f64> = (1..=k).map(|i| libm::exp(-r * i as f64)).collect();
            if *orientation == Orientation::Ascending {
                w.reverse();
            }
            w
        }
        DistributionSpec::Explicit { weights } => {
            if weights.len() != k {
                return Err(DistError::ExplicitLengthMismatch {
                    expected: k,
                    actual: weights.len(),
                });
            }
            for (index, &weight) in weights.iter().enumerate() {
                if !weight.is_finite() || weight <= 0.0 {
                    return Err(DistError::BadExplicitWeight { index, weight });
                }
            }
            weights.clone()
        }
    };
    Ok(weights)
}

/// Realizes a spec on a support of size `k`.
///
/// `k = 1` yields `[1.0]` for every family (parameters are still validated).
/// Probabilities sum to 1 within 1e-12 for supports up to 10^6.
pub fn make_pmf(spec: &DistributionSpec, k: usize) -> Result<Pmf, DistError> {
    if k == 0 {
        return Err(DistError::EmptySupport);
    }
    let weights = raw_weights(spec, k)?;
    let total = compensated_sum(&weights);
    // NaN totals fail the is_finite test, so both degenerate cases land here.
    if !total.is_finite() || total <= 0.0 {
        return Err(DistError::DegenerateWeights);
    }

    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut cumulative = Vec::with_capacity(k);
    let mut running = 0.0_f64;
    let mut comp = 0.0_f64;
    for &p in &probs {
        let t = running + p;
        if running.abs() >= p.abs() {
            comp += (running - t) + p;
        } else {
            comp += (p - t) + running;
        }
        running = t;
        cumulative.push((running + comp).min(1.0));
    }
    // Guarantee the sampler's "u < 1.0 always lands" contract exactly.
    cumulative[k - 1] = 1.0;

    Ok(Pmf { probs, cumulative })
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Ascending => write!(f, "asc"),
            Orientation::Descending => write!(f, "desc"),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Uniform => write!(f, "uniform"),
            DistributionSpec::Triangular { ratio, orientation } => {
                write!(f, "tri:{ratio}:{orientation}")
            }
            DistributionSpec::Power { exponent } => write!(f, "pow:{exponent}"),
            DistributionSpec::ShiftedPower { exponent } => write!(f, "spow:{exponent}"),
            DistributionSpec::Exponential { rate, orientation } => {
                write!(f, "exp:{rate}:{orientation}")
            }
            DistributionSpec::Explicit { weights } => {
                write!(f, "explicit:")?;
                for (i, w) in weights.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_orientation(s: &str, default: Orientation) -> Result<Orientation, ()> {
    match s {
        "" => Ok(default),
        "asc" => Ok(Orientation::Ascending),
        "desc" => Ok(Orientation::Descending),
        _ => Err(()),
    }
}

impl FromStr for DistributionSpec {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DistError::BadSpecString(s.to_string());
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match (head, rest) {
            ("uniform", None) => Ok(DistributionSpec::Uniform),
            ("tri", Some(r)) => {
                let (num, orient) = match r.split_once(':') {
                    Some((n, o)) => (n, o),
                    None => (r, ""),
                };
                let ratio: f64 = num.parse().map_err(|_| bad())?;
                let orientation =
                    parse_orientation(orient, Orientation::Descending).map_err(|_| bad())?;
                Ok(DistributionSpec::Triangular { ratio, orientation })
            }
            ("pow", Some(r)) => {
                let exponent: f64 = r.parse().map_err(|_| bad())?;
                Ok(DistributionSpec::Power { exponent })
            }
            ("spow", Some(r)) => {
                let exponent: f64 = r.parse().map_err(|_| bad())?;
                Ok(DistributionSpec::ShiftedPower { exponent })
            }
            ("exp", Some(r)) => {
                let (num, orient) = match r.split_once(':') {
                    Some((n, o)) => (n, o),
                    None => (r, ""),
                };
                let rate: f64 = num.parse().map_err(|_| bad())?;
                let orientation =
                    parse_orientation(orient, Orientation::Descending).map_err(|_| bad())?;
                Ok(DistributionSpec::Exponential { rate, orientation })
            }
            ("explicit", Some(r)) => {
                let weights: Result<Vec<f64>, _> =
                    r.split(',').map(|w| w.trim().parse::<f64>()).collect();
                let weights = weights.map_err(|_| bad())?;
                if weights.is_empty() {
                    return Err(bad());
                }
                Ok(DistributionSpec::Explicit { weights })
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn probs(spec: &DistributionSpec, k: usize) -> Vec<f64> {
        make_pmf(spec, k).unwrap().probs().to_vec()
    }

    #[test]
    fn uniform_four() {
        assert_eq!(probs(&DistributionSpec::Uniform, 4), vec![0.25; 4]);
    }

    #[test]
    fn triangular_ratio_three_descending() {
        let p = probs(
            &DistributionSpec::Triangular { ratio: 3.0, orientation: Orientation::Descending },
            3,
        );
        // weights [3, 2, 1] normalized
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn triangular_ratio_one_is_uniform() {
        let p = probs(
            &DistributionSpec::Triangular { ratio: 1.0, orientation: Orientation::Descending },
            5,
        );
        for v in p {
            assert_abs_diff_eq!(v, 0.2, epsilon = 1e-15);
        }
    }

    #[test]
    fn triangular_ascending_reverses_the_ramp() {
        let desc = probs(
            &DistributionSpec::Triangular { ratio: 4.0, orientation: Orientation::Descending },
            6,
        );
        let mut asc = probs(
            &DistributionSpec::Triangular { ratio: 4.0, orientation: Orientation::Ascending },
            6,
        );
        asc.reverse();
        assert_eq!(desc, asc);
    }

    #[test]
    fn power_exponent_one_k_two() {
        let p = probs(&DistributionSpec::Power { exponent: 1.0 }, 2);
        assert_abs_diff_eq!(p[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn shifted_power_mirrors_power() {
        let pow = probs(&DistributionSpec::Power { exponent: 1.7 }, 9);
        let mut spow = probs(&DistributionSpec::ShiftedPower { exponent: 1.7 }, 9);
        spow.reverse();
        for (a, b) in pow.iter().zip(&spow) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn every_family_collapses_at_k_one() {
        let specs = [
            DistributionSpec::Uniform,
            DistributionSpec::Triangular { ratio: 7.0, orientation: Orientation::Ascending },
            DistributionSpec::Power { exponent: 2.0 },
            DistributionSpec::ShiftedPower { exponent: 2.0 },
            DistributionSpec::Exponential { rate: 1.0, orientation: Orientation::Descending },
            DistributionSpec::Explicit { weights: vec![5.0] },
        ];
        for spec in &specs {
            assert_eq!(probs(spec, 1), vec![1.0], "family {spec}");
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert_eq!(make_pmf(&DistributionSpec::Uniform, 0), Err(DistError::EmptySupport));
        assert_eq!(
            make_pmf(
                &DistributionSpec::Triangular { ratio: 0.5, orientation: Orientation::Descending },
                3
            ),
            Err(DistError::RatioBelowOne(0.5))
        );
        assert_eq!(
            make_pmf(&DistributionSpec::Power { exponent: 0.0 }, 3),
            Err(DistError::NonPositiveParameter(0.0))
        );
        assert_eq!(
            make_pmf(&DistributionSpec::Exponential { rate: -1.0, orientation: Orientation::Descending }, 3),
            Err(DistError::NonPositiveParameter(-1.0))
        );
        assert_eq!(
            make_pmf(&DistributionSpec::Explicit { weights: vec![1.0, 0.0] }, 2),
            Err(DistError::BadExplicitWeight { index: 1, weight: 0.0 })
        );
        assert_eq!(
            make_pmf(&DistributionSpec::Explicit { weights: vec![1.0, 2.0] }, 3),
            Err(DistError::ExplicitLengthMismatch { expected: 3, actual: 2 })
        );
        assert!(matches!(
            make_pmf(&DistributionSpec::Triangular { ratio: f64::NAN, orientation: Orientation::Descending }, 3),
            Err(DistError::NonFiniteParameter)
        ));
    }

    #[test]
    fn normalization_holds_at_large_support() {
        for spec in [
            DistributionSpec::Uniform,
            DistributionSpec::Triangular { ratio: 9.0, orientation: Orientation::Descending },
            DistributionSpec::Power { exponent: 0.82 },
            DistributionSpec::ShiftedPower { exponent: 2.094 },
            DistributionSpec::Exponential { rate: 0.001, orientation: Orientation::Ascending },
        ] {
            let pmf = make_pmf(&spec, 1_000_000).unwrap();
            let total = compensated_sum(pmf.probs());
            assert!((total - 1.0).abs() <= 1e-12, "{spec}: sum off by {}", total - 1.0);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_respects_singletons() {
        let pmf = make_pmf(&DistributionSpec::Uniform, 1).unwrap();
        let mut rng = stream(99);
        for _ in 0..100 {
            assert_eq!(pmf.sample(&mut rng), 0);
        }

        let pmf = make_pmf(&DistributionSpec::Power { exponent: 1.3 }, 50).unwrap();
        let a: Vec<usize> = {
            let mut rng = stream(4);
            (0..200).map(|_| pmf.sample(&mut rng)).collect()
        };
        let b: Vec<usize> = {
            let mut rng = stream(4);
            (0..200).map(|_| pmf.sample(&mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn zero_probability_entries_are_never_sampled() {
        // Realize [0, 1] through a pmf with an underflowed first weight: an
        // exponential with a huge rate concentrates all mass on index 0, so
        // reverse it via ascending orientation to park the mass at index 1.
        let pmf = Pmf { probs: vec![0.0, 1.0], cumulative: vec![0.0, 1.0] };
        let mut rng = stream(11);
        for _ in 0..1000 {
            assert_eq!(pmf.sample(&mut rng), 1);
        }
    }

    #[test]
    fn empirical_frequencies_match_probabilities() {
        let pmf = make_pmf(&DistributionSpec::Uniform, 2).unwrap();
        let mut rng = stream(2024);
        let draws = 1_000_000;
        let mut counts = [0u64; 2];
        for _ in 0..draws {
            counts[pmf.sample(&mut rng)] += 1;
        }
        // binomial: sigma = sqrt(p(1-p)/T) = 0.0005
        for c in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.5).abs() < 5.0 * 0.0005, "freq {freq}");
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        let cases = [
            "uniform",
            "tri:3:desc",
            "tri:1.5:asc",
            "pow:2.094",
            "spow:3.791",
            "exp:0.82:desc",
            "explicit:1,2,3.5",
        ];
        for s in cases {
            let spec: DistributionSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        // default orientation is descending
        let spec: DistributionSpec = "tri:4".parse().unwrap();
        assert_eq!(
            spec,
            DistributionSpec::Triangular { ratio: 4.0, orientation: Orientation::Descending }
        );
        let spec: DistributionSpec = "exp:1.25".parse().unwrap();
        assert_eq!(
            spec,
            DistributionSpec::Exponential { rate: 1.25, orientation: Orientation::Descending }
        );
    }

    #[test]
    fn bad_spec_strings_are_reported() {
        for s in ["", "tri", "tri:abc", "tri:2:up", "pow:", "nope:1", "explicit:"] {
            assert!(
                matches!(s.parse::<DistributionSpec>(), Err(DistError::BadSpecString(_))),
                "expected parse failure for {s:?}"
            );
        }
    }
}
