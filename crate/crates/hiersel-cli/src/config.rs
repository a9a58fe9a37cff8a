//! Sweep configuration: which model sizes to visit, how the three weight
//! profiles are derived from per-cell ratio levels, and how cells are seeded.
//!
//! A configuration file is a flat list of `key = value` lines (`#` starts a
//! comment). Level lists accept spaces or commas as separators:
//!
//! ```text
//! m = 4 5 6 7 8
//! n = 2000, 5000, 10000, 20000, 50000
//! draws = 100000
//! fm = spow:2.094
//! fw = pow:0.82
//! fc = pow:3.791
//! replicates = 1
//! master_seed = 42
//! mode = montecarlo
//! ```
//!
//! The family fields also accept *templates* that re-derive the profile from
//! the cell's ratio levels, written with a placeholder in braces:
//!
//! * `tri:{rm}:desc` — triangular ramp whose ratio is the cell's `ratio_m`
//! * `peaked:{rc}` — symmetric tent profile peaking mid-support
//! * `pow:{0.82*rw}` / `spow:{2.094*rm}` — power-family exponent scaled by a
//!   ratio level
//! * `exp:{3.791*rc}:desc` — exponential rate scaled by a ratio level
//!
//! Placeholders name one of the three ratio sources `rm`, `rw`, `rc`.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use hiersel_core::dist::{DistributionSpec, Orientation};

/// Seed used when a configuration or CLI invocation does not provide one.
pub const DEFAULT_MASTER_SEED: u64 = 42;

/// Whether cells draw counts stochastically or take the exact expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    MonteCarlo,
    Expected,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::MonteCarlo => "montecarlo",
            Mode::Expected => "expected",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "montecarlo" | "monte-carlo" | "mc" => Ok(Mode::MonteCarlo),
            "expected" => Ok(Mode::Expected),
            other => bail!("unknown mode '{other}' (expected 'montecarlo' or 'expected')"),
        }
    }
}

/// Which per-cell ratio level a template reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioSource {
    M,
    W,
    C,
}

impl RatioSource {
    pub fn key(self) -> &'static str {
        match self {
            RatioSource::M => "rm",
            RatioSource::W => "rw",
            RatioSource::C => "rc",
        }
    }
}

impl FromStr for RatioSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rm" => Ok(RatioSource::M),
            "rw" => Ok(RatioSource::W),
            "rc" => Ok(RatioSource::C),
            other => bail!("unknown ratio source '{other}' (expected rm, rw, or rc)"),
        }
    }
}

/// The ratio levels of one sweep cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioValues {
    pub rm: f64,
    pub rw: f64,
    pub rc: f64,
}

impl RatioValues {
    pub fn get(&self, source: RatioSource) -> f64 {
        match source {
            RatioSource::M => self.rm,
            RatioSource::W => self.rw,
            RatioSource::C => self.rc,
        }
    }
}

/// A weight profile that may depend on the cell's ratio levels.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyTemplate {
    /// The same distribution in every cell.
    Fixed(DistributionSpec),
    /// Triangular ramp whose max/min ratio is a cell ratio level.
    TriRatio {
        source: RatioSource,
        orientation: Orientation,
    },
    /// Symmetric tent profile: weight rises linearly from 1 at both ends of
    /// the support to the cell's ratio level at the midpoint.
    Peaked { source: RatioSource },
    /// Power decay whose exponent is `base * ratio`.
    PowScaled { base: f64, source: RatioSource },
    /// Mirrored power whose exponent is `base * ratio`.
    SpowScaled { base: f64, source: RatioSource },
    /// Exponential profile whose rate is `base * ratio`.
    ExpScaled {
        base: f64,
        source: RatioSource,
        orientation: Orientation,
    },
}

/// Tent-profile weights over `1..=k`: 1 at both ends, `ratio` at the middle.
///
/// With an even support size the peak falls between the two central slots, so
/// the realized max/min ratio is slightly below the requested one; with an odd
/// size it is exact.
pub fn peaked_weights(k: usize, ratio: f64) -> Result<Vec<f64>> {
    ensure!(
        ratio.is_finite() && ratio >= 1.0,
        "peaked profile needs a finite ratio >= 1, got {ratio}"
    );
    if k <= 1 {
        return Ok(vec![1.0; k.max(1)]);
    }
    let mid = (k - 1) as f64 / 2.0;
    Ok((0..k)
        .map(|i| ratio - (ratio - 1.0) * (i as f64 - mid).abs() / mid)
        .collect())
}

impl FamilyTemplate {
    /// The ratio source this template reads, if any.
    pub fn source(&self) -> Option<RatioSource> {
        match self {
            FamilyTemplate::Fixed(_) => None,
            FamilyTemplate::TriRatio { source, .. }
            | FamilyTemplate::Peaked { source }
            | FamilyTemplate::PowScaled { source, .. }
            | FamilyTemplate::SpowScaled { source, .. }
            | FamilyTemplate::ExpScaled { source, .. } => Some(*source),
        }
    }

    /// Instantiate the template for one cell. `support` is the number of
    /// weights the profile will be evaluated over; only the peaked template
    /// needs it (the other families are size-free), and validation keeps
    /// peaked templates off the within-hierarchy slot where the support
    /// varies from hierarchy to hierarchy.
    pub fn realize(&self, ratios: &RatioValues, support: usize) -> Result<DistributionSpec> {
        let spec = match self {
            FamilyTemplate::Fixed(spec) => spec.clone(),
            FamilyTemplate::TriRatio {
                source,
                orientation,
            } => DistributionSpec::Triangular {
                ratio: ratios.get(*source),
                orientation: *orientation,
            },
            FamilyTemplate::Peaked { source } => DistributionSpec::Explicit {
                weights: peaked_weights(support, ratios.get(*source))?,
            },
            FamilyTemplate::PowScaled { base, source } => DistributionSpec::Power {
                exponent: base * ratios.get(*source),
            },
            FamilyTemplate::SpowScaled { base, source } => DistributionSpec::ShiftedPower {
                exponent: base * ratios.get(*source),
            },
            FamilyTemplate::ExpScaled {
                base,
                source,
                orientation,
            } => DistributionSpec::Exponential {
                rate: base * ratios.get(*source),
                orientation: *orientation,
            },
        };
        Ok(spec)
    }
}

fn orientation_suffix(orientation: Orientation) -> &'static str {
    match orientation {
        Orientation::Descending => "desc",
        Orientation::Ascending => "asc",
    }
}

impl fmt::Display for FamilyTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTemplate::Fixed(spec) => write!(f, "{spec}"),
            FamilyTemplate::TriRatio {
                source,
                orientation,
            } => write!(
                f,
                "tri:{{{}}}:{}",
                source.key(),
                orientation_suffix(*orientation)
            ),
            FamilyTemplate::Peaked { source } => write!(f, "peaked:{{{}}}", source.key()),
            FamilyTemplate::PowScaled { base, source } => {
                write!(f, "pow:{{{}*{}}}", base, source.key())
            }
            FamilyTemplate::SpowScaled { base, source } => {
                write!(f, "spow:{{{}*{}}}", base, source.key())
            }
            FamilyTemplate::ExpScaled {
                base,
                source,
                orientation,
            } => write!(
                f,
                "exp:{{{}*{}}}:{}",
                base,
                source.key(),
                orientation_suffix(*orientation)
            ),
        }
    }
}

/// Parse the inside of a `{...}` placeholder: either `rm` or `0.82*rw`.
fn parse_placeholder(body: &str) -> Result<(f64, RatioSource)> {
    match body.split_once('*') {
        None => Ok((1.0, body.parse()?)),
        Some((base, source)) => {
            let base: f64 = base
                .trim()
                .parse()
                .map_err(|_| anyhow!("bad scale factor '{base}' in placeholder '{{{body}}}'"))?;
            ensure!(
                base.is_finite() && base > 0.0,
                "placeholder scale factor must be finite and positive, got {base}"
            );
            Ok((base, source.trim().parse()?))
        }
    }
}

/// Extract `body` from a `{body}` field.
fn braced(field: &str) -> Result<&str> {
    field
        .strip_prefix('{')
        .and_then(|rest| rest.strip_suffix('}'))
        .ok_or_else(|| anyhow!("expected a braced placeholder like '{{rm}}', got '{field}'"))
}

fn parse_orientation(field: &str) -> Result<Orientation> {
    match field {
        "asc" => Ok(Orientation::Ascending),
        "desc" => Ok(Orientation::Descending),
        other => bail!("unknown orientation '{other}' (expected 'asc' or 'desc')"),
    }
}

impl FromStr for FamilyTemplate {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.contains('{') {
            let spec: DistributionSpec = s
                .parse()
                .map_err(|e| anyhow!("bad distribution '{s}': {e}"))?;
            return Ok(FamilyTemplate::Fixed(spec));
        }
        let mut parts = s.split(':');
        let family = parts.next().unwrap_or_default();
        let template = match family {
            "tri" => {
                let body = braced(parts.next().ok_or_else(|| anyhow!("tri needs a ratio"))?)?;
                let (base, source) = parse_placeholder(body)?;
                ensure!(
                    base == 1.0,
                    "tri templates take a bare source like '{{rm}}'; scale factors are not supported"
                );
                let orientation = match parts.next() {
                    None => Orientation::Descending,
                    Some(o) => parse_orientation(o)?,
                };
                FamilyTemplate::TriRatio {
                    source,
                    orientation,
                }
            }
            "peaked" => {
                let body = braced(
                    parts
                        .next()
                        .ok_or_else(|| anyhow!("peaked needs a ratio"))?,
                )?;
                let (base, source) = parse_placeholder(body)?;
                ensure!(
                    base == 1.0,
                    "peaked templates take a bare source like '{{rm}}'; scale factors are not supported"
                );
                FamilyTemplate::Peaked { source }
            }
            "pow" | "spow" => {
                let body = braced(
                    parts
                        .next()
                        .ok_or_else(|| anyhow!("{family} needs an exponent"))?,
                )?;
                let (base, source) = parse_placeholder(body)?;
                if family == "pow" {
                    FamilyTemplate::PowScaled { base, source }
                } else {
                    FamilyTemplate::SpowScaled { base, source }
                }
            }
            "exp" => {
                let body = braced(parts.next().ok_or_else(|| anyhow!("exp needs a rate"))?)?;
                let (base, source) = parse_placeholder(body)?;
                let orientation = match parts.next() {
                    None => Orientation::Descending,
                    Some(o) => parse_orientation(o)?,
                };
                FamilyTemplate::ExpScaled {
                    base,
                    source,
                    orientation,
                }
            }
            other => bail!("unknown templated family '{other}'"),
        };
        if let Some(extra) = parts.next() {
            bail!("trailing template field ':{extra}' in '{s}'");
        }
        Ok(template)
    }
}

/// Full description of a factorial sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub m_levels: Vec<usize>,
    pub n_levels: Vec<usize>,
    pub draws: u64,
    pub ratio_m_levels: Vec<f64>,
    pub ratio_w_levels: Vec<f64>,
    pub ratio_c_levels: Vec<f64>,
    pub fm: FamilyTemplate,
    pub fw: FamilyTemplate,
    pub fc: FamilyTemplate,
    pub replicates: u32,
    pub master_seed: u64,
    pub mode: Mode,
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    let items: Vec<T> = value
        .replace(',', " ")
        .split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|e| anyhow!("bad value '{tok}' for '{key}': {e}"))
        })
        .collect::<Result<_>>()?;
    ensure!(!items.is_empty(), "'{key}' has no values");
    Ok(items)
}

impl SweepConfig {
    /// Parse the flat `key = value` format.
    pub fn parse(text: &str) -> Result<SweepConfig> {
        let mut m_levels = None;
        let mut n_levels = None;
        let mut draws = None;
        let mut ratio_m = vec![1.0];
        let mut ratio_w = vec![1.0];
        let mut ratio_c = vec![1.0];
        let mut fm = None;
        let mut fw = None;
        let mut fc = None;
        let mut replicates = 1u32;
        let mut master_seed = DEFAULT_MASTER_SEED;
        let mut mode = Mode::MonteCarlo;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}: key '{}'", lineno + 1, key);
            match key {
                "m" => m_levels = Some(parse_list(key, value)?),
                "n" => n_levels = Some(parse_list(key, value)?),
                "draws" => draws = Some(value.parse().with_context(ctx)?),
                "ratio_m" => ratio_m = parse_list(key, value)?,
                "ratio_w" => ratio_w = parse_list(key, value)?,
                "ratio_c" => ratio_c = parse_list(key, value)?,
                "fm" => fm = Some(value.parse().with_context(ctx)?),
                "fw" => fw = Some(value.parse().with_context(ctx)?),
                "fc" => fc = Some(value.parse().with_context(ctx)?),
                "replicates" => replicates = value.parse().with_context(ctx)?,
                "master_seed" => master_seed = value.parse().with_context(ctx)?,
                "mode" => mode = value.parse().with_context(ctx)?,
                other => bail!("line {}: unknown key '{}'", lineno + 1, other),
            }
        }

        let config = SweepConfig {
            m_levels: m_levels.ok_or_else(|| anyhow!("missing required key 'm'"))?,
            n_levels: n_levels.ok_or_else(|| anyhow!("missing required key 'n'"))?,
            draws: draws.ok_or_else(|| anyhow!("missing required key 'draws'"))?,
            ratio_m_levels: ratio_m,
            ratio_w_levels: ratio_w,
            ratio_c_levels: ratio_c,
            fm: fm.ok_or_else(|| anyhow!("missing required key 'fm'"))?,
            fw: fw.ok_or_else(|| anyhow!("missing required key 'fw'"))?,
            fc: fc.ok_or_else(|| anyhow!("missing required key 'fc'"))?,
            replicates,
            master_seed,
            mode,
        };
        config.validate()?;
        Ok(config)
    }

    /// Check structural requirements before any cell runs.
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.m_levels.is_empty(), "no hierarchy-count levels");
        ensure!(!self.n_levels.is_empty(), "no object-count levels");
        ensure!(
            self.m_levels.iter().all(|&m| m >= 1),
            "hierarchy counts must be >= 1"
        );
        ensure!(
            self.n_levels.iter().all(|&n| n >= 1),
            "object counts must be >= 1"
        );
        ensure!(self.draws >= 1, "draws must be >= 1");
        ensure!(self.replicates >= 1, "replicates must be >= 1");

        for (name, levels) in [
            ("ratio_m", &self.ratio_m_levels),
            ("ratio_w", &self.ratio_w_levels),
            ("ratio_c", &self.ratio_c_levels),
        ] {
            ensure!(!levels.is_empty(), "'{name}' has no levels");
            ensure!(
                levels.iter().all(|r| r.is_finite() && *r > 0.0),
                "'{name}' levels must be finite and positive"
            );
        }

        // Ramp-style templates interpret the level as a max/min weight ratio,
        // which is only meaningful at >= 1; the scaled families accept any
        // positive value.
        for (slot, template) in [("fm", &self.fm), ("fw", &self.fw), ("fc", &self.fc)] {
            if matches!(
                template,
                FamilyTemplate::TriRatio { .. } | FamilyTemplate::Peaked { .. }
            ) {
                if let Some(source) = template.source() {
                    let levels = self.ratio_levels(source);
                    ensure!(
                        levels.iter().all(|&r| r >= 1.0),
                        "'{slot}' is a ramp template reading '{}', so those levels must be >= 1",
                        source.key()
                    );
                }
            }
        }

        // Within-hierarchy supports differ from hierarchy to hierarchy, so
        // the fw slot cannot carry a fixed-length weight vector.
        if matches!(self.fw, FamilyTemplate::Peaked { .. }) {
            bail!("'fw' cannot use a peaked template: the within-hierarchy support size varies");
        }
        Ok(())
    }

    pub fn ratio_levels(&self, source: RatioSource) -> &[f64] {
        match source {
            RatioSource::M => &self.ratio_m_levels,
            RatioSource::W => &self.ratio_w_levels,
            RatioSource::C => &self.ratio_c_levels,
        }
    }

    /// Total number of cells the sweep will visit.
    pub fn n_cells(&self) -> u64 {
        self.m_levels.len() as u64
            * self.n_levels.len() as u64
            * self.ratio_m_levels.len() as u64
            * self.ratio_w_levels.len() as u64
            * self.ratio_c_levels.len() as u64
            * self.replicates as u64
    }

    /// Render the configuration back in the flat file format.
    pub fn to_text(&self) -> String {
        fn join<T: fmt::Display>(items: &[T]) -> String {
            items
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
        format!(
            "m = {}\nn = {}\ndraws = {}\nratio_m = {}\nratio_w = {}\nratio_c = {}\n\
             fm = {}\nfw = {}\nfc = {}\nreplicates = {}\nmaster_seed = {}\nmode = {}\n",
            join(&self.m_levels),
            join(&self.n_levels),
            self.draws,
            join(&self.ratio_m_levels),
            join(&self.ratio_w_levels),
            join(&self.ratio_c_levels),
            self.fm,
            self.fw,
            self.fc,
            self.replicates,
            self.master_seed,
            self.mode,
        )
    }
}
