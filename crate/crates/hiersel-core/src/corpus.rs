//! Topic-labeled corpus analysis: token frequencies and ranks, the number
//! of topics a token occurs in (NT), per-NT aggregates and density curves,
//! rank–NT correlation, and per-topic power-law fits.
//!
//! File ingestion lives in the companion CLI crate; everything here operates
//! on an in-memory [`TopicCorpus`].

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fitkit::{fit_power_loglog, FitError, FitResult, RankedSeries};
use crate::rng;
use crate::statkit::{kde, pearson, KdeCurve, StatError};

#[derive(Clone, Debug, PartialEq)]
pub enum CorpusError {
    NoTopics,
    DuplicateTopic(String),
    TopicOutOfRange { index: usize, n_topics: usize },
    /// NT counting needs an occurrence threshold of at least 1.
    ZeroThreshold,
    EmptyCorpus,
    BadProportion(f64),
    Fit(FitError),
    Stat(StatError),
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::NoTopics => write!(f, "corpus needs at least one topic"),
            CorpusError::DuplicateTopic(name) => write!(f, "duplicate topic name: {name}"),
            CorpusError::TopicOutOfRange { index, n_topics } => {
                write!(f, "topic index {index} out of range for {n_topics} topics")
            }
            CorpusError::ZeroThreshold => write!(f, "occurrence threshold must be \u{2265} 1"),
            CorpusError::EmptyCorpus => write!(f, "corpus contains no tokens"),
            CorpusError::BadProportion(p) => {
                write!(f, "sampling proportion must be in (0, 1], got {p}")
            }
            CorpusError::Fit(e) => write!(f, "fit failed: {e}"),
            CorpusError::Stat(e) => write!(f, "statistic failed: {e}"),
        }
    }
}

impl core::error::Error for CorpusError {}

impl From<FitError> for CorpusError {
    fn from(e: FitError) -> Self {
        CorpusError::Fit(e)
    }
}

impl From<StatError> for CorpusError {
    fn from(e: StatError) -> Self {
        CorpusError::Stat(e)
    }
}

/// Token-by-topic count matrix. Tokens are kept in byte order, which makes
/// every downstream tie-break and iteration deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct TopicCorpus {
    topics: Vec<String>,
    counts: BTreeMap<String, Vec<u64>>,
}

impl TopicCorpus {
    pub fn new(topics: Vec<String>) -> Result<Self, CorpusError> {
        if topics.is_empty() {
            return Err(CorpusError::NoTopics);
        }
        for (i, name) in topics.iter().enumerate() {
            if topics[..i].contains(name) {
                return Err(CorpusError::DuplicateTopic(name.clone()));
            }
        }
        Ok(TopicCorpus { topics, counts: BTreeMap::new() })
    }

    /// Adds `n` occurrences of `token` to the given topic. Zero-count adds
    /// are no-ops, so every stored token has at least one occurrence.
    pub fn add(&mut self, topic: usize, token: &str, n: u64) -> Result<(), CorpusError> {
        if topic >= self.topics.len() {
            return Err(CorpusError::TopicOutOfRange { index: topic, n_topics: self.topics.len() });
        }
        if n == 0 {
            return Ok(());
        }
        let row = self
            .counts
            .entry(String::from(token))
            .or_insert_with(|| alloc::vec![0; self.topics.len()]);
        row[topic] += n;
        Ok(())
    }

    pub fn topics(&self) -> &[String] {
        &self.topics
    }

    pub fn n_topics(&self) -> usize {
        self.topics.len()
    }

    /// Number of distinct tokens.
    pub fn vocabulary_size(&self) -> usize {
        self.counts.len()
    }

    /// Total token occurrences over all topics.
    pub fn total_tokens(&self) -> u64 {
        self.counts.values().flat_map(|row| row.iter()).sum()
    }

    /// Per-topic counts for one token.
    pub fn token_counts(&self, token: &str) -> Option<&[u64]> {
        self.counts.get(token).map(Vec::as_slice)
    }

    /// All `(token, per-topic counts)` pairs in token byte order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[u64])> {
        self.counts.iter().map(|(t, row)| (t.as_str(), row.as_slice()))
    }
}

/// One vocabulary entry: total frequency, global frequency rank, and the
/// number of topics the token occurs in at the counting threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct NTRecord {
    pub token: String,
    pub total_freq: u64,
    pub global_rank: usize,
    pub nt: usize,
}

/// Ranks the vocabulary and counts topics per token. `global_rank` orders by
/// total frequency descending, ties by token bytes ascending. A token's `nt`
/// is the number of topics where its count reaches `threshold`; tokens that
/// reach it nowhere (possible only for thresholds above 1) are excluded, so
/// ranks always run 1..V over the returned records.
pub fn nt_table(corpus: &TopicCorpus, threshold: u64) -> Result<Vec<NTRecord>, CorpusError> {
    if threshold == 0 {
        return Err(CorpusError::ZeroThreshold);
    }
    if corpus.vocabulary_size() == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut records: Vec<NTRecord> = corpus
        .iter()
        .filter_map(|(token, row)| {
            let nt = row.iter().filter(|&&c| c >= threshold).count();
            (nt > 0).then(|| NTRecord {
                token: String::from(token),
                total_freq: row.iter().sum(),
                global_rank: 0,
                nt,
            })
        })
        .collect();
    // BTreeMap iteration already yields token-ascending order, so a stable
    // sort on frequency alone would suffice; the explicit key documents it.
    records.sort_by(|a, b| b.total_freq.cmp(&a.total_freq).then(a.token.cmp(&b.token)));
    for (i, r) in records.iter_mut().enumerate() {
        r.global_rank = i + 1;
    }
    Ok(records)
}

/// Aggregates for one NT group, mirroring a per-NT summary table row.
#[derive(Clone, Debug, PartialEq)]
pub struct NTGroupStats {
    pub nt: usize,
    pub word_count: usize,
    pub avg_rank: f64,
    /// Share of the vocabulary, in percent.
    pub word_pct: f64,
    /// Share of all token occurrences, in percent.
    pub freq_pct: f64,
    pub avg_freq: f64,
    /// Power-law fit of the group's own re-ranked frequencies;
    /// `None` when the group has fewer than 3 words.
    pub fit: Option<FitResult>,
}

fn groups_by_nt(records: &[NTRecord]) -> BTreeMap<usize, Vec<&NTRecord>> {
    let mut groups: BTreeMap<usize, Vec<&NTRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.nt).or_default().push(r);
    }
    groups
}

/// Per-NT aggregates over `records`, ascending in NT. Percentages are taken
/// against the records' own totals and therefore sum to 100 across groups.
pub fn group_stats(records: &[NTRecord]) -> Result<Vec<NTGroupStats>, CorpusError> {
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let vocab = records.len() as f64;
    let total_freq: u64 = records.iter().map(|r| r.total_freq).sum();

    let stats = groups_by_nt(records)
        .into_iter()
        .map(|(nt, members)| {
            let word_count = members.len();
            let rank_sum: usize = members.iter().map(|r| r.global_rank).sum();
            let freq_sum: u64 = members.iter().map(|r| r.total_freq).sum();
            let freqs: Vec<f64> = members.iter().map(|r| r.total_freq as f64).collect();
            let fit = if word_count >= 3 {
                RankedSeries::from_frequencies(&freqs).ok().and_then(|s| fit_power_loglog(&s).ok())
            } else {
                None
            };
            NTGroupStats {
                nt,
                word_count,
                avg_rank: rank_sum as f64 / word_count as f64,
                word_pct: 100.0 * word_count as f64 / vocab,
                freq_pct: 100.0 * freq_sum as f64 / total_freq as f64,
                avg_freq: freq_sum as f64 / word_count as f64,
                fit,
            }
        })
        .collect();
    Ok(stats)
}

/// Density curves keyed by NT value, plus the NT values whose groups were
/// too small to estimate.
pub type NtDensityCurves = (Vec<(usize, KdeCurve)>, Vec<usize>);

/// Density of global rank within each NT group (ascending NT), estimated on
/// 512 evenly spaced points over `[1, V]`. Groups with fewer than 2 members
/// cannot support a density estimate and are returned in the skip list.
pub fn nt_density_curves(records: &[NTRecord]) -> Result<NtDensityCurves, CorpusError> {
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let v = records.len() as f64;
    let grid: Vec<f64> = (0..512).map(|i| 1.0 + i as f64 * (v - 1.0) / 511.0).collect();

    let mut curves = Vec::new();
    let mut skipped = Vec::new();
    for (nt, members) in groups_by_nt(records) {
        if members.len() < 2 {
            skipped.push(nt);
            continue;
        }
        let ranks: Vec<f64> = members.iter().map(|r| r.global_rank as f64).collect();
        curves.push((nt, kde(&ranks, None, &grid)?));
    }
    Ok((curves, skipped))
}

/// Uniform integer in `[0, n)` by widening multiply, rejecting the biased
/// low fraction.
fn bounded_index(rng: &mut rng::ChaCha12Rng, n: u64) -> u64 {
    use rand_core::RngCore;
    debug_assert!(n > 0);
    let threshold = n.wrapping_neg() % n;
    loop {
        let wide = rng.next_u64() as u128 * n as u128;
        if (wide as u64) >= threshold {
            return (wide >> 64) as u64;
        }
    }
}

/// Pearson correlation between global rank and NT over a per-group sample:
/// `⌈proportion·|group|⌉` members drawn uniformly without replacement from
/// each NT group. Sampling is deterministic in `seed`; `proportion = 1`
/// uses every record and never touches the generator.
pub fn rank_nt_correlation(
    records: &[NTRecord],
    proportion: f64,
    seed: u64,
) -> Result<f64, CorpusError> {
    if !(proportion.is_finite() && 0.0 < proportion && proportion <= 1.0) {
        return Err(CorpusError::BadProportion(proportion));
    }
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }

    let mut ranks: Vec<f64> = Vec::new();
    let mut nts: Vec<f64> = Vec::new();
    let mut stream = rng::stream(seed);
    for (nt, members) in groups_by_nt(records) {
        let take = if proportion == 1.0 {
            members.len()
        } else {
            let want = libm::ceil(proportion * members.len() as f64) as usize;
            want.clamp(1, members.len())
        };
        let mut pool: Vec<&NTRecord> = members;
        for i in 0..take {
            if take < pool.len() {
                let j = i + bounded_index(&mut stream, (pool.len() - i) as u64) as usize;
                pool.swap(i, j);
            }
            ranks.push(pool[i].global_rank as f64);
            nts.push(nt as f64);
        }
    }
    Ok(pearson(&ranks, &nts)?)
}

/// Power-law fits per topic and for the pooled collection.
#[derive(Clone, Debug, PartialEq)]
pub struct PerTopicFits {
    /// `(topic name, fit)` in corpus topic order.
    pub topics: Vec<(String, FitResult)>,
    /// Topics with fewer than 3 distinct occurring tokens.
    pub skipped: Vec<String>,
    /// Fit over total frequencies summed across topics.
    pub collection: FitResult,
}

pub fn per_topic_fits(corpus: &TopicCorpus) -> Result<PerTopicFits, CorpusError> {
    if corpus.vocabulary_size() == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut topics = Vec::new();
    let mut skipped = Vec::new();
    for (t, name) in corpus.topics().iter().enumerate() {
        let freqs: Vec<f64> =
            corpus.iter().map(|(_, row)| row[t] as f64).filter(|&f| f > 0.0).collect();
        if freqs.len() < 3 {
            skipped.push(name.clone());
            continue;
        }
        let fit = fit_power_loglog(&RankedSeries::from_frequencies(&freqs)?)?;
        topics.push((name.clone(), fit));
    }

    let totals: Vec<f64> =
        corpus.iter().map(|(_, row)| row.iter().sum::<u64>() as f64).collect();
    let collection = fit_power_loglog(&RankedSeries::from_frequencies(&totals)?)?;

    Ok(PerTopicFits { topics, skipped, collection })
}
