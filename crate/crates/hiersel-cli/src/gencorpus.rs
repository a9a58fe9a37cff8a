//! Synthetic topic corpus generation from a model instance.
//!
//! Each object becomes a vocabulary token; each of the `K` topics holds a
//! fixed number of token occurrences. An object in hierarchy `h` (1 = top)
//! is *eligible* for the first `ceil(K * (M + 1 - h) / M)` topics, so top
//! hierarchy objects appear in the most topics. Within a topic, every
//! eligible token first appears once (so topic membership exactly equals
//! eligibility), and the remaining occurrences are drawn from the model's
//! two-step probabilities restricted to the eligible set.

use anyhow::{bail, ensure, Result};

use hiersel_core::dist::{make_pmf, DistributionSpec};
use hiersel_core::hsmodel::{exact_pmf, ModelInstance};
use hiersel_core::rng;

/// In-memory synthetic corpus: per-topic occurrence counts over a shared
/// vocabulary, plus the eligibility width used to build each token.
#[derive(Clone, Debug)]
pub struct GeneratedCorpus {
    /// `topic01`, `topic02`, ... zero-padded to sort in creation order.
    pub topic_names: Vec<String>,
    /// `w000000`, `w000001`, ... one token per model object.
    pub tokens: Vec<String>,
    /// `counts[topic][object]` occurrence counts.
    pub counts: Vec<Vec<u64>>,
    /// Number of topics each object is eligible for.
    pub eligibility: Vec<usize>,
}

impl GeneratedCorpus {
    pub fn n_topics(&self) -> usize {
        self.topic_names.len()
    }

    /// Number of topics in which a token actually occurs.
    pub fn observed_topic_count(&self, object: usize) -> usize {
        self.counts.iter().filter(|c| c[object] > 0).count()
    }
}

/// Topics an object in hierarchy `h` of `m` participates in, out of `k`.
fn eligible_topics(k: usize, m: usize, h: usize) -> usize {
    // ceil(k * (m + 1 - h) / m) without floating point.
    (k * (m + 1 - h)).div_ceil(m)
}

/// Build a corpus of `n_topics` topics, each containing `tokens_per_topic`
/// token occurrences, from the instance's selection probabilities.
pub fn generate_corpus(
    instance: &ModelInstance,
    n_topics: usize,
    tokens_per_topic: u64,
    seed: u64,
) -> Result<GeneratedCorpus> {
    ensure!(n_topics >= 1, "need at least one topic");
    let m = instance.n_hierarchies();
    let n = instance.n_objects();

    let width = n_topics.to_string().len().max(2);
    let topic_names: Vec<String> = (1..=n_topics)
        .map(|t| format!("topic{t:0width$}"))
        .collect();
    let tokens: Vec<String> = (0..n).map(|o| format!("w{o:06}")).collect();

    // Objects are stored hierarchy-major, so hierarchy h's block contributes
    // counts[h - 1] consecutive object ids.
    let eligibility: Vec<usize> = instance
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(h, &c)| std::iter::repeat_n(eligible_topics(n_topics, m, h + 1), c))
        .collect();
    debug_assert_eq!(eligibility.len(), n);

    let probabilities = exact_pmf(instance);
    let mut rng = rng::stream(seed);
    let mut counts = vec![vec![0u64; n]; n_topics];

    for (t, topic_counts) in counts.iter_mut().enumerate() {
        // Coverage pass: each eligible token occurs at least once, making
        // topic membership equal eligibility by construction.
        let eligible: Vec<usize> = (0..n).filter(|&o| eligibility[o] > t).collect();
        ensure!(
            tokens_per_topic >= eligible.len() as u64,
            "topic {} needs at least {} tokens to cover its eligible vocabulary, got {}",
            topic_names[t],
            eligible.len(),
            tokens_per_topic
        );
        for &o in &eligible {
            topic_counts[o] = 1;
        }

        let extra = tokens_per_topic - eligible.len() as u64;
        if extra == 0 {
            continue;
        }
        // Restrict the model's two-step probabilities to the eligible set.
        // Zero-probability objects keep their coverage occurrence but take
        // no further draws.
        let support: Vec<usize> = eligible
            .iter()
            .copied()
            .filter(|&o| probabilities[o] > 0.0)
            .collect();
        if support.is_empty() {
            bail!(
                "topic {} has no eligible object with positive probability",
                topic_names[t]
            );
        }
        let weights: Vec<f64> = support.iter().map(|&o| probabilities[o]).collect();
        let pmf = make_pmf(&DistributionSpec::Explicit { weights }, support.len())?;
        for _ in 0..extra {
            topic_counts[support[pmf.sample(&mut rng)]] += 1;
        }
    }

    Ok(GeneratedCorpus {
        topic_names,
        tokens,
        counts,
        eligibility,
    })
}
