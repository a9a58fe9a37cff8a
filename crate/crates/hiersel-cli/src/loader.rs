//! Reading topic corpora from plain-text files: one UTF-8 file per topic,
//! whitespace-separated tokens, file stem as the topic name. Tokens are
//! normalized to NFC so that visually identical spellings count together.

use std::borrow::Cow;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use unicode_normalization::{is_nfc, UnicodeNormalization};

use hiersel_core::corpus::TopicCorpus;

use crate::gencorpus::GeneratedCorpus;

/// A parsed corpus together with non-fatal observations (e.g. empty topics).
pub struct LoadedCorpus {
    pub corpus: TopicCorpus,
    pub warnings: Vec<String>,
}

fn nfc(token: &str) -> Cow<'_, str> {
    if is_nfc(token) {
        Cow::Borrowed(token)
    } else {
        Cow::Owned(token.nfc().collect())
    }
}

/// Load every `*.txt` file in a directory as one topic each, in file-name
/// order.
pub fn load_corpus_dir(dir: &Path) -> Result<LoadedCorpus> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read corpus directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    ensure!(
        !paths.is_empty(),
        "no .txt topic files in {}",
        dir.display()
    );
    paths.sort();
    load_corpus_files(&paths)
}

/// Load an explicit list of topic files.
pub fn load_corpus_files(paths: &[PathBuf]) -> Result<LoadedCorpus> {
    ensure!(!paths.is_empty(), "no topic files given");
    let mut topics = Vec::with_capacity(paths.len());
    for path in paths {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .with_context(|| format!("cannot derive a topic name from {}", path.display()))?;
        topics.push(stem.to_owned());
    }
    let mut corpus = TopicCorpus::new(topics)?;

    let mut warnings = Vec::new();
    for (t, path) in paths.iter().enumerate() {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read topic file {}", path.display()))?;
        let mut any = false;
        for token in text.split_whitespace() {
            corpus.add(t, &nfc(token), 1)?;
            any = true;
        }
        if !any {
            warnings.push(format!(
                "topic '{}' ({}) contains no tokens",
                corpus.topics()[t],
                path.display()
            ));
        }
    }
    if corpus.total_tokens() == 0 {
        bail!("corpus contains no tokens at all");
    }
    Ok(LoadedCorpus { corpus, warnings })
}

/// Write a generated corpus as one text file per topic, returning the paths.
/// Occurrences are written as repeated tokens, wrapped for readability, so a
/// round trip through `load_corpus_dir` reproduces the counts exactly.
pub fn write_topic_files(dir: &Path, corpus: &GeneratedCorpus) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    const TOKENS_PER_LINE: usize = 100;
    let mut paths = Vec::with_capacity(corpus.n_topics());
    for (name, counts) in corpus.topic_names.iter().zip(&corpus.counts) {
        let path = dir.join(format!("{name}.txt"));
        let mut text = String::new();
        let mut on_line = 0usize;
        for (token, &count) in corpus.tokens.iter().zip(counts) {
            for _ in 0..count {
                text.push_str(token);
                on_line += 1;
                text.push(if on_line.is_multiple_of(TOKENS_PER_LINE) { '\n' } else { ' ' });
            }
        }
        if text.ends_with(' ') {
            text.pop();
            text.push('\n');
        }
        fs::write(&path, &text).with_context(|| format!("cannot write {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}
