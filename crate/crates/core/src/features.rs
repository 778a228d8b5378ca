//! Tweet tokenization and word n-gram counts.

use std::collections::BTreeMap;

use crate::corpus::Corpus;
use crate::exec::Exec;

/// Lowercase tokens; never empty strings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    tokens: Vec<String>,
}

impl TokenSequence {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Drops every token for which `remove` returns true.
    pub fn without(&self, remove: impl Fn(&str) -> bool) -> TokenSequence {
        TokenSequence {
            tokens: self.tokens.iter().filter(|t| !remove(t)).cloned().collect(),
        }
    }

    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Sparse n-gram counts keyed by space-joined tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct FeatureVector {
    counts: BTreeMap<String, u32>,
}

impl FeatureVector {
    /// Zero counts are dropped.
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u32)>) -> FeatureVector {
        let mut map = BTreeMap::new();
        for (k, c) in counts {
            if c > 0 {
                *map.entry(k).or_insert(0) += c;
            }
        }
        FeatureVector { counts: map }
    }

    pub fn counts(&self) -> &BTreeMap<String, u32> {
        &self.counts
    }

    pub fn get(&self, ngram: &str) -> u32 {
        self.counts.get(ngram).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(k, &c)| (k.as_str(), c))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn scaled(&self, k: u32) -> FeatureVector {
        FeatureVector::from_counts(self.counts.iter().map(|(w, &c)| (w.clone(), c * k)))
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}'..='\u{201F}' | '\u{2026}' | '\u{2013}' | '\u{2014}' | '«' | '»' | '¡' | '¿'
        )
}

fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://")
}

/// Lowercases, drops URLs, splits on whitespace and trims punctuation from
/// both ends of each token. A leading `#` or `@` survives the trim.
pub fn tokenize(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    for raw in text.split_whitespace() {
        let lower = raw.to_lowercase();
        if is_url(&lower) {
            continue;
        }
        let trimmed = lower.trim_end_matches(is_punct);
        let trimmed = trimmed.trim_start_matches(|c: char| is_punct(c) && c != '#' && c != '@');
        if trimmed.is_empty() || is_url(trimmed) {
            continue;
        }
        tokens.push(trimmed.to_string());
    }
    TokenSequence { tokens }
}

/// Counts every contiguous n-gram with `n_min <= n <= n_max`.
pub fn extract_ngrams(seq: &TokenSequence, n_min: usize, n_max: usize) -> FeatureVector {
    assert!(
        1 <= n_min && n_min <= n_max,
        "invalid n-gram range {n_min}..={n_max}"
    );
    let tokens = seq.tokens();
    let mut counts = BTreeMap::new();
    for n in n_min..=n_max {
        for window in tokens.windows(n) {
            *counts.entry(window.join(" ")).or_insert(0) += 1;
        }
    }
    FeatureVector { counts }
}

/// Unigram through trigram counts of a raw text.
pub fn featurize(text: &str) -> FeatureVector {
    extract_ngrams(&tokenize(text), 1, 3)
}

/// [`featurize`] for every tweet, in corpus order.
pub fn featurize_corpus(corpus: &Corpus, exec: Exec) -> Vec<FeatureVector> {
    exec.map(corpus.tweets(), |t| featurize(&t.text))
}
