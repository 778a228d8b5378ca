//! Comparison methods sharing the same features as the main pipeline:
//! naive Bayes trained on seed tweets (B1), naive Bayes trained on partisan
//! hashtags (B2), and 2-means clustering seeded from seed tweets (B3).

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::classifier::{train, users_from_labels, LabelSource, MnbModel, TweetLabel};
use crate::corpus::{read_labeled_csv, Corpus, SeedSet, Stance};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::{extract_ngrams, featurize, featurize_corpus, tokenize, FeatureVector};

/// Naive Bayes on exactly the seed users' original tweets.
pub fn train_b1(corpus: &Corpus, seeds: &SeedSet, alpha: f64) -> Result<MnbModel> {
    train(&b1_training(corpus, seeds)?, alpha)
}

pub fn b1_training(corpus: &Corpus, seeds: &SeedSet) -> Result<Vec<(FeatureVector, Stance)>> {
    let docs: Vec<_> = corpus
        .tweets()
        .iter()
        .filter(|t| !t.is_retweet())
        .filter_map(|t| seeds.stance_of(&t.user_id).map(|s| (featurize(&t.text), s)))
        .collect();
    if docs.is_empty() {
        return Err(Error::NoSeedTweets);
    }
    Ok(docs)
}

/// Lowercase hashtags marking each side. Disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashtagSeeds {
    for_tags: BTreeSet<String>,
    against_tags: BTreeSet<String>,
}

impl HashtagSeeds {
    pub fn new(entries: impl IntoIterator<Item = (String, Stance)>) -> Result<HashtagSeeds> {
        let mut tags: BTreeMap<String, Stance> = BTreeMap::new();
        for (tag, stance) in entries {
            let tag = tag.to_lowercase();
            if !tag.starts_with('#') || tag.len() < 2 {
                return Err(Error::Config(format!("hashtag {tag:?} must start with #")));
            }
            match tags.get(&tag) {
                Some(prev) if *prev != stance => return Err(Error::ConflictingHashtag(tag)),
                _ => {
                    tags.insert(tag, stance);
                }
            }
        }
        let side = |s: Stance| -> BTreeSet<String> {
            tags.iter()
                .filter(|(_, v)| **v == s)
                .map(|(k, _)| k.clone())
                .collect()
        };
        let (for_tags, against_tags) = (side(Stance::For), side(Stance::Against));
        if for_tags.is_empty() || against_tags.is_empty() {
            return Err(Error::OneSidedHashtags);
        }
        Ok(HashtagSeeds {
            for_tags,
            against_tags,
        })
    }

    pub fn tags(&self, stance: Stance) -> &BTreeSet<String> {
        match stance {
            Stance::For => &self.for_tags,
            Stance::Against => &self.against_tags,
        }
    }

    pub fn is_seed_tag(&self, token: &str) -> bool {
        self.for_tags.contains(token) || self.against_tags.contains(token)
    }
}

pub fn load_hashtags(path: impl AsRef<Path>) -> Result<HashtagSeeds> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_hashtags(file)
}

pub fn read_hashtags(reader: impl Read) -> Result<HashtagSeeds> {
    let rows = read_labeled_csv(reader, 2)?;
    HashtagSeeds::new(rows.into_iter().map(|r| (r.key, r.stance)))
}

/// Tweets carrying seed hashtags of exactly one side, with every seed
/// hashtag removed before feature extraction.
pub fn build_b2_training(
    corpus: &Corpus,
    tags: &HashtagSeeds,
) -> Result<Vec<(FeatureVector, Stance)>> {
    let mut docs = Vec::new();
    for t in corpus.tweets() {
        let tokens = tokenize(&t.text);
        let has = |s: Stance| tokens.tokens().iter().any(|w| tags.tags(s).contains(w));
        let stance = match (has(Stance::For), has(Stance::Against)) {
            (true, false) => Stance::For,
            (false, true) => Stance::Against,
            _ => continue,
        };
        let stripped = tokens.without(|w| tags.is_seed_tag(w));
        docs.push((extract_ngrams(&stripped, 1, 3), stance));
    }
    if Stance::BOTH
        .iter()
        .any(|s| !docs.iter().any(|(_, d)| d == s))
    {
        return Err(Error::HashtagsMatchedNothing);
    }
    Ok(docs)
}

pub fn train_b2(corpus: &Corpus, tags: &HashtagSeeds, alpha: f64) -> Result<MnbModel> {
    train(&build_b2_training(corpus, tags)?, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub max_iterations: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOutcome {
    /// Tweet id to the stance of its cluster.
    pub assignments: BTreeMap<String, Stance>,
    /// Tweet labels in corpus order; the margin is
    /// `distance(Against centroid) - distance(For centroid)`.
    pub labels: Vec<TweetLabel>,
    /// Sum of cosine distances to the assigned centroid, after each
    /// assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl KMeansOutcome {
    pub fn user_stances(&self, corpus: &Corpus) -> BTreeMap<String, Stance> {
        users_from_labels(corpus, &self.labels)
            .into_iter()
            .map(|u| (u.user_id, u.stance))
            .collect()
    }
}

type SparseUnit = Vec<(u32, f64)>;

fn unit_vectors(features: &[FeatureVector], exec: Exec) -> (usize, Vec<SparseUnit>) {
    let mut vocab: BTreeMap<&str, u32> = BTreeMap::new();
    for fv in features {
        for (w, _) in fv.iter() {
            vocab.insert(w, 0);
        }
    }
    for (i, v) in vocab.values_mut().enumerate() {
        *v = i as u32;
    }
    let vectors = exec.map(features, |fv| {
        let norm = fv
            .iter()
            .map(|(_, c)| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt();
        let mut v: SparseUnit = fv
            .iter()
            .map(|(w, c)| (vocab[w], c as f64 / norm))
            .collect();
        v.sort_unstable_by_key(|(i, _)| *i);
        v
    });
    (vocab.len(), vectors)
}

struct Centroid {
    values: Vec<f64>,
    norm: f64,
}

impl Centroid {
    /// Mean of the members, or `None` for an empty cluster.
    fn mean<'a>(dim: usize, members: impl Iterator<Item = &'a SparseUnit>) -> Option<Centroid> {
        let mut values = vec![0.0; dim];
        let mut n = 0usize;
        for v in members {
            n += 1;
            for &(i, x) in v {
                values[i as usize] += x;
            }
        }
        if n == 0 {
            return None;
        }
        for x in &mut values {
            *x /= n as f64;
        }
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        Some(Centroid { values, norm })
    }

    /// Cosine distance to a unit (or zero) sparse vector.
    fn distance(&self, v: &SparseUnit) -> f64 {
        if self.norm == 0.0 || v.is_empty() {
            return 1.0;
        }
        let dot: f64 = v.iter().map(|&(i, x)| x * self.values[i as usize]).sum();
        1.0 - dot / self.norm
    }
}

/// Lloyd iterations with k = 2 under cosine distance. Each centroid starts
/// at the mean of one side's seed tweets and keeps that side's stance;
/// an empty cluster keeps its previous centroid. Distance ties go to the
/// `Against` cluster.
pub fn run_b3(corpus: &Corpus, seeds: &SeedSet, cfg: KMeansConfig) -> Result<KMeansOutcome> {
    run_b3_with(corpus, seeds, cfg, Exec::default())
}

pub fn run_b3_with(
    corpus: &Corpus,
    seeds: &SeedSet,
    cfg: KMeansConfig,
    exec: Exec,
) -> Result<KMeansOutcome> {
    let features = featurize_corpus(corpus, exec);
    let (dim, vectors) = unit_vectors(&features, exec);
    let tweets = corpus.tweets();

    let mut centroids = Vec::with_capacity(2);
    for stance in Stance::BOTH {
        let members = tweets
            .iter()
            .zip(&vectors)
            .filter(|(t, _)| !t.is_retweet() && seeds.stance_of(&t.user_id) == Some(stance))
            .map(|(_, v)| v);
        centroids.push(Centroid::mean(dim, members).ok_or(Error::MissingSeedSide(stance))?);
    }

    let mut assignment: Vec<usize> = Vec::new();
    let mut distances: Vec<[f64; 2]> = Vec::new();
    let mut objective = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations.max(1) {
        iterations += 1;
        distances = exec.map(&vectors, |v| {
            [centroids[0].distance(v), centroids[1].distance(v)]
        });
        let next: Vec<usize> = distances
            .iter()
            .map(|d| if d[0] < d[1] { 0 } else { 1 })
            .collect();
        objective.push(next.iter().zip(&distances).map(|(&c, d)| d[c]).sum());
        if next == assignment {
            converged = true;
            break;
        }
        assignment = next;
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members = vectors
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == c)
                .map(|(v, _)| v);
            if let Some(updated) = Centroid::mean(dim, members) {
                *centroid = updated;
            }
        }
    }
    // The loop can stop on the iteration cap right after a centroid update;
    // labels always reflect the last assignment step.
    let labels: Vec<TweetLabel> = tweets
        .iter()
        .zip(&assignment)
        .zip(&distances)
        .map(|((t, &c), d)| TweetLabel {
            tweet_id: t.id.clone(),
            stance: Stance::BOTH[c],
            source: LabelSource::Classified,
            margin: d[1] - d[0],
        })
        .collect();
    let assignments = labels
        .iter()
        .map(|l| (l.tweet_id.clone(), l.stance))
        .collect();
    Ok(KMeansOutcome {
        assignments,
        labels,
        objective,
        iterations,
        converged,
    })
}
