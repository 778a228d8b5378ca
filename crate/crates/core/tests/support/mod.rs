//! Brute-force oracles and random instance generators shared by the
//! integration tests and the acceptance suite. Nothing here calls into the
//! engine code it is used to check, apart from building a `Corpus`.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use relp::corpus::{Corpus, SeedSet, Stance, Tweet};

const WORDS: &[&str] = &[
    "ban",
    "guns",
    "now",
    "rights",
    "safety",
    "vote",
    "law",
    "freedom",
    "#protect2a",
    "#guncontrol",
];

pub fn tweet(id: &str, user: &str, text: &str, retweet_of: Option<&str>) -> Tweet {
    Tweet {
        id: id.to_string(),
        user_id: user.to_string(),
        text: text.to_string(),
        retweet_of: retweet_of.map(str::to_string),
        timestamp: 0,
    }
}

fn random_text(rng: &mut impl Rng) -> String {
    let n = rng.gen_range(0..=6);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A corpus of `1..=max_tweets` tweets by `1..=max_users` users. Most
/// tweets retweet an earlier tweet; a few retweet ids that are absent.
pub fn random_corpus(rng: &mut impl Rng, max_tweets: usize, max_users: usize) -> Corpus {
    let n_users = rng.gen_range(1..=max_users);
    let n_tweets = rng.gen_range(1..=max_tweets);
    let p_retweet = rng.gen_range(0.3..0.8);
    let mut tweets = Vec::with_capacity(n_tweets);
    for i in 0..n_tweets {
        let user = format!("u{:02}", rng.gen_range(0..n_users));
        let id = format!("t{i:04}");
        let retweet_of = if i > 0 && rng.gen_bool(p_retweet) {
            if rng.gen_bool(0.05) {
                Some(format!("gone{}", rng.gen_range(0..10)))
            } else {
                // Favor recent tweets so retweeter sets overlap.
                let lo = i.saturating_sub(8);
                Some(format!("t{:04}", rng.gen_range(lo..i)))
            }
        } else {
            None
        };
        tweets.push(Tweet {
            id,
            user_id: user,
            text: random_text(rng),
            retweet_of,
            timestamp: i as i64,
        });
    }
    Corpus::from_tweets(tweets).unwrap()
}

/// Two or more seed users covering both stances, or `None` when the corpus
/// has fewer than two users.
pub fn random_seeds(rng: &mut impl Rng, corpus: &Corpus) -> Option<SeedSet> {
    let mut users: Vec<&str> = corpus.user_ids().collect();
    if users.len() < 2 {
        return None;
    }
    users.shuffle(rng);
    let mut entries = vec![
        (users[0].to_string(), Stance::For),
        (users[1].to_string(), Stance::Against),
    ];
    for u in &users[2..] {
        if rng.gen_bool(0.25) {
            let s = if rng.gen_bool(0.5) {
                Stance::For
            } else {
                Stance::Against
            };
            entries.push((u.to_string(), s));
        }
    }
    Some(SeedSet::new(entries).unwrap())
}

/// Users who retweeted each tweet, found by scanning every tweet.
pub fn retweeters_by_scan(corpus: &Corpus) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for target in corpus.tweets() {
        for t in corpus.tweets() {
            if t.retweet_of.as_deref() == Some(target.id.as_str()) {
                out.entry(target.id.clone())
                    .or_default()
                    .insert(t.user_id.clone());
            }
        }
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A reduced fraction.
pub fn reduced(num: u64, den: u64) -> (u64, u64) {
    let g = gcd(num, den).max(1);
    (num / g, den / g)
}

/// Every nonzero `M[t_i][t_j] = |R_i ∩ R_j| / |R_j|` with `i != j`, as
/// reduced fractions keyed by `(t_i, t_j)`, from a double loop over tweets.
pub fn matrix_oracle(corpus: &Corpus) -> BTreeMap<(String, String), (u64, u64)> {
    let r = retweeters_by_scan(corpus);
    let empty = BTreeSet::new();
    let mut out = BTreeMap::new();
    for ti in corpus.tweets() {
        for tj in corpus.tweets() {
            if ti.id == tj.id {
                continue;
            }
            let ri = r.get(&ti.id).unwrap_or(&empty);
            let rj = r.get(&tj.id).unwrap_or(&empty);
            let both = ri.intersection(rj).count() as u64;
            if both > 0 {
                out.insert(
                    (ti.id.clone(), tj.id.clone()),
                    reduced(both, rj.len() as u64),
                );
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub labeled: BTreeMap<String, Stance>,
    pub unlabeled: BTreeSet<String>,
    /// `(for, against)` of every finalized tweet.
    pub finalized: BTreeMap<String, (f64, f64)>,
    pub iterations: usize,
    /// Tweets finalized in each iteration, in processing order.
    pub batches: Vec<Vec<String>>,
}

/// Straight-line label propagation: seed the originals of seed users, then
/// repeatedly retire every active tweet in the highest non-zero bucket of
/// `floor(max(for, against) * n)` and, in id order, push each one's values
/// times `M[t][u]` into every tweet `u` still active, clamping each field at
/// 1. Weights are `count as f64 / count as f64`.
pub fn propagation_oracle(corpus: &Corpus, seeds: &SeedSet, n: u32) -> OracleRun {
    let r = retweeters_by_scan(corpus);
    let weight = |src: &str, dst: &str| -> Option<f64> {
        let rs = r.get(src)?;
        let rd = r.get(dst)?;
        let both = rs.intersection(rd).count();
        (both > 0).then(|| both as f64 / rd.len() as f64)
    };

    let mut ids: Vec<String> = corpus.tweets().iter().map(|t| t.id.clone()).collect();
    ids.sort();
    let mut state: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for t in corpus.tweets() {
        let v = match (seeds.stance_of(&t.user_id), t.retweet_of.is_some()) {
            (Some(Stance::For), false) => (1.0, 0.0),
            (Some(Stance::Against), false) => (0.0, 1.0),
            _ => (0.0, 0.0),
        };
        state.insert(t.id.clone(), v);
    }
    let mut active: BTreeSet<String> = ids.iter().cloned().collect();
    let mut finalized = BTreeMap::new();
    let mut batches = Vec::new();

    let bucket = |v: (f64, f64)| (v.0.max(v.1).clamp(0.0, 1.0) * n as f64).floor() as u32;
    loop {
        let top = active.iter().map(|id| bucket(state[id])).max().unwrap_or(0);
        if top == 0 {
            break;
        }
        let batch: Vec<String> = active
            .iter()
            .filter(|id| bucket(state[*id]) == top)
            .cloned()
            .collect();
        for t in &batch {
            active.remove(t);
        }
        for t in &batch {
            let src = state[t];
            for u in &ids {
                if u == t || !active.contains(u) {
                    continue;
                }
                if let Some(w) = weight(t, u) {
                    let dst = state.get_mut(u).unwrap();
                    dst.0 = (dst.0 + src.0 * w).min(1.0);
                    dst.1 = (dst.1 + src.1 * w).min(1.0);
                }
            }
            finalized.insert(t.clone(), state[t]);
        }
        batches.push(batch);
    }

    let mut labeled = BTreeMap::new();
    let mut unlabeled = BTreeSet::new();
    for t in corpus.tweets() {
        match finalized.get(&t.id) {
            Some(&(f, a)) if f > a => {
                labeled.insert(t.id.clone(), Stance::For);
            }
            Some(&(f, a)) if a > f => {
                labeled.insert(t.id.clone(), Stance::Against);
            }
            _ => {
                unlabeled.insert(t.id.clone());
            }
        }
    }
    OracleRun {
        labeled,
        unlabeled,
        finalized,
        iterations: batches.len(),
        batches,
    }
}

/// Per-word `(for_count, against_count)` training profile of a two-class
/// multinomial model with Laplace smoothing 1, and the decision it makes
/// on a query by exact integer comparison of the unnormalized posteriors
///
/// `D_c * prod_w (n_cw + 1)^q_w / (N_c + V)^Q`.
///
/// `query[w]` counts word `w`; out-of-vocabulary words carry no factor.
pub fn nb_exact_decision(docs: [u64; 2], profile: &[(u64, u64)], query: &[u32]) -> Stance {
    assert_eq!(profile.len(), query.len());
    let v = profile.len() as u64;
    let totals = [
        profile.iter().map(|p| p.0).sum::<u64>(),
        profile.iter().map(|p| p.1).sum::<u64>(),
    ];
    let q: u32 = query.iter().sum();
    let mut side = [docs[0] as u128, docs[1] as u128];
    for (&(f, a), &k) in profile.iter().zip(query) {
        side[0] *= ((f + 1) as u128).pow(k);
        side[1] *= ((a + 1) as u128).pow(k);
    }
    // Cross-multiply the class denominators.
    side[0] *= ((totals[1] + v) as u128).pow(q);
    side[1] *= ((totals[0] + v) as u128).pow(q);
    if side[0] > side[1] {
        Stance::For
    } else {
        Stance::Against
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMetrics {
    pub precision: [f64; 2],
    pub recall: [f64; 2],
    pub f1: [f64; 2],
    pub macro_f1: f64,
    pub evaluated: usize,
}

/// Per-class metrics from true/false positive and false negative counts.
/// Index 0 is `For`.
pub fn metrics_oracle(
    pred: &BTreeMap<String, Stance>,
    gold: &BTreeMap<String, Stance>,
) -> OracleMetrics {
    let classes = [Stance::For, Stance::Against];
    let mut out = OracleMetrics {
        precision: [0.0; 2],
        recall: [0.0; 2],
        f1: [0.0; 2],
        macro_f1: 0.0,
        evaluated: 0,
    };
    for (k, c) in classes.iter().enumerate() {
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for (user, g) in gold {
            let p = pred.get(user);
            if g == c && p == Some(c) {
                tp += 1;
            }
            if g != c && p == Some(c) {
                fp += 1;
            }
            if g == c && p != Some(c) {
                fn_ += 1;
            }
        }
        let div = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let p = div(tp, tp + fp);
        let r = div(tp, tp + fn_);
        out.precision[k] = p;
        out.recall[k] = r;
        out.f1[k] = if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        };
    }
    out.macro_f1 = (out.f1[0] + out.f1[1]) / 2.0;
    out.evaluated = gold.len();
    out
}

/// A training set described by its class sizes and per-word
/// `(for_count, against_count)` document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NbCase {
    pub docs: [u64; 2],
    pub profile: Vec<(u64, u64)>,
}

fn multisets(
    n: usize,
    k: usize,
    start: usize,
    prefix: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if prefix.len() == k {
        visit(prefix);
        return;
    }
    for i in start..n {
        prefix.push(i);
        multisets(n, k, i, prefix, visit);
        prefix.pop();
    }
}

/// Every training set of 2..=`max_docs` documents with 0/1 word counts
/// over a vocabulary of 1..=`max_vocab` words, both classes present, up to
/// renaming words and reordering documents.
pub fn for_each_nb_case(max_vocab: usize, max_docs: u64, mut visit: impl FnMut(&NbCase)) {
    for d in 2..=max_docs {
        for kf in 1..d {
            let ka = d - kf;
            let profiles: Vec<(u64, u64)> = (0..=kf)
                .flat_map(|f| (0..=ka).map(move |a| (f, a)))
                .filter(|&p| p != (0, 0))
                .collect();
            for v in 1..=max_vocab {
                multisets(profiles.len(), v, 0, &mut Vec::new(), &mut |idx| {
                    visit(&NbCase {
                        docs: [kf, ka],
                        profile: idx.iter().map(|&i| profiles[i]).collect(),
                    })
                });
            }
        }
    }
}

pub fn nb_word(i: usize) -> String {
    format!("w{i}")
}

/// Documents realizing `case`: word `w` occurs once in each of the first
/// `for_count` For documents and the first `against_count` Against ones.
pub fn nb_training_docs(case: &NbCase) -> Vec<(relp::FeatureVector, Stance)> {
    let mut docs = Vec::new();
    for (c, stance) in [Stance::For, Stance::Against].into_iter().enumerate() {
        for d in 0..case.docs[c] {
            let words = case.profile.iter().enumerate().filter_map(|(w, p)| {
                let count = if c == 0 { p.0 } else { p.1 };
                (d < count).then(|| (nb_word(w), 1))
            });
            docs.push((relp::FeatureVector::from_counts(words), stance));
        }
    }
    docs
}

/// Every count vector of length `len` with entries in `0..=max`.
pub fn for_each_query(len: usize, max: u32, mut visit: impl FnMut(&[u32])) {
    let mut q = vec![0u32; len];
    loop {
        visit(&q);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            if q[i] < max {
                q[i] += 1;
                break;
            }
            q[i] = 0;
            i += 1;
        }
    }
}
