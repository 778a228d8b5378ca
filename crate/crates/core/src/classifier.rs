//! Multinomial naive Bayes over n-gram counts, and user-level aggregation
//! of tweet labels.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use crate::corpus::{Corpus, Stance};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::{featurize_corpus, FeatureVector};
use crate::propagation::FinalLabeling;

/// Relative gap under which two log-scores count as tied.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MnbModel {
    alpha: f64,
    class_log_prior: [f64; 2],
    /// Per n-gram log-likelihood, indexed by [`Stance::index`].
    log_likelihood: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub stance: Stance,
    /// Indexed by [`Stance::index`].
    pub log_scores: [f64; 2],
}

impl Prediction {
    pub fn log_score(&self, stance: Stance) -> f64 {
        self.log_scores[stance.index()]
    }

    /// `log_score(For) - log_score(Against)`.
    pub fn margin(&self) -> f64 {
        self.log_scores[0] - self.log_scores[1]
    }
}

pub fn train(docs: &[(FeatureVector, Stance)], alpha: f64) -> Result<MnbModel> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Config(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let mut doc_counts = [0usize; 2];
    let mut totals = [0u64; 2];
    let mut counts: BTreeMap<&str, [u64; 2]> = BTreeMap::new();
    for (fv, stance) in docs {
        let c = stance.index();
        doc_counts[c] += 1;
        for (w, n) in fv.iter() {
            counts.entry(w).or_default()[c] += n as u64;
            totals[c] += n as u64;
        }
    }
    if doc_counts.contains(&0) {
        return Err(Error::DegenerateTrainingSet);
    }
    if counts.is_empty() {
        return Err(Error::EmptyVocabulary);
    }

    let n_docs = docs.len() as f64;
    let vocab = counts.len() as f64;
    let denom = [
        totals[0] as f64 + alpha * vocab,
        totals[1] as f64 + alpha * vocab,
    ];
    let log_likelihood = counts
        .into_iter()
        .map(|(w, c)| {
            let ll = [
                ((c[0] as f64 + alpha) / denom[0]).ln(),
                ((c[1] as f64 + alpha) / denom[1]).ln(),
            ];
            (w.to_string(), ll)
        })
        .collect();
    Ok(MnbModel {
        alpha,
        class_log_prior: [
            (doc_counts[0] as f64 / n_docs).ln(),
            (doc_counts[1] as f64 / n_docs).ln(),
        ],
        log_likelihood,
    })
}

impl MnbModel {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn class_log_prior(&self, stance: Stance) -> f64 {
        self.class_log_prior[stance.index()]
    }

    pub fn feature_log_likelihood(&self, stance: Stance, ngram: &str) -> Option<f64> {
        self.log_likelihood.get(ngram).map(|ll| ll[stance.index()])
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.log_likelihood.keys().map(String::as_str)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.log_likelihood.len()
    }

    /// Out-of-vocabulary n-grams are ignored. Ties go to `Against`.
    pub fn predict(&self, fv: &FeatureVector) -> Prediction {
        let mut scores = self.class_log_prior;
        for (w, n) in fv.iter() {
            if let Some(ll) = self.log_likelihood.get(w) {
                scores[0] += n as f64 * ll[0];
                scores[1] += n as f64 * ll[1];
            }
        }
        let scale = 1f64.max(scores[0].abs()).max(scores[1].abs());
        let stance = if scores[0] - scores[1] > TIE_EPSILON * scale {
            Stance::For
        } else {
            Stance::Against
        };
        Prediction {
            stance,
            log_scores: scores,
        }
    }

    pub fn predict_many(&self, fvs: &[FeatureVector], exec: Exec) -> Vec<Prediction> {
        exec.map(fvs, |fv| self.predict(fv))
    }

    /// Prior header lines, then `class \t ngram \t log_likelihood` sorted by
    /// class and n-gram.
    pub fn write_dump(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "#alpha\t{:.6}", self.alpha)?;
        let mut classes = Stance::BOTH;
        classes.sort_by_key(|s| s.as_str());
        for s in classes {
            writeln!(out, "#prior\t{s}\t{:.6}", self.class_log_prior(s))?;
        }
        for s in classes {
            for (w, ll) in &self.log_likelihood {
                writeln!(out, "{s}\t{w}\t{:.6}", ll[s.index()])?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelSource {
    Propagated,
    Classified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UserSource {
    Propagated,
    Classified,
    Mixed,
}

impl UserSource {
    pub fn as_str(self) -> &'static str {
        match self {
            UserSource::Propagated => "propagated",
            UserSource::Classified => "classified",
            UserSource::Mixed => "mixed",
        }
    }
}

/// A tweet-level label with its vote weight for tie-breaking: the
/// For-minus-Against margin.
#[derive(Debug, Clone, PartialEq)]
pub struct TweetLabel {
    pub tweet_id: String,
    pub stance: Stance,
    pub source: LabelSource,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserStanceResult {
    pub user_id: String,
    pub stance: Stance,
    pub for_votes: usize,
    pub against_votes: usize,
    pub source: UserSource,
}

impl UserStanceResult {
    pub fn votes(&self, stance: Stance) -> usize {
        match stance {
            Stance::For => self.for_votes,
            Stance::Against => self.against_votes,
        }
    }
}

/// Majority vote over one user's tweet labels. A vote tie is broken by the
/// sign of the summed margins; a zero sum goes to `Against`.
pub fn aggregate_votes<'a>(
    user_id: &str,
    labels: impl IntoIterator<Item = &'a TweetLabel>,
) -> Option<UserStanceResult> {
    let mut votes = [0usize; 2];
    let mut margin = 0.0;
    let mut sources = [false; 2];
    for l in labels {
        votes[l.stance.index()] += 1;
        margin += l.margin;
        sources[match l.source {
            LabelSource::Propagated => 0,
            LabelSource::Classified => 1,
        }] = true;
    }
    let source = match sources {
        [false, false] => return None,
        [true, false] => UserSource::Propagated,
        [false, true] => UserSource::Classified,
        [true, true] => UserSource::Mixed,
    };
    let stance = match votes[0].cmp(&votes[1]) {
        std::cmp::Ordering::Greater => Stance::For,
        std::cmp::Ordering::Less => Stance::Against,
        std::cmp::Ordering::Equal if margin > 0.0 => Stance::For,
        std::cmp::Ordering::Equal => Stance::Against,
    };
    Some(UserStanceResult {
        user_id: user_id.to_string(),
        stance,
        for_votes: votes[0],
        against_votes: votes[1],
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// One label per tweet, in corpus order.
    pub tweets: Vec<TweetLabel>,
    /// One result per user, in user-id order.
    pub users: Vec<UserStanceResult>,
}

impl Classification {
    pub fn user_stances(&self) -> BTreeMap<String, Stance> {
        self.users
            .iter()
            .map(|u| (u.user_id.clone(), u.stance))
            .collect()
    }
}

/// Tweet labels come from propagation where available and from the model
/// otherwise; users take the majority of their tweets' labels.
/// Propagated tweets carry a margin of ±1.
pub fn classify_users(
    corpus: &Corpus,
    labeling: &FinalLabeling,
    model: &MnbModel,
) -> Classification {
    let features = featurize_corpus(corpus, Exec::default());
    classify_users_with(corpus, labeling, model, &features, Exec::default())
}

/// [`classify_users`] with features precomputed in corpus order.
pub fn classify_users_with(
    corpus: &Corpus,
    labeling: &FinalLabeling,
    model: &MnbModel,
    features: &[FeatureVector],
    exec: Exec,
) -> Classification {
    let tweets = corpus.tweets();
    debug_assert_eq!(features.len(), tweets.len());
    let indices: Vec<usize> = (0..tweets.len()).collect();
    let labels = exec.map(&indices, |&i| {
        let t = &tweets[i];
        match labeling.labeled.get(&t.id) {
            Some(&stance) => TweetLabel {
                tweet_id: t.id.clone(),
                stance,
                source: LabelSource::Propagated,
                margin: if stance == Stance::For { 1.0 } else { -1.0 },
            },
            None => {
                let p = model.predict(&features[i]);
                TweetLabel {
                    tweet_id: t.id.clone(),
                    stance: p.stance,
                    source: LabelSource::Classified,
                    margin: p.margin(),
                }
            }
        }
    });
    let users = users_from_labels(corpus, &labels);
    Classification {
        tweets: labels,
        users,
    }
}

/// Aggregates tweet labels (in corpus order) to users.
pub fn users_from_labels(corpus: &Corpus, labels: &[TweetLabel]) -> Vec<UserStanceResult> {
    let by_id: HashMap<&str, &TweetLabel> =
        labels.iter().map(|l| (l.tweet_id.as_str(), l)).collect();
    corpus
        .user_ids()
        .filter_map(|u| {
            aggregate_votes(
                u,
                corpus
                    .tweets_of(u)
                    .filter_map(|t| by_id.get(t.id.as_str()).copied()),
            )
        })
        .collect()
}

pub const USER_STANCES_HEADER: &str = "user_id,stance,for_votes,against_votes,source";

pub fn write_user_stances(users: &[UserStanceResult], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{USER_STANCES_HEADER}")?;
    for u in users {
        writeln!(
            out,
            "{},{},{},{},{}",
            u.user_id,
            u.stance,
            u.for_votes,
            u.against_votes,
            u.source.as_str()
        )?;
    }
    Ok(())
}

/// `tweet_id \t stance \t source \t margin`, in corpus order.
pub fn write_tweet_labels(labels: &[TweetLabel], mut out: impl Write) -> std::io::Result<()> {
    for l in labels {
        let source = match l.source {
            LabelSource::Propagated => "propagated",
            LabelSource::Classified => "classified",
        };
        writeln!(
            out,
            "{}\t{}\t{source}\t{:.6}",
            l.tweet_id, l.stance, l.margin
        )?;
    }
    Ok(())
}
