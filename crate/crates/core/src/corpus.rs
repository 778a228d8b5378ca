//! Tweet corpus and seed-user loading.
//!
//! The corpus keeps tweets in input order and derives two indexes from
//! them: the tweets of each user, and the set of users who retweeted each
//! tweet. Both indexes are rebuilt from scratch whenever a new corpus is
//! produced, so they can never drift from the tweet list.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Position on the debated topic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    For,
    Against,
}

impl Stance {
    pub const BOTH: [Stance; 2] = [Stance::For, Stance::Against];

    pub fn as_str(self) -> &'static str {
        match self {
            Stance::For => "for",
            Stance::Against => "against",
        }
    }

    pub fn opposite(self) -> Stance {
        match self {
            Stance::For => Stance::Against,
            Stance::Against => Stance::For,
        }
    }

    /// Dense index: `For` is 0, `Against` is 1.
    pub fn index(self) -> usize {
        match self {
            Stance::For => 0,
            Stance::Against => 1,
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "for" => Ok(Stance::For),
            "against" => Ok(Stance::Against),
            other => Err(format!(
                "unknown stance {other:?} (expected for or against)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub user_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweet_of: Option<String>,
    pub timestamp: i64,
}

impl Tweet {
    pub fn is_retweet(&self) -> bool {
        self.retweet_of.is_some()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    by_id: HashMap<String, usize>,
    users: BTreeMap<String, Vec<usize>>,
    retweeters: BTreeMap<String, BTreeSet<String>>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.tweets == other.tweets
    }
}

impl Corpus {
    /// Builds a corpus and its indexes. Tweet ids must be unique.
    pub fn from_tweets(tweets: Vec<Tweet>) -> Result<Corpus> {
        let mut by_id = HashMap::with_capacity(tweets.len());
        let mut users: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut retweeters: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, t) in tweets.iter().enumerate() {
            if by_id.insert(t.id.clone(), i).is_some() {
                return Err(Error::DuplicateTweet(t.id.clone()));
            }
            users.entry(t.user_id.clone()).or_default().push(i);
            if let Some(src) = &t.retweet_of {
                retweeters
                    .entry(src.clone())
                    .or_default()
                    .insert(t.user_id.clone());
            }
        }
        Ok(Corpus {
            tweets,
            by_id,
            users,
            retweeters,
        })
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Tweet> {
        self.by_id.get(id).map(|&i| &self.tweets[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// User ids in ascending order.
    pub fn user_ids(&self) -> impl Iterator<Item = &str> {
        self.users.keys().map(String::as_str)
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    /// Tweets of one user, in corpus order.
    pub fn tweets_of<'a>(&'a self, user_id: &str) -> impl Iterator<Item = &'a Tweet> + 'a {
        self.users
            .get(user_id)
            .map(Vec::as_slice)
            .unwrap_or_default()
            .iter()
            .map(move |&i| &self.tweets[i])
    }

    /// Users who retweeted `tweet_id`, each counted once.
    pub fn retweeters(&self, tweet_id: &str) -> Option<&BTreeSet<String>> {
        self.retweeters.get(tweet_id)
    }

    /// The full retweeter index, keyed by retweeted tweet id.
    pub fn retweeter_index(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.retweeters
    }

    pub fn retweet_count(&self) -> usize {
        self.tweets.iter().filter(|t| t.is_retweet()).count()
    }

    /// Original (non-retweet) tweets authored by `user_id`.
    pub fn originals_of<'a>(&'a self, user_id: &str) -> impl Iterator<Item = &'a Tweet> + 'a {
        self.tweets_of(user_id).filter(|t| !t.is_retweet())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// The first malformed line aborts loading.
    #[default]
    Strict,
    /// Malformed lines are skipped and counted.
    Lenient,
}

#[derive(Debug)]
pub struct Loaded {
    pub corpus: Corpus,
    pub skipped: usize,
}

pub fn load_corpus(path: impl AsRef<Path>, mode: ParseMode) -> Result<Loaded> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file), mode).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_corpus(reader: impl BufRead, mode: ParseMode) -> Result<Loaded> {
    let mut tweets = Vec::new();
    let mut seen = HashSet::new();
    let mut skipped = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io("<corpus>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_tweet(&line).and_then(|t| {
            if seen.contains(&t.id) {
                Err(format!("duplicate tweet id {}", t.id))
            } else {
                Ok(t)
            }
        });
        match parsed {
            Ok(t) => {
                seen.insert(t.id.clone());
                tweets.push(t);
            }
            Err(reason) => match mode {
                ParseMode::Strict => return Err(Error::parse(lineno, reason)),
                ParseMode::Lenient => skipped += 1,
            },
        }
    }
    Ok(Loaded {
        corpus: Corpus::from_tweets(tweets)?,
        skipped,
    })
}

fn parse_tweet(line: &str) -> std::result::Result<Tweet, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value
        .as_object()
        .ok_or_else(|| "record is not a JSON object".to_string())?;
    let string_field = |name: &str| -> std::result::Result<String, String> {
        match obj.get(name) {
            None => Err(format!("missing field {name}")),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(format!("field {name} must be a string")),
        }
    };
    let id = string_field("id")?;
    let user_id = string_field("user_id")?;
    let text = string_field("text")?;
    let retweet_of = match obj.get("retweet_of") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err("field retweet_of must be a string".into()),
    };
    let timestamp = match obj.get("timestamp") {
        None => return Err("missing field timestamp".into()),
        Some(v) => v
            .as_i64()
            .ok_or_else(|| "field timestamp must be an integer".to_string())?,
    };
    Ok(Tweet {
        id,
        user_id,
        text,
        retweet_of,
        timestamp,
    })
}

/// Writes one JSON object per line, in corpus order.
pub fn write_corpus(corpus: &Corpus, mut out: impl Write) -> std::io::Result<()> {
    for t in corpus.tweets() {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Keeps the tweets of users with at least `min_tweets_per_user` tweets,
/// then drops retweets whose source is no longer present.
pub fn filter_corpus(corpus: &Corpus, min_tweets_per_user: usize) -> Corpus {
    filter_corpus_with(corpus, min_tweets_per_user, |_| true)
}

/// [`filter_corpus`] with a caller-supplied pre-filter (e.g. a language
/// check) applied before the per-user threshold.
///
/// Both removal steps repeat until nothing changes: dropping a dangling
/// retweet may push its author below the threshold, and dropping a tweet
/// may leave retweets of it dangling.
pub fn filter_corpus_with(
    corpus: &Corpus,
    min_tweets_per_user: usize,
    keep: impl Fn(&Tweet) -> bool,
) -> Corpus {
    let tweets = corpus.tweets();
    let mut kept: Vec<bool> = tweets.iter().map(&keep).collect();
    loop {
        let mut changed = false;

        let mut per_user: HashMap<&str, usize> = HashMap::new();
        for (t, _) in tweets.iter().zip(&kept).filter(|(_, k)| **k) {
            *per_user.entry(t.user_id.as_str()).or_default() += 1;
        }
        for (t, k) in tweets.iter().zip(kept.iter_mut()) {
            if *k && per_user[t.user_id.as_str()] < min_tweets_per_user {
                *k = false;
                changed = true;
            }
        }

        let present: HashSet<&str> = tweets
            .iter()
            .zip(&kept)
            .filter(|(_, k)| **k)
            .map(|(t, _)| t.id.as_str())
            .collect();
        for (t, k) in tweets.iter().zip(kept.iter_mut()) {
            if let (true, Some(src)) = (*k, &t.retweet_of) {
                if !present.contains(src.as_str()) {
                    *k = false;
                    changed = true;
                }
            }
        }

        if !changed {
            break;
        }
    }
    let retained = tweets
        .iter()
        .zip(&kept)
        .filter(|(_, k)| **k)
        .map(|(t, _)| t.clone())
        .collect();
    Corpus::from_tweets(retained).expect("subset of a valid corpus has unique ids")
}

/// Manually labeled seed users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    entries: BTreeMap<String, Stance>,
}

impl SeedSet {
    /// Identical duplicates collapse; conflicting duplicates are rejected.
    pub fn new(entries: impl IntoIterator<Item = (String, Stance)>) -> Result<SeedSet> {
        let mut map = BTreeMap::new();
        for (user, stance) in entries {
            match map.get(&user) {
                Some(prev) if *prev != stance => return Err(Error::ConflictingSeed(user)),
                _ => {
                    map.insert(user, stance);
                }
            }
        }
        if !Stance::BOTH.iter().all(|s| map.values().any(|v| v == s)) {
            return Err(Error::OneSidedSeeds);
        }
        Ok(SeedSet { entries: map })
    }

    pub fn stance_of(&self, user_id: &str) -> Option<Stance> {
        self.entries.get(user_id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Stance)> {
        self.entries.iter().map(|(u, s)| (u.as_str(), *s))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_seeds(path: impl AsRef<Path>) -> Result<SeedSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_seeds(file)
}

pub fn read_seeds(reader: impl Read) -> Result<SeedSet> {
    let rows = read_labeled_csv(reader, 2)?;
    SeedSet::new(rows.into_iter().map(|r| (r.key, r.stance)))
}

pub fn write_seeds(seeds: &SeedSet, mut out: impl Write) -> std::io::Result<()> {
    for (user, stance) in seeds.iter() {
        writeln!(out, "{user},{stance}")?;
    }
    Ok(())
}

pub(crate) struct LabeledRow {
    pub key: String,
    pub stance: Stance,
    pub extra: Option<String>,
}

/// Reads headerless `key,stance[,extra]` rows. `max_columns` is 2 or 3.
pub(crate) fn read_labeled_csv(reader: impl Read, max_columns: usize) -> Result<Vec<LabeledRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() < 2 || record.len() > max_columns {
            return Err(Error::parse(
                line,
                format!("expected 2..={max_columns} columns, found {}", record.len()),
            ));
        }
        let key = record[0].to_string();
        if key.is_empty() {
            return Err(Error::parse(line, "empty key column"));
        }
        let stance = record[1].parse().map_err(|e| Error::parse(line, e))?;
        rows.push(LabeledRow {
            key,
            stance,
            extra: record.get(2).filter(|s| !s.is_empty()).map(str::to_string),
        });
    }
    Ok(rows)
}
