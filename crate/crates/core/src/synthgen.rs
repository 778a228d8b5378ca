//! Synthetic two-sided debate corpora with planted retweet communities.
//!
//! Users on each side write originals drawn from their side's vocabulary
//! mixed with a shared one. Every user is then offered a sample of seed-user
//! originals and a sample of other originals, and retweets each offer with a
//! probability that depends on whether the author is on the same side.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::HashtagSeeds;
use crate::corpus::{write_corpus, write_seeds, Corpus, SeedSet, Stance, Tweet};
use crate::error::{Error, Result};

pub const TWEETS_FILE: &str = "tweets.jsonl";
pub const SEEDS_FILE: &str = "seeds.csv";
pub const GOLD_FILE: &str = "gold.csv";
pub const HASHTAGS_FILE: &str = "hashtags.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub users_per_side: usize,
    /// Inclusive range of original tweets per user.
    pub tweets_per_user: [usize; 2],
    pub seed_users_per_side: usize,
    pub p_retweet_in: f64,
    pub p_retweet_cross: f64,
    pub vocab_size_shared: usize,
    pub vocab_size_side: usize,
    /// Inclusive range of words per original tweet.
    pub tokens_per_tweet: [usize; 2],
    /// Chance that a word comes from the author's side vocabulary rather
    /// than the shared one.
    pub p_side_token: f64,
    /// Seed-user originals offered to each user.
    pub seed_offers_per_user: usize,
    /// Non-seed originals offered to each user.
    pub offers_per_user: usize,
    pub hashtags_per_side: usize,
    /// Chance that an original carries one of its side's hashtags.
    pub p_hashtag: f64,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            users_per_side: 200,
            tweets_per_user: [3, 5],
            seed_users_per_side: 3,
            p_retweet_in: 0.9,
            p_retweet_cross: 0.02,
            vocab_size_shared: 300,
            vocab_size_side: 300,
            tokens_per_tweet: [6, 12],
            p_side_token: 0.35,
            seed_offers_per_user: 4,
            offers_per_user: 8,
            hashtags_per_side: 3,
            p_hashtag: 0.2,
            rng_seed: 20130415,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let probability = |name: &str, p: f64| -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
            }
        };
        if self.users_per_side == 0 {
            return fail("users_per_side must be positive".into());
        }
        if self.seed_users_per_side == 0 || self.seed_users_per_side > self.users_per_side {
            return fail("seed_users_per_side must lie in 1..=users_per_side".into());
        }
        for (name, [lo, hi]) in [
            ("tweets_per_user", self.tweets_per_user),
            ("tokens_per_tweet", self.tokens_per_tweet),
        ] {
            if lo == 0 || lo > hi {
                return fail(format!(
                    "{name} must be a range [min, max] with 1 <= min <= max"
                ));
            }
        }
        if self.vocab_size_shared == 0 || self.vocab_size_side == 0 || self.hashtags_per_side == 0 {
            return fail("vocabulary and hashtag sizes must be positive".into());
        }
        probability("p_retweet_in", self.p_retweet_in)?;
        probability("p_retweet_cross", self.p_retweet_cross)?;
        probability("p_side_token", self.p_side_token)?;
        probability("p_hashtag", self.p_hashtag)?;
        if self.p_retweet_cross >= self.p_retweet_in {
            return fail("p_retweet_cross must be below p_retweet_in".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub corpus: Corpus,
    pub gold: BTreeMap<String, Stance>,
    pub seeds: SeedSet,
    /// The first hashtag of each side.
    pub hashtags: HashtagSeeds,
}

impl SynthOutput {
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, body: &dyn Fn(&mut BufWriter<fs::File>) -> std::io::Result<()>| {
            let path = dir.join(name);
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)
                .and_then(|_| std::io::Write::flush(&mut w))
                .map_err(|e| Error::io(&path, e))
        };
        write(TWEETS_FILE, &|w| write_corpus(&self.corpus, w))?;
        write(SEEDS_FILE, &|w| write_seeds(&self.seeds, w))?;
        write(GOLD_FILE, &|w| {
            for (user, stance) in &self.gold {
                std::io::Write::write_fmt(w, format_args!("{user},{stance}\n"))?;
            }
            Ok(())
        })?;
        write(HASHTAGS_FILE, &|w| {
            for stance in Stance::BOTH {
                for tag in self.hashtags.tags(stance) {
                    std::io::Write::write_fmt(w, format_args!("{tag},{stance}\n"))?;
                }
            }
            Ok(())
        })?;
        Ok(())
    }
}

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st", "tr",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u"];

fn vocabulary(rng: &mut ChaCha8Rng, size: usize, taken: &mut HashSet<String>) -> Vec<String> {
    let mut words = Vec::with_capacity(size);
    while words.len() < size {
        let syllables = rng.gen_range(2..=3);
        let word: String = (0..syllables)
            .map(|_| {
                format!(
                    "{}{}",
                    ONSETS[rng.gen_range(0..ONSETS.len())],
                    VOWELS[rng.gen_range(0..VOWELS.len())]
                )
            })
            .collect();
        if taken.insert(word.clone()) {
            words.push(word);
        }
    }
    words
}

struct Original {
    index: usize,
    side: Stance,
    seed: bool,
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let mut taken = HashSet::new();
    let shared = vocabulary(&mut rng, cfg.vocab_size_shared, &mut taken);
    let side_vocab = [
        vocabulary(&mut rng, cfg.vocab_size_side, &mut taken),
        vocabulary(&mut rng, cfg.vocab_size_side, &mut taken),
    ];
    let side_tags: [Vec<String>; 2] = [
        vocabulary(&mut rng, cfg.hashtags_per_side, &mut taken)
            .into_iter()
            .map(|w| format!("#{w}"))
            .collect(),
        vocabulary(&mut rng, cfg.hashtags_per_side, &mut taken)
            .into_iter()
            .map(|w| format!("#{w}"))
            .collect(),
    ];

    let n_users = 2 * cfg.users_per_side;
    let user_id = |u: usize| format!("u{u:05}");
    let side_of = |u: usize| {
        if u < cfg.users_per_side {
            Stance::For
        } else {
            Stance::Against
        }
    };
    let is_seed = |u: usize| u % cfg.users_per_side < cfg.seed_users_per_side;

    let base_time: i64 = 1_366_000_000;
    let mut tweets: Vec<Tweet> = Vec::new();
    let mut originals: Vec<Original> = Vec::new();
    let next_tweet = |tweets: &mut Vec<Tweet>, user: usize, text: String, rt: Option<String>| {
        let n = tweets.len();
        tweets.push(Tweet {
            id: format!("t{n:07}"),
            user_id: user_id(user),
            text,
            retweet_of: rt,
            timestamp: base_time + 7 * n as i64,
        });
        n
    };

    for u in 0..n_users {
        let side = side_of(u);
        let count = rng.gen_range(cfg.tweets_per_user[0]..=cfg.tweets_per_user[1]);
        for _ in 0..count {
            let len = rng.gen_range(cfg.tokens_per_tweet[0]..=cfg.tokens_per_tweet[1]);
            let mut words: Vec<&str> = (0..len)
                .map(|_| {
                    let pool = if rng.gen_bool(cfg.p_side_token) {
                        &side_vocab[side.index()]
                    } else {
                        &shared
                    };
                    pool[rng.gen_range(0..pool.len())].as_str()
                })
                .collect();
            if rng.gen_bool(cfg.p_hashtag) {
                let tags = &side_tags[side.index()];
                let at = rng.gen_range(0..=words.len());
                words.insert(at, tags[rng.gen_range(0..tags.len())].as_str());
            }
            let index = next_tweet(&mut tweets, u, words.join(" "), None);
            originals.push(Original {
                index,
                side,
                seed: is_seed(u),
            });
        }
    }

    let seed_pool: Vec<&Original> = originals.iter().filter(|o| o.seed).collect();
    let other_pool: Vec<&Original> = originals.iter().filter(|o| !o.seed).collect();
    for u in 0..n_users {
        let side = side_of(u);
        let me = user_id(u);
        let mine = |o: &&&Original| tweets[o.index].user_id != me;
        let seeds: Vec<&&Original> = seed_pool.iter().filter(mine).collect();
        let others: Vec<&&Original> = other_pool.iter().filter(mine).collect();
        let mut offers: Vec<usize> = seeds
            .choose_multiple(&mut rng, cfg.seed_offers_per_user)
            .chain(others.choose_multiple(&mut rng, cfg.offers_per_user))
            .filter_map(|o| {
                let p = if o.side == side {
                    cfg.p_retweet_in
                } else {
                    cfg.p_retweet_cross
                };
                rng.gen_bool(p).then_some(o.index)
            })
            .collect();
        offers.sort_unstable();
        for idx in offers {
            let src = &tweets[idx];
            let text = format!("RT @{}: {}", src.user_id, src.text);
            let src_id = src.id.clone();
            next_tweet(&mut tweets, u, text, Some(src_id));
        }
    }

    let gold = (0..n_users).map(|u| (user_id(u), side_of(u))).collect();
    let seeds = SeedSet::new(
        (0..n_users)
            .filter(|&u| is_seed(u))
            .map(|u| (user_id(u), side_of(u))),
    )?;
    let hashtags = HashtagSeeds::new([
        (side_tags[0][0].clone(), Stance::For),
        (side_tags[1][0].clone(), Stance::Against),
    ])?;
    Ok(SynthOutput {
        corpus: Corpus::from_tweets(tweets)?,
        gold,
        seeds,
        hashtags,
    })
}
