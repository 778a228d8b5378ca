mod common;
mod support;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relp::corpus::{filter_corpus, read_corpus, write_corpus, Corpus, ParseMode};
use support::{random_corpus, retweeters_by_scan};

fn corpus(seed: u64) -> Corpus {
    random_corpus(&mut ChaCha8Rng::seed_from_u64(seed), 300, 40)
}

/// Repeats "drop users under the threshold, then drop retweets of absent
/// tweets" until nothing changes, rebuilding counts from scratch each pass.
fn filter_oracle(c: &Corpus, min: usize) -> Vec<String> {
    let mut kept: Vec<&relp::Tweet> = c.tweets().iter().collect();
    loop {
        let before = kept.len();
        let count = |u: &str, ts: &[&relp::Tweet]| ts.iter().filter(|t| t.user_id == u).count();
        let snapshot = kept.clone();
        kept.retain(|t| count(&t.user_id, &snapshot) >= min);
        let ids: HashSet<&str> = kept.iter().map(|t| t.id.as_str()).collect();
        kept.retain(|t| t.retweet_of.as_deref().is_none_or(|s| ids.contains(s)));
        if kept.len() == before {
            return kept.iter().map(|t| t.id.clone()).collect();
        }
    }
}

proptest! {
    #![proptest_config(common::proptest_config(64))]

    #[test]
    fn filter_matches_oracle_and_is_idempotent(seed in any::<u64>(), min in 0usize..5) {
        let c = corpus(seed);
        let f = filter_corpus(&c, min);
        let ids: Vec<String> = f.tweets().iter().map(|t| t.id.clone()).collect();
        prop_assert_eq!(ids, filter_oracle(&c, min));
        prop_assert_eq!(&filter_corpus(&f, min), &f);
        for t in f.tweets() {
            if let Some(src) = &t.retweet_of {
                prop_assert!(f.contains(src));
            }
        }
    }

    #[test]
    fn user_groups_partition_the_corpus(seed in any::<u64>()) {
        let c = corpus(seed);
        let total: usize = c.user_ids().map(|u| c.tweets_of(u).count()).sum();
        prop_assert_eq!(total, c.len());
        for u in c.user_ids() {
            for t in c.tweets_of(u) {
                prop_assert_eq!(&t.user_id, u);
            }
        }
    }

    #[test]
    fn retweeter_index_matches_scan(seed in any::<u64>()) {
        let c = corpus(seed);
        let scanned = retweeters_by_scan(&c);
        for (id, users) in &scanned {
            prop_assert_eq!(c.retweeters(id), Some(users));
        }
        // The index also keeps referents absent from the corpus.
        for (id, users) in c.retweeter_index() {
            if c.contains(id) {
                prop_assert_eq!(scanned.get(id), Some(users));
            }
        }
    }

    #[test]
    fn jsonl_round_trip(seed in any::<u64>()) {
        let c = corpus(seed);
        let mut buf = Vec::new();
        write_corpus(&c, &mut buf).unwrap();
        let back = read_corpus(buf.as_slice(), ParseMode::Strict).unwrap();
        prop_assert_eq!(back.skipped, 0);
        prop_assert_eq!(back.corpus, c);
    }
}

#[test]
fn lenient_mode_skips_and_strict_mode_names_the_line() {
    let text = "{\"id\":\"a\",\"user_id\":\"u\",\"text\":\"x\",\"timestamp\":1}\nnot json\n";
    let loaded = read_corpus(text.as_bytes(), ParseMode::Lenient).unwrap();
    assert_eq!((loaded.corpus.len(), loaded.skipped), (1, 1));
    let err = read_corpus(text.as_bytes(), ParseMode::Strict).unwrap_err();
    assert!(err.to_string().starts_with("line 2:"), "{err}");
}
