mod common;

use proptest::prelude::*;
use relp::features::{extract_ngrams, featurize, tokenize};

fn words() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            "[a-zA-Z]{1,6}",
            "#[a-z0-9]{1,5}",
            "@[a-z]{1,5}",
            "[!?.,:;\"()]{1,3}",
            Just("https://t.co/x1".to_string()),
            "[a-z]{1,4}[.!?]",
        ],
        0..15,
    )
    .prop_map(|ws| ws.join(" "))
}

/// Every window of length `n` at every start, counted naively.
#[allow(clippy::needless_range_loop)]
fn window_oracle(tokens: &[String], lo: usize, hi: usize) -> Vec<(String, u32)> {
    let mut out: std::collections::BTreeMap<String, u32> = Default::default();
    for n in lo..=hi {
        let mut start = 0;
        while start + n <= tokens.len() {
            let mut gram = String::new();
            for k in start..start + n {
                if k > start {
                    gram.push(' ');
                }
                gram.push_str(&tokens[k]);
            }
            *out.entry(gram).or_default() += 1;
            start += 1;
        }
    }
    out.into_iter().collect()
}

proptest! {
    #![proptest_config(common::proptest_config(256))]

    #[test]
    fn ngram_total_counts(text in words()) {
        let seq = tokenize(&text);
        let l = seq.len() as u64;
        let expected = l + l.saturating_sub(1) + l.saturating_sub(2);
        prop_assert_eq!(featurize(&text).total(), expected);
    }

    #[test]
    fn ngrams_match_window_oracle(text in words(), lo in 1usize..4, span in 0usize..3) {
        let seq = tokenize(&text);
        let hi = lo + span;
        let got: Vec<(String, u32)> = extract_ngrams(&seq, lo, hi)
            .iter()
            .map(|(k, c)| (k.to_string(), c))
            .collect();
        prop_assert_eq!(got, window_oracle(seq.tokens(), lo, hi));
    }

    #[test]
    fn tokenize_is_idempotent(text in words()) {
        let once = tokenize(&text);
        prop_assert_eq!(tokenize(&once.joined()), once.clone());
        for t in once.tokens() {
            prop_assert!(!t.is_empty());
            prop_assert_eq!(t.to_lowercase(), t.clone());
            prop_assert!(!t.starts_with("http://") && !t.starts_with("https://"));
        }
    }
}
