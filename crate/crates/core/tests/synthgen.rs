use std::collections::BTreeMap;

use relp::cooccurrence::build_matrix;
use relp::corpus::{load_corpus, load_seeds, ParseMode};
use relp::evaluation::load_gold;
use relp::synthgen::{generate, SynthConfig, GOLD_FILE, SEEDS_FILE, TWEETS_FILE};
use relp::Stance;

fn author_sides(out: &relp::synthgen::SynthOutput) -> BTreeMap<String, Stance> {
    out.corpus
        .tweets()
        .iter()
        .map(|t| (t.id.clone(), out.gold[&t.user_id]))
        .collect()
}

#[test]
fn matrix_mass_stays_within_sides() {
    let out = generate(&SynthConfig::default()).unwrap();
    let side = author_sides(&out);
    let m = build_matrix(&out.corpus).unwrap();
    let (mut within, mut across) = (0.0, 0.0);
    for (i, j, w) in m.entries() {
        if side[i] == side[j] {
            within += w.value();
        } else {
            across += w.value();
        }
    }
    assert!(within >= 10.0 * across, "within {within} across {across}");
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

#[test]
fn no_cross_retweets_gives_two_communities() {
    let cfg = SynthConfig {
        p_retweet_cross: 0.0,
        ..SynthConfig::default()
    };
    let out = generate(&cfg).unwrap();
    let users: Vec<&String> = out.gold.keys().collect();
    let index: BTreeMap<&str, usize> = users
        .iter()
        .enumerate()
        .map(|(i, u)| (u.as_str(), i))
        .collect();
    let mut parent: Vec<usize> = (0..users.len()).collect();
    for t in out.corpus.tweets() {
        if let Some(src) = &t.retweet_of {
            let author = &out.corpus.get(src).unwrap().user_id;
            let (a, b) = (
                find(&mut parent, index[author.as_str()]),
                find(&mut parent, index[t.user_id.as_str()]),
            );
            parent[a] = b;
        }
    }
    let mut components: BTreeMap<usize, Vec<Stance>> = BTreeMap::new();
    for (i, u) in users.iter().enumerate() {
        let root = find(&mut parent, i);
        components
            .entry(root)
            .or_default()
            .push(out.gold[u.as_str()]);
    }
    assert_eq!(components.len(), 2);
    for sides in components.values() {
        assert!(sides.iter().all(|s| *s == sides[0]));
    }
}

#[test]
fn written_files_load_back() {
    let out = generate(&SynthConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    out.write_to(dir.path()).unwrap();
    let loaded = load_corpus(dir.path().join(TWEETS_FILE), ParseMode::Strict).unwrap();
    assert_eq!(loaded.corpus, out.corpus);
    assert_eq!(loaded.skipped, 0);
    assert_eq!(load_seeds(dir.path().join(SEEDS_FILE)).unwrap(), out.seeds);
    assert_eq!(
        load_gold(dir.path().join(GOLD_FILE)).unwrap().labels,
        out.gold
    );
}

#[test]
fn seeds_change_the_bytes() {
    let bytes = |seed: u64| {
        let out = generate(&SynthConfig {
            rng_seed: seed,
            ..SynthConfig::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        relp::corpus::write_corpus(&out.corpus, &mut buf).unwrap();
        buf
    };
    assert_eq!(bytes(1), bytes(1));
    assert_ne!(bytes(1), bytes(2));
}

#[test]
fn line_counts_follow_the_config() {
    let cfg = SynthConfig::default();
    let out = generate(&cfg).unwrap();
    assert_eq!(out.gold.len(), 2 * cfg.users_per_side);
    assert_eq!(out.seeds.len(), 2 * cfg.seed_users_per_side);
    for u in out.gold.keys() {
        let originals = out.corpus.originals_of(u).count();
        assert!((cfg.tweets_per_user[0]..=cfg.tweets_per_user[1]).contains(&originals));
    }
    for (user, stance) in out.seeds.iter() {
        assert_eq!(out.gold[user], stance);
    }
}
