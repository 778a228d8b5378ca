//! Retweet-based label propagation.
//!
//! Seed users' original tweets start fully labeled. Each iteration selects
//! the active tweets whose strongest field falls in the highest occupied
//! bucket of `h(v) = floor(v * n)`, pushes their `(for, against)` mass
//! through the co-occurrence matrix to still-active neighbors, and moves
//! them to the finalized table. The loop stops once only bucket 0 is
//! occupied.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use crate::cooccurrence::CoocMatrix;
use crate::corpus::{Corpus, SeedSet, Stance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabelState {
    pub for_value: f64,
    pub against_value: f64,
}

impl LabelState {
    pub fn seeded(stance: Stance) -> LabelState {
        match stance {
            Stance::For => LabelState {
                for_value: 1.0,
                against_value: 0.0,
            },
            Stance::Against => LabelState {
                for_value: 0.0,
                against_value: 1.0,
            },
        }
    }

    pub fn max_value(&self) -> f64 {
        self.for_value.max(self.against_value)
    }

    /// Adds `source * weight` componentwise, saturating each field at 1.
    pub fn absorb(&mut self, source: LabelState, weight: f64) {
        self.for_value = (self.for_value + source.for_value * weight).min(1.0);
        self.against_value = (self.against_value + source.against_value * weight).min(1.0);
    }

    /// The stronger field, or `None` on an exact tie.
    pub fn decided(&self) -> Option<Stance> {
        if self.for_value > self.against_value {
            Some(Stance::For)
        } else if self.against_value > self.for_value {
            Some(Stance::Against)
        } else {
            None
        }
    }
}

/// Active and finalized label states. The key sets are disjoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelTable {
    active: BTreeMap<String, LabelState>,
    finalized: BTreeMap<String, LabelState>,
}

impl LabelTable {
    /// A table with every given tweet active.
    pub fn from_active(active: BTreeMap<String, LabelState>) -> LabelTable {
        LabelTable {
            active,
            finalized: BTreeMap::new(),
        }
    }

    pub fn active(&self) -> &BTreeMap<String, LabelState> {
        &self.active
    }

    pub fn finalized(&self) -> &BTreeMap<String, LabelState> {
        &self.finalized
    }

    pub fn state(&self, id: &str) -> Option<LabelState> {
        self.active
            .get(id)
            .or_else(|| self.finalized.get(id))
            .copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagationConfig {
    /// Hash resolution `n`; buckets run from 0 to `n`.
    pub n_buckets: u32,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig { n_buckets: 10 }
    }
}

impl PropagationConfig {
    pub fn new(n_buckets: u32) -> Result<Self> {
        if n_buckets == 0 {
            return Err(Error::Config("n_buckets must be at least 1".into()));
        }
        Ok(PropagationConfig { n_buckets })
    }
}

/// Per-tweet outcome of propagation over a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FinalLabeling {
    pub labeled: BTreeMap<String, Stance>,
    /// Never finalized, or finalized with an exact tie.
    pub unlabeled: BTreeSet<String>,
}

/// Every original tweet of a seed user starts at its seed stance; all other
/// tweets start at `(0, 0)`. Everything is active.
pub fn init_labels(corpus: &Corpus, seeds: &SeedSet) -> Result<LabelTable> {
    let mut active = BTreeMap::new();
    let mut any_seed = false;
    for t in corpus.tweets() {
        let state = match seeds.stance_of(&t.user_id) {
            Some(stance) if !t.is_retweet() => {
                any_seed = true;
                LabelState::seeded(stance)
            }
            _ => LabelState::default(),
        };
        active.insert(t.id.clone(), state);
    }
    if !any_seed {
        return Err(Error::NoSeedTweets);
    }
    Ok(LabelTable::from_active(active))
}

/// `floor(clamp(v, 0, 1) * n)`, in `0..=n`.
pub fn hash_bucket(v: f64, n: u32) -> u32 {
    (v.clamp(0.0, 1.0) * n as f64).floor() as u32
}

/// Active tweets in the highest occupied bucket, or nothing when that
/// bucket is 0.
pub fn seed_selection(table: &LabelTable, cfg: PropagationConfig) -> BTreeSet<String> {
    let buckets: Vec<(u32, &String)> = table
        .active
        .iter()
        .map(|(id, s)| (hash_bucket(s.max_value(), cfg.n_buckets), id))
        .collect();
    let top = buckets.iter().map(|(b, _)| *b).max().unwrap_or(0);
    if top == 0 {
        return BTreeSet::new();
    }
    buckets
        .into_iter()
        .filter(|(b, _)| *b == top)
        .map(|(_, id)| id.clone())
        .collect()
}

/// One tweet leaving the active table after pushing its mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Finalization {
    /// 1-based outer-loop iteration.
    pub iteration: usize,
    pub tweet_id: String,
    pub state: LabelState,
    /// Active neighbors that received mass.
    pub pushed_to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub table: LabelTable,
    pub trace: Vec<Finalization>,
    /// Number of non-empty selections.
    pub iterations: usize,
}

/// Members of one batch do not update each other: each pushes the state it
/// was selected with.
pub fn propagate(matrix: &CoocMatrix, table: LabelTable, cfg: PropagationConfig) -> Propagation {
    propagate_observed(matrix, table, cfg, |_, _| {})
}

/// [`propagate`], calling `observer(iteration, finalized)` after every
/// outer iteration.
pub fn propagate_observed(
    matrix: &CoocMatrix,
    table: LabelTable,
    cfg: PropagationConfig,
    mut observer: impl FnMut(usize, &BTreeMap<String, LabelState>),
) -> Propagation {
    let LabelTable {
        active,
        mut finalized,
    } = table;
    let n = cfg.n_buckets;

    // Dense view of the active table; index order is id order.
    let ids: Vec<String> = active.keys().cloned().collect();
    let mut state: Vec<LabelState> = active.values().copied().collect();
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut is_active = vec![true; ids.len()];

    let mut bucket_of: Vec<u32> = state
        .iter()
        .map(|s| hash_bucket(s.max_value(), n))
        .collect();
    let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n as usize + 1];
    for (i, &b) in bucket_of.iter().enumerate() {
        buckets[b as usize].insert(i);
    }

    let mut trace = Vec::new();
    let mut iterations = 0;
    while let Some(top) = (1..=n as usize).rev().find(|&b| !buckets[b].is_empty()) {
        iterations += 1;
        // The whole batch leaves the active table at selection, so batch
        // members never push into each other; pushes run in id order.
        let batch: Vec<usize> = std::mem::take(&mut buckets[top]).into_iter().collect();
        for &i in &batch {
            is_active[i] = false;
        }
        for i in batch {
            let source = state[i];
            let mut pushed_to = 0;
            for (t_j, ratio) in matrix.outgoing(&ids[i]) {
                let Some(&j) = index.get(t_j) else { continue };
                if !is_active[j] {
                    continue;
                }
                state[j].absorb(source, ratio.value());
                pushed_to += 1;
                let b = hash_bucket(state[j].max_value(), n);
                if b != bucket_of[j] {
                    buckets[bucket_of[j] as usize].remove(&j);
                    buckets[b as usize].insert(j);
                    bucket_of[j] = b;
                }
            }
            finalized.insert(ids[i].clone(), state[i]);
            trace.push(Finalization {
                iteration: iterations,
                tweet_id: ids[i].clone(),
                state: state[i],
                pushed_to,
            });
        }
        observer(iterations, &finalized);
    }

    let active = ids
        .into_iter()
        .zip(state)
        .zip(is_active)
        .filter(|(_, a)| *a)
        .map(|(entry, _)| entry)
        .collect();
    Propagation {
        table: LabelTable { active, finalized },
        trace,
        iterations,
    }
}

/// Finalized tweets take their stronger field; ties and tweets that never
/// left the active table stay unlabeled.
pub fn finalize(table: &LabelTable, corpus: &Corpus) -> FinalLabeling {
    let mut out = FinalLabeling::default();
    for t in corpus.tweets() {
        match table.finalized.get(&t.id).and_then(LabelState::decided) {
            Some(stance) => {
                out.labeled.insert(t.id.clone(), stance);
            }
            None => {
                out.unlabeled.insert(t.id.clone());
            }
        }
    }
    out
}

/// `iteration \t tweet_id \t for \t against`, one line per finalization.
pub fn write_trace(trace: &[Finalization], mut out: impl Write) -> std::io::Result<()> {
    for f in trace {
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}",
            f.iteration, f.tweet_id, f.state.for_value, f.state.against_value
        )?;
    }
    Ok(())
}
