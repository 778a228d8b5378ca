//! Column-normalized retweet co-occurrence matrix.
//!
//! `M[i][j] = |R(i) ∩ R(j)| / |R(j)|` where `R(t)` is the set of users who
//! retweeted `t`. Storage is column-major: the column of `t_j` keeps one
//! shared denominator `|R(j)|` and the integer intersection size for every
//! `t_i` that shares a retweeter with it. Diagonal and zero entries are not
//! stored.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// An exact count ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub numerator: u32,
    pub denominator: u32,
}

impl Ratio {
    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Column {
    denominator: u32,
    /// `(t_i, |R(i) ∩ R(j)|)`, sorted by `t_i`.
    entries: Vec<(String, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoocMatrix {
    columns: BTreeMap<String, Column>,
}

pub fn build_matrix(corpus: &Corpus) -> Result<CoocMatrix> {
    build_matrix_with(corpus, Exec::default())
}

pub fn build_matrix_with(corpus: &Corpus, exec: Exec) -> Result<CoocMatrix> {
    // Columns exist for observed tweets with at least one retweeter.
    let retweeted: Vec<(&str, Vec<&str>)> = corpus
        .retweeter_index()
        .iter()
        .filter(|(id, users)| !users.is_empty() && corpus.contains(id))
        .map(|(id, users)| (id.as_str(), users.iter().map(String::as_str).collect()))
        .collect();
    if retweeted.is_empty() {
        return Err(Error::NoRetweetStructure);
    }

    // user -> column indices it retweeted, ascending
    let mut by_user: HashMap<&str, Vec<u32>> = HashMap::new();
    for (col, (_, users)) in retweeted.iter().enumerate() {
        for &u in users {
            by_user.entry(u).or_default().push(col as u32);
        }
    }

    let indices: Vec<u32> = (0..retweeted.len() as u32).collect();
    let built = exec.map(&indices, |&j| {
        let (_, users) = &retweeted[j as usize];
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for u in users {
            for &i in &by_user[u] {
                if i != j {
                    *counts.entry(i).or_default() += 1;
                }
            }
        }
        Column {
            denominator: users.len() as u32,
            entries: counts
                .into_iter()
                .map(|(i, n)| (retweeted[i as usize].0.to_string(), n))
                .collect(),
        }
    });

    Ok(CoocMatrix {
        columns: retweeted
            .iter()
            .map(|(id, _)| id.to_string())
            .zip(built)
            .collect(),
    })
}

impl CoocMatrix {
    /// Entries `(t_i, M[t_i][t_j])` of the column of `t_j`, sorted by `t_i`.
    /// Empty when `t_j` has no column.
    pub fn column(&self, t_j: &str) -> Vec<(&str, f64)> {
        self.column_ratios(t_j)
            .into_iter()
            .map(|(id, r)| (id, r.value()))
            .collect()
    }

    pub fn column_ratios(&self, t_j: &str) -> Vec<(&str, Ratio)> {
        match self.columns.get(t_j) {
            None => Vec::new(),
            Some(col) => col
                .entries
                .iter()
                .map(|(id, n)| {
                    (
                        id.as_str(),
                        Ratio {
                            numerator: *n,
                            denominator: col.denominator,
                        },
                    )
                })
                .collect(),
        }
    }

    /// Entries `(t_j, M[t_i][t_j])`: where `t_i`'s label mass goes during
    /// propagation, sorted by `t_j`.
    ///
    /// The intersection is symmetric, so the neighbors of `t_i` are exactly
    /// the entries of its own column; only the denominator changes.
    pub fn outgoing(&self, t_i: &str) -> impl Iterator<Item = (&str, Ratio)> {
        self.columns
            .get(t_i)
            .into_iter()
            .flat_map(|col| col.entries.iter())
            .map(|(t_j, n)| {
                (
                    t_j.as_str(),
                    Ratio {
                        numerator: *n,
                        denominator: self.columns[t_j].denominator,
                    },
                )
            })
    }

    /// `M[t_i][t_j]`, if stored.
    pub fn weight(&self, t_i: &str, t_j: &str) -> Option<Ratio> {
        let col = self.columns.get(t_j)?;
        let pos = col
            .entries
            .binary_search_by(|(id, _)| id.as_str().cmp(t_i))
            .ok()?;
        Some(Ratio {
            numerator: col.entries[pos].1,
            denominator: col.denominator,
        })
    }

    /// `|R(t_j)|`, when `t_j` has a column.
    pub fn denominator(&self, t_j: &str) -> Option<u32> {
        self.columns.get(t_j).map(|c| c.denominator)
    }

    pub fn column_ids(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// Number of stored (nonzero, off-diagonal) entries.
    pub fn nnz(&self) -> usize {
        self.columns.values().map(|c| c.entries.len()).sum()
    }

    /// Every stored entry as `(t_i, t_j, ratio)`, sorted by `(t_j, t_i)`.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, Ratio)> {
        self.columns.iter().flat_map(|(t_j, col)| {
            col.entries.iter().map(move |(t_i, n)| {
                (
                    t_i.as_str(),
                    t_j.as_str(),
                    Ratio {
                        numerator: *n,
                        denominator: col.denominator,
                    },
                )
            })
        })
    }

    /// `t_i \t t_j \t numerator \t denominator`, sorted by `(t_j, t_i)`.
    pub fn write_dump(&self, mut out: impl Write) -> std::io::Result<()> {
        for (t_i, t_j, r) in self.entries() {
            writeln!(out, "{t_i}\t{t_j}\t{}\t{}", r.numerator, r.denominator)?;
        }
        Ok(())
    }
}
