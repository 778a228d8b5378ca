//! Precision, recall and F-measure of user stances against gold labels,
//! and tables comparing methods.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::corpus::{read_labeled_csv, Stance};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "method,group,class,precision,recall,f1";
pub const DEFAULT_GROUP: &str = "all";

/// Counts over gold users. `matrix[gold][predicted]` uses
/// [`Stance::index`]; users without a prediction land in `unpredicted`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub matrix: [[usize; 2]; 2],
    pub unpredicted: [usize; 2],
}

impl ConfusionCounts {
    pub fn get(&self, gold: Stance, predicted: Stance) -> usize {
        self.matrix[gold.index()][predicted.index()]
    }

    pub fn total(&self) -> usize {
        self.matrix.iter().flatten().sum::<usize>() + self.unpredicted.iter().sum::<usize>()
    }

    pub fn total_unpredicted(&self) -> usize {
        self.unpredicted.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsReport {
    /// Indexed by [`Stance::index`].
    pub per_class: [ClassMetrics; 2],
    /// Unweighted means over the two classes; F1 is the mean of the
    /// per-class F1 values.
    pub macro_avg: ClassMetrics,
    pub confusion: ConfusionCounts,
}

impl MetricsReport {
    pub fn class(&self, stance: Stance) -> ClassMetrics {
        self.per_class[stance.index()]
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Scores the users present in `gold`. Predictions for users outside `gold`
/// are ignored; gold users without a prediction count as recall misses.
pub fn evaluate(
    pred: &BTreeMap<String, Stance>,
    gold: &BTreeMap<String, Stance>,
) -> Result<MetricsReport> {
    if gold.is_empty() {
        return Err(Error::EmptyGold);
    }
    let mut confusion = ConfusionCounts::default();
    for (user, g) in gold {
        match pred.get(user) {
            Some(p) => confusion.matrix[g.index()][p.index()] += 1,
            None => confusion.unpredicted[g.index()] += 1,
        }
    }
    let per_class = Stance::BOTH.map(|s| {
        let c = s.index();
        let tp = confusion.matrix[c][c];
        let predicted = confusion.matrix[0][c] + confusion.matrix[1][c];
        let actual = confusion.matrix[c][0] + confusion.matrix[c][1] + confusion.unpredicted[c];
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, actual);
        ClassMetrics {
            precision,
            recall,
            f1: harmonic(precision, recall),
        }
    });
    let macro_avg = ClassMetrics {
        precision: (per_class[0].precision + per_class[1].precision) / 2.0,
        recall: (per_class[0].recall + per_class[1].recall) / 2.0,
        f1: (per_class[0].f1 + per_class[1].f1) / 2.0,
    };
    Ok(MetricsReport {
        per_class,
        macro_avg,
        confusion,
    })
}

/// Gold user stances, optionally split into evaluation groups.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GoldLabels {
    pub labels: BTreeMap<String, Stance>,
    pub groups: BTreeMap<String, String>,
}

impl GoldLabels {
    /// Gold labels per group, groups in name order.
    pub fn by_group(&self) -> BTreeMap<&str, BTreeMap<String, Stance>> {
        let mut out: BTreeMap<&str, BTreeMap<String, Stance>> = BTreeMap::new();
        for (user, stance) in &self.labels {
            let group = self.groups.get(user).map_or(DEFAULT_GROUP, String::as_str);
            out.entry(group).or_default().insert(user.clone(), *stance);
        }
        out
    }
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<GoldLabels> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_gold(file)
}

/// Headerless `user_id,stance[,group]` rows.
pub fn read_gold(reader: impl Read) -> Result<GoldLabels> {
    let mut gold = GoldLabels::default();
    for row in read_labeled_csv(reader, 3)? {
        if let Some(prev) = gold.labels.insert(row.key.clone(), row.stance) {
            if prev != row.stance {
                return Err(Error::Config(format!(
                    "gold user {} has conflicting stances",
                    row.key
                )));
            }
        }
        if let Some(group) = row.extra {
            gold.groups.insert(row.key, group);
        }
    }
    Ok(gold)
}

/// Reads the `user_id,stance,...` file written for per-user results.
/// Columns after the stance are ignored.
pub fn read_user_stances(reader: impl Read) -> Result<BTreeMap<String, Stance>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() < 2 {
            return Err(Error::parse(line, "expected user_id,stance"));
        }
        let stance = record[1].parse().map_err(|e| Error::parse(line, e))?;
        out.insert(record[0].to_string(), stance);
    }
    Ok(out)
}

pub fn load_user_stances(path: impl AsRef<Path>) -> Result<BTreeMap<String, Stance>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_user_stances(file)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub group: String,
    pub report: MetricsReport,
}

/// Method-by-group results. Rows keep insertion order; re-inserting a
/// `(method, group)` pair replaces it in place.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportTable {
    rows: Vec<ReportRow>,
}

fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

impl ReportTable {
    pub fn insert(&mut self, method: &str, group: &str, report: MetricsReport) {
        assert!(
            !method.contains([',', '\n']) && !group.contains([',', '\n']),
            "method and group names must be plain CSV fields"
        );
        match self
            .rows
            .iter_mut()
            .find(|r| r.method == method && r.group == group)
        {
            Some(row) => row.report = report,
            None => self.rows.push(ReportRow {
                method: method.to_string(),
                group: group.to_string(),
                report,
            }),
        }
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn ordered(&self, key: impl Fn(&ReportRow) -> &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            let k = key(r);
            if !out.contains(&k) {
                out.push(k);
            }
        }
        out
    }

    pub fn methods(&self) -> Vec<&str> {
        self.ordered(|r| &r.method)
    }

    pub fn groups(&self) -> Vec<&str> {
        self.ordered(|r| &r.group)
    }

    pub fn get(&self, method: &str, group: &str) -> Option<&MetricsReport> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.group == group)
            .map(|r| &r.report)
    }

    /// Methods as rows and macro precision / recall / F-measure per group,
    /// as percentages with two decimals.
    pub fn render_text(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::NoMethods);
        }
        let methods = self.methods();
        let groups = self.groups();
        let width = methods.iter().map(|m| m.len()).max().unwrap_or(0).max(7);
        let mut out = String::new();
        let _ = write!(out, "{:<width$}", "Method");
        for g in &groups {
            let _ = write!(out, " | {g:^29}");
        }
        out.push('\n');
        let _ = write!(out, "{:<width$}", "");
        for _ in &groups {
            let _ = write!(
                out,
                " | {:>9} {:>9} {:>9}",
                "precision", "recall", "F-measure"
            );
        }
        out.push('\n');
        for m in &methods {
            let _ = write!(out, "{m:<width$}");
            for g in &groups {
                match self.get(m, g) {
                    Some(r) => {
                        let a = r.macro_avg;
                        let _ = write!(
                            out,
                            " | {:>9} {:>9} {:>9}",
                            pct(a.precision),
                            pct(a.recall),
                            pct(a.f1)
                        );
                    }
                    None => {
                        let _ = write!(out, " | {:>9} {:>9} {:>9}", "-", "-", "-");
                    }
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// One row per (method, group, class) with `macro` as a third class.
    pub fn to_csv(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::NoMethods);
        }
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        out.push_str(&self.csv_rows());
        Ok(out)
    }

    fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let classes = [
                ("for", r.report.class(Stance::For)),
                ("against", r.report.class(Stance::Against)),
                ("macro", r.report.macro_avg),
            ];
            for (name, m) in classes {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.6},{:.6},{:.6}",
                    r.method, r.group, name, m.precision, m.recall, m.f1
                );
            }
        }
        out
    }

    /// Rewrites an existing metrics CSV: rows of methods in this table are
    /// replaced, other rows are kept in place, and new methods go last.
    pub fn merge_into_csv(&self, existing: &str) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::NoMethods);
        }
        let ours = self.methods();
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (i, line) in existing.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            if i == 0 {
                if line != CSV_HEADER {
                    return Err(Error::parse(1, format!("expected header {CSV_HEADER:?}")));
                }
                continue;
            }
            let method = line.split(',').next().unwrap_or_default();
            if !ours.contains(&method) {
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(&self.csv_rows());
        Ok(out)
    }
}

/// Single-group table of `(method, report)` pairs.
pub fn report_table(results: &[(String, MetricsReport)]) -> Result<ReportTable> {
    if results.is_empty() {
        return Err(Error::NoMethods);
    }
    let mut table = ReportTable::default();
    for (method, report) in results {
        table.insert(method, DEFAULT_GROUP, *report);
    }
    Ok(table)
}
