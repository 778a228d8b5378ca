use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::{info, warn};
use relp::baselines::load_hashtags;
use relp::classifier::{write_tweet_labels, write_user_stances, Classification};
use relp::cooccurrence::build_matrix_with;
use relp::corpus::{filter_corpus, load_corpus, load_seeds, Corpus, SeedSet};
use relp::evaluation::{
    evaluate, load_gold, load_user_stances, GoldLabels, ReportTable, DEFAULT_GROUP,
};
use relp::pipeline::{run_b1, run_b2, run_b3, run_relp};
use relp::propagation::{finalize, init_labels, propagate, write_trace, Propagation};
use relp::synthgen::{generate, SynthConfig};
use relp::Stance;

use crate::config::PipelineConfig;

pub const PROPAGATED_FILE: &str = "propagated_labels.tsv";
pub const TRACE_FILE: &str = "propagation_trace.tsv";
pub const MATRIX_FILE: &str = "matrix.tsv";
pub const METRICS_FILE: &str = "metrics.csv";

fn write_output(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    body(&mut buf)?;
    let path = dir.join(name);
    fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn output_dir(cfg: &PipelineConfig) -> anyhow::Result<PathBuf> {
    let dir = PipelineConfig::require(&cfg.output_dir, "output_dir")?.to_path_buf();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn load_inputs_corpus(cfg: &PipelineConfig) -> anyhow::Result<Corpus> {
    let path = PipelineConfig::require(&cfg.corpus, "corpus")?;
    let loaded = load_corpus(path, cfg.parse_mode).context("loading corpus")?;
    if loaded.skipped > 0 {
        warn!("skipped {} malformed corpus lines", loaded.skipped);
    }
    info!(
        "corpus: {} tweets from {} users",
        loaded.corpus.len(),
        loaded.corpus.user_count()
    );
    Ok(loaded.corpus)
}

fn load_inputs(cfg: &PipelineConfig) -> anyhow::Result<(Corpus, SeedSet)> {
    let corpus = load_inputs_corpus(cfg)?;
    let path = PipelineConfig::require(&cfg.seeds, "seeds")?;
    let seeds = load_seeds(path).context("loading seeds")?;
    Ok((corpus, seeds))
}

fn load_gold_opt(cfg: &PipelineConfig) -> anyhow::Result<Option<GoldLabels>> {
    cfg.gold
        .as_ref()
        .map(|p| load_gold(p).context("loading gold labels"))
        .transpose()
}

/// Scores `users` on all gold users and, when the gold file names groups,
/// on each group.
fn score(
    table: &mut ReportTable,
    method: &str,
    users: &BTreeMap<String, Stance>,
    gold: &GoldLabels,
) -> anyhow::Result<()> {
    let report = evaluate(users, &gold.labels).context("evaluation")?;
    table.insert(method, DEFAULT_GROUP, report);
    if !gold.groups.is_empty() {
        for (group, labels) in gold.by_group() {
            if group != DEFAULT_GROUP {
                table.insert(
                    method,
                    group,
                    evaluate(users, &labels).context("evaluation")?,
                );
            }
        }
    }
    Ok(())
}

fn merge_metrics(path: &Path, table: &ReportTable) -> anyhow::Result<()> {
    let existing = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let merged = table
        .merge_into_csv(&existing)
        .with_context(|| format!("merging into {}", path.display()))?;
    fs::write(path, merged).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn report_metrics(dir: &Path, table: &ReportTable) -> anyhow::Result<()> {
    merge_metrics(&dir.join(METRICS_FILE), table)?;
    print!("{}", table.render_text()?);
    Ok(())
}

fn write_propagation(dir: &Path, corpus: &Corpus, run: &Propagation) -> anyhow::Result<()> {
    let labeling = finalize(&run.table, corpus);
    info!(
        "propagation: {} iterations, {} of {} tweets labeled",
        run.iterations,
        labeling.labeled.len(),
        corpus.len()
    );
    write_output(dir, PROPAGATED_FILE, |out| {
        for (id, stance) in &labeling.labeled {
            let state = run.table.state(id).unwrap_or_default();
            writeln!(
                out,
                "{id}\t{stance}\t{:.6}\t{:.6}",
                state.for_value, state.against_value
            )?;
        }
        Ok(())
    })?;
    write_output(dir, TRACE_FILE, |out| write_trace(&run.trace, out))
}

fn write_classification(dir: &Path, suffix: &str, c: &Classification) -> anyhow::Result<()> {
    write_output(dir, &format!("tweet_labels{suffix}.tsv"), |out| {
        write_tweet_labels(&c.tweets, out)
    })?;
    write_output(dir, &format!("user_stances{suffix}.csv"), |out| {
        write_user_stances(&c.users, out)
    })
}

pub fn pipeline(cfg: &PipelineConfig) -> anyhow::Result<()> {
    let (corpus, seeds) = load_inputs(cfg)?;
    let gold = load_gold_opt(cfg)?;
    let dir = output_dir(cfg)?;
    let run = run_relp(&corpus, &seeds, &cfg.settings)?;

    if cfg.dump_matrix {
        write_output(&dir, MATRIX_FILE, |out| run.matrix.write_dump(out))?;
    }
    write_propagation(&dir, &run.corpus, &run.propagation)?;
    write_output(&dir, "model.tsv", |out| run.model.write_dump(out))?;
    write_classification(&dir, "", &run.classification)?;
    println!(
        "ReLP: {} users classified, {} tweets labeled by propagation",
        run.classification.users.len(),
        run.labeling.labeled.len()
    );

    if let Some(gold) = gold {
        let mut table = ReportTable::default();
        score(&mut table, "ReLP", &run.user_stances(), &gold)?;
        report_metrics(&dir, &table)?;
    }
    Ok(())
}

pub fn baselines(cfg: &PipelineConfig) -> anyhow::Result<()> {
    let (corpus, seeds) = load_inputs(cfg)?;
    let gold = load_gold_opt(cfg)?;
    let hashtags = cfg
        .hashtags
        .as_ref()
        .map(|p| load_hashtags(p).context("loading hashtags"))
        .transpose()?;
    let dir = output_dir(cfg)?;
    let mut results: Vec<(&str, BTreeMap<String, Stance>)> = Vec::new();

    let b1 = run_b1(&corpus, &seeds, &cfg.settings)?;
    write_output(&dir, "model_b1.tsv", |out| b1.model.write_dump(out))?;
    write_classification(&dir, "_b1", &b1.classification)?;
    results.push(("B1", b1.classification.user_stances()));

    match &hashtags {
        Some(tags) => {
            let b2 = run_b2(&corpus, tags, &cfg.settings)?;
            write_output(&dir, "model_b2.tsv", |out| b2.model.write_dump(out))?;
            write_classification(&dir, "_b2", &b2.classification)?;
            results.push(("B2", b2.classification.user_stances()));
        }
        None => warn!("no hashtag seeds given; skipping B2"),
    }

    let (filtered, b3) = run_b3(&corpus, &seeds, &cfg.settings)?;
    if !b3.converged {
        warn!(
            "B3 k-means stopped after {} iterations without converging",
            b3.iterations
        );
    }
    write_output(&dir, "kmeans_objective_b3.tsv", |out| {
        for (i, obj) in b3.objective.iter().enumerate() {
            writeln!(out, "{}\t{obj:.6}", i + 1)?;
        }
        Ok(())
    })?;
    let b3_users = relp::classifier::users_from_labels(&filtered, &b3.labels);
    write_output(&dir, "tweet_labels_b3.tsv", |out| {
        write_tweet_labels(&b3.labels, out)
    })?;
    write_output(&dir, "user_stances_b3.csv", |out| {
        write_user_stances(&b3_users, out)
    })?;
    results.push(("B3", b3.user_stances(&filtered)));

    let names: Vec<&str> = results.iter().map(|(m, _)| *m).collect();
    println!("baselines run: {}", names.join(", "));

    if let Some(gold) = gold {
        let mut table = ReportTable::default();
        for (method, users) in &results {
            score(&mut table, method, users, &gold)?;
        }
        report_metrics(&dir, &table)?;
    }
    Ok(())
}

pub fn build_matrix(cfg: &PipelineConfig) -> anyhow::Result<()> {
    let corpus = filter_corpus(&load_inputs_corpus(cfg)?, cfg.settings.min_tweets_per_user);
    let dir = output_dir(cfg)?;
    let matrix = build_matrix_with(&corpus, cfg.settings.exec).map_err(|e| e.in_stage("matrix"))?;
    write_output(&dir, MATRIX_FILE, |out| matrix.write_dump(out))?;
    println!(
        "matrix: {} columns, {} nonzero entries",
        matrix.column_count(),
        matrix.nnz()
    );
    Ok(())
}

pub fn propagate_only(cfg: &PipelineConfig) -> anyhow::Result<()> {
    let (corpus, seeds) = load_inputs(cfg)?;
    let corpus = filter_corpus(&corpus, cfg.settings.min_tweets_per_user);
    let dir = output_dir(cfg)?;
    let matrix = build_matrix_with(&corpus, cfg.settings.exec).map_err(|e| e.in_stage("matrix"))?;
    let table = init_labels(&corpus, &seeds).map_err(|e| e.in_stage("propagation"))?;
    let run = propagate(&matrix, table, cfg.settings.propagation);
    if cfg.dump_matrix {
        write_output(&dir, MATRIX_FILE, |out| matrix.write_dump(out))?;
    }
    write_propagation(&dir, &corpus, &run)?;
    println!("propagation: {} iterations", run.iterations);
    Ok(())
}

pub fn evaluate_file(
    pred: &Path,
    gold: &Path,
    method: &str,
    metrics: Option<&Path>,
) -> anyhow::Result<()> {
    if method.is_empty() || method.contains([',', '\n']) {
        anyhow::bail!("method name must be non-empty and contain no commas");
    }
    let users = load_user_stances(pred).context("loading predictions")?;
    let gold = load_gold(gold).context("loading gold labels")?;
    let mut table = ReportTable::default();
    score(&mut table, method, &users, &gold)?;
    if let Some(path) = metrics {
        merge_metrics(path, &table)?;
    }
    print!("{}", table.render_text()?);
    Ok(())
}

pub fn synth(config: Option<&Path>, out: &Path, rng_seed: Option<u64>) -> anyhow::Result<()> {
    let mut cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str::<SynthConfig>(&text)
                .with_context(|| format!("invalid config {}", path.display()))?
        }
        None => SynthConfig::default(),
    };
    if let Some(seed) = rng_seed {
        cfg.rng_seed = seed;
    }
    let output = generate(&cfg).context("synth")?;
    output.write_to(out).context("synth")?;
    println!(
        "synth: {} tweets ({} retweets), {} users, {} seed users",
        output.corpus.len(),
        output.corpus.retweet_count(),
        output.gold.len(),
        output.seeds.len()
    );
    Ok(())
}
