//! Run settings from a flat TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use relp::baselines::KMeansConfig;
use relp::corpus::ParseMode;
use relp::pipeline::PipelineSettings;
use relp::propagation::PropagationConfig;
use relp::Exec;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseModeArg {
    Strict,
    Lenient,
}

impl From<ParseModeArg> for ParseMode {
    fn from(m: ParseModeArg) -> Self {
        match m {
            ParseModeArg::Strict => ParseMode::Strict,
            ParseModeArg::Lenient => ParseMode::Lenient,
        }
    }
}

/// Keys accepted in a `--config` file. Relative paths are resolved against
/// the file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    corpus: Option<PathBuf>,
    seeds: Option<PathBuf>,
    hashtags: Option<PathBuf>,
    gold: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    min_tweets_per_user: Option<usize>,
    n_buckets: Option<u32>,
    alpha: Option<f64>,
    kmeans_max_iterations: Option<usize>,
    parse_mode: Option<ParseModeArg>,
    dump_matrix: Option<bool>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Flat TOML file with any of the settings below; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Tweets as JSON lines.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Seed users as `user_id,stance` lines.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Seed hashtags as `#tag,stance` lines (baseline B2).
    #[arg(long)]
    pub hashtags: Option<PathBuf>,
    /// Gold user stances as `user_id,stance[,group]` lines.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long = "out")]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub min_tweets_per_user: Option<usize>,
    #[arg(long)]
    pub n_buckets: Option<u32>,
    /// Laplace smoothing for naive Bayes.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub kmeans_max_iterations: Option<usize>,
    #[arg(long, value_enum)]
    pub parse_mode: Option<ParseModeArg>,
    /// Also write the co-occurrence matrix.
    #[arg(long)]
    pub dump_matrix: bool,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub hashtags: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub parse_mode: ParseMode,
    pub dump_matrix: bool,
    pub settings: PipelineSettings,
}

fn read_config_file(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut file: ConfigFile =
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [
        &mut file.corpus,
        &mut file.seeds,
        &mut file.hashtags,
        &mut file.gold,
        &mut file.output_dir,
    ]
    .into_iter()
    .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(file)
}

impl RunArgs {
    pub fn resolve(&self) -> anyhow::Result<PipelineConfig> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => ConfigFile::default(),
        };
        let defaults = PipelineSettings::default();
        let n_buckets = self
            .n_buckets
            .or(file.n_buckets)
            .unwrap_or(defaults.propagation.n_buckets);
        let settings = PipelineSettings {
            min_tweets_per_user: self
                .min_tweets_per_user
                .or(file.min_tweets_per_user)
                .unwrap_or(defaults.min_tweets_per_user),
            propagation: PropagationConfig::new(n_buckets)?,
            alpha: self.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            kmeans: KMeansConfig {
                max_iterations: self
                    .kmeans_max_iterations
                    .or(file.kmeans_max_iterations)
                    .unwrap_or(defaults.kmeans.max_iterations),
            },
            exec: Exec::default(),
        };
        if !(settings.alpha.is_finite() && settings.alpha > 0.0) {
            bail!("alpha must be positive, got {}", settings.alpha);
        }
        let cfg = PipelineConfig {
            corpus: self.corpus.clone().or(file.corpus),
            seeds: self.seeds.clone().or(file.seeds),
            hashtags: self.hashtags.clone().or(file.hashtags),
            gold: self.gold.clone().or(file.gold),
            output_dir: self.output_dir.clone().or(file.output_dir),
            parse_mode: self
                .parse_mode
                .or(file.parse_mode)
                .unwrap_or(ParseModeArg::Strict)
                .into(),
            dump_matrix: self.dump_matrix || file.dump_matrix.unwrap_or(false),
            settings,
        };
        for path in [&cfg.corpus, &cfg.seeds, &cfg.hashtags, &cfg.gold]
            .into_iter()
            .flatten()
        {
            if !path.exists() {
                bail!("input path does not exist: {}", path.display());
            }
        }
        Ok(cfg)
    }
}

impl PipelineConfig {
    pub fn require<'a>(field: &'a Option<PathBuf>, name: &str) -> anyhow::Result<&'a Path> {
        match field {
            Some(p) => Ok(p),
            None => bail!("missing required setting `{name}` (flag or config key)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> RunArgs {
        RunArgs {
            config: None,
            corpus: None,
            seeds: None,
            hashtags: None,
            gold: None,
            output_dir: None,
            min_tweets_per_user: None,
            n_buckets: None,
            alpha: None,
            kmeans_max_iterations: None,
            parse_mode: None,
            dump_matrix: false,
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "alpha = 0.5\nn_buckets = 4\noutput_dir = \"out\"\n").unwrap();
        let mut a = args();
        a.config = Some(path);
        a.n_buckets = Some(7);
        let cfg = a.resolve().unwrap();
        assert_eq!(cfg.settings.alpha, 0.5);
        assert_eq!(cfg.settings.propagation.n_buckets, 7);
        assert_eq!(cfg.output_dir.unwrap(), dir.path().join("out"));
        assert_eq!(cfg.settings.min_tweets_per_user, 2);
    }

    #[test]
    fn unknown_key_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "n_bucket = 4\n").unwrap();
        let mut a = args();
        a.config = Some(path);
        let err = format!("{:#}", a.resolve().unwrap_err());
        assert!(err.contains("n_bucket"), "{err}");
    }

    #[test]
    fn missing_input_is_named() {
        let mut a = args();
        a.seeds = Some(PathBuf::from("/nonexistent/seeds.csv"));
        let err = a.resolve().unwrap_err().to_string();
        assert!(err.contains("/nonexistent/seeds.csv"), "{err}");
    }

    #[test]
    fn zero_buckets_rejected() {
        let mut a = args();
        a.n_buckets = Some(0);
        assert!(a.resolve().is_err());
    }
}
