//! End-to-end runs of the propagation + classifier method and of the
//! baselines, from a loaded corpus to per-user stances.

use std::collections::BTreeMap;

use crate::baselines::{
    b1_training, build_b2_training, run_b3_with, HashtagSeeds, KMeansConfig, KMeansOutcome,
};
use crate::classifier::{classify_users_with, train, Classification, MnbModel};
use crate::cooccurrence::{build_matrix_with, CoocMatrix};
use crate::corpus::{filter_corpus, Corpus, SeedSet, Stance};
use crate::error::Result;
use crate::exec::Exec;
use crate::features::{featurize_corpus, FeatureVector};
use crate::propagation::{
    finalize, init_labels, propagate, FinalLabeling, Propagation, PropagationConfig,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineSettings {
    pub min_tweets_per_user: usize,
    pub propagation: PropagationConfig,
    pub alpha: f64,
    pub kmeans: KMeansConfig,
    pub exec: Exec,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings {
            min_tweets_per_user: 2,
            propagation: PropagationConfig::default(),
            alpha: 1.0,
            kmeans: KMeansConfig::default(),
            exec: Exec::default(),
        }
    }
}

pub struct RelpRun {
    /// The corpus after per-user filtering.
    pub corpus: Corpus,
    pub matrix: CoocMatrix,
    pub propagation: Propagation,
    pub labeling: FinalLabeling,
    pub model: MnbModel,
    pub classification: Classification,
}

impl RelpRun {
    pub fn user_stances(&self) -> BTreeMap<String, Stance> {
        self.classification.user_stances()
    }
}

fn labeled_docs(
    corpus: &Corpus,
    features: &[FeatureVector],
    labeling: &FinalLabeling,
) -> Vec<(FeatureVector, Stance)> {
    corpus
        .tweets()
        .iter()
        .zip(features)
        .filter_map(|(t, fv)| labeling.labeled.get(&t.id).map(|s| (fv.clone(), *s)))
        .collect()
}

pub fn run_relp(corpus: &Corpus, seeds: &SeedSet, settings: &PipelineSettings) -> Result<RelpRun> {
    let corpus = filter_corpus(corpus, settings.min_tweets_per_user);
    let matrix = build_matrix_with(&corpus, settings.exec).map_err(|e| e.in_stage("matrix"))?;
    let table = init_labels(&corpus, seeds).map_err(|e| e.in_stage("propagation"))?;
    let propagation = propagate(&matrix, table, settings.propagation);
    let labeling = finalize(&propagation.table, &corpus);
    let features = featurize_corpus(&corpus, settings.exec);
    let model = train(&labeled_docs(&corpus, &features, &labeling), settings.alpha)
        .map_err(|e| e.in_stage("training"))?;
    let classification = classify_users_with(&corpus, &labeling, &model, &features, settings.exec);
    Ok(RelpRun {
        corpus,
        matrix,
        propagation,
        labeling,
        model,
        classification,
    })
}

/// A model-based baseline's trained classifier and its predictions.
pub struct ModelBaselineRun {
    pub model: MnbModel,
    pub classification: Classification,
}

fn predict_everything(corpus: &Corpus, model: MnbModel, exec: Exec) -> ModelBaselineRun {
    let features = featurize_corpus(corpus, exec);
    let classification =
        classify_users_with(corpus, &FinalLabeling::default(), &model, &features, exec);
    ModelBaselineRun {
        model,
        classification,
    }
}

pub fn run_b1(
    corpus: &Corpus,
    seeds: &SeedSet,
    settings: &PipelineSettings,
) -> Result<ModelBaselineRun> {
    let corpus = filter_corpus(corpus, settings.min_tweets_per_user);
    let model = b1_training(&corpus, seeds)
        .and_then(|docs| train(&docs, settings.alpha))
        .map_err(|e| e.in_stage("B1"))?;
    Ok(predict_everything(&corpus, model, settings.exec))
}

pub fn run_b2(
    corpus: &Corpus,
    tags: &HashtagSeeds,
    settings: &PipelineSettings,
) -> Result<ModelBaselineRun> {
    let corpus = filter_corpus(corpus, settings.min_tweets_per_user);
    let model = build_b2_training(&corpus, tags)
        .and_then(|docs| train(&docs, settings.alpha))
        .map_err(|e| e.in_stage("B2"))?;
    Ok(predict_everything(&corpus, model, settings.exec))
}

/// Returns the filtered corpus with the clustering outcome.
pub fn run_b3(
    corpus: &Corpus,
    seeds: &SeedSet,
    settings: &PipelineSettings,
) -> Result<(Corpus, KMeansOutcome)> {
    let corpus = filter_corpus(corpus, settings.min_tweets_per_user);
    let outcome = run_b3_with(&corpus, seeds, settings.kmeans, settings.exec)
        .map_err(|e| e.in_stage("B3"))?;
    Ok((corpus, outcome))
}
