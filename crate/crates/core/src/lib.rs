//! Stance detection for two-sided debates.
//!
//! A few seed users with known stances label their own tweets; the labels
//! spread through a retweet co-occurrence matrix; the tweets that received
//! a label train a multinomial naive Bayes model over word n-grams, which
//! labels the remaining tweets; users take the majority stance of their
//! tweets.
//!
//! The data-parallel loops run on rayon when the `parallel` feature is on
//! (the default). Every result is independent of the execution mode and of
//! the thread count.

pub mod baselines;
pub mod classifier;
pub mod cooccurrence;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod features;
pub mod pipeline;
pub mod propagation;
pub mod synthgen;

pub use classifier::{MnbModel, Prediction, UserStanceResult};
pub use cooccurrence::CoocMatrix;
pub use corpus::{Corpus, SeedSet, Stance, Tweet};
pub use error::{Error, Result};
pub use evaluation::MetricsReport;
pub use exec::Exec;
pub use features::FeatureVector;
pub use propagation::{FinalLabeling, LabelState, LabelTable, PropagationConfig};
