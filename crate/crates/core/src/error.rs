use std::path::PathBuf;

use crate::corpus::Stance;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed input record, with its 1-based line number.
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("duplicate tweet id {0}")]
    DuplicateTweet(String),

    #[error("seed user {0} listed with conflicting stances")]
    ConflictingSeed(String),

    #[error("seed set must cover both stances")]
    OneSidedSeeds,

    #[error("hashtag {0} listed with conflicting stances")]
    ConflictingHashtag(String),

    #[error("hashtag seeds must cover both stances")]
    OneSidedHashtags,

    #[error("no retweet structure")]
    NoRetweetStructure,

    #[error("no seed tweets present")]
    NoSeedTweets,

    #[error("no seed tweets for stance {0}")]
    MissingSeedSide(Stance),

    #[error("degenerate training set")]
    DegenerateTrainingSet,

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("hashtag seeds matched no tweets")]
    HashtagsMatchedNothing,

    #[error("gold labels are empty")]
    EmptyGold,

    #[error("no methods to report")]
    NoMethods,

    #[error("invalid config: {0}")]
    Config(String),

    /// An error raised inside a named pipeline stage.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
