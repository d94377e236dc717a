use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed keyword file at line {line}: {reason}")]
    MalformedKeywordFile { line: usize, reason: String },
    #[error("keyword list is empty")]
    EmptyKeywordList,
    #[error("need at least 3 distinct frequency values to fit thresholds, found {distinct}")]
    DegenerateDistribution { distinct: usize },
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("correlation needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("series is constant")]
    ConstantSeries,
    #[error("no Solidity sources found under {}", .0.display())]
    EmptyCorpus(PathBuf),
    #[error("manifest error at line {line}: {reason}")]
    ManifestParse { line: usize, reason: String },
    #[error("cannot write output {}: {source}", path.display())]
    UnwritableOutput {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
