//! Dependency-level thresholds, correlation and corpus aggregation.

pub mod pearson;
mod summary;
pub mod thresholds;

pub use pearson::{pearson, student_t_two_sided, CorrelationResult};
pub use summary::{
    summarize, CorpusCounts, CorpusSummary, Denominator, DomainStrategyCount, LevelCount,
    ProjectRecord, NO_STRATEGY, UNSPECIFIED_DOMAIN,
};
pub use thresholds::{assign_level, fit_thresholds, Level, LevelThresholds, SSE_TIE_TOLERANCE};
