use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::pearson::CorrelationResult;
use super::thresholds::{Level, LevelThresholds};
use crate::detector::{KeywordUsage, StrategyLabel};

/// Per-project inputs to the corpus statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub project_id: String,
    pub access_frequency: u64,
    pub complexity: u64,
    pub domain: Option<String>,
    pub strategies: BTreeSet<StrategyLabel>,
}

/// Which count the interacting proportion is divided by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// Files that parsed without diagnostics.
    #[default]
    Parsed,
    /// Every file scanned.
    Scanned,
}

impl Denominator {
    pub fn as_str(self) -> &'static str {
        match self {
            Denominator::Parsed => "parsed",
            Denominator::Scanned => "scanned",
        }
    }
}

/// File-level tallies from a scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCounts {
    pub scanned: usize,
    pub parsed_ok: usize,
    /// Parsed-ok files with at least one interacting contract.
    pub interacting: usize,
    pub contracts: usize,
    pub interacting_contracts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub level: Level,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainStrategyCount {
    pub domain: String,
    pub strategy: String,
    pub count: usize,
}

/// Domain label for records without one.
pub const UNSPECIFIED_DOMAIN: &str = "unspecified";
/// Strategy label for records with no structural strategy.
pub const NO_STRATEGY: &str = "none";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub scanned: usize,
    pub parsed_ok: usize,
    pub interacting: usize,
    pub contracts: usize,
    pub interacting_contracts: usize,
    pub denominator: Denominator,
    pub denominator_value: usize,
    /// `interacting / denominator_value`, 0 when the denominator is 0.
    pub proportion: f64,
    pub proportion_percent: f64,
    pub projects: usize,
    pub total_frequency: u64,
    pub mean_frequency: f64,
    pub max_frequency: u64,
    pub thresholds: Option<LevelThresholds>,
    pub level_counts: Vec<LevelCount>,
    pub domain_strategy: Vec<DomainStrategyCount>,
    pub keyword_usage: Vec<KeywordUsage>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub correlation: Option<CorrelationResult>,
}

pub fn summarize(
    counts: CorpusCounts,
    denominator: Denominator,
    records: &[ProjectRecord],
    thresholds: Option<&LevelThresholds>,
    correlation: Option<CorrelationResult>,
    keyword_usage: Vec<KeywordUsage>,
) -> CorpusSummary {
    let denominator_value = match denominator {
        Denominator::Parsed => counts.parsed_ok,
        Denominator::Scanned => counts.scanned,
    };
    let proportion = if denominator_value == 0 {
        0.0
    } else {
        counts.interacting as f64 / denominator_value as f64
    };
    let proportion_percent = if denominator_value == 0 {
        0.0
    } else {
        (counts.interacting as f64 * 100.0) / denominator_value as f64
    };

    let total: u128 = records.iter().map(|r| u128::from(r.access_frequency)).sum();
    let mean_frequency = if records.is_empty() {
        0.0
    } else {
        total as f64 / records.len() as f64
    };

    let mut per_level: BTreeMap<Level, usize> = Level::ALL.iter().map(|&l| (l, 0)).collect();
    if let Some(th) = thresholds {
        for r in records {
            *per_level.entry(th.level(r.access_frequency)).or_default() += 1;
        }
    }

    let mut cells: BTreeMap<(String, String), usize> = BTreeMap::new();
    for r in records {
        let domain = r
            .domain
            .clone()
            .unwrap_or_else(|| UNSPECIFIED_DOMAIN.to_string());
        if r.strategies.is_empty() {
            *cells
                .entry((domain.clone(), NO_STRATEGY.to_string()))
                .or_default() += 1;
        }
        for s in &r.strategies {
            *cells
                .entry((domain.clone(), s.as_str().to_string()))
                .or_default() += 1;
        }
    }

    CorpusSummary {
        scanned: counts.scanned,
        parsed_ok: counts.parsed_ok,
        interacting: counts.interacting,
        contracts: counts.contracts,
        interacting_contracts: counts.interacting_contracts,
        denominator,
        denominator_value,
        proportion,
        proportion_percent,
        projects: records.len(),
        total_frequency: u64::try_from(total).unwrap_or(u64::MAX),
        mean_frequency,
        max_frequency: records
            .iter()
            .map(|r| r.access_frequency)
            .max()
            .unwrap_or(0),
        thresholds: thresholds.copied(),
        level_counts: per_level
            .into_iter()
            .map(|(level, count)| LevelCount { level, count })
            .collect(),
        domain_strategy: cells
            .into_iter()
            .map(|((domain, strategy), count)| DomainStrategyCount {
                domain,
                strategy,
                count,
            })
            .collect(),
        keyword_usage,
        correlation,
    }
}
