use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::analyze::FileFinding;
use crate::analytics::{CorpusSummary, Denominator, Level, ProjectRecord};
use crate::error::{Error, Result};

/// The options that shaped a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionsEcho {
    /// `builtin` or the keyword file path as given.
    pub keywords_source: String,
    pub keywords_fingerprint: String,
    pub denominator: Denominator,
    /// `auto` or `T1,T2`.
    pub thresholds: String,
    pub require_branches: bool,
    pub structural_interacts: bool,
    pub manifest: Option<String>,
    pub options_hash: String,
}

/// A manifest row whose file was not found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingFile {
    pub file: String,
    pub project_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectRow {
    #[serde(flatten)]
    pub record: ProjectRecord,
    pub level: Option<Level>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    pub root: String,
    pub options: OptionsEcho,
    /// Ordered by file path.
    pub findings: Vec<FileFinding>,
    pub missing: Vec<MissingFile>,
    /// Ordered by project id.
    pub projects: Vec<ProjectRow>,
    pub summary: CorpusSummary,
    /// Why thresholds or correlation were skipped, if they were.
    pub notes: Vec<String>,
}

impl CorpusReport {
    /// True when no file yielded anything to analyze.
    pub fn all_failed(&self) -> bool {
        self.findings.iter().all(FileFinding::failed)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (expected json or csv)")),
        }
    }
}

pub const REPORT_JSON: &str = "report.json";
pub const CSV_FILES: [&str; 5] = [
    "levels.csv",
    "keyword_counts.csv",
    "complexity_scatter.csv",
    "domain_strategy.csv",
    "findings.csv",
];

/// Renders the report as `(file name, bytes)` pairs.
pub fn emit(report: &CorpusReport, format: Format) -> Vec<(String, Vec<u8>)> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(report).expect("report serializes");
            bytes.push(b'\n');
            vec![(REPORT_JSON.to_string(), bytes)]
        }
        Format::Csv => {
            let s = &report.summary;
            let levels = csv_bytes(
                ["level", "count"],
                s.level_counts
                    .iter()
                    .map(|l| vec![l.level.as_str().to_string(), l.count.to_string()]),
            );
            let keywords = csv_bytes(
                ["keyword", "category", "count"],
                s.keyword_usage.iter().map(|k| {
                    vec![
                        k.keyword.clone(),
                        k.category.to_string(),
                        k.count.to_string(),
                    ]
                }),
            );
            let scatter = csv_bytes(
                ["project_id", "access_frequency", "complexity"],
                report.projects.iter().map(|p| {
                    vec![
                        p.record.project_id.clone(),
                        p.record.access_frequency.to_string(),
                        p.record.complexity.to_string(),
                    ]
                }),
            );
            let domains = csv_bytes(
                ["domain", "strategy", "count"],
                s.domain_strategy
                    .iter()
                    .map(|d| vec![d.domain.clone(), d.strategy.clone(), d.count.to_string()]),
            );
            let findings = csv_bytes(
                [
                    "file",
                    "contract",
                    "interacts",
                    "match_count",
                    "strategies",
                    "complexity",
                ],
                report.findings.iter().flat_map(|f| {
                    if f.contracts.is_empty() {
                        return vec![vec![
                            f.file.clone(),
                            String::new(),
                            "false".into(),
                            f.match_count().to_string(),
                            String::new(),
                            f.complexity.to_string(),
                        ]];
                    }
                    f.contracts
                        .iter()
                        .map(|c| {
                            vec![
                                f.file.clone(),
                                c.name.clone(),
                                c.interacts.to_string(),
                                c.matches.len().to_string(),
                                c.strategies
                                    .iter()
                                    .map(|s| s.as_str())
                                    .collect::<Vec<_>>()
                                    .join(";"),
                                c.complexity.to_string(),
                            ]
                        })
                        .collect()
                }),
            );
            CSV_FILES
                .iter()
                .map(|n| n.to_string())
                .zip([levels, keywords, scatter, domains, findings])
                .collect()
        }
    }
}

fn csv_bytes<const N: usize>(
    header: [&str; N],
    rows: impl Iterator<Item = Vec<String>>,
) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes each emitted file under `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::UnwritableOutput {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for (name, bytes) in files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|source| Error::UnwritableOutput {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        std::fs::write(&path, bytes).map_err(|source| Error::UnwritableOutput {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
