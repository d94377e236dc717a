//! Corpus scanning, caching and report emission.
//!
//! [`scan`] collects `.sol` files from a directory (or the rows of a
//! manifest), analyzes each file independently and in parallel, and reduces
//! the per-file findings into a [`CorpusReport`] ordered by file path.

mod analyze;
mod cache;
mod manifest;
mod report;

use std::collections::BTreeMap;
use std::path::{Component, Path, PathBuf};

use rayon::prelude::*;

pub use analyze::{
    analyze_source, AnalysisOptions, ContractSummary, FileFinding, FunctionComplexity, MatchSummary,
};
pub use cache::{default_cache_dir, Cache, CACHE_DIR_ENV, CACHE_FILE};
pub use manifest::{default_project_id, parse_manifest, ManifestRecord, MANIFEST_HEADER};
pub use report::{
    emit, write_outputs, CorpusReport, Format, MissingFile, OptionsEcho, ProjectRow, CSV_FILES,
    REPORT_JSON,
};

use crate::analytics::{
    fit_thresholds, pearson, summarize, CorpusCounts, Denominator, LevelThresholds, ProjectRecord,
};
use crate::cfg::build_cfg;
use crate::detector::usage_table;
use crate::error::{Error, Result};
use crate::names::build_index;
use crate::{parse_source, SourceFile};

/// How dependency-level thresholds are chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum ThresholdMode {
    /// Fit on the project frequency vector.
    #[default]
    Auto,
    Fixed(LevelThresholds),
}

impl std::str::FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "auto" {
            Ok(ThresholdMode::Auto)
        } else {
            LevelThresholds::parse(s).map(ThresholdMode::Fixed)
        }
    }
}

impl std::fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdMode::Auto => f.write_str("auto"),
            ThresholdMode::Fixed(t) => write!(f, "{},{}", t.t1, t.t2),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScanOptions {
    pub analysis: AnalysisOptions,
    /// Shown in the report: `builtin` or the keyword file path.
    pub keywords_source: String,
    pub denominator: Denominator,
    pub thresholds: ThresholdMode,
    /// Manifest CSV; its paths are relative to the scan root.
    pub manifest: Option<PathBuf>,
    /// `None` disables caching.
    pub cache_dir: Option<PathBuf>,
    /// Fixed report timestamp; the current UTC time when `None`.
    pub timestamp: Option<String>,
}

/// One source file to analyze.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanInput {
    /// Path relative to the scan root, `/`-separated.
    pub file: String,
    pub path: PathBuf,
    pub record: ManifestRecord,
}

#[derive(Debug)]
pub struct ScanOutcome {
    pub report: CorpusReport,
    pub inputs: Vec<ScanInput>,
    pub cache_hits: usize,
}

fn relative_name(path: &Path, base: &Path) -> String {
    let rel = path.strip_prefix(base).unwrap_or(path);
    rel.components()
        .filter_map(|c| match c {
            Component::Normal(s) => Some(s.to_string_lossy().into_owned()),
            _ => None,
        })
        .collect::<Vec<_>>()
        .join("/")
}

fn is_hidden(entry: &walkdir::DirEntry) -> bool {
    entry.file_name().to_string_lossy().starts_with('.')
}

/// Every `.sol` file under `root`, skipping hidden directories and files.
pub fn collect_sources(root: &Path) -> Vec<ScanInput> {
    let mut out = Vec::new();
    let walker = walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !is_hidden(e));
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                log::warn!("skipping unreadable path: {e}");
                continue;
            }
        };
        let is_sol = entry.path().extension().is_some_and(|x| x == "sol");
        if entry.file_type().is_file() && is_sol {
            let file = relative_name(entry.path(), root);
            out.push(ScanInput {
                record: ManifestRecord::new(file.clone()),
                file,
                path: entry.into_path(),
            });
        }
    }
    out
}

fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest(&bytes)
}

fn resolve_inputs(root: &Path, opts: &ScanOptions) -> Result<(Vec<ScanInput>, Vec<MissingFile>)> {
    let root_is_manifest = root.is_file() && root.extension().is_some_and(|x| x == "csv");
    let manifest = match (&opts.manifest, root_is_manifest) {
        (Some(m), _) => Some((
            m.clone(),
            if root.is_dir() {
                root
            } else {
                root.parent().unwrap_or(root)
            },
        )),
        (None, true) => Some((root.to_path_buf(), root.parent().unwrap_or(Path::new(".")))),
        (None, false) => None,
    };
    if let Some((manifest, base)) = manifest {
        let mut inputs = Vec::new();
        let mut missing = Vec::new();
        for record in read_manifest(&manifest)? {
            let path = base.join(&record.file);
            if path.is_file() {
                inputs.push(ScanInput {
                    file: record.file.clone(),
                    path,
                    record,
                });
            } else {
                missing.push(MissingFile {
                    project_id: record.project_id(),
                    file: record.file,
                });
            }
        }
        return Ok((inputs, missing));
    }
    if root.is_file() {
        let file = root.file_name().map_or_else(
            || root.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        return Ok((
            vec![ScanInput {
                record: ManifestRecord::new(file.clone()),
                file,
                path: root.to_path_buf(),
            }],
            Vec::new(),
        ));
    }
    if !root.is_dir() {
        return Err(Error::Io {
            path: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        });
    }
    Ok((collect_sources(root), Vec::new()))
}

/// Scans a directory, single file or manifest and builds the corpus report.
pub fn scan(root: &Path, opts: &ScanOptions) -> Result<ScanOutcome> {
    let (mut inputs, mut missing) = resolve_inputs(root, opts)?;
    if inputs.is_empty() && missing.is_empty() {
        return Err(Error::EmptyCorpus(root.to_path_buf()));
    }
    inputs.sort_by(|a, b| a.file.cmp(&b.file));
    missing.sort_by(|a, b| a.file.cmp(&b.file));

    let mut cache = opts
        .cache_dir
        .as_deref()
        .map_or_else(Cache::disabled, Cache::open);
    let options_hash = opts.analysis.fingerprint();

    let results: Vec<(FileFinding, bool)> = inputs
        .par_iter()
        .map(|input| match SourceFile::read(&input.path) {
            Err(e) => (FileFinding::unreadable(&input.file, e.to_string()), false),
            Ok(source) => {
                let hash = source.content_hash.to_hex();
                match cache.lookup(&hash, &options_hash, &input.file) {
                    Some(hit) => (hit, true),
                    None => (analyze_source(&source, &input.file, &opts.analysis), false),
                }
            }
        })
        .collect();
    let mut cache_hits = 0;
    for (finding, hit) in &results {
        if *hit {
            cache_hits += 1;
        } else if finding.error.is_none() {
            cache.store(&options_hash, finding);
        }
    }
    let findings: Vec<FileFinding> = results.into_iter().map(|(f, _)| f).collect();

    let report = assemble(root, opts, &options_hash, &inputs, findings, missing);
    Ok(ScanOutcome {
        report,
        inputs,
        cache_hits,
    })
}

fn assemble(
    root: &Path,
    opts: &ScanOptions,
    options_hash: &str,
    inputs: &[ScanInput],
    findings: Vec<FileFinding>,
    missing: Vec<MissingFile>,
) -> CorpusReport {
    let mut projects: BTreeMap<String, ProjectRecord> = BTreeMap::new();
    for (input, finding) in inputs.iter().zip(&findings) {
        let id = input.record.project_id();
        let p = projects.entry(id.clone()).or_insert_with(|| ProjectRecord {
            project_id: id,
            access_frequency: 0,
            complexity: 0,
            domain: None,
            strategies: Default::default(),
        });
        let frequency = input
            .record
            .audited_frequency
            .unwrap_or(finding.match_count() as u64);
        p.access_frequency = p.access_frequency.saturating_add(frequency);
        p.complexity = p
            .complexity
            .saturating_add(u64::try_from(finding.complexity).unwrap_or(0));
        if p.domain.is_none() {
            p.domain = input.record.domain.clone();
        }
        p.strategies.extend(finding.strategies());
    }
    let records: Vec<ProjectRecord> = projects.into_values().collect();

    let mut notes = Vec::new();
    let frequencies: Vec<u64> = records.iter().map(|r| r.access_frequency).collect();
    let thresholds = match opts.thresholds {
        ThresholdMode::Fixed(t) => Some(t),
        ThresholdMode::Auto => match fit_thresholds(&frequencies) {
            Ok(t) => Some(t),
            Err(e) => {
                notes.push(format!("thresholds not fitted: {e}"));
                None
            }
        },
    };
    let xs: Vec<f64> = frequencies.iter().map(|&f| f as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.complexity as f64).collect();
    let correlation = match pearson(&xs, &ys) {
        Ok(c) => Some(c),
        Err(e) => {
            notes.push(format!("correlation not computed: {e}"));
            None
        }
    };

    let mut usage = BTreeMap::new();
    for m in findings.iter().flat_map(FileFinding::all_matches) {
        *usage.entry((m.keyword.clone(), m.category)).or_insert(0) += 1;
    }
    let counts = CorpusCounts {
        scanned: findings.len(),
        parsed_ok: findings.iter().filter(|f| f.parse_ok).count(),
        interacting: findings
            .iter()
            .filter(|f| f.parse_ok && f.interacts())
            .count(),
        contracts: findings.iter().map(|f| f.contracts.len()).sum(),
        interacting_contracts: findings
            .iter()
            .flat_map(|f| &f.contracts)
            .filter(|c| c.interacts)
            .count(),
    };
    let summary = summarize(
        counts,
        opts.denominator,
        &records,
        thresholds.as_ref(),
        correlation,
        usage_table(&opts.analysis.keywords, &usage),
    );

    let keywords_source = if opts.keywords_source.is_empty() {
        "builtin".to_string()
    } else {
        opts.keywords_source.clone()
    };
    CorpusReport {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: opts.timestamp.clone().unwrap_or_else(|| {
            chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        }),
        root: root.display().to_string(),
        options: OptionsEcho {
            keywords_source,
            keywords_fingerprint: opts.analysis.keywords.fingerprint(),
            denominator: opts.denominator,
            thresholds: opts.thresholds.to_string(),
            require_branches: opts.analysis.cfg.require_branches,
            structural_interacts: opts.analysis.structural_interacts,
            manifest: opts.manifest.as_ref().map(|m| m.display().to_string()),
            options_hash: options_hash.to_string(),
        },
        findings,
        missing,
        projects: records
            .into_iter()
            .map(|record| ProjectRow {
                level: thresholds.map(|t| t.level(record.access_frequency)),
                record,
            })
            .collect(),
        summary,
        notes,
    }
}

/// Which intermediate artifacts to write next to the report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DumpOptions {
    pub ast: bool,
    pub cfg: bool,
    pub index: bool,
}

/// Writes `ast/<file>.json`, `cfg/<file>/<n>_<owner>.<name>.dot` and
/// `index.csv` under `out` for the scanned inputs.
pub fn write_dumps(
    out: &Path,
    inputs: &[ScanInput],
    analysis: &AnalysisOptions,
    dumps: DumpOptions,
) -> Result<Vec<PathBuf>> {
    if !(dumps.ast || dumps.cfg || dumps.index) {
        return Ok(Vec::new());
    }
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut units = Vec::new();
    for input in inputs {
        let Ok(source) = SourceFile::read(&input.path) else {
            continue;
        };
        let (ast, _) = parse_source(&source);
        if dumps.ast {
            files.push((
                format!("ast/{}.json", input.file),
                ast.to_json().into_bytes(),
            ));
        }
        if dumps.cfg {
            let cfg = build_cfg(&ast, analysis.cfg);
            for (i, c) in cfg.components().iter().enumerate() {
                let owner = c.owner.as_deref().unwrap_or("_");
                files.push((
                    format!("cfg/{}/{i}_{owner}.{}.dot", input.file, c.name),
                    cfg.to_dot(i).into_bytes(),
                ));
            }
        }
        units.push((ast, input.file.clone()));
    }
    if dumps.index {
        let index = build_index(units.iter().map(|(a, f)| (a, f.as_str())));
        files.push(("index.csv".to_string(), index.to_csv()));
    }
    write_outputs(out, &files)
}
