use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column names, in order, of a manifest file.
pub const MANIFEST_HEADER: [&str; 4] = ["file", "project_id", "domain", "audited_frequency"];

/// One manifest row. `file` is relative to the scan root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub file: String,
    pub project_id: Option<String>,
    pub domain: Option<String>,
    pub audited_frequency: Option<u64>,
}

impl ManifestRecord {
    pub fn new(file: impl Into<String>) -> Self {
        Self {
            file: file.into(),
            project_id: None,
            domain: None,
            audited_frequency: None,
        }
    }

    pub fn project_id(&self) -> String {
        self.project_id
            .clone()
            .unwrap_or_else(|| default_project_id(&self.file))
    }
}

/// The file path without its `.sol` extension.
pub fn default_project_id(file: &str) -> String {
    file.strip_suffix(".sol").unwrap_or(file).to_string()
}

fn non_empty(s: &str) -> Option<String> {
    let s = s.trim();
    (!s.is_empty()).then(|| s.to_string())
}

/// Parses a UTF-8 CSV manifest with header `file,project_id,domain,audited_frequency`.
/// Several rows may share a project id; a file may appear only once.
pub fn parse_manifest(bytes: &[u8]) -> Result<Vec<ManifestRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = reader.headers().map_err(|e| Error::ManifestParse {
        line: 1,
        reason: e.to_string(),
    })?;
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(Error::ManifestParse {
            line: 1,
            reason: format!("expected header '{}'", MANIFEST_HEADER.join(",")),
        });
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::ManifestParse {
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let file = non_empty(&row[0]).ok_or_else(|| Error::ManifestParse {
            line,
            reason: "empty file path".into(),
        })?;
        if !seen.insert(file.clone()) {
            return Err(Error::ManifestParse {
                line,
                reason: format!("duplicate file '{file}'"),
            });
        }
        let audited_frequency = match non_empty(&row[3]) {
            None => None,
            Some(v) => Some(v.parse::<u64>().map_err(|_| Error::ManifestParse {
                line,
                reason: format!("audited_frequency '{v}' is not a non-negative integer"),
            })?),
        };
        out.push(ManifestRecord {
            file,
            project_id: non_empty(&row[1]),
            domain: non_empty(&row[2]),
            audited_frequency,
        });
    }
    Ok(out)
}
