//! Append-only findings cache keyed by (content hash, options hash).

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::analyze::FileFinding;

pub const CACHE_FILE: &str = "findings.jsonl";
pub const CACHE_DIR_ENV: &str = "ORACLE_SCAN_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
struct CacheLine {
    content_hash: String,
    options_hash: String,
    finding: FileFinding,
}

/// `$ORACLE_SCAN_CACHE_DIR`, else the user cache directory, else the
/// system temp directory.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(xdg).join("oracle-scan");
    }
    if let Some(home) = std::env::var_os("HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(home).join(".cache").join("oracle-scan");
    }
    std::env::temp_dir().join("oracle-scan")
}

/// In-memory view of the cache file. I/O failures disable the cache
/// instead of failing the scan.
#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    entries: HashMap<(String, String), FileFinding>,
}

impl Cache {
    /// A cache that never hits and never writes.
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn open(dir: &Path) -> Self {
        if let Err(e) = fs::create_dir_all(dir) {
            log::warn!("cache disabled: cannot create {}: {e}", dir.display());
            return Self::disabled();
        }
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        match fs::read(&path) {
            Ok(bytes) => {
                for (i, line) in bytes.split(|&b| b == b'\n').enumerate() {
                    if line.iter().all(u8::is_ascii_whitespace) {
                        continue;
                    }
                    match serde_json::from_slice::<CacheLine>(line) {
                        Ok(rec) => {
                            entries.insert((rec.content_hash, rec.options_hash), rec.finding);
                        }
                        Err(e) => log::warn!(
                            "{}:{}: skipping corrupt cache record: {e}",
                            path.display(),
                            i + 1
                        ),
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => {
                log::warn!("cache disabled: cannot read {}: {e}", path.display());
                return Self::disabled();
            }
        }
        Self {
            path: Some(path),
            entries,
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.path.is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The cached finding, relabelled with `file` since identical content
    /// may live at several paths.
    pub fn lookup(
        &self,
        content_hash: &str,
        options_hash: &str,
        file: &str,
    ) -> Option<FileFinding> {
        let mut f = self
            .entries
            .get(&(content_hash.to_string(), options_hash.to_string()))?
            .clone();
        f.file = file.to_string();
        Some(f)
    }

    /// Appends one record per call as a single write.
    pub fn store(&mut self, options_hash: &str, finding: &FileFinding) {
        let Some(path) = &self.path else { return };
        let key = (finding.content_hash.clone(), options_hash.to_string());
        if self.entries.contains_key(&key) {
            return;
        }
        let rec = CacheLine {
            content_hash: key.0.clone(),
            options_hash: key.1.clone(),
            finding: finding.clone(),
        };
        let mut line = match serde_json::to_vec(&rec) {
            Ok(l) => l,
            Err(e) => {
                log::warn!("cannot serialize cache record: {e}");
                return;
            }
        };
        line.push(b'\n');
        let written = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| f.write_all(&line));
        match written {
            Ok(()) => {
                self.entries.insert(key, finding.clone());
            }
            Err(e) => {
                log::warn!("cache disabled: cannot append to {}: {e}", path.display());
                self.path = None;
            }
        }
    }
}
