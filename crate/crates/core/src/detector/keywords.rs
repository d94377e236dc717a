use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    OracleServices,
    CrossChain,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::OracleServices => "OracleServices",
            Category::CrossChain => "CrossChain",
        }
    }

    /// Parses the exact, case-sensitive category name used in keyword files.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "OracleServices" => Some(Category::OracleServices),
            "CrossChain" => Some(Category::CrossChain),
            _ => None,
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeywordEntry {
    /// Lowercase, non-empty, no whitespace.
    pub keyword: String,
    pub category: Category,
}

impl KeywordEntry {
    fn new(keyword: &str, category: Category) -> Self {
        Self {
            keyword: keyword.to_string(),
            category,
        }
    }
}

/// The built-in list: the method-name keywords observed in audited
/// contracts that access external data.
pub const DEFAULT_KEYWORDS: &[(&str, Category)] = &[
    ("oracle", Category::OracleServices),
    ("bridge", Category::CrossChain),
    ("chainlink", Category::OracleServices),
    ("external", Category::OracleServices),
    ("api", Category::CrossChain),
    ("dydx", Category::OracleServices),
    ("crosschain", Category::CrossChain),
];

/// An ordered, duplicate-free keyword list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordList {
    entries: Vec<KeywordEntry>,
}

impl Default for KeywordList {
    fn default() -> Self {
        Self {
            entries: DEFAULT_KEYWORDS
                .iter()
                .map(|(k, c)| KeywordEntry::new(k, *c))
                .collect(),
        }
    }
}

impl KeywordList {
    pub fn entries(&self) -> &[KeywordEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A copy without `keyword` (in every category).
    pub fn without(&self, keyword: &str) -> KeywordList {
        KeywordList {
            entries: self
                .entries
                .iter()
                .filter(|e| e.keyword != keyword)
                .cloned()
                .collect(),
        }
    }

    /// Builds a list from `(category, keyword)` pairs, applying the same
    /// normalization and uniqueness rules as the file loader.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (Category, &'a str)>) -> Result<Self> {
        let mut entries: Vec<KeywordEntry> = Vec::new();
        for (i, (category, keyword)) in pairs.into_iter().enumerate() {
            push_entry(&mut entries, category, keyword, i + 1)?;
        }
        if entries.is_empty() {
            return Err(Error::EmptyKeywordList);
        }
        Ok(Self { entries })
    }

    /// SHA-256 over the canonical `category,keyword\n` rendering.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.entries {
            h.update(e.category.as_str().as_bytes());
            h.update(b",");
            h.update(e.keyword.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

fn push_entry(
    entries: &mut Vec<KeywordEntry>,
    category: Category,
    raw: &str,
    line: usize,
) -> Result<()> {
    let keyword = raw.trim().to_lowercase();
    if keyword.is_empty() {
        return Err(Error::MalformedKeywordFile {
            line,
            reason: "empty keyword".into(),
        });
    }
    if keyword.chars().any(char::is_whitespace) {
        return Err(Error::MalformedKeywordFile {
            line,
            reason: format!("keyword '{keyword}' contains whitespace"),
        });
    }
    if entries
        .iter()
        .any(|e| e.keyword == keyword && e.category == category)
    {
        return Err(Error::MalformedKeywordFile {
            line,
            reason: format!("duplicate keyword '{keyword}' in category {category}"),
        });
    }
    entries.push(KeywordEntry { keyword, category });
    Ok(())
}

/// Loads a keyword file (`category,keyword` per line, `#` comments), or the
/// built-in list when no file is given.
pub fn load_keywords(bytes: Option<&[u8]>) -> Result<KeywordList> {
    let Some(bytes) = bytes else {
        return Ok(KeywordList::default());
    };
    let text = std::str::from_utf8(bytes).map_err(|e| Error::MalformedKeywordFile {
        line: 1 + bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        reason: "invalid UTF-8".into(),
    })?;
    let mut entries = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(category), Some(keyword), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::MalformedKeywordFile {
                line: line_no,
                reason: "expected exactly two fields: category,keyword".into(),
            });
        };
        let category =
            Category::parse(category.trim()).ok_or_else(|| Error::MalformedKeywordFile {
                line: line_no,
                reason: format!(
                    "unknown category '{}' (expected OracleServices or CrossChain)",
                    category.trim()
                ),
            })?;
        push_entry(&mut entries, category, keyword, line_no)?;
    }
    if entries.is_empty() {
        return Err(Error::EmptyKeywordList);
    }
    Ok(KeywordList { entries })
}
