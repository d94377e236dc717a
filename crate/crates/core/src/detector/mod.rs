//! Keyword matching over the name index and structural strategy rules.

mod keywords;
mod strategy;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use keywords::{load_keywords, Category, KeywordEntry, KeywordList, DEFAULT_KEYWORDS};
pub use strategy::{classify_strategies, StrategyLabel};

use crate::ast::{AstNode, Span};
use crate::names::{NameEntry, NameIndex};

/// A name containing a keyword.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordMatch {
    pub keyword: String,
    pub category: Category,
    pub entry: NameEntry,
}

/// Case-insensitive substring matching of every entry against every keyword.
/// A name containing k distinct keywords yields k matches.
pub fn match_entries(entries: &[NameEntry], keywords: &KeywordList) -> Vec<KeywordMatch> {
    let mut matches = Vec::new();
    for entry in entries {
        let lowered = entry.name.to_lowercase();
        for kw in keywords.entries() {
            if lowered.contains(&kw.keyword) {
                matches.push(KeywordMatch {
                    keyword: kw.keyword.clone(),
                    category: kw.category,
                    entry: entry.clone(),
                });
            }
        }
    }
    matches
}

pub fn match_names(index: &NameIndex, keywords: &KeywordList) -> Vec<KeywordMatch> {
    match_entries(index.entries(), keywords)
}

/// Match counts keyed by `(keyword, category)`. Counts sum to `matches.len()`.
pub fn usage_counts(matches: &[KeywordMatch]) -> BTreeMap<(String, Category), usize> {
    let mut counts = BTreeMap::new();
    for m in matches {
        *counts.entry((m.keyword.clone(), m.category)).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordUsage {
    pub keyword: String,
    pub category: Category,
    pub count: usize,
}

/// One row per keyword in list order, zero counts included.
pub fn usage_table(
    keywords: &KeywordList,
    counts: &BTreeMap<(String, Category), usize>,
) -> Vec<KeywordUsage> {
    keywords
        .entries()
        .iter()
        .map(|k| KeywordUsage {
            keyword: k.keyword.clone(),
            category: k.category,
            count: counts
                .get(&(k.keyword.clone(), k.category))
                .copied()
                .unwrap_or(0),
        })
        .collect()
}

/// Matches on names declared inside `span` of `file`.
pub fn matches_within<'m>(
    matches: &'m [KeywordMatch],
    file: &str,
    span: &Span,
) -> Vec<&'m KeywordMatch> {
    matches
        .iter()
        .filter(|m| m.entry.file == file && span.contains(&m.entry.span))
        .collect()
}

/// True when the contract's own name or any member name matched a keyword.
/// `matches` must already be scoped to the contract (see [`matches_within`]).
pub fn contract_interacts(contract: &AstNode, matches: &[&KeywordMatch]) -> bool {
    matches
        .iter()
        .any(|m| contract.span.contains(&m.entry.span))
}
