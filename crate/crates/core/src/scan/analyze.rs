use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cfg::{build_cfg, cyclomatic, CfgOptions};
use crate::detector::{
    classify_strategies, match_entries, Category, KeywordList, KeywordMatch, StrategyLabel,
};
use crate::names::{index_unit, NameKind};
use crate::{parse_source, SourceFile};

/// Everything that changes per-file results.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub keywords: KeywordList,
    pub cfg: CfgOptions,
    pub structural_interacts: bool,
}

impl AnalysisOptions {
    /// Cache key component: changes whenever any option or the tool version does.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!(
            "{} {}\nkeywords={}\nrequire_branches={}\nstructural_interacts={}\n",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION"),
            self.keywords.fingerprint(),
            self.cfg.require_branches,
            self.structural_interacts,
        ));
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub keyword: String,
    pub category: Category,
    pub name: String,
    pub kind: NameKind,
    pub line: u32,
}

impl From<&KeywordMatch> for MatchSummary {
    fn from(m: &KeywordMatch) -> Self {
        Self {
            keyword: m.keyword.clone(),
            category: m.category,
            name: m.entry.name.clone(),
            kind: m.entry.kind,
            line: m.entry.span.start.line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionComplexity {
    pub name: String,
    pub line: u32,
    pub complexity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractSummary {
    pub name: String,
    pub kind: NameKind,
    pub line: u32,
    pub interacts: bool,
    pub matches: Vec<MatchSummary>,
    pub strategies: BTreeSet<StrategyLabel>,
    pub functions: Vec<FunctionComplexity>,
    pub complexity: i64,
}

/// Results for one source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileFinding {
    pub file: String,
    pub content_hash: String,
    pub parse_ok: bool,
    pub diagnostics: usize,
    pub diagnostic_messages: Vec<String>,
    /// Set when the file could not be read at all.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub contracts: Vec<ContractSummary>,
    /// Matches on free functions outside any contract.
    pub free_matches: Vec<MatchSummary>,
    pub free_functions: Vec<FunctionComplexity>,
    /// Sum of V(G) over every body in the file.
    pub complexity: i64,
}

impl FileFinding {
    pub fn unreadable(file: &str, error: String) -> Self {
        Self {
            file: file.to_string(),
            content_hash: String::new(),
            parse_ok: false,
            diagnostics: 0,
            diagnostic_messages: Vec::new(),
            error: Some(error),
            contracts: Vec::new(),
            free_matches: Vec::new(),
            free_functions: Vec::new(),
            complexity: 0,
        }
    }

    pub fn all_matches(&self) -> impl Iterator<Item = &MatchSummary> {
        self.contracts
            .iter()
            .flat_map(|c| &c.matches)
            .chain(&self.free_matches)
    }

    pub fn match_count(&self) -> usize {
        self.all_matches().count()
    }

    pub fn interacts(&self) -> bool {
        self.contracts.iter().any(|c| c.interacts)
    }

    /// Unreadable, or so broken that nothing was recovered.
    pub fn failed(&self) -> bool {
        self.error.is_some()
            || (!self.parse_ok && self.contracts.is_empty() && self.free_functions.is_empty())
    }

    pub fn strategies(&self) -> BTreeSet<StrategyLabel> {
        self.contracts
            .iter()
            .flat_map(|c| c.strategies.iter().copied())
            .collect()
    }
}

/// Runs every per-file stage on one source.
pub fn analyze_source(source: &SourceFile, file: &str, opts: &AnalysisOptions) -> FileFinding {
    let (ast, diagnostics) = parse_source(source);
    let entries = index_unit(&ast, file);
    let matches = match_entries(&entries, &opts.keywords);
    let cfg = build_cfg(&ast, opts.cfg);

    let function_rows = |owner: Option<&str>| -> Vec<FunctionComplexity> {
        cfg.components()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.owner.as_deref() == owner)
            .map(|(i, c)| FunctionComplexity {
                name: c.name.clone(),
                line: c.span.start.line,
                complexity: cfg.component_complexity(i),
            })
            .collect()
    };

    let mut claimed = vec![false; matches.len()];
    let mut contracts = Vec::new();
    for def in ast.children.iter().filter(|n| n.kind.is_contract_like()) {
        let mut own = Vec::new();
        for (i, m) in matches.iter().enumerate() {
            if def.span.contains(&m.entry.span) {
                claimed[i] = true;
                own.push(MatchSummary::from(m));
            }
        }
        let strategies = classify_strategies(def);
        let name = def.name().unwrap_or_default().to_string();
        // Components are keyed by owner name, so same-named contracts in one
        // file are told apart by span.
        let functions: Vec<_> = cfg
            .components()
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                c.owner.as_deref() == Some(name.as_str()) && def.span.contains(&c.span)
            })
            .map(|(i, c)| FunctionComplexity {
                name: c.name.clone(),
                line: c.span.start.line,
                complexity: cfg.component_complexity(i),
            })
            .collect();
        contracts.push(ContractSummary {
            kind: NameKind::from_node(def.kind).unwrap_or(NameKind::Contract),
            line: def.span.start.line,
            interacts: !own.is_empty() || (opts.structural_interacts && !strategies.is_empty()),
            matches: own,
            strategies,
            complexity: functions.iter().map(|f| f.complexity).sum(),
            functions,
            name,
        });
    }
    let free_matches = matches
        .iter()
        .zip(&claimed)
        .filter(|(_, c)| !**c)
        .map(|(m, _)| MatchSummary::from(m))
        .collect();

    FileFinding {
        file: file.to_string(),
        content_hash: source.content_hash.to_hex(),
        parse_ok: diagnostics.is_empty(),
        diagnostics: diagnostics.len(),
        diagnostic_messages: diagnostics.iter().map(ToString::to_string).collect(),
        error: None,
        contracts,
        free_matches,
        free_functions: function_rows(None),
        complexity: cyclomatic(&cfg),
    }
}
