//! Corpus-wide index of declared contract, function, modifier and event names.

use serde::{Deserialize, Serialize};

use crate::ast::{AstNode, NodeKind, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NameKind {
    Contract,
    Interface,
    Library,
    Function,
    Modifier,
    Event,
}

impl NameKind {
    pub fn from_node(kind: NodeKind) -> Option<Self> {
        Some(match kind {
            NodeKind::ContractDef => NameKind::Contract,
            NodeKind::InterfaceDef => NameKind::Interface,
            NodeKind::LibraryDef => NameKind::Library,
            NodeKind::FunctionDef => NameKind::Function,
            NodeKind::ModifierDef => NameKind::Modifier,
            NodeKind::EventDef => NameKind::Event,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NameKind::Contract => "Contract",
            NameKind::Interface => "Interface",
            NameKind::Library => "Library",
            NameKind::Function => "Function",
            NameKind::Modifier => "Modifier",
            NameKind::Event => "Event",
        }
    }
}

impl std::fmt::Display for NameKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One declared name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameEntry {
    pub name: String,
    pub kind: NameKind,
    pub file: String,
    pub span: Span,
}

/// Collects every named definition in a parsed source unit.
///
/// Constructors, parameters, local and state variables and inheritance
/// specifiers are not definitions and produce no entries.
pub fn index_unit(ast: &AstNode, file: &str) -> Vec<NameEntry> {
    let mut entries: Vec<NameEntry> = ast
        .walk()
        .filter_map(|node| {
            let kind = NameKind::from_node(node.kind)?;
            let name = node.name().filter(|n| !n.is_empty())?;
            Some(NameEntry {
                name: name.to_string(),
                kind,
                file: file.to_string(),
                span: node.span,
            })
        })
        .collect();
    entries.sort_by_key(|e| e.span.start);
    entries
}

/// The ordered list of all declared names across a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameIndex {
    entries: Vec<NameEntry>,
    /// `(file, first entry index)` for each file with at least one entry.
    file_offsets: Vec<(String, usize)>,
}

impl NameIndex {
    /// Builds an index from entries in any order. Entries are sorted by file
    /// path, then span start.
    pub fn from_entries(mut entries: Vec<NameEntry>) -> Self {
        entries.sort_by(|a, b| {
            a.file
                .cmp(&b.file)
                .then(a.span.start.cmp(&b.span.start))
                .then(a.span.end.cmp(&b.span.end))
                .then(a.kind.cmp(&b.kind))
                .then(a.name.cmp(&b.name))
        });
        let mut file_offsets: Vec<(String, usize)> = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            if file_offsets.last().is_none_or(|(f, _)| *f != e.file) {
                file_offsets.push((e.file.clone(), i));
            }
        }
        Self {
            entries,
            file_offsets,
        }
    }

    pub fn entries(&self) -> &[NameEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries declared in one file.
    pub fn file_entries(&self, file: &str) -> &[NameEntry] {
        let Ok(i) = self
            .file_offsets
            .binary_search_by(|(f, _)| f.as_str().cmp(file))
        else {
            return &[];
        };
        let start = self.file_offsets[i].1;
        let end = self
            .file_offsets
            .get(i + 1)
            .map(|(_, o)| *o)
            .unwrap_or(self.entries.len());
        &self.entries[start..end]
    }

    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.file_offsets.iter().map(|(f, _)| f.as_str())
    }

    /// A copy restricted to the given kinds.
    pub fn filter_kinds(&self, kinds: &[NameKind]) -> NameIndex {
        NameIndex::from_entries(
            self.entries
                .iter()
                .filter(|e| kinds.contains(&e.kind))
                .cloned()
                .collect(),
        )
    }

    /// CSV export with header `name,kind,file,line`.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "kind", "file", "line"])
            .expect("in-memory write");
        for e in &self.entries {
            w.write_record([
                e.name.as_str(),
                e.kind.as_str(),
                e.file.as_str(),
                &e.span.start.line.to_string(),
            ])
            .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Indexes parsed units given as `(ast, path)` pairs.
pub fn build_index<'a>(units: impl IntoIterator<Item = (&'a AstNode, &'a str)>) -> NameIndex {
    NameIndex::from_entries(
        units
            .into_iter()
            .flat_map(|(ast, file)| index_unit(ast, file))
            .collect(),
    )
}
