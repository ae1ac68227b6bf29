//! The `khs-1` JSON document format.
//!
//! ```json
//! {"format":"khs-1","kind":"hypergraph","vertices":["a","b"],"edges":[["a","b"]]}
//! {"format":"khs-1","kind":"kstructure","k":3,"universe":["0","1"],"tuples":[["0","0","1"]]}
//! ```
//!
//! Unknown fields, duplicate names, duplicate edges and duplicate tuples are
//! all rejected. Output is canonical: edges and tuples appear in index order.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::structure::{Hypergraph, KStructure};

pub const FORMAT: &str = "khs-1";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    format: String,
    kind: String,
    vertices: Option<Vec<String>>,
    edges: Option<Vec<Vec<String>>>,
    k: Option<u64>,
    universe: Option<Vec<String>>,
    tuples: Option<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct HypergraphOut<'a> {
    format: &'static str,
    kind: &'static str,
    vertices: &'a [String],
    edges: Vec<Vec<&'a str>>,
}

#[derive(Serialize)]
struct KStructureOut<'a> {
    format: &'static str,
    kind: &'static str,
    k: usize,
    universe: &'a [String],
    tuples: Vec<Vec<&'a str>>,
}

/// A parsed `khs-1` document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Hypergraph(Hypergraph),
    KStructure(KStructure),
}

impl Document {
    /// Structure view; hypergraphs are encoded at `k`, or at their largest
    /// edge size (at least 2) when `k` is `None`.
    pub fn to_kstructure(&self, k: Option<usize>) -> crate::Result<KStructure> {
        match self {
            Document::KStructure(s) => match k {
                Some(k) if k != s.arity() => Err(crate::Error::MixedArity),
                _ => Ok(s.clone()),
            },
            Document::Hypergraph(h) => h.to_kstructure(k.unwrap_or(h.max_edge_size().max(2))),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Document::Hypergraph(h) => hypergraph_to_json(h),
            Document::KStructure(s) => kstructure_to_json(s),
        }
    }
}

fn from_serde(err: serde_json::Error) -> FormatError {
    let message = err.to_string();
    // serde appends " at line L column C"; keep the structured position only
    let message = match message.rfind(" at line ") {
        Some(pos) => message[..pos].to_string(),
        None => message,
    };
    FormatError {
        line: Some(err.line()),
        column: Some(err.column()),
        field: None,
        message,
    }
}

fn index_names(field: &str, names: &[String]) -> Result<HashMap<String, usize>, FormatError> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(FormatError::field(
                format!("{field}[{i}]"),
                format!("duplicate name {name:?}"),
            ));
        }
    }
    Ok(index)
}

fn resolve(
    field: &str,
    row: usize,
    names: &[String],
    index: &HashMap<String, usize>,
) -> Result<Vec<usize>, FormatError> {
    names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            index.get(name).copied().ok_or_else(|| {
                FormatError::field(format!("{field}[{row}][{j}]"), format!("unknown name {name:?}"))
            })
        })
        .collect()
}

fn forbid(present: bool, field: &str, kind: &str) -> Result<(), FormatError> {
    if present {
        Err(FormatError::field(
            field,
            format!("not allowed for kind {kind:?}"),
        ))
    } else {
        Ok(())
    }
}

fn require<T>(value: Option<T>, field: &str) -> Result<T, FormatError> {
    value.ok_or_else(|| FormatError::field(field, "missing"))
}

/// Parses any `khs-1` document.
pub fn parse_document(text: &str) -> Result<Document, FormatError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(from_serde)?;
    if raw.format != FORMAT {
        return Err(FormatError::field(
            "format",
            format!("expected {FORMAT:?}, found {:?}", raw.format),
        ));
    }
    match raw.kind.as_str() {
        "hypergraph" => {
            forbid(raw.k.is_some(), "k", "hypergraph")?;
            forbid(raw.universe.is_some(), "universe", "hypergraph")?;
            forbid(raw.tuples.is_some(), "tuples", "hypergraph")?;
            let vertices = require(raw.vertices, "vertices")?;
            let edges = require(raw.edges, "edges")?;
            let index = index_names("vertices", &vertices)?;
            let mut seen = BTreeSet::new();
            let mut resolved = Vec::with_capacity(edges.len());
            for (i, edge) in edges.iter().enumerate() {
                let mut e = resolve("edges", i, edge, &index)?;
                if e.is_empty() {
                    return Err(FormatError::field(format!("edges[{i}]"), "empty edge"));
                }
                e.sort_unstable();
                if e.windows(2).any(|w| w[0] == w[1]) {
                    return Err(FormatError::field(
                        format!("edges[{i}]"),
                        "vertex repeated inside an edge",
                    ));
                }
                if !seen.insert(e.clone()) {
                    return Err(FormatError::field(format!("edges[{i}]"), "duplicate edge"));
                }
                resolved.push(e);
            }
            Hypergraph::new(vertices, resolved)
                .map(Document::Hypergraph)
                .map_err(|e| FormatError::field("edges", e.to_string()))
        }
        "kstructure" => {
            forbid(raw.vertices.is_some(), "vertices", "kstructure")?;
            forbid(raw.edges.is_some(), "edges", "kstructure")?;
            let k = require(raw.k, "k")?;
            if k < 2 {
                return Err(FormatError::field("k", "arity must be at least 2"));
            }
            let universe = require(raw.universe, "universe")?;
            let tuples = require(raw.tuples, "tuples")?;
            let index = index_names("universe", &universe)?;
            let mut seen = BTreeSet::new();
            for (i, tuple) in tuples.iter().enumerate() {
                if tuple.len() as u64 != k {
                    return Err(FormatError::field(
                        format!("tuples[{i}]"),
                        format!("length {} does not match k = {k}", tuple.len()),
                    ));
                }
                let t = resolve("tuples", i, tuple, &index)?;
                if !seen.insert(t) {
                    return Err(FormatError::field(format!("tuples[{i}]"), "duplicate tuple"));
                }
            }
            KStructure::new(k as usize, universe, seen)
                .map(Document::KStructure)
                .map_err(|e| FormatError::field("tuples", e.to_string()))
        }
        other => Err(FormatError::field(
            "kind",
            format!("expected \"hypergraph\" or \"kstructure\", found {other:?}"),
        )),
    }
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, FormatError> {
    match parse_document(text)? {
        Document::Hypergraph(h) => Ok(h),
        Document::KStructure(_) => Err(FormatError::field("kind", "expected a hypergraph")),
    }
}

pub fn parse_kstructure(text: &str) -> Result<KStructure, FormatError> {
    match parse_document(text)? {
        Document::KStructure(s) => Ok(s),
        Document::Hypergraph(_) => Err(FormatError::field("kind", "expected a kstructure")),
    }
}

pub fn hypergraph_to_json(h: &Hypergraph) -> String {
    let names = h.vertices();
    let out = HypergraphOut {
        format: FORMAT,
        kind: "hypergraph",
        vertices: names,
        edges: h
            .edges()
            .iter()
            .map(|e| e.iter().map(|&v| names[v].as_str()).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("serialisable")
}

pub fn kstructure_to_json(s: &KStructure) -> String {
    let names = s.universe();
    let out = KStructureOut {
        format: FORMAT,
        kind: "kstructure",
        k: s.arity(),
        universe: names,
        tuples: s
            .relation()
            .iter()
            .map(|t| t.iter().map(|&v| names[v].as_str()).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("serialisable")
}
