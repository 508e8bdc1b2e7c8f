//! JSON and text renderings shared by the command line and the HTTP API, so
//! both return identical bytes for the same query.

use serde::Serialize;

use super::state::CorpusState;
use super::PlatformError;
use crate::article::{Anchor, ArticleName};
use crate::graph::neighborhood;
use crate::names::{EntryKind, NameEntry};

pub const DEFAULT_NAME_LIMIT: usize = 20;
pub const DEFAULT_THEOREM_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Sfdp,
    Json,
}

#[derive(Debug, Serialize)]
pub struct TheoremHit<'a> {
    pub anchor: &'a Anchor,
    pub score: f64,
    pub label: Option<&'a str>,
    pub statement: &'a str,
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable view")
}

pub fn names_json(state: &CorpusState, query: &str, kind: Option<EntryKind>, limit: usize) -> String {
    let hits: Vec<&NameEntry> = state.names.query(query, kind, limit);
    to_json(&hits)
}

pub fn theorems_json(state: &CorpusState, query: &str, limit: usize) -> String {
    let Some(index) = &state.lsi else { return "[]".to_owned() };
    let hits = index.search(query, limit);
    let rows: Vec<TheoremHit<'_>> = hits
        .iter()
        .map(|h| TheoremHit {
            anchor: &h.anchor,
            score: h.score,
            label: state.corpus.item(&h.anchor).and_then(|i| i.label.as_deref()),
            statement: index.statement(&h.anchor).unwrap_or_default(),
        })
        .collect();
    to_json(&rows)
}

pub fn graph_text(state: &CorpusState, format: GraphFormat, reduced: bool) -> String {
    let g = state.graph(reduced);
    match format {
        GraphFormat::Dot => g.export_dot(),
        GraphFormat::Sfdp => g.export_sfdp(),
        GraphFormat::Json => g.export_json(),
    }
}

pub fn neighborhood_json(
    state: &CorpusState,
    node: &ArticleName,
    radius: usize,
    reduced: bool,
) -> Result<String, PlatformError> {
    Ok(neighborhood(state.graph(reduced), node, radius)?.export_json())
}

/// `NAME<TAB>LAYER` lines, deepest layer first, then by name.
pub fn layers_table(state: &CorpusState) -> String {
    let mut rows: Vec<(usize, &ArticleName)> = state
        .graph
        .layers()
        .map(|l| l.iter().map(|(n, v)| (*v, n)).collect())
        .unwrap_or_default();
    rows.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
    rows.iter().map(|(l, n)| format!("{n}\t{l}\n")).collect()
}

pub fn articles_json(state: &CorpusState) -> String {
    let names: Vec<&ArticleName> = state.corpus.names().collect();
    to_json(&names)
}

#[derive(Serialize)]
struct Summary<'a> {
    version_label: &'a str,
    corpus_hash: &'a str,
    articles: usize,
    items: usize,
    edges: usize,
    reduced_edges: usize,
    lsi_rank: usize,
    lsi_rebuilt: bool,
    name_entries: usize,
    warnings: Vec<String>,
}

pub fn summary_json(state: &CorpusState) -> String {
    let mut warnings: Vec<String> = state.graph.warnings().to_vec();
    warnings.extend(state.names.warnings().iter().map(|d| {
        let anchors: Vec<String> = d.anchors.iter().map(ToString::to_string).collect();
        format!("symbol {} defined by {}", d.symbol, anchors.join(", "))
    }));
    for a in state.corpus.articles() {
        warnings.extend(a.warnings.iter().map(|w| format!("{}: {w}", a.name)));
    }
    to_json(&Summary {
        version_label: &state.version_label,
        corpus_hash: &state.corpus_hash,
        articles: state.corpus.len(),
        items: state.item_count(),
        edges: state.graph.edges().len(),
        reduced_edges: state.reduced.edges().len(),
        lsi_rank: state.lsi_model().map_or(0, |m| m.k),
        lsi_rebuilt: state.lsi_rebuilt,
        name_entries: state.names.len(),
        warnings,
    })
}
