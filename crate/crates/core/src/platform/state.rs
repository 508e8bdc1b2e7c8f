use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::PlatformError;
use crate::annotate::{plan_rebase, ArticleRebase, CommentStore, RegionConflict};
use crate::article::{parse_article, Anchor, Article, ArticleName, Corpus, DirectiveKind};
use crate::graph::{assign_layers, build_graph, transitive_reduction, DepGraph};
use crate::lsi::{build_tfidf, model_file, LsiIndex, LsiModel};
use crate::names::NameIndex;

/// Article name and pristine source text, sorted by name.
pub type Sources = Vec<(ArticleName, String)>;

/// Reads every `*.miz` file of `dir`; the upper-cased file stem names the
/// article.
pub fn read_corpus_dir(dir: &Path) -> Result<Sources, PlatformError> {
    if !dir.is_dir() {
        return Err(PlatformError::InvalidCorpus(format!("{}: not a directory", dir.display())));
    }
    let entries = fs::read_dir(dir).map_err(|e| PlatformError::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| PlatformError::io(dir, e))?.path();
        if !path.is_file() || path.extension().is_none_or(|e| e != "miz") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_uppercase();
        let name = ArticleName::new(stem.clone())
            .map_err(|_| PlatformError::InvalidCorpus(format!("{}: {stem:?} is not an article name", path.display())))?;
        let bytes = fs::read(&path).map_err(|e| PlatformError::io(&path, e))?;
        let text = String::from_utf8(bytes)
            .map_err(|_| PlatformError::InvalidCorpus(format!("{}: not UTF-8", path.display())))?;
        if out.insert(name.clone(), text).is_some() {
            return Err(PlatformError::InvalidCorpus(format!("article {name} appears twice")));
        }
    }
    if out.is_empty() {
        return Err(PlatformError::InvalidCorpus(format!("{}: no .miz files", dir.display())));
    }
    Ok(out.into_iter().collect())
}

/// Hex SHA-256 over every article name and its pristine bytes, in name order.
pub fn corpus_hash(sources: &[(ArticleName, String)]) -> String {
    let mut h = Sha256::new();
    for (name, text) in sources {
        h.update(name.as_str().as_bytes());
        h.update([0]);
        h.update((text.len() as u64).to_le_bytes());
        h.update(text.as_bytes());
    }
    hex::encode(h.finalize())
}

/// Build inputs that affect derived structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildSettings {
    pub directive_kinds: BTreeSet<DirectiveKind>,
    pub lsi_k: Option<usize>,
}

impl Default for BuildSettings {
    fn default() -> Self {
        BuildSettings { directive_kinds: DirectiveKind::article_references().into_iter().collect(), lsi_k: None }
    }
}

/// One immutable, fully derived version of the library.
#[derive(Debug)]
pub struct CorpusState {
    pub version_label: String,
    pub corpus: Corpus,
    /// Full dependency graph with layers.
    pub graph: DepGraph,
    /// Transitive reduction of `graph`, with layers.
    pub reduced: DepGraph,
    /// `None` when the corpus has no items.
    pub lsi: Option<LsiIndex>,
    pub names: NameIndex,
    pub corpus_hash: String,
    /// Whether the LSI model was factored for this state rather than loaded.
    pub lsi_rebuilt: bool,
}

impl CorpusState {
    /// Parses and derives everything. `cached_model` is tried before
    /// factoring and ignored when it does not match the corpus.
    pub fn build(
        sources: &[(ArticleName, String)],
        version_label: &str,
        settings: &BuildSettings,
        cached_model: Option<&Path>,
    ) -> Result<Self, PlatformError> {
        let articles: Vec<Article> = sources
            .iter()
            .map(|(name, text)| {
                parse_article(name.clone(), text)
                    .map_err(|error| PlatformError::Parse { article: name.clone(), error })
            })
            .collect::<Result<_, _>>()?;
        let graph = assign_layers(&build_graph(&articles, &settings.directive_kinds)?)?;
        let reduced = assign_layers(&transitive_reduction(&graph)?)?;
        let names = NameIndex::build(&articles);

        let docs: Vec<(Anchor, String)> = articles
            .iter()
            .flat_map(|a| a.items.iter().map(|i| (i.anchor.clone(), i.statement_text.clone())))
            .collect();
        let (lsi, lsi_rebuilt) = if docs.is_empty() {
            (None, false)
        } else {
            let matrix = build_tfidf(&docs)?;
            match cached_model.and_then(|p| model_file::load_for(p, &matrix).ok()) {
                Some(model) => (Some(LsiIndex { matrix, model, statements: docs.into_iter().collect() }), false),
                None => (Some(LsiIndex::build(docs, settings.lsi_k)?), true),
            }
        };

        Ok(CorpusState {
            version_label: version_label.to_owned(),
            corpus: articles.into_iter().collect(),
            graph,
            reduced,
            lsi,
            names,
            corpus_hash: corpus_hash(sources),
            lsi_rebuilt,
        })
    }

    pub fn graph(&self, reduced: bool) -> &DepGraph {
        if reduced { &self.reduced } else { &self.graph }
    }

    pub fn lsi_model(&self) -> Option<&LsiModel> {
        self.lsi.as_ref().map(|i| &i.model)
    }

    pub fn item_count(&self) -> usize {
        self.corpus.articles().map(|a| a.items.len()).sum()
    }
}

/// Per-article outcome of carrying comments across an update.
#[derive(Debug, Clone, Serialize)]
pub struct ArticleReport {
    pub article: ArticleName,
    pub removed: bool,
    pub live_comments: usize,
    pub clean: bool,
    pub remapped: BTreeMap<Anchor, Anchor>,
    pub conflicts: Vec<RegionConflict>,
    pub detached: Vec<Anchor>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpdateReport {
    pub from_label: String,
    pub to_label: String,
    pub from_hash: String,
    pub to_hash: String,
    pub conflict_count: usize,
    pub conflicted_anchors: Vec<Anchor>,
    pub comments_before: usize,
    /// Projected in dry runs; counted after the update otherwise.
    pub comments_after: usize,
    pub articles: Vec<ArticleReport>,
}

/// Rebase plans for every old article that has comment history. Frozen
/// articles keep waiting for resolution and are left out. Nothing is
/// written.
pub fn plan_update(old: &Corpus, new: &Corpus, store: &CommentStore) -> Result<Vec<ArticleRebase>, PlatformError> {
    let mut plans = Vec::new();
    for article in old.articles() {
        if store.is_frozen(&article.name) || store.article_histories(&article.name).next().is_none() {
            continue;
        }
        plans.push(plan_rebase(article, new.get(&article.name), store)?);
    }
    Ok(plans)
}

pub fn report_for(
    old_label: &str,
    old_hash: &str,
    new_label: &str,
    new_hash: &str,
    new: &Corpus,
    plans: &[ArticleRebase],
    store: &CommentStore,
) -> UpdateReport {
    let articles: Vec<ArticleReport> = plans
        .iter()
        .map(|p| ArticleReport {
            article: p.article.clone(),
            removed: !new.contains(&p.article),
            live_comments: p.live_comments,
            clean: p.is_clean(),
            remapped: if p.is_clean() { p.remap.clone() } else { BTreeMap::new() },
            conflicts: p.conflicts.clone(),
            detached: p.detached.clone(),
        })
        .collect();
    let conflicted_anchors = plans
        .iter()
        .flat_map(|p| p.conflicts.iter().flat_map(|c| c.anchors.iter()).chain(&p.detached))
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let live = store.live_count();
    UpdateReport {
        from_label: old_label.to_owned(),
        to_label: new_label.to_owned(),
        from_hash: old_hash.to_owned(),
        to_hash: new_hash.to_owned(),
        conflict_count: plans.iter().map(ArticleRebase::conflict_count).sum(),
        conflicted_anchors,
        comments_before: live,
        comments_after: live,
        articles,
    }
}
