use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::diff::matching_pairs;
use super::embed::{comment_blocks, embed_bodies, AnnotatedSource};
use super::merge::{diff3_merge, MergeResult};
use super::store::CommentStore;
use super::AnnotationError;
use crate::article::{Anchor, Article, ArticleName};

/// Merges `annotated` (the old text plus embedded comments) with the new
/// library text, using the old text as base.
pub fn rebase_annotations<S: AsRef<str>>(
    old_pristine: &[S],
    annotated: &AnnotatedSource,
    new_pristine: &[S],
) -> Result<MergeResult, AnnotationError> {
    let stripped = annotated.strip();
    if stripped.len() != old_pristine.len() || stripped.iter().zip(old_pristine).any(|(a, b)| a != b.as_ref()) {
        return Err(AnnotationError::StripMismatch);
    }
    let new: Vec<&str> = new_pristine.iter().map(AsRef::as_ref).collect();
    let base: Vec<&str> = old_pristine.iter().map(AsRef::as_ref).collect();
    let ours: Vec<&str> = annotated.lines.iter().map(String::as_str).collect();
    Ok(diff3_merge(&base, &ours, &new))
}

/// One conflicted region, with the comments it involves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionConflict {
    /// 1-based inclusive base line range; `start > end` for a pure insertion.
    pub base_start: usize,
    pub base_end: usize,
    pub anchors: Vec<Anchor>,
}

/// Outcome of carrying one article's comments to a new library version.
#[derive(Debug, Clone)]
pub struct ArticleRebase {
    pub article: ArticleName,
    pub merge: MergeResult,
    /// Old anchor to new anchor, for every history carried over.
    pub remap: BTreeMap<Anchor, Anchor>,
    pub conflicts: Vec<RegionConflict>,
    /// Comments that merged cleanly but no longer sit above an item.
    pub detached: Vec<Anchor>,
    pub live_comments: usize,
}

impl ArticleRebase {
    pub fn is_clean(&self) -> bool {
        self.conflicts.is_empty() && self.detached.is_empty()
    }

    pub fn conflict_count(&self) -> usize {
        self.conflicts.len() + self.detached.len()
    }
}

/// Plans the rebase of one article's comments; `new` is `None` when the
/// article was removed. Nothing is written.
pub fn plan_rebase(old: &Article, new: Option<&Article>, store: &CommentStore) -> Result<ArticleRebase, AnnotationError> {
    let live = store.live_comments(&old.name);
    let commented: Vec<&Anchor> = old.items.iter().map(|i| &i.anchor).filter(|a| live.contains_key(*a)).collect();
    let annotated = embed_bodies(old, &live);
    let new_lines: &[String] = new.map(|a| a.lines.as_slice()).unwrap_or(&[]);
    let merge = rebase_annotations(&old.lines, &annotated, new_lines)?;

    let mut plan = ArticleRebase {
        article: old.name.clone(),
        merge,
        remap: BTreeMap::new(),
        conflicts: Vec::new(),
        detached: Vec::new(),
        live_comments: commented.len(),
    };

    if !plan.merge.clean {
        let blocks = annotated.blocks();
        for c in &plan.merge.conflicts {
            let anchors = blocks
                .iter()
                .zip(&commented)
                .filter(|(b, _)| b.start < c.ours.end && c.ours.start < b.end)
                .map(|(_, a)| (*a).clone())
                .collect();
            plan.conflicts.push(RegionConflict { base_start: c.base.start + 1, base_end: c.base.end, anchors });
        }
        return Ok(plan);
    }

    let blocks = comment_blocks(&plan.merge.merged_lines);
    let mut targets = BTreeSet::new();
    if blocks.len() == commented.len() {
        for (block, anchor) in blocks.iter().zip(&commented) {
            match new.and_then(|a| a.item_starting_at(block.target + 1)) {
                Some(item) => {
                    targets.insert(item.anchor.clone());
                    plan.remap.insert((*anchor).clone(), item.anchor.clone());
                }
                None => plan.detached.push((*anchor).clone()),
            }
        }
    } else {
        plan.detached.extend(commented.iter().map(|a| (*a).clone()));
    }

    // Histories with no live comment are not embedded; follow their item's
    // opening line through the line alignment instead.
    if let Some(new) = new {
        let aligned: BTreeMap<usize, usize> = matching_pairs(&old.lines, &new.lines).into_iter().collect();
        for (anchor, _) in store.article_histories(&old.name) {
            if live.contains_key(anchor) {
                continue;
            }
            let Some(item) = old.item(anchor) else { continue };
            let target = aligned
                .get(&(item.span.start - 1))
                .and_then(|&line| new.item_starting_at(line + 1))
                .filter(|t| t.kind == item.kind && !targets.contains(&t.anchor));
            if let Some(t) = target {
                targets.insert(t.anchor.clone());
                plan.remap.insert(anchor.clone(), t.anchor.clone());
            }
        }
    }
    Ok(plan)
}
