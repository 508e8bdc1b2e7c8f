//! Append-only comment history, one JSON-lines file per article.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::AnnotationError;
use crate::article::{Anchor, ArticleName, Corpus};
use crate::users::{User, UserId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentRevision {
    pub anchor: Anchor,
    pub revision_id: u64,
    pub parent: Option<u64>,
    pub author: UserId,
    pub timestamp: DateTime<Utc>,
    pub deleted: bool,
    pub body: String,
}

#[derive(Debug, Default)]
pub struct CommentStore {
    dir: Option<PathBuf>,
    histories: BTreeMap<Anchor, Vec<CommentRevision>>,
    archived: BTreeMap<ArticleName, Vec<CommentRevision>>,
    frozen: BTreeSet<ArticleName>,
}

const FROZEN_FILE: &str = "frozen.json";
const ARCHIVE_SUFFIX: &str = ".archive.jsonl";

impl CommentStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (creating if needed) a store directory.
    pub fn open(dir: &Path) -> Result<Self, AnnotationError> {
        fs::create_dir_all(dir)?;
        let mut store = CommentStore { dir: Some(dir.to_owned()), ..Default::default() };
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
            .collect();
        paths.sort();
        for path in paths {
            let archive = path.to_string_lossy().ends_with(ARCHIVE_SUFFIX);
            for line in BufReader::new(fs::File::open(&path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rev: CommentRevision = serde_json::from_str(&line)?;
                if archive {
                    store.archived.entry(rev.anchor.article.clone()).or_default().push(rev);
                } else {
                    store.histories.entry(rev.anchor.clone()).or_default().push(rev);
                }
            }
        }
        for history in store.histories.values_mut() {
            history.sort_by_key(|r| r.revision_id);
        }
        let frozen = dir.join(FROZEN_FILE);
        if frozen.exists() {
            store.frozen = serde_json::from_slice(&fs::read(frozen)?)?;
        }
        Ok(store)
    }

    pub fn history(&self, anchor: &Anchor) -> &[CommentRevision] {
        self.histories.get(anchor).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn latest(&self, anchor: &Anchor) -> Option<&CommentRevision> {
        self.history(anchor).last()
    }

    /// Anchors with at least one revision.
    pub fn anchors(&self) -> impl Iterator<Item = &Anchor> {
        self.histories.keys()
    }

    pub fn revision_count(&self) -> usize {
        self.histories.values().map(Vec::len).sum::<usize>()
            + self.archived.values().map(Vec::len).sum::<usize>()
    }

    pub fn archived(&self, article: &ArticleName) -> &[CommentRevision] {
        self.archived.get(article).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Bodies of the latest non-deleted revision of every commented item of
    /// `article`.
    pub fn live_comments(&self, article: &ArticleName) -> BTreeMap<Anchor, String> {
        self.article_histories(article)
            .filter_map(|(anchor, h)| {
                let last = h.last()?;
                (!last.deleted).then(|| (anchor.clone(), last.body.clone()))
            })
            .collect()
    }

    pub fn live_count(&self) -> usize {
        self.histories.values().filter(|h| h.last().is_some_and(|r| !r.deleted)).count()
    }

    pub fn article_histories<'a>(
        &'a self,
        article: &'a ArticleName,
    ) -> impl Iterator<Item = (&'a Anchor, &'a Vec<CommentRevision>)> + 'a {
        self.histories.iter().filter(move |(a, _)| &a.article == article)
    }

    pub fn is_frozen(&self, article: &ArticleName) -> bool {
        self.frozen.contains(article)
    }

    pub fn frozen(&self) -> &BTreeSet<ArticleName> {
        &self.frozen
    }

    /// Appends a new revision with `body`.
    pub fn save_comment(
        &mut self,
        corpus: &Corpus,
        anchor: &Anchor,
        body: &str,
        author: &User,
    ) -> Result<CommentRevision, AnnotationError> {
        self.check_writable(anchor, author)?;
        if !corpus.contains_anchor(anchor) {
            return Err(AnnotationError::UnknownAnchor(anchor.to_string()));
        }
        self.append(anchor, body.to_owned(), &author.id, false)
    }

    /// Appends a new revision restoring the body of revision `to`.
    pub fn rollback(
        &mut self,
        anchor: &Anchor,
        to: u64,
        author: &User,
    ) -> Result<CommentRevision, AnnotationError> {
        self.check_writable(anchor, author)?;
        let target = self
            .history(anchor)
            .iter()
            .find(|r| r.revision_id == to)
            .ok_or_else(|| AnnotationError::UnknownRevision { anchor: anchor.to_string(), revision: to })?;
        let body = target.body.clone();
        self.append(anchor, body, &author.id, false)
    }

    /// Appends a revision marking the comment deleted; its body is emptied.
    pub fn delete_comment(&mut self, anchor: &Anchor, author: &User) -> Result<CommentRevision, AnnotationError> {
        self.check_writable(anchor, author)?;
        if self.history(anchor).is_empty() {
            return Err(AnnotationError::UnknownAnchor(anchor.to_string()));
        }
        self.append(anchor, String::new(), &author.id, true)
    }

    fn check_writable(&self, anchor: &Anchor, author: &User) -> Result<(), AnnotationError> {
        if author.blocked {
            return Err(AnnotationError::UserBlocked(author.id.to_string()));
        }
        if self.is_frozen(&anchor.article) {
            return Err(AnnotationError::Frozen(anchor.article.clone()));
        }
        Ok(())
    }

    fn append(
        &mut self,
        anchor: &Anchor,
        body: String,
        author: &UserId,
        deleted: bool,
    ) -> Result<CommentRevision, AnnotationError> {
        let parent = self.latest(anchor).map(|r| r.revision_id);
        let rev = CommentRevision {
            anchor: anchor.clone(),
            revision_id: parent.map_or(1, |p| p + 1),
            parent,
            author: author.clone(),
            timestamp: Utc::now(),
            deleted,
            body,
        };
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{}.jsonl", anchor.article));
            crate::fsutil::append_line(&path, &serde_json::to_string(&rev)?)?;
        }
        self.histories.entry(anchor.clone()).or_default().push(rev.clone());
        Ok(rev)
    }

    /// Moves the histories of `article` to new anchors after a library
    /// update. Histories whose anchor is not in `remap` go to the article's
    /// archive. Revision ids, bodies, authors and timestamps are kept.
    pub fn relabel(&mut self, article: &ArticleName, remap: &BTreeMap<Anchor, Anchor>) -> Result<(), AnnotationError> {
        let old: Vec<Anchor> = self.article_histories(article).map(|(a, _)| a.clone()).collect();
        let mut moved: BTreeMap<Anchor, Vec<CommentRevision>> = BTreeMap::new();
        let mut archived = Vec::new();
        for anchor in old {
            let history = self.histories.remove(&anchor).unwrap_or_default();
            match remap.get(&anchor) {
                Some(new) => {
                    let relabeled = history.into_iter().map(|r| CommentRevision { anchor: new.clone(), ..r }).collect();
                    moved.insert(new.clone(), relabeled);
                }
                None => archived.extend(history),
            }
        }
        if let Some(dir) = &self.dir {
            let mut text = String::new();
            for rev in moved.values().flatten() {
                text.push_str(&serde_json::to_string(rev)?);
                text.push('\n');
            }
            let path = dir.join(format!("{article}.jsonl"));
            if text.is_empty() {
                if path.exists() {
                    fs::remove_file(&path)?;
                }
            } else {
                crate::fsutil::write_atomic(&path, text.as_bytes())?;
            }
            let archive = dir.join(format!("{article}{ARCHIVE_SUFFIX}"));
            for rev in &archived {
                crate::fsutil::append_line(&archive, &serde_json::to_string(rev)?)?;
            }
        }
        for (anchor, history) in moved {
            self.histories.insert(anchor, history);
        }
        if !archived.is_empty() {
            self.archived.entry(article.clone()).or_default().extend(archived);
        }
        Ok(())
    }

    pub fn set_frozen(&mut self, article: &ArticleName, frozen: bool) -> Result<(), AnnotationError> {
        let changed = if frozen { self.frozen.insert(article.clone()) } else { self.frozen.remove(article) };
        if changed {
            if let Some(dir) = &self.dir {
                crate::fsutil::write_atomic(&dir.join(FROZEN_FILE), &serde_json::to_vec(&self.frozen)?)?;
            }
        }
        Ok(())
    }
}
