//! Versioned comments on items, embedded into article text and carried
//! across library updates by three-way merge.

pub mod diff;
mod embed;
mod merge;
mod rebase;
mod store;

use thiserror::Error;

use crate::article::{Article, ArticleName};

pub use embed::{comment_blocks, embed_bodies, is_marker_line, strip_comments, AnnotatedSource, CommentBlock, COMMENT_MARKER};
pub use merge::{diff3_merge, Conflict, MergeResult, MARKER_BASE, MARKER_OURS, MARKER_SEP, MARKER_THEIRS};
pub use rebase::{plan_rebase, rebase_annotations, ArticleRebase, RegionConflict};
pub use store::{CommentRevision, CommentStore};

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("unknown anchor {0}")]
    UnknownAnchor(String),
    #[error("user {0} is blocked")]
    UserBlocked(String),
    #[error("anchor {anchor} has no revision {revision}")]
    UnknownRevision { anchor: String, revision: u64 },
    #[error("comments of {0} are frozen pending conflict resolution")]
    Frozen(ArticleName),
    #[error("annotated text does not strip to the original article")]
    StripMismatch,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PartialEq for AnnotationError {
    fn eq(&self, other: &Self) -> bool {
        use AnnotationError::*;
        match (self, other) {
            (UnknownAnchor(a), UnknownAnchor(b)) | (UserBlocked(a), UserBlocked(b)) => a == b,
            (UnknownRevision { anchor: a, revision: x }, UnknownRevision { anchor: b, revision: y }) => a == b && x == y,
            (Frozen(a), Frozen(b)) => a == b,
            (StripMismatch, StripMismatch) => true,
            _ => false,
        }
    }
}

/// Embeds the latest live comment of every item of `article`.
pub fn embed_comments(article: &Article, store: &CommentStore) -> AnnotatedSource {
    embed_bodies(article, &store.live_comments(&article.name))
}
