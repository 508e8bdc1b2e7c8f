//! The served library: configuration, corpus snapshots, the update
//! workflow, and the HTTP API.

mod config;
pub mod http;
mod service;
mod state;
pub mod views;

use std::path::Path;

use thiserror::Error;

use crate::annotate::AnnotationError;
use crate::article::{ArticleName, ParseError};
use crate::graph::GraphError;
use crate::lsi::LsiError;

pub use config::{Config, UserSeed, ENV_DATA_DIR, ENV_LISTEN};
pub use service::{ArticleView, DataLayout, IngestOutcome, Platform};
pub use state::{
    corpus_hash, plan_update, read_corpus_dir, report_for, ArticleReport, BuildSettings, CorpusState, Sources,
    UpdateReport,
};

#[derive(Debug, Error)]
pub enum PlatformError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    InvalidCorpus(String),
    #[error("{article}: {error}")]
    Parse { article: ArticleName, error: ParseError },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lsi(#[from] LsiError),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error("no corpus has been ingested")]
    NoCorpus,
    #[error("not found: {0}")]
    NotFound(String),
    #[error("missing or unknown token")]
    Unauthorized,
    #[error("forbidden: {0}")]
    Forbidden(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl PlatformError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        PlatformError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    /// True for failures caused by the environment rather than by input.
    pub fn is_internal(&self) -> bool {
        match self {
            PlatformError::Io { .. } => true,
            PlatformError::Lsi(e) => matches!(e, LsiError::Io(_) | LsiError::ConvergenceFailure { .. }),
            PlatformError::Annotation(e) => matches!(e, AnnotationError::Io(_) | AnnotationError::Json(_)),
            _ => false,
        }
    }
}
