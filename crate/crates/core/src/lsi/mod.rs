//! Latent semantic indexing over item statements.

pub mod feedback;
mod jacobi;
pub mod matrix;
pub mod model_file;
pub mod svd;
mod tfidf;
pub mod tokenize;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::article::Anchor;

pub use feedback::{record_feedback, FeedbackLog, FeedbackRecord, Vote};
pub use matrix::SparseMatrix;
pub use svd::Svd;
pub use tfidf::{build_tfidf, idf, TermDocMatrix};
pub use tokenize::tokenize;

#[derive(Debug, Error)]
pub enum LsiError {
    #[error("no documents to index")]
    EmptyCorpus,
    #[error("document {0} appears twice")]
    DuplicateDocument(String),
    #[error("rank {k} outside 1..={max}")]
    RankTooLarge { k: usize, max: usize },
    #[error("singular values did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("user {0} is blocked")]
    UserBlocked(String),
    #[error("bad model file: {0}")]
    BadModelFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PartialEq for LsiError {
    fn eq(&self, other: &Self) -> bool {
        use LsiError::*;
        match (self, other) {
            (EmptyCorpus, EmptyCorpus) => true,
            (DuplicateDocument(a), DuplicateDocument(b)) | (UserBlocked(a), UserBlocked(b)) => a == b,
            (BadModelFile(a), BadModelFile(b)) => a == b,
            (RankTooLarge { k: a, max: x }, RankTooLarge { k: b, max: y }) => a == b && x == y,
            (ConvergenceFailure { iterations: a }, ConvergenceFailure { iterations: b }) => a == b,
            _ => false,
        }
    }
}

/// Default rank: `min(150, min(#terms, #docs) - 1)`, at least 1.
pub fn default_rank(terms: usize, docs: usize) -> usize {
    150.min(terms.min(docs).saturating_sub(1)).max(1)
}

/// Truncated SVD factors of a term-document matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LsiModel {
    pub k: usize,
    /// `#terms × k`, row-major.
    pub u: Vec<f64>,
    pub s: Vec<f64>,
    /// `#docs × k`, row-major.
    pub v: Vec<f64>,
}

impl LsiModel {
    /// Factors `m` at rank `k`. The stored rank is lower when `W` has
    /// fewer than `k` numerically non-zero singular values.
    pub fn build(m: &TermDocMatrix, k: usize) -> Result<Self, LsiError> {
        let svd = svd::truncated_svd(&m.weights, k)?;
        Ok(LsiModel { k: svd.rank(), u: svd.u, s: svd.s, v: svd.v })
    }

    pub fn terms(&self) -> usize {
        self.u.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn docs(&self) -> usize {
        self.v.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn doc_vector(&self, doc: usize) -> &[f64] {
        &self.v[doc * self.k..(doc + 1) * self.k]
    }

    /// Folds a term-space vector into concept space: `diag(S)⁻¹ · Uᵀ · q`.
    pub fn fold_in(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        for (t, &qt) in q.iter().enumerate() {
            if qt != 0.0 {
                let row = &self.u[t * self.k..(t + 1) * self.k];
                out.iter_mut().zip(row).for_each(|(o, u)| *o += u * qt);
            }
        }
        out.iter_mut().zip(&self.s).for_each(|(o, s)| *o /= s);
        out
    }
}

/// A ranked search hit.
#[derive(Debug, Clone, PartialEq)]
pub struct Hit {
    pub anchor: Anchor,
    pub score: f64,
}

pub(crate) fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb))
}

/// Scores are rounded to this resolution so that floating-point noise does
/// not break ties, which are ordered by anchor.
pub const SCORE_RESOLUTION: f64 = 1e-12;

pub fn quantize(score: f64) -> f64 {
    let q = (score / SCORE_RESOLUTION).round() * SCORE_RESOLUTION;
    if q == 0.0 { 0.0 } else { q }
}

/// Ranks the documents of `m` against `query_text`. Documents whose concept
/// vector is zero (no indexed terms) have no defined cosine and are omitted.
pub fn rank(model: &LsiModel, m: &TermDocMatrix, query_text: &str, limit: usize) -> Vec<Hit> {
    match m.query_vector(query_text) {
        Some(q) => rank_vector(model, m, &q, limit),
        None => Vec::new(),
    }
}

/// Ranks against an explicit term-space query vector.
pub fn rank_vector(model: &LsiModel, m: &TermDocMatrix, q: &[f64], limit: usize) -> Vec<Hit> {
    let folded = model.fold_in(q);
    let mut hits: Vec<Hit> = (0..m.docs.len())
        .filter_map(|d| {
            cosine(&folded, model.doc_vector(d)).map(|c| Hit { anchor: m.docs[d].clone(), score: quantize(c) })
        })
        .collect();
    hits.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.anchor.to_string().cmp(&b.anchor.to_string()))
    });
    hits.truncate(limit);
    hits
}

/// Term-document matrix, its factorization, and the indexed statements.
#[derive(Debug, Clone)]
pub struct LsiIndex {
    pub matrix: TermDocMatrix,
    pub model: LsiModel,
    pub statements: BTreeMap<Anchor, String>,
}

impl LsiIndex {
    /// Builds with rank `k`, or the default rank when `None`.
    pub fn build(docs: Vec<(Anchor, String)>, k: Option<usize>) -> Result<Self, LsiError> {
        let matrix = build_tfidf(&docs)?;
        let k = k.unwrap_or_else(|| default_rank(matrix.terms.len(), matrix.docs.len()));
        let model = LsiModel::build(&matrix, k.min(matrix.terms.len().min(matrix.docs.len())))?;
        Ok(LsiIndex { matrix, model, statements: docs.into_iter().collect() })
    }

    pub fn search(&self, query_text: &str, limit: usize) -> Vec<Hit> {
        rank(&self.model, &self.matrix, query_text, limit)
    }

    pub fn statement(&self, anchor: &Anchor) -> Option<&str> {
        self.statements.get(anchor).map(String::as_str)
    }
}
