use std::collections::{BTreeMap, BTreeSet};

use super::matrix::SparseMatrix;
use super::tokenize::tokenize;
use super::LsiError;
use crate::article::Anchor;

/// Tf-idf weighted, column-normalized term-document matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocMatrix {
    /// Sorted vocabulary.
    pub terms: Vec<String>,
    pub docs: Vec<Anchor>,
    /// `#terms × #docs`.
    pub weights: SparseMatrix,
    pub idf: Vec<f64>,
}

/// Smoothed inverse document frequency.
pub fn idf(docs: usize, df: usize) -> f64 {
    ((1.0 + docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

fn weigh(tokens: Vec<String>, lookup: impl Fn(&str) -> Option<usize>, idf: &[f64]) -> Vec<(usize, f64)> {
    let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = lookup(&t) {
            *tf.entry(i).or_default() += 1;
        }
    }
    let mut col: Vec<(usize, f64)> = tf.into_iter().map(|(i, n)| (i, (1.0 + (n as f64).ln()) * idf[i])).collect();
    let norm = col.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        col.iter_mut().for_each(|(_, w)| *w /= norm);
    }
    col
}

pub fn build_tfidf(docs: &[(Anchor, String)]) -> Result<TermDocMatrix, LsiError> {
    if docs.is_empty() {
        return Err(LsiError::EmptyCorpus);
    }
    let mut seen = BTreeSet::new();
    for (anchor, _) in docs {
        if !seen.insert(anchor) {
            return Err(LsiError::DuplicateDocument(anchor.to_string()));
        }
    }
    let tokenized: Vec<Vec<String>> = docs.iter().map(|(_, text)| tokenize(text)).collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in &tokenized {
        let distinct: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        for t in distinct {
            *df.entry(t).or_default() += 1;
        }
    }
    let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
    let idf: Vec<f64> = df.values().map(|&n| idf(docs.len(), n)).collect();
    let columns = tokenized
        .iter()
        .map(|tokens| weigh(tokens.clone(), |t| terms.binary_search_by(|x| x.as_str().cmp(t)).ok(), &idf))
        .collect();
    let weights = SparseMatrix::from_columns(terms.len(), columns);
    Ok(TermDocMatrix { weights, idf, docs: docs.iter().map(|(a, _)| a.clone()).collect(), terms })
}

impl TermDocMatrix {
    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|x| x.as_str().cmp(term)).ok()
    }

    /// Dense L2-normalized query vector, or `None` when no query term is
    /// in the vocabulary.
    pub fn query_vector(&self, text: &str) -> Option<Vec<f64>> {
        let col = weigh(tokenize(text), |t| self.term_index(t), &self.idf);
        if col.is_empty() {
            return None;
        }
        let mut q = vec![0.0; self.terms.len()];
        for (i, w) in col {
            q[i] = w;
        }
        Some(q)
    }
}
