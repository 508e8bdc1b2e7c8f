//! Binary model layout: magic `LSI1`; `u32` k, #terms, #docs; each term as
//! `u32` byte length plus UTF-8; then idf, S, U (row-major) and V
//! (row-major) as little-endian `f64`.

use std::fs;
use std::path::Path;

use super::{LsiError, LsiModel, TermDocMatrix};
use crate::fsutil::write_atomic;

pub const MAGIC: &[u8; 4] = b"LSI1";

/// Decoded model file contents.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub terms: Vec<String>,
    pub docs: usize,
    pub idf: Vec<f64>,
    pub model: LsiModel,
}

pub fn encode(model: &LsiModel, matrix: &TermDocMatrix) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    for n in [model.k, matrix.terms.len(), matrix.docs.len()] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for t in &matrix.terms {
        out.extend_from_slice(&(t.len() as u32).to_le_bytes());
        out.extend_from_slice(t.as_bytes());
    }
    for x in matrix.idf.iter().chain(&model.s).chain(&model.u).chain(&model.v) {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], LsiError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| LsiError::BadModelFile("truncated".into()))?;
        let slice = &self.data[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<usize, LsiError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>, LsiError> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| LsiError::BadModelFile("size overflow".into()))?)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

pub fn decode(data: &[u8]) -> Result<ModelFile, LsiError> {
    let mut r = Reader { data, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(LsiError::BadModelFile("wrong magic".into()));
    }
    let (k, n_terms, docs) = (r.u32()?, r.u32()?, r.u32()?);
    let mut terms = Vec::with_capacity(n_terms.min(data.len()));
    for _ in 0..n_terms {
        let len = r.u32()?;
        let s = std::str::from_utf8(r.take(len)?).map_err(|e| LsiError::BadModelFile(e.to_string()))?;
        terms.push(s.to_owned());
    }
    let idf = r.floats(n_terms)?;
    let s = r.floats(k)?;
    let u = r.floats(n_terms * k)?;
    let v = r.floats(docs * k)?;
    if r.pos != data.len() {
        return Err(LsiError::BadModelFile("trailing bytes".into()));
    }
    Ok(ModelFile { terms, docs, idf, model: LsiModel { k, u, s, v } })
}

pub fn save(path: &Path, model: &LsiModel, matrix: &TermDocMatrix) -> Result<(), LsiError> {
    Ok(write_atomic(path, &encode(model, matrix))?)
}

/// Loads a model and checks it was built from `matrix`'s vocabulary and
/// document count.
pub fn load_for(path: &Path, matrix: &TermDocMatrix) -> Result<LsiModel, LsiError> {
    let file = decode(&fs::read(path)?)?;
    if file.terms != matrix.terms || file.docs != matrix.docs.len() || file.idf != matrix.idf {
        return Err(LsiError::BadModelFile("model does not match the corpus".into()));
    }
    Ok(file.model)
}
