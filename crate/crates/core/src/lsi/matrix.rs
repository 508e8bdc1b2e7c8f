/// Column-compressed sparse matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-column `(row, value)` entries; zero values are dropped
    /// and rows within a column are sorted.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, f64)>>) -> Self {
        let cols = columns.len();
        let mut col_ptr = Vec::with_capacity(cols + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for mut col in columns {
            col.sort_by_key(|(r, _)| *r);
            for (r, v) in col {
                assert!(r < rows, "row index {r} out of bounds");
                if v != 0.0 {
                    row_idx.push(r);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        SparseMatrix { rows, cols, col_ptr, row_idx, values }
    }

    /// Builds from a row-major dense array.
    pub fn from_dense(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        let columns = (0..cols)
            .map(|c| (0..rows).map(|r| (r, data[r * cols + c])).collect())
            .collect();
        Self::from_columns(rows, columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, value)` entries of column `c`.
    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[c]..self.col_ptr[c + 1];
        self.row_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.column(c).find(|(row, _)| *row == r).map_or(0.0, |(_, v)| v)
    }

    /// `out = self * x`.
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (c, &xc) in x.iter().enumerate() {
            if xc != 0.0 {
                for (r, v) in self.column(c) {
                    out[r] += v * xc;
                }
            }
        }
    }

    /// `out = selfᵀ * y`.
    pub fn mul_transpose_vec(&self, y: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.column(c).map(|(r, v)| v * y[r]).sum();
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for c in 0..self.cols {
            for (r, v) in self.column(c) {
                d[r * self.cols + c] = v;
            }
        }
        d
    }
}
