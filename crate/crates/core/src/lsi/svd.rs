//! Truncated SVD through the eigenproblem of the smaller Gram matrix.
//!
//! The Gram operator (`WᵀW` or `WWᵀ`, whichever is smaller) is never formed;
//! it is applied as two sparse products. Its leading eigenpairs come from
//! block subspace iteration with Rayleigh-Ritz: each iteration projects the
//! operator onto the current block, solves the small problem with Jacobi
//! rotations, and locks leading Ritz pairs whose estimates have settled.
//! Locked vectors are projected out of later blocks (deflation).

use super::jacobi::symmetric_eigen;
use super::matrix::SparseMatrix;
use super::LsiError;

/// Relative change of an eigenvalue estimate below which it is converged.
pub const CONVERGENCE_TOL: f64 = 1e-10;

/// Eigenvalues below this fraction of the largest are treated as zero, i.e.
/// singular values below `1e-6 · σ_max` are dropped.
pub const RANK_TOL: f64 = 1e-12;

/// Attainable accuracy floor for eigenvalue estimates, relative to the
/// largest eigenvalue.
const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub rows: usize,
    pub cols: usize,
    /// `rows × rank`, row-major, orthonormal columns.
    pub u: Vec<f64>,
    /// Singular values, non-increasing and positive.
    pub s: Vec<f64>,
    /// `cols × rank`, row-major, orthonormal columns.
    pub v: Vec<f64>,
    pub iterations: usize,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn u_at(&self, row: usize, j: usize) -> f64 {
        self.u[row * self.rank() + j]
    }

    pub fn v_at(&self, col: usize, j: usize) -> f64 {
        self.v[col * self.rank() + j]
    }
}

/// Default iteration cap: ten times the smaller dimension.
pub fn default_iteration_cap(w: &SparseMatrix) -> usize {
    10 * w.rows().min(w.cols())
}

/// Top-`k` singular triplets of `w`. Fewer than `k` are returned when the
/// numerical rank of `w` is smaller than `k`.
pub fn truncated_svd(w: &SparseMatrix, k: usize) -> Result<Svd, LsiError> {
    truncated_svd_with_cap(w, k, default_iteration_cap(w))
}

pub fn truncated_svd_with_cap(w: &SparseMatrix, k: usize, max_iterations: usize) -> Result<Svd, LsiError> {
    let n = w.rows().min(w.cols());
    if k == 0 || k > n {
        return Err(LsiError::RankTooLarge { k, max: n });
    }
    let doc_side = w.cols() <= w.rows();
    let mut tmp = vec![0.0; if doc_side { w.rows() } else { w.cols() }];
    let mut gram = |x: &[f64], out: &mut [f64]| {
        if doc_side {
            w.mul_vec(x, &mut tmp);
            w.mul_transpose_vec(&tmp, out);
        } else {
            w.mul_transpose_vec(x, &mut tmp);
            w.mul_vec(&tmp, out);
        }
    };
    let (values, vectors, iterations) = leading_eigenpairs(n, k, &mut gram, max_iterations.max(2))?;

    let rank = values.len();
    let (rows, cols) = (w.rows(), w.cols());
    let mut u = vec![0.0; rows * rank];
    let mut v = vec![0.0; cols * rank];
    let mut s = Vec::with_capacity(rank);
    let mut other = vec![0.0; if doc_side { rows } else { cols }];
    for (j, (lambda, x)) in values.iter().zip(&vectors).enumerate() {
        let sigma = lambda.sqrt();
        if doc_side {
            w.mul_vec(x, &mut other);
        } else {
            w.mul_transpose_vec(x, &mut other);
        }
        other.iter_mut().for_each(|o| *o /= sigma);
        let (left, right): (&[f64], &[f64]) = if doc_side { (&other, x) } else { (x, &other) };
        // Sign convention: the largest-magnitude entry of each left vector is positive.
        let pivot = left.iter().copied().fold(0.0f64, |m, e| if e.abs() > m.abs() { e } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for (r, e) in left.iter().enumerate() {
            u[r * rank + j] = sign * e;
        }
        for (c, e) in right.iter().enumerate() {
            v[c * rank + j] = sign * e;
        }
        s.push(sigma);
    }
    Ok(Svd { rows, cols, u, s, v, iterations })
}

/// Eigenvalues, eigenvectors and the iteration count.
type Eigenpairs = (Vec<f64>, Vec<Vec<f64>>, usize);

/// Largest eigenpairs (at most `k`, positive eigenvalues only, descending)
/// of the symmetric positive semi-definite operator `op` on `R^n`.
fn leading_eigenpairs(
    n: usize,
    k: usize,
    op: &mut dyn FnMut(&[f64], &mut [f64]),
    max_iterations: usize,
) -> Result<Eigenpairs, LsiError> {
    let block = n.min(2 * k + 8);
    let mut rng = SplitMix64(0x9E37_79B9_7F4A_7C15);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut active: Vec<Vec<f64>> = (0..block).map(|_| rng.vector(n)).collect();
    orthonormalize(&mut active, &locked, &mut rng, n);
    let mut previous: Vec<f64> = Vec::new();
    let mut scale = 0.0f64;

    for iteration in 1..=max_iterations {
        let b = active.len();
        let images: Vec<Vec<f64>> = active
            .iter()
            .map(|x| {
                let mut y = vec![0.0; n];
                op(x, &mut y);
                project_out(&mut y, &locked);
                y
            })
            .collect();
        let mut h = vec![0.0; b * b];
        for i in 0..b {
            for j in 0..b {
                h[i * b + j] = dot(&active[i], &images[j]);
            }
        }
        for i in 0..b {
            for j in (i + 1)..b {
                let avg = 0.5 * (h[i * b + j] + h[j * b + i]);
                h[i * b + j] = avg;
                h[j * b + i] = avg;
            }
        }
        let (theta, y) = symmetric_eigen(b, &h);
        let ritz = combine(&active, &y, b, n);
        let ritz_images = combine(&images, &y, b, n);
        scale = scale.max(theta.first().copied().unwrap_or(0.0));

        let needed = k - locked.len();
        let mut converged = 0;
        while converged < needed.min(b) && converged < previous.len() {
            let change = (theta[converged] - previous[converged]).abs();
            if change <= CONVERGENCE_TOL * theta[converged].abs() + NOISE_FLOOR * scale {
                converged += 1;
            } else {
                break;
            }
        }
        let rest_negligible = theta.get(converged).is_none_or(|&t| t <= RANK_TOL * scale);
        locked.extend(ritz.into_iter().take(converged));

        if locked.len() >= k || rest_negligible || locked.len() >= n {
            return Ok(finalize(locked, op, n, scale, iteration));
        }
        active = ritz_images.into_iter().skip(converged).collect();
        orthonormalize(&mut active, &locked, &mut rng, n);
        if active.is_empty() {
            return Ok(finalize(locked, op, n, scale, iteration));
        }
        previous = theta[converged..].to_vec();
    }
    Err(LsiError::ConvergenceFailure { iterations: max_iterations })
}

/// Rayleigh-Ritz over the locked vectors, so the returned vectors are
/// mutually orthogonal under the operator as well.
fn finalize(
    locked: Vec<Vec<f64>>,
    op: &mut dyn FnMut(&[f64], &mut [f64]),
    n: usize,
    scale: f64,
    iterations: usize,
) -> (Vec<f64>, Vec<Vec<f64>>, usize) {
    let m = locked.len();
    let images: Vec<Vec<f64>> = locked
        .iter()
        .map(|x| {
            let mut y = vec![0.0; n];
            op(x, &mut y);
            y
        })
        .collect();
    let mut h = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let e = 0.5 * (dot(&locked[i], &images[j]) + dot(&locked[j], &images[i]));
            h[i * m + j] = e;
            h[j * m + i] = e;
        }
    }
    let (theta, y) = symmetric_eigen(m, &h);
    let vectors = combine(&locked, &y, m, n);
    let keep = theta.iter().take_while(|&&t| t > RANK_TOL * scale && t > 0.0).count();
    (theta[..keep].to_vec(), vectors.into_iter().take(keep).collect(), iterations)
}

/// Columns of `basis · y` where `y` is `b × b` row-major.
fn combine(basis: &[Vec<f64>], y: &[f64], b: usize, n: usize) -> Vec<Vec<f64>> {
    (0..b)
        .map(|j| {
            let mut out = vec![0.0; n];
            for (i, vec) in basis.iter().enumerate() {
                let coeff = y[i * b + j];
                if coeff != 0.0 {
                    out.iter_mut().zip(vec).for_each(|(o, e)| *o += coeff * e);
                }
            }
            out
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(b, v);
        v.iter_mut().zip(b).for_each(|(x, e)| *x -= c * e);
    }
}

/// Twice-iterated modified Gram-Schmidt against `locked` and the vectors
/// already accepted. Vectors that vanish are replaced by random ones while
/// the space has room, and dropped otherwise.
fn orthonormalize(vectors: &mut Vec<Vec<f64>>, locked: &[Vec<f64>], rng: &mut SplitMix64, n: usize) {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors.drain(..) {
        for _attempt in 0..4 {
            if locked.len() + out.len() >= n {
                break;
            }
            let before = dot(&v, &v).sqrt();
            for _ in 0..2 {
                project_out(&mut v, locked);
                project_out(&mut v, &out);
            }
            let norm = dot(&v, &v).sqrt();
            if norm > 0.0 && norm > 1e-10 * before {
                v.iter_mut().for_each(|x| *x /= norm);
                out.push(v);
                break;
            }
            v = rng.vector(n);
        }
    }
    *vectors = out;
}

/// Deterministic generator for start vectors.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| (self.next() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let w = SparseMatrix::from_dense(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let svd = truncated_svd(&w, 2).unwrap();
        assert_eq!(svd.rank(), 2);
        for s in &svd.s {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_top_one() {
        let w = SparseMatrix::from_dense(3, 3, &[3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let svd = truncated_svd(&w, 1).unwrap();
        assert_eq!(svd.s.len(), 1);
        assert!((svd.s[0] - 3.0).abs() < 1e-12);
        assert!((svd.u_at(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_matrix_returns_fewer_triplets() {
        let w = SparseMatrix::from_dense(3, 3, &[3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let svd = truncated_svd(&w, 3).unwrap();
        assert_eq!(svd.s.len(), 1);
    }

    #[test]
    fn rank_bounds() {
        let w = SparseMatrix::from_dense(2, 3, &[1.0; 6]);
        assert_eq!(truncated_svd(&w, 3), Err(LsiError::RankTooLarge { k: 3, max: 2 }));
        assert_eq!(truncated_svd(&w, 0), Err(LsiError::RankTooLarge { k: 0, max: 2 }));
    }

    #[test]
    fn wide_and_tall_agree() {
        // Same matrix and its transpose: singular values coincide.
        let data = [1.0, 2.0, 0.0, 0.5, 0.0, 1.0, 3.0, 0.0];
        let wide = SparseMatrix::from_dense(2, 4, &data);
        let mut t = vec![0.0; 8];
        for r in 0..2 {
            for c in 0..4 {
                t[c * 2 + r] = data[r * 4 + c];
            }
        }
        let tall = SparseMatrix::from_dense(4, 2, &t);
        let a = truncated_svd(&wide, 2).unwrap();
        let b = truncated_svd(&tall, 2).unwrap();
        for (x, y) in a.s.iter().zip(&b.s) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn signs_fixed_by_largest_left_entry() {
        let w = SparseMatrix::from_dense(2, 2, &[-2.0, 0.0, 0.0, 1.0]);
        let svd = truncated_svd(&w, 2).unwrap();
        assert!(svd.u_at(0, 0) > 0.0);
        assert!((svd.v_at(0, 0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn iteration_cap_reported() {
        // A large block problem cannot settle within two iterations.
        let n = 60;
        let data: Vec<f64> = (0..n * n).map(|i| ((i * 7919) % 97) as f64 / 97.0).collect();
        let w = SparseMatrix::from_dense(n, n, &data);
        assert_eq!(
            truncated_svd_with_cap(&w, 1, 2),
            Err(LsiError::ConvergenceFailure { iterations: 2 })
        );
        assert!(truncated_svd(&w, 1).is_ok());
    }
}
