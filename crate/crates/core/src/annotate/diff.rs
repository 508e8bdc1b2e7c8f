//! Line diff with Myers' greedy algorithm, using the linear-space
//! bisection (middle snake) refinement.
//!
//! Where several shortest edit scripts exist, the forward search takes the
//! deletion on ties, so deletions are preferred over insertions.

use std::ops::Range;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffOp {
    Equal { old: Range<usize>, new: Range<usize> },
    Delete { old: Range<usize> },
    Insert { new: Range<usize> },
}

/// Index pairs `(i, j)` with `old[i] == new[j]` forming a longest common
/// subsequence, increasing in both coordinates.
pub fn matching_pairs<T: PartialEq>(old: &[T], new: &[T]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    diff_range(old, new, 0, old.len(), 0, new.len(), &mut out);
    out
}

/// Edit script grouped into runs; within a change, deletions come first.
pub fn diff<T: PartialEq>(old: &[T], new: &[T]) -> Vec<DiffOp> {
    let pairs = matching_pairs(old, new);
    let mut ops = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut k = 0;
    while k <= pairs.len() {
        let (mi, mj) = pairs.get(k).copied().unwrap_or((old.len(), new.len()));
        if i < mi {
            ops.push(DiffOp::Delete { old: i..mi });
        }
        if j < mj {
            ops.push(DiffOp::Insert { new: j..mj });
        }
        if k == pairs.len() {
            break;
        }
        let mut run = 1;
        while k + run < pairs.len() && pairs[k + run] == (mi + run, mj + run) {
            run += 1;
        }
        ops.push(DiffOp::Equal { old: mi..mi + run, new: mj..mj + run });
        i = mi + run;
        j = mj + run;
        k += run;
    }
    ops
}

fn diff_range<T: PartialEq>(
    a: &[T],
    b: &[T],
    mut a_lo: usize,
    mut a_hi: usize,
    mut b_lo: usize,
    mut b_hi: usize,
    out: &mut Vec<(usize, usize)>,
) {
    while a_lo < a_hi && b_lo < b_hi && a[a_lo] == b[b_lo] {
        out.push((a_lo, b_lo));
        a_lo += 1;
        b_lo += 1;
    }
    let mut suffix = 0;
    while a_hi > a_lo && b_hi > b_lo && a[a_hi - 1] == b[b_hi - 1] {
        a_hi -= 1;
        b_hi -= 1;
        suffix += 1;
    }
    if a_lo < a_hi && b_lo < b_hi {
        if let Some((x, y)) = bisect(&a[a_lo..a_hi], &b[b_lo..b_hi]) {
            diff_range(a, b, a_lo, a_lo + x, b_lo, b_lo + y, out);
            diff_range(a, b, a_lo + x, a_hi, b_lo + y, b_hi, out);
        }
    }
    out.extend((0..suffix).map(|s| (a_hi + s, b_hi + s)));
}

/// Finds a point on a shortest edit path where the forward and reverse
/// searches meet. `None` means the inputs share no element.
fn bisect<T: PartialEq>(a: &[T], b: &[T]) -> Option<(usize, usize)> {
    let n = a.len() as isize;
    let m = b.len() as isize;
    let max_d = (n + m + 1) / 2;
    let offset = max_d;
    let len = (2 * max_d + 2) as usize;
    let mut fwd = vec![-1isize; len];
    let mut rev = vec![-1isize; len];
    fwd[(offset + 1) as usize] = 0;
    rev[(offset + 1) as usize] = 0;
    let delta = n - m;
    let front = delta % 2 != 0;
    let (mut k1_start, mut k1_end, mut k2_start, mut k2_end) = (0isize, 0isize, 0isize, 0isize);

    for d in 0..max_d {
        let mut k1 = -d + k1_start;
        while k1 <= d - k1_end {
            let i = (offset + k1) as usize;
            let mut x1 = if k1 == -d || (k1 != d && fwd[i - 1] < fwd[i + 1]) {
                fwd[i + 1]
            } else {
                fwd[i - 1] + 1
            };
            let mut y1 = x1 - k1;
            while x1 < n && y1 < m && a[x1 as usize] == b[y1 as usize] {
                x1 += 1;
                y1 += 1;
            }
            fwd[i] = x1;
            if x1 > n {
                k1_end += 2;
            } else if y1 > m {
                k1_start += 2;
            } else if front {
                let j = offset + delta - k1;
                if j >= 0 && (j as usize) < len && rev[j as usize] != -1 && x1 >= n - rev[j as usize] {
                    return Some((x1 as usize, y1 as usize));
                }
            }
            k1 += 2;
        }

        let mut k2 = -d + k2_start;
        while k2 <= d - k2_end {
            let i = (offset + k2) as usize;
            let mut x2 = if k2 == -d || (k2 != d && rev[i - 1] < rev[i + 1]) {
                rev[i + 1]
            } else {
                rev[i - 1] + 1
            };
            let mut y2 = x2 - k2;
            while x2 < n && y2 < m && a[(n - x2 - 1) as usize] == b[(m - y2 - 1) as usize] {
                x2 += 1;
                y2 += 1;
            }
            rev[i] = x2;
            if x2 > n {
                k2_end += 2;
            } else if y2 > m {
                k2_start += 2;
            } else if !front {
                let j = offset + delta - k2;
                if j >= 0 && (j as usize) < len && fwd[j as usize] != -1 {
                    let x1 = fwd[j as usize];
                    let y1 = offset + x1 - j;
                    if x1 >= n - x2 {
                        return Some((x1 as usize, y1 as usize));
                    }
                }
            }
            k2 += 2;
        }
    }
    None
}
