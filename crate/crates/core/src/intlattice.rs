//! Exact integer-lattice utilities: Hermite normal form, kernels,
//! saturation, and membership for row lattices in ℤ^n.
//!
//! All arithmetic is arbitrary-precision (`BigInt`); this is where the
//! cocharacter lattices of central tori live, and saturation must be exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("vector length {vector_len} does not match matrix column count {cols}")]
    DimensionMismatch { vector_len: usize, cols: usize },
}

/// A rows×cols integer matrix, row-major, arbitrary precision.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::from(1));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// `row[a] -= q * row[b]`.
    fn subtract_multiple(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(a, j) - q * self.get(b, j);
            self.set(a, j, v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(
                f,
                "  {:?}",
                self.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>()
            )?;
        }
        write!(f, "]")
    }
}

/// Row-style Hermite normal form together with a unimodular transform `U`
/// such that `U * input = hnf`. The HNF has positive pivots, entries above
/// each pivot reduced into `[0, pivot)`, and zero rows at the bottom; the
/// row space is preserved and the result is the unique such form.
pub fn hnf_with_transform(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pivot_row = 0;
    for col in 0..h.cols {
        if pivot_row == h.rows {
            break;
        }
        // Euclidean elimination below pivot_row in this column.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..h.rows {
                if !h.get(i, col).is_zero() {
                    let better = match best {
                        None => true,
                        Some(j) => h.get(i, col).abs() < h.get(j, col).abs(),
                    };
                    if better {
                        best = Some(i);
                    }
                }
            }
            let Some(best) = best else { break };
            h.swap_rows(pivot_row, best);
            u.swap_rows(pivot_row, best);
            let mut done = true;
            for i in (pivot_row + 1)..h.rows {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = h.get(i, col).div_floor(h.get(pivot_row, col));
                h.subtract_multiple(i, pivot_row, &q);
                u.subtract_multiple(i, pivot_row, &q);
                if !h.get(i, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(pivot_row, col).is_zero() {
            continue;
        }
        if h.get(pivot_row, col).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        // Reduce the entries above the pivot into [0, pivot).
        for i in 0..pivot_row {
            let q = h.get(i, col).div_floor(h.get(pivot_row, col));
            h.subtract_multiple(i, pivot_row, &q);
            u.subtract_multiple(i, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Row-style Hermite normal form (shape-preserving; zero rows at bottom).
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    hnf_with_transform(m).0
}

/// Nonzero rows of the HNF: a canonical basis of the row lattice.
pub fn hnf_basis(m: &IntMatrix) -> IntMatrix {
    let h = hermite_normal_form(m);
    let nonzero: Vec<usize> = (0..h.rows).filter(|&i| !h.row_is_zero(i)).collect();
    let mut out = IntMatrix::zero(nonzero.len(), h.cols);
    for (k, &i) in nonzero.iter().enumerate() {
        for j in 0..h.cols {
            out.set(k, j, h.get(i, j).clone());
        }
    }
    out
}

/// Rank of the row lattice.
pub fn rank(m: &IntMatrix) -> usize {
    hnf_basis(m).rows
}

/// Basis (as rows) of the left kernel `{x : x · M = 0}`.
///
/// Rows of the transform aligned with zero HNF rows form a basis; an
/// integer kernel is automatically saturated.
pub fn left_kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf_with_transform(m);
    let zero_rows: Vec<usize> = (0..h.rows).filter(|&i| h.row_is_zero(i)).collect();
    let mut out = IntMatrix::zero(zero_rows.len(), m.rows);
    for (k, &i) in zero_rows.iter().enumerate() {
        for j in 0..m.rows {
            out.set(k, j, u.get(i, j).clone());
        }
    }
    hnf_basis(&out)
}

/// Basis (as rows) of the right kernel `{y : M · y = 0}`.
pub fn right_kernel(m: &IntMatrix) -> IntMatrix {
    left_kernel(&m.transpose())
}

/// Saturation of the row lattice: the lattice of all integer vectors some
/// positive multiple of which lies in the row space. Computed as the kernel
/// of the kernel, returned as HNF basis rows (no zero rows).
pub fn saturate(m: &IntMatrix) -> IntMatrix {
    let k = right_kernel(m);
    if k.rows == 0 {
        // Full rank: the saturation is all of ℤ^cols.
        return IntMatrix::identity(m.cols);
    }
    right_kernel(&k)
}

/// True iff `v` lies in the row lattice of `m` (exact integer solve by
/// back-substitution over the HNF).
pub fn contains(m: &IntMatrix, v: &[BigInt]) -> Result<bool, LatticeError> {
    if v.len() != m.cols {
        return Err(LatticeError::DimensionMismatch {
            vector_len: v.len(),
            cols: m.cols,
        });
    }
    let h = hnf_basis(m);
    let mut residue: Vec<BigInt> = v.to_vec();
    let mut row = 0;
    for col in 0..m.cols {
        if residue[col].is_zero() {
            continue;
        }
        // Find the basis row with its pivot in this column.
        let pivot_row = (row..h.rows).find(|&i| {
            (0..col).all(|j| h.get(i, j).is_zero()) && !h.get(i, col).is_zero()
        });
        let Some(i) = pivot_row else { return Ok(false) };
        row = i;
        let (q, r) = residue[col].div_rem(h.get(i, col));
        if !r.is_zero() {
            return Ok(false);
        }
        for j in col..m.cols {
            let nv = &residue[j] - &q * h.get(i, j);
            residue[j] = nv;
        }
    }
    Ok(residue.iter().all(|x| x.is_zero()))
}

/// Convenience wrapper for `i64` vectors.
pub fn contains_i64(m: &IntMatrix, v: &[i64]) -> Result<bool, LatticeError> {
    let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    contains(m, &big)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn hnf_fixed_points() {
        assert_eq!(
            hermite_normal_form(&mat(&[vec![2, 0], vec![0, 2]])),
            mat(&[vec![2, 0], vec![0, 2]])
        );
        assert_eq!(
            hermite_normal_form(&mat(&[vec![1, 1], vec![2, 2]])),
            mat(&[vec![1, 1], vec![0, 0]])
        );
        assert_eq!(
            hermite_normal_form(&mat(&[vec![0, 1], vec![1, 0]])),
            mat(&[vec![1, 0], vec![0, 1]])
        );
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let m = mat(&[vec![4, 6, 2], vec![6, 9, 3], vec![2, 0, 8]]);
        let (h, u) = hnf_with_transform(&m);
        // U * M == H
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let mut acc = BigInt::zero();
                for k in 0..m.rows() {
                    acc += u.get(i, k) * m.get(k, j);
                }
                assert_eq!(&acc, h.get(i, j));
            }
        }
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturate(&mat(&[vec![2, 2]])), mat(&[vec![1, 1]]));
        assert_eq!(
            saturate(&mat(&[vec![1, 0], vec![0, 1]])),
            IntMatrix::identity(2)
        );
        // Finite-index full-rank sublattice saturates to the full lattice.
        assert_eq!(
            saturate(&mat(&[vec![2, 0], vec![0, 3]])),
            IntMatrix::identity(2)
        );
    }

    #[test]
    fn saturation_is_idempotent() {
        for m in [
            mat(&[vec![2, 2]]),
            mat(&[vec![2, 0], vec![0, 3]]),
            mat(&[vec![2, 4, 6], vec![0, 10, 4]]),
            mat(&[vec![0, 0, 0]]),
        ] {
            let s = saturate(&m);
            assert_eq!(saturate(&s), s);
            assert_eq!(rank(&s), rank(&m));
        }
    }

    #[test]
    fn membership() {
        let m = mat(&[vec![1, 1]]);
        assert!(contains_i64(&m, &[2, 2]).unwrap());
        assert!(!contains_i64(&m, &[1, 0]).unwrap());
        let m = mat(&[vec![2, 0], vec![0, 2]]);
        assert!(!contains_i64(&m, &[1, 1]).unwrap());
        assert!(contains_i64(&m, &[4, -2]).unwrap());
        assert!(matches!(
            contains_i64(&m, &[1, 2, 3]),
            Err(LatticeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rowspace_contained_in_saturation() {
        let m = mat(&[vec![2, 4, 6], vec![0, 10, 4]]);
        let s = saturate(&m);
        for i in 0..m.rows() {
            assert!(contains(&s, m.row(i)).unwrap());
        }
    }

    #[test]
    fn saturation_brute_force_small() {
        // Oracle: v is in the saturation iff k·v is in the row lattice for
        // some 1 ≤ k ≤ 12 (amply large for these inputs).
        let cases = [
            mat(&[vec![2, 2]]),
            mat(&[vec![2, 0], vec![0, 3]]),
            mat(&[vec![3, 6], vec![0, 12]]),
            mat(&[vec![2, 4, 6]]),
        ];
        for m in cases {
            let s = saturate(&m);
            for a in -6i64..=6 {
                for b in -6i64..=6 {
                    let v: Vec<i64> = if m.cols() == 2 {
                        vec![a, b]
                    } else {
                        vec![a, b, a + b]
                    };
                    let in_sat = contains_i64(&s, &v).unwrap();
                    let oracle = (1..=12).any(|k| {
                        let kv: Vec<i64> = v.iter().map(|&x| k * x).collect();
                        contains_i64(&m, &kv).unwrap()
                    });
                    if oracle {
                        assert!(in_sat, "missing {:?}", v);
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_kernel_shapes() {
        let m = mat(&[vec![1, 2, 3]]);
        let k = right_kernel(&m);
        assert_eq!(k.rows(), 2);
        // Kernel vectors are orthogonal to the row.
        for i in 0..k.rows() {
            let dot: BigInt = (0..3).map(|j| k.get(i, j) * m.get(0, j)).sum();
            assert!(dot.is_zero());
        }
        let empty = IntMatrix::zero(0, 3);
        assert_eq!(right_kernel(&empty), IntMatrix::identity(3));
    }
}
