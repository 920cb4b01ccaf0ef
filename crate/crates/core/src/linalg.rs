//! Minimal dense matrix support.
//!
//! Every matrix in this problem is tiny (tens of rows at most), so a plain
//! row-major `Vec` with straightforward loops is all that is needed. The same
//! container serves real matrices (`Mat<T>`) and complex ones
//! (`Mat<Complex<T>>`).

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};
use num_traits::Zero;
use std::ops::{Add, Mul};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Copy + Zero> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> S>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

impl<S: Copy + Zero + Add<Output = S> + Mul<Output = S>> Mat<S> {
    pub fn transpose(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(t, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }
}

impl<T: Real> Mat<T> {
    /// Apply a real matrix to a complex vector, rail by rail.
    pub fn apply_complex(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        assert_eq!(self.cols, v.len(), "apply_complex dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut re = T::zero();
                let mut im = T::zero();
                for (a, z) in self.row(i).iter().zip(v) {
                    re += *a * z.re;
                    im += *a * z.im;
                }
                Cx::new(re, im)
            })
            .collect()
    }

    /// Numerical rank via row echelon with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let scale = a.data.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if scale.is_zero() {
            return 0;
        }
        let cutoff = scale * T::of(tol);
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let (p, pval) = (rank..a.rows)
                .map(|r| (r, a.get(r, col).abs()))
                .fold((rank, T::zero()), |best, cand| {
                    if cand.1 > best.1 {
                        cand
                    } else {
                        best
                    }
                });
            if pval <= cutoff {
                continue;
            }
            for j in 0..a.cols {
                let tmp = a.get(rank, j);
                a.set(rank, j, a.get(p, j));
                a.set(p, j, tmp);
            }
            for r in 0..a.rows {
                if r == rank {
                    continue;
                }
                let factor = a.get(r, col) / a.get(rank, col);
                if factor.is_zero() {
                    continue;
                }
                for j in col..a.cols {
                    let v = a.get(r, j) - factor * a.get(rank, j);
                    a.set(r, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Invert a small square matrix by Gauss-Jordan with partial pivoting.
    ///
    /// Returns the inverse and a pivot-ratio condition estimate.
    pub fn invert(&self) -> Result<(Mat<T>, T)> {
        assert_eq!(self.rows, self.cols, "invert requires a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() });
        let mut max_pivot = T::zero();
        let mut min_pivot = T::infinity();
        for col in 0..n {
            let (p, pval) = (col..n)
                .map(|r| (r, a.get(r, col).abs()))
                .fold((col, T::zero()), |best, cand| {
                    if cand.1 > best.1 {
                        cand
                    } else {
                        best
                    }
                });
            if pval.is_zero() || !pval.is_finite() {
                return Err(Error::RankDeficient);
            }
            max_pivot = max_pivot.max(pval);
            min_pivot = min_pivot.min(pval);
            for j in 0..n {
                let tmp = a.get(col, j);
                a.set(col, j, a.get(p, j));
                a.set(p, j, tmp);
                let tmp = inv.get(col, j);
                inv.set(col, j, inv.get(p, j));
                inv.set(p, j, tmp);
            }
            let d = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / d);
                inv.set(col, j, inv.get(col, j) / d);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(r, j) - f * a.get(col, j);
                    a.set(r, j, v);
                    let v = inv.get(r, j) - f * inv.get(col, j);
                    inv.set(r, j, v);
                }
            }
        }
        Ok((inv, max_pivot / min_pivot))
    }
}

impl<T: Real> Mat<Cx<T>> {
    pub fn hermitian(&self) -> Mat<Cx<T>> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |a, z| a + z.norm_sqr())
            .sqrt()
    }
}
