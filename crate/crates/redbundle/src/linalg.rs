//! Small dense matrices over a generic scalar.
//!
//! Every linear system in this crate is tiny (dimension ≤ 10), so a plain
//! row-major matrix with partial-pivot LU is both simpler and easier to audit
//! than pulling in a full linear-algebra stack. Solves favour robustness over
//! speed: each call factors afresh, no state is cached.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    a: Vec<S>,
}

impl<S: Real> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Build from a nested slice; every row must have the same length.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Mat::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Matrix-vector product `self · x`.
    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(S::zero(), |acc, c| acc + self[(r, c)] * x[c])
            })
            .collect()
    }

    /// Vector-matrix product `xᵀ · self`, returned as a plain vector.
    pub fn vec_mul(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(self.rows, x.len());
        (0..self.cols)
            .map(|c| {
                (0..self.rows).fold(S::zero(), |acc, r| acc + x[r] * self[(r, c)])
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &Mat<S>) -> Mat<S> {
        debug_assert_eq!(self.cols, other.rows);
        Mat::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).fold(S::zero(), |acc, k| acc + self[(r, k)] * other[(k, c)])
        })
    }

    pub fn add(&self, other: &Mat<S>) -> Mat<S> {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + other[(r, c)])
    }

    pub fn sub(&self, other: &Mat<S>) -> Mat<S> {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - other[(r, c)])
    }

    pub fn scale(&self, s: S) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * s)
    }

    /// Largest absolute entry.
    pub fn inf_norm(&self) -> S {
        self.a.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|x| x.is_finite())
    }

    /// `‖self + selfᵀ‖∞`, the antisymmetry defect of a square matrix.
    pub fn antisymmetry_defect(&self) -> S {
        debug_assert_eq!(self.rows, self.cols);
        let mut m = S::zero();
        for r in 0..self.rows {
            for c in 0..self.cols {
                m = m.max((self[(r, c)] + self[(c, r)]).abs());
            }
        }
        m
    }

    /// Quadratic pairing `uᵀ · self · w`.
    pub fn pair(&self, u: &[S], w: &[S]) -> S {
        crate::scalar::dot(&self.mul_vec(w), u)
    }

    /// LU factorization with partial pivoting; returns (packed LU, permutation, sign).
    fn lu(&self) -> Result<(Vec<S>, Vec<usize>, S)> {
        if self.rows != self.cols {
            return Err(Error::Dimension {
                context: "lu factorization (square matrix required)",
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut lu = self.a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = S::one();
        for k in 0..n {
            let mut pivot = k;
            let mut best = lu[k * n + k].abs();
            for r in (k + 1)..n {
                let v = lu[r * n + k].abs();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if !(best > S::zero()) || !best.is_finite() {
                return Err(Error::Singular {
                    context: "lu factorization",
                });
            }
            if pivot != k {
                for c in 0..n {
                    lu.swap(k * n + c, pivot * n + c);
                }
                perm.swap(k, pivot);
                sign = -sign;
            }
            let d = lu[k * n + k];
            for r in (k + 1)..n {
                let factor = lu[r * n + k] / d;
                lu[r * n + k] = factor;
                for c in (k + 1)..n {
                    let upd = lu[r * n + c] - factor * lu[k * n + c];
                    lu[r * n + c] = upd;
                }
            }
        }
        Ok((lu, perm, sign))
    }

    /// Solve `self · x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.rows;
        if b.len() != n {
            return Err(Error::Dimension {
                context: "linear solve right-hand side",
                expected: n,
                got: b.len(),
            });
        }
        let (lu, perm, _) = self.lu()?;
        let mut x: Vec<S> = perm.iter().map(|&p| b[p]).collect();
        for r in 1..n {
            for c in 0..r {
                let upd = x[r] - lu[r * n + c] * x[c];
                x[r] = upd;
            }
        }
        for r in (0..n).rev() {
            x[r] = x[r] / lu[r * n + r];
            for c in 0..r {
                let upd = x[c] - lu[c * n + r] * x[r];
                x[c] = upd;
            }
        }
        Ok(x)
    }

    /// Determinant via LU; returns zero for singular matrices.
    pub fn det(&self) -> S {
        match self.lu() {
            Ok((lu, _, sign)) => {
                let n = self.rows;
                (0..n).fold(sign, |acc, i| acc * lu[i * n + i])
            }
            Err(_) => S::zero(),
        }
    }

    /// Matrix inverse, column by column.
    pub fn inverse(&self) -> Result<Mat<S>> {
        let n = self.rows;
        let mut inv = Mat::zeros(n, n);
        for c in 0..n {
            let mut e = vec![S::zero(); n];
            e[c] = S::one();
            let col = self.solve(&e)?;
            for r in 0..n {
                inv[(r, c)] = col[r];
            }
        }
        Ok(inv)
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.a[r * self.cols + c]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.a[r * self.cols + c]
    }
}
