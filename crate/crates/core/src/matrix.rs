//! Dense row-major matrices over a generic scalar.
//!
//! Field-scalar matrices get exact Gauss–Jordan machinery (rref, kernel,
//! inverse, linear solving); integral-domain matrices get the fraction-free
//! Bareiss determinant, which is also what the characteristic polynomial
//! runs on with polynomial entries.

use crate::error::{CoreError, Result};
use crate::scalar::{ExactDiv, Field, Ring};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(CoreError::Dimension(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(CoreError::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn column_vector(v: Vec<T>) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            entries: v,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::Dimension(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.map(|x| -x.clone()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(CoreError::Dimension(format!(
                "multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out: Matrix<T> = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + term;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(CoreError::Dimension(format!(
                "apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect())
    }

    /// `self^n` by repeated multiplication (exact scalars make squaring
    /// tricks pointless at these dimensions).
    pub fn pow(&self, n: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(CoreError::Dimension("pow of non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..n {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Kronecker product, row-major block convention:
    /// entry ((i1,i2),(j1,j2)) = a[i1,j1] * b[i2,j2].
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut out = Matrix::zero(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out[(i1 * other.rows + i2, j1 * other.cols + j2)] =
                            self[(i1, j1)].clone() * other[(i2, j2)].clone();
                    }
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.entries[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.entries[i * self.cols + j]
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Ring> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        self.checked_add(rhs).expect("matrix shape mismatch")
    }
}

impl<T: Ring> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        self.checked_sub(rhs).expect("matrix shape mismatch")
    }
}

impl<T: Ring> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.checked_mul(rhs).expect("matrix shape mismatch")
    }
}

impl<T: Ring> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

/// Outcome of an exact linear solve (inconsistency is a value, not an error).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution<T> {
    /// Exactly one solution.
    Unique(Matrix<T>),
    /// No solution.
    Inconsistent,
    /// Consistent with `free_vars` degrees of freedom; `particular` is the
    /// solution with all free variables set to zero.
    Underdetermined {
        free_vars: usize,
        particular: Matrix<T>,
    },
}

impl<T: Field> Matrix<T> {
    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.entries.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv_pivot = T::one() / self[(r, c)].clone();
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].clone() * inv_pivot.clone();
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let factor = self[(i, c)].clone();
                    for j in c..self.cols {
                        let delta = factor.clone() * self[(r, j)].clone();
                        self[(i, j)] = self[(i, j)].clone() - delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Solve `self * x = b` exactly, describing the whole solution set.
    pub fn solve(&self, b: &Matrix<T>) -> Result<LinearSolution<T>> {
        if self.rows != b.rows {
            return Err(CoreError::Dimension(format!(
                "solve: lhs has {} rows, rhs has {}",
                self.rows, b.rows
            )));
        }
        let n = self.cols;
        let k = b.cols;
        let mut aug = Matrix::zero(self.rows, n + k);
        for i in 0..self.rows {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..k {
                aug[(i, n + j)] = b[(i, j)].clone();
            }
        }
        let pivots = aug.rref();
        // A pivot in the augmented block means 0 = 1 somewhere.
        if pivots.iter().any(|&c| c >= n) {
            return Ok(LinearSolution::Inconsistent);
        }
        let rank = pivots.len();
        let mut particular = Matrix::zero(n, k);
        for (r, &c) in pivots.iter().enumerate() {
            for j in 0..k {
                particular[(c, j)] = aug[(r, n + j)].clone();
            }
        }
        if rank == n {
            Ok(LinearSolution::Unique(particular))
        } else {
            Ok(LinearSolution::Underdetermined {
                free_vars: n - rank,
                particular,
            })
        }
    }

    /// Basis of the right kernel, one column vector per free variable,
    /// in free-variable order (deterministic).
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(r, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(CoreError::Dimension("inverse of non-square matrix".into()));
        }
        match self.solve(&Self::identity(self.rows))? {
            LinearSolution::Unique(inv) => Ok(inv),
            _ => Err(CoreError::Model("matrix is singular".into())),
        }
    }
}

/// Fraction-free Bareiss determinant over an integral domain. The interior
/// divisions by the previous pivot are exact; with polynomial entries this
/// is the characteristic-polynomial workhorse.
pub fn bareiss_det<T>(m: &Matrix<T>) -> Result<T>
where
    T: Ring + ExactDiv,
{
    if !m.is_square() {
        return Err(CoreError::Dimension(
            "determinant of non-square matrix".into(),
        ));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(T::one());
    }
    let mut a = m.clone();
    let mut prev = T::one();
    let mut sign_flip = false;
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                return Ok(T::zero());
            };
            for j in 0..n {
                let tmp = a[(k, j)].clone();
                a[(k, j)] = a[(p, j)].clone();
                a[(p, j)] = tmp;
            }
            sign_flip = !sign_flip;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num =
                    a[(k, k)].clone() * a[(i, j)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                a[(i, j)] = num.exact_div(&prev);
            }
            a[(i, k)] = T::zero();
        }
        prev = a[(k, k)].clone();
    }
    let det = a[(n - 1, n - 1)].clone();
    Ok(if sign_flip { -det } else { det })
}
