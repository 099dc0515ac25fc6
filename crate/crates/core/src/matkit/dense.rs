//! Column-major dense real matrix.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense `rows x cols` matrix stored column-major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major nested data, mostly for tests and fixtures.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::dims("from_rows", "rows of equal length", "ragged rows"));
        }
        Ok(Self::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(
                "from_col_major",
                rows * cols,
                data.len(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Raw column-major storage.
    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let out_col = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let b = rhs.data[j * rhs.rows + k];
                if b == T::zero() {
                    continue;
                }
                let a_col = &self.data[k * self.rows..(k + 1) * self.rows];
                for (o, &a) in out_col.iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `selfᵀ * rhs` without materializing the transpose.
    pub fn tr_matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.rows, rhs.rows,
            "tr_matmul: ({}x{})ᵀ times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        Self::from_fn(self.cols, rhs.cols, |i, j| dot(self.column(i), rhs.column(j)))
    }

    /// `self * rhsᵀ`.
    pub fn matmul_tr(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "matmul_tr: inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.rows);
        for k in 0..self.cols {
            let a_col = self.column(k);
            for j in 0..rhs.rows {
                let b = rhs[(j, k)];
                if b == T::zero() {
                    continue;
                }
                let out_col = &mut out.data[j * self.rows..(j + 1) * self.rows];
                for (o, &a) in out_col.iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Frobenius inner product `tr(selfᵀ rhs)`.
    pub fn inner(&self, rhs: &Self) -> T {
        assert_eq!(self.shape(), rhs.shape(), "inner: shape mismatch");
        dot(&self.data, &rhs.data)
    }

    pub fn frobenius_norm(&self) -> T {
        // Scaled accumulation keeps tiny and huge entries from under/overflowing.
        let scale = self.max_abs();
        if scale == T::zero() || !scale.is_finite() {
            return scale;
        }
        let s: T = self.data.iter().map(|&x| (x / scale) * (x / scale)).sum();
        scale * s.sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> T {
        (0..self.cols)
            .map(|j| self.column(j).iter().map(|x| x.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn scale_mut(&mut self, s: T) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: T, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "axpy: shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// Copy of the block starting at `(r0, c0)` with the given shape.
    pub fn block(&self, r0: usize, c0: usize, nrows: usize, ncols: usize) -> Self {
        assert!(r0 + nrows <= self.rows && c0 + ncols <= self.cols, "block out of range");
        Self::from_fn(nrows, ncols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, src: &Self) {
        assert!(
            r0 + src.rows <= self.rows && c0 + src.cols <= self.cols,
            "set_block out of range"
        );
        for j in 0..src.cols {
            for i in 0..src.rows {
                self[(r0 + i, c0 + j)] = src[(i, j)];
            }
        }
    }

    /// Columns in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.column(j));
        }
        Self {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// `[self, rhs]`.
    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "hstack: row counts differ");
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Self {
            rows: self.rows,
            cols: self.cols + rhs.cols,
            data,
        }
    }

    /// `[self; rhs]`.
    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "vstack: column counts differ");
        let rows = self.rows + rhs.rows;
        Self::from_fn(rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)]
            } else {
                rhs[(i - self.rows, j)]
            }
        })
    }

    pub fn cast<U: Real>(&self) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&x| U::lit(x.to_f64_lossy()))
                .collect(),
        }
    }

    /// Row-major nested copy.
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)]).collect())
            .collect()
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl<T: fmt::Debug> fmt::Debug for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            write!(f, " ")?;
            for j in 0..self.cols.min(12) {
                write!(f, " {:>12.5?}", self.data[j * self.rows + i])?;
            }
            writeln!(f, "{}", if self.cols > 12 { " ..." } else { "" })?;
        }
        if self.rows > 12 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

macro_rules! elementwise {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<T: Real> $tr<&DenseMatrix<T>> for &DenseMatrix<T> {
            type Output = DenseMatrix<T>;
            fn $method(self, rhs: &DenseMatrix<T>) -> DenseMatrix<T> {
                assert_eq!(self.shape(), rhs.shape(), concat!(stringify!($method), ": shape mismatch"));
                DenseMatrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a $op b).collect(),
                }
            }
        }
        impl<T: Real> $tr<DenseMatrix<T>> for DenseMatrix<T> {
            type Output = DenseMatrix<T>;
            fn $method(self, rhs: DenseMatrix<T>) -> DenseMatrix<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: Real> $tr<&DenseMatrix<T>> for DenseMatrix<T> {
            type Output = DenseMatrix<T>;
            fn $method(self, rhs: &DenseMatrix<T>) -> DenseMatrix<T> {
                (&self).$method(rhs)
            }
        }
        impl<T: Real> $tr<DenseMatrix<T>> for &DenseMatrix<T> {
            type Output = DenseMatrix<T>;
            fn $method(self, rhs: DenseMatrix<T>) -> DenseMatrix<T> {
                self.$method(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl<T: Real> AddAssign<&DenseMatrix<T>> for DenseMatrix<T> {
    fn add_assign(&mut self, rhs: &DenseMatrix<T>) {
        self.axpy(T::one(), rhs);
    }
}

impl<T: Real> SubAssign<&DenseMatrix<T>> for DenseMatrix<T> {
    fn sub_assign(&mut self, rhs: &DenseMatrix<T>) {
        self.axpy(-T::one(), rhs);
    }
}

impl<T: Real> Mul<&DenseMatrix<T>> for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn mul(self, rhs: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Mul<T> for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn mul(self, s: T) -> DenseMatrix<T> {
        self.scale(s)
    }
}

impl<T: Real> Mul<T> for DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn mul(mut self, s: T) -> DenseMatrix<T> {
        self.scale_mut(s);
        self
    }
}

impl<T: Real> Neg for DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn neg(self) -> DenseMatrix<T> {
        self * -T::one()
    }
}

impl<T: Real> Neg for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn neg(self) -> DenseMatrix<T> {
        self.scale(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = DenseMatrix<f64>;

    fn m(rows: &[&[f64]]) -> M {
        M::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn products_agree_with_explicit_transposes() {
        let a = m(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let b = m(&[&[1.0, 0.5], &[-1.0, 2.0]]);
        let c = m(&[&[0.0, 1.0, -2.0], &[3.0, 1.0, 1.0]]);
        assert_eq!(b.matmul(&a), m(&[&[3.0, 4.5, 6.0], &[7.0, 8.0, 9.0]]));
        assert_eq!(a.tr_matmul(&c), a.transpose().matmul(&c));
        assert_eq!(a.matmul_tr(&c), a.matmul(&c.transpose()));
    }

    #[test]
    fn norms() {
        let a = m(&[&[3.0, -4.0], &[0.0, 0.0]]);
        assert_eq!(a.frobenius_norm(), 5.0);
        assert_eq!(a.max_abs(), 4.0);
        assert_eq!(a.norm_1(), 4.0);
        assert_eq!(M::zeros(3, 2).frobenius_norm(), 0.0);
        let tiny = m(&[&[1e-200, 1e-200]]);
        assert!((tiny.frobenius_norm() / (2f64.sqrt() * 1e-200) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stacking_and_blocks() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let h = a.hstack(&a);
        assert_eq!(h.shape(), (2, 4));
        assert_eq!(h.block(0, 2, 2, 2), a);
        let v = a.vstack(&a.scale(2.0));
        assert_eq!(v[(3, 1)], 8.0);
        assert_eq!(a.select_columns(&[1, 0]), m(&[&[2.0, 1.0], &[4.0, 3.0]]));
    }
}
