//! The Poisson matrix `J₂ₘ = [[0, Iₘ], [-Iₘ, 0]]`, applied implicitly.
//!
//! `J` is never stored. Left multiplication is a block row swap with a sign
//! flip, right multiplication a block column swap.

use crate::error::{Error, Result};
use crate::matkit::DenseMatrix;
use crate::scalar::Real;

/// Implicit `J₂ₘ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    pub m: usize,
}

impl PoissonStructure {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    /// `J·a`.
    pub fn left<T: Real>(&self, a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if a.rows() != 2 * self.m {
            return Err(Error::dims("apply_J_left", format!("{} rows", 2 * self.m), a.rows()));
        }
        Ok(j_left(a))
    }

    /// `Jᵀ·a = -J·a`.
    pub fn left_tr<T: Real>(&self, a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        Ok(-self.left(a)?)
    }

    /// `a·J`.
    pub fn right<T: Real>(&self, a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if a.cols() != 2 * self.m {
            return Err(Error::dims("apply_J_right", format!("{} cols", 2 * self.m), a.cols()));
        }
        Ok(j_right(a))
    }

    /// Dense `J₂ₘ`; for tests and tiny problems only.
    pub fn to_dense<T: Real>(&self) -> DenseMatrix<T> {
        poisson_dense(self.m)
    }
}

/// `J₂ₘ·a` for `a` with `2m` rows.
pub fn apply_j_left<T: Real>(m: usize, a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    PoissonStructure::new(m).left(a)
}

/// `J·a` where `m` is read off the row count. Panics on an odd row count.
pub(crate) fn j_left<T: Real>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    let rows = a.rows();
    assert!(rows % 2 == 0, "J applied to a matrix with odd row count {rows}");
    let h = rows / 2;
    let mut out = DenseMatrix::zeros(rows, a.cols());
    for j in 0..a.cols() {
        let src = a.column(j);
        let dst = out.column_mut(j);
        for i in 0..h {
            dst[i] = src[h + i];
            dst[h + i] = -src[i];
        }
    }
    out
}

/// `Jᵀ·a`.
pub(crate) fn jt_left<T: Real>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    let rows = a.rows();
    assert!(rows % 2 == 0, "J applied to a matrix with odd row count {rows}");
    let h = rows / 2;
    let mut out = DenseMatrix::zeros(rows, a.cols());
    for j in 0..a.cols() {
        let src = a.column(j);
        let dst = out.column_mut(j);
        for i in 0..h {
            dst[i] = -src[h + i];
            dst[h + i] = src[i];
        }
    }
    out
}

/// `a·J`: `[A₁ A₂]·J = [-A₂ A₁]`.
pub(crate) fn j_right<T: Real>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    let cols = a.cols();
    assert!(cols % 2 == 0, "J applied to a matrix with odd column count {cols}");
    let h = cols / 2;
    let mut out = DenseMatrix::zeros(a.rows(), cols);
    for j in 0..h {
        let right = a.column(h + j).to_vec();
        let left = a.column(j).to_vec();
        out.column_mut(j)
            .iter_mut()
            .zip(&right)
            .for_each(|(o, &x)| *o = -x);
        out.column_mut(h + j).copy_from_slice(&left);
    }
    out
}

pub fn poisson_dense<T: Real>(m: usize) -> DenseMatrix<T> {
    let mut j = DenseMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        j[(i, m + i)] = T::one();
        j[(m + i, i)] = -T::one();
    }
    j
}

/// `½(A + Aᵀ)`.
pub fn sym_part<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "sym_part",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let h = T::half();
    Ok(DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        h * (a[(i, j)] + a[(j, i)])
    }))
}

/// `½(A - Aᵀ)`.
pub fn skew_part<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "skew_part",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let h = T::half();
    Ok(DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        h * (a[(i, j)] - a[(j, i)])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::rand_gaussian;

    type M = DenseMatrix<f64>;

    #[test]
    fn j_times_identity_is_j() {
        let j = apply_j_left(1, &M::identity(2)).unwrap();
        assert_eq!(j.to_rows(), vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let jj = apply_j_left(1, &j).unwrap();
        assert_eq!(jj, -M::identity(2));
    }

    #[test]
    fn implicit_actions_match_dense_j() {
        let j: M = poisson_dense(2);
        let a = rand_gaussian::<f64>(4, 3, 11);
        assert_eq!(apply_j_left(2, &a).unwrap(), j.matmul(&a));
        assert_eq!(jt_left(&a), j.transpose().matmul(&a));
        let twice = apply_j_left(2, &apply_j_left(2, &a).unwrap()).unwrap();
        assert_eq!(twice, -&a);
        let b = rand_gaussian::<f64>(3, 4, 12);
        assert_eq!(j_right(&b), b.matmul(&j));
    }

    #[test]
    fn rejects_wrong_row_count() {
        assert!(apply_j_left(2, &M::zeros(3, 2)).is_err());
        assert!(apply_j_left(1, &M::zeros(4, 2)).is_err());
        assert!(PoissonStructure::new(1).right(&M::zeros(2, 3)).is_err());
    }

    #[test]
    fn sym_and_skew_parts() {
        let a = M::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(sym_part(&a).unwrap().to_rows(), vec![vec![0.0, 0.5], vec![0.5, 0.0]]);
        assert_eq!(skew_part(&a).unwrap().to_rows(), vec![vec![0.0, 0.5], vec![-0.5, 0.0]]);

        let s = M::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(sym_part(&s).unwrap(), s);
        assert_eq!(skew_part(&s).unwrap(), M::zeros(2, 2));

        let r = rand_gaussian::<f64>(7, 7, 3);
        let back = sym_part(&r).unwrap() + skew_part(&r).unwrap();
        assert!((&back - &r).frobenius_norm() <= 1e-15 * r.frobenius_norm());
        assert!(sym_part(&M::zeros(2, 3)).is_err());
        assert!(skew_part(&M::zeros(2, 3)).is_err());
    }
}
