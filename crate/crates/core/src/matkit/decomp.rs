//! LU, Cholesky and Householder QR factorizations.

use crate::error::{Error, Result};
use crate::matkit::dense::dot;
use crate::matkit::DenseMatrix;
use crate::scalar::Real;

/// Relative pivot threshold: a pivot below `PIVOT_RTOL * max|aᵢⱼ|` marks the
/// matrix as numerically singular.
pub const PIVOT_RTOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
    norm_1: T,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                op: "lu",
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let threshold = T::lit(PIVOT_RTOL) * a.max_abs();
        let norm_1 = a.norm_1();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_abs > threshold) {
                return Err(Error::NotInvertible {
                    pivot: pivot_abs.to_f64_lossy(),
                    threshold: threshold.to_f64_lossy(),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] /= pivot;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == T::zero() {
                    continue;
                }
                for i in k + 1..n {
                    let lik = lu[(i, k)];
                    lu[(i, j)] -= lik * ukj;
                }
            }
        }
        Ok(Self { lu, perm, norm_1 })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let n = self.dim();
        if b.rows() != n {
            return Err(Error::dims("lu solve", format!("{n} rows"), b.rows()));
        }
        let mut x = b.clone();
        for j in 0..b.cols() {
            let col = x.column_mut(j);
            let permuted: Vec<T> = self.perm.iter().map(|&p| b[(p, j)]).collect();
            col.copy_from_slice(&permuted);
            for k in 0..n {
                let v = col[k];
                for i in k + 1..n {
                    col[i] -= self.lu[(i, k)] * v;
                }
            }
            for k in (0..n).rev() {
                col[k] /= self.lu[(k, k)];
                let v = col[k];
                for i in 0..k {
                    col[i] -= self.lu[(i, k)] * v;
                }
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> DenseMatrix<T> {
        self.solve(&DenseMatrix::identity(self.dim()))
            .expect("identity has matching rows")
    }

    /// `‖A‖₁·‖A⁻¹‖₁`, computed exactly through the inverse. Meant for the
    /// small inner systems of the retractions.
    pub fn condition_1(&self) -> T {
        self.norm_1 * self.inverse().norm_1()
    }
}

/// Solves `A·X = B` through pivoted LU.
pub fn solve_dense<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    Lu::factor(a)?.solve(b)
}

/// Lower Cholesky factor, `A = L·Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: DenseMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                op: "cholesky",
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut l = DenseMatrix::zeros(n, n);
        // Left-looking, column oriented.
        let mut work = vec![T::zero(); n];
        for j in 0..n {
            work[j..].copy_from_slice(&a.column(j)[j..]);
            for k in 0..j {
                let ljk = l[(j, k)];
                if ljk == T::zero() {
                    continue;
                }
                let lk = &l.column(k)[j..];
                for (w, &v) in work[j..].iter_mut().zip(lk) {
                    *w -= ljk * v;
                }
            }
            let d = work[j];
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let d = d.sqrt();
            let col = &mut l.column_mut(j)[j..];
            col[0] = d;
            for (c, &w) in col[1..].iter_mut().zip(&work[j + 1..]) {
                *c = w / d;
            }
        }
        Ok(Self { l })
    }

    pub fn factor_l(&self) -> &DenseMatrix<T> {
        &self.l
    }

    pub fn into_l(self) -> DenseMatrix<T> {
        self.l
    }

    pub fn solve(&self, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let n = self.l.rows();
        if b.rows() != n {
            return Err(Error::dims("cholesky solve", format!("{n} rows"), b.rows()));
        }
        let mut x = b.clone();
        for j in 0..b.cols() {
            let col = x.column_mut(j);
            for k in 0..n {
                col[k] /= self.l[(k, k)];
                let v = col[k];
                for i in k + 1..n {
                    col[i] -= self.l[(i, k)] * v;
                }
            }
            for k in (0..n).rev() {
                let s = dot(&self.l.column(k)[k + 1..], &col[k + 1..]);
                col[k] = (col[k] - s) / self.l[(k, k)];
            }
        }
        Ok(x)
    }

    /// Spectral condition number estimate from the factor's diagonal,
    /// `(max lᵢᵢ / min lᵢᵢ)²`. A lower bound on the true condition number.
    pub fn condition_lower_bound(&self) -> T {
        let n = self.l.rows();
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        for i in 0..n {
            let d = self.l[(i, i)];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let r = hi / lo;
        r * r
    }
}

/// Householder QR of an `m x n` matrix with `m >= n`: returns the full
/// orthogonal `Q` (`m x m`) and `R` (`m x n`) with `Rᵢᵢ >= 0`.
pub fn qr_full<T: Real>(a: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::dims("qr_full", "rows >= cols", format!("{m}x{n}")));
    }
    let mut r = a.clone();
    let mut reflectors: Vec<(usize, Vec<T>, T)> = Vec::with_capacity(n);
    for k in 0..n.min(m.saturating_sub(1)) {
        let x = &r.column(k)[k..];
        let norm_x = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm_x == T::zero() {
            continue;
        }
        let alpha = if x[0] >= T::zero() { -norm_x } else { norm_x };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vtv = dot(&v, &v);
        if vtv == T::zero() {
            continue;
        }
        let tau = T::two() / vtv;
        for j in k..n {
            let col = &mut r.column_mut(j)[k..];
            let s = tau * dot(&v, col);
            for (c, &vi) in col.iter_mut().zip(&v) {
                *c -= s * vi;
            }
        }
        for i in k + 1..m {
            r[(i, k)] = T::zero();
        }
        reflectors.push((k, v, tau));
    }
    let mut q = DenseMatrix::identity(m);
    for (k, v, tau) in reflectors.iter().rev() {
        for j in 0..m {
            let col = &mut q.column_mut(j)[*k..];
            let s = *tau * dot(v, col);
            if s == T::zero() {
                continue;
            }
            for (c, &vi) in col.iter_mut().zip(v) {
                *c -= s * vi;
            }
        }
    }
    for i in 0..n {
        if r[(i, i)] < T::zero() {
            for j in 0..n {
                r[(i, j)] = -r[(i, j)];
            }
            q.column_mut(i).iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::rand_gaussian;

    type M = DenseMatrix<f64>;

    fn m(rows: &[&[f64]]) -> M {
        M::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = rand_gaussian::<f64>(3, 2, 5);
        assert_eq!(solve_dense(&M::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn diagonal_solve() {
        let a = m(&[&[2.0, 0.0], &[0.0, 4.0]]);
        let x = solve_dense(&a, &M::identity(2)).unwrap();
        assert_eq!(x, m(&[&[0.5, 0.0], &[0.0, 0.25]]));
    }

    #[test]
    fn singular_matrix_is_flagged() {
        let a = m(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            solve_dense(&a, &M::identity(2)),
            Err(Error::NotInvertible { .. })
        ));
        assert!(matches!(Lu::factor(&M::zeros(3, 3)), Err(Error::NotInvertible { .. })));
        assert!(matches!(Lu::factor(&M::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn residual_is_small_for_random_systems() {
        for seed in 0..20 {
            let a = rand_gaussian::<f64>(12, 12, seed) + M::identity(12).scale(4.0);
            let b = rand_gaussian::<f64>(12, 3, 100 + seed);
            let x = solve_dense(&a, &b).unwrap();
            let res = (&a.matmul(&x) - &b).frobenius_norm();
            assert!(res <= 1e-10 * a.frobenius_norm() * b.frobenius_norm());
        }
    }

    #[test]
    fn cholesky_solves_and_rejects_indefinite() {
        let g = rand_gaussian::<f64>(6, 4, 9);
        let spd = g.tr_matmul(&g) + M::identity(4);
        let ch = Cholesky::factor(&spd).unwrap();
        let l = ch.factor_l();
        assert!((&l.matmul_tr(l) - &spd).frobenius_norm() < 1e-12);
        let b = rand_gaussian::<f64>(4, 2, 10);
        let x = ch.solve(&b).unwrap();
        assert!((&spd.matmul(&x) - &b).frobenius_norm() < 1e-12);
        let indef = m(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert_eq!(Cholesky::factor(&indef).unwrap_err(), Error::NotPositiveDefinite);
    }

    #[test]
    fn qr_is_orthogonal_with_nonnegative_diagonal() {
        let a = rand_gaussian::<f64>(7, 3, 21);
        let (q, r) = qr_full(&a).unwrap();
        assert!((&q.tr_matmul(&q) - &M::identity(7)).frobenius_norm() < 1e-13);
        assert!((&q.matmul(&r) - &a).frobenius_norm() < 1e-13);
        for i in 0..3 {
            assert!(r[(i, i)] >= 0.0);
            for k in i + 1..7 {
                assert_eq!(r[(k, i)], 0.0);
            }
        }
    }
}
