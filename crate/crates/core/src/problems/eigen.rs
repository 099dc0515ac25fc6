//! Dense eigenvalue routines backing the validation oracles.
//!
//! Symplectic eigenvalues of an SPD `M = LLᵀ` are the moduli of the
//! eigenvalues of the skew-symmetric `K = LᵀJL`, which is similar to `JᵀM` up
//! to sign. `K` is reduced to skew tridiagonal form by Householder
//! reflections; the off-diagonal then defines a symmetric tridiagonal matrix
//! with zero diagonal and spectrum `{±d_j}`, which implicit QL resolves.

use crate::error::{Error, Result};
use crate::matkit::poisson::j_left;
use crate::matkit::{Cholesky, DenseMatrix};
use crate::scalar::Real;

const QL_MAX_SWEEPS: usize = 100;

/// Sorted symplectic eigenvalues `d_1 <= ... <= d_n` of an SPD `2n x 2n`
/// matrix.
pub fn symplectic_eig_oracle<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    if !m.is_square() || m.rows() % 2 != 0 {
        return Err(Error::dims(
            "symplectic_eig_oracle",
            "square matrix of even size",
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let n = m.rows() / 2;
    let l = Cholesky::factor(m)?.into_l();
    let k = l.tr_matmul(&j_left(&l));
    let off = skew_tridiagonal(k);
    let size = 2 * n;
    let mut d = vec![T::zero(); size];
    let mut e = vec![T::zero(); size];
    for (ei, oi) in e.iter_mut().zip(&off) {
        *ei = oi.abs();
    }
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    // Spectrum is {±d_j}; keep the positive half.
    let vals: Vec<T> = d[n..].to_vec();
    let scale = d.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let mismatch = (0..n)
        .map(|j| (d[n - 1 - j] + d[n + j]).abs())
        .fold(T::zero(), T::max);
    if mismatch > T::lit(1e-8) * scale.max(T::one()) || vals[0] <= T::zero() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(vals)
}

/// Householder reduction of a skew-symmetric matrix; returns the
/// subdiagonal `e_k = T[k+1, k]` of the tridiagonal result.
fn skew_tridiagonal<T: Real>(mut a: DenseMatrix<T>) -> Vec<T> {
    let m = a.rows();
    let mut v = vec![T::zero(); m];
    let mut p = vec![T::zero(); m];
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    for k in 0..m.saturating_sub(1) {
        let s = k + 1;
        let len = m - s;
        let Some((alpha, tau)) = householder(&a.column(k)[s..], &mut v[..len]) else {
            off.push(a[(s, k)]);
            continue;
        };
        off.push(alpha);
        if len == 1 {
            continue;
        }
        // p = τ·A_sub·v, then A_sub += v pᵀ − p vᵀ.
        p[..len].iter_mut().for_each(|x| *x = T::zero());
        for j in 0..len {
            let vj = v[j] * tau;
            if vj == T::zero() {
                continue;
            }
            let col = &a.column(s + j)[s..];
            for (pi, &c) in p[..len].iter_mut().zip(col) {
                *pi += c * vj;
            }
        }
        for j in 0..len {
            let (pj, vj) = (p[j], v[j]);
            let col = &mut a.column_mut(s + j)[s..];
            for i in 0..len {
                col[i] += v[i] * pj - p[i] * vj;
            }
        }
    }
    off
}

/// Reflector `H = I − τvvᵀ` with `Hx = αe₁`. Writes `v` and returns
/// `(α, τ)`, or `None` when `x` is already a multiple of `e₁`.
fn householder<T: Real>(x: &[T], v: &mut [T]) -> Option<(T, T)> {
    let tail = x[1..].iter().fold(T::zero(), |acc, &t| acc.hypot(t));
    if tail == T::zero() {
        return None;
    }
    let norm = x[0].hypot(tail);
    let alpha = if x[0] > T::zero() { -norm } else { norm };
    v.copy_from_slice(x);
    v[0] -= alpha;
    let vtv = v.iter().map(|&t| t * t).sum::<T>();
    Some((alpha, T::two() / vtv))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &DenseMatrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "symmetric_eigenvalues",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let m = a.rows();
    let mut w = a.clone();
    let mut v = vec![T::zero(); m];
    let mut p = vec![T::zero(); m];
    let mut e = vec![T::zero(); m];
    for k in 0..m.saturating_sub(1) {
        let s = k + 1;
        let len = m - s;
        let Some((alpha, tau)) = householder(&w.column(k)[s..], &mut v[..len]) else {
            e[k] = w[(s, k)];
            continue;
        };
        e[k] = alpha;
        // p = τ·A·v, w = p − ½τ(vᵀp)v, A −= v wᵀ + w vᵀ.
        p[..len].iter_mut().for_each(|x| *x = T::zero());
        for j in 0..len {
            let vj = v[j] * tau;
            let col = &w.column(s + j)[s..];
            for (pi, &c) in p[..len].iter_mut().zip(col) {
                *pi += c * vj;
            }
        }
        let vp: T = v[..len].iter().zip(&p[..len]).map(|(&a, &b)| a * b).sum();
        let kk = T::half() * tau * vp;
        for i in 0..len {
            p[i] -= kk * v[i];
        }
        for j in 0..len {
            let (pj, vj) = (p[j], v[j]);
            let col = &mut w.column_mut(s + j)[s..];
            for i in 0..len {
                col[i] -= v[i] * pj + p[i] * vj;
            }
        }
    }
    let mut d: Vec<T> = (0..m).map(|i| w[(i, i)]).collect();
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// Spectral norm through the eigenvalues of the smaller Gram matrix.
pub fn spectral_norm<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(T::zero());
    }
    let gram = if a.rows() >= a.cols() {
        a.tr_matmul(a)
    } else {
        a.matmul_tr(a)
    };
    let ev = symmetric_eigenvalues(&gram)?;
    Ok(ev.last().copied().unwrap_or(T::zero()).max(T::zero()).sqrt())
}

/// Implicit QL on a symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i+1`; `e[n-1]` is ignored).
/// Eigenvalues overwrite `d`.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd || e[m].abs() <= tiny {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::NumericRange { op: "tridiagonal QL" });
            }
            let mut g = (d[l + 1] - d[l]) / (T::two() * e[l]);
            let mut r = g.hypot(T::one());
            let sr = if g >= T::zero() { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sr);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::two() * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
