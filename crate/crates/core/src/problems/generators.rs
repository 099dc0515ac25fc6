//! Test-matrix generators and input scalings.

use super::eigen::spectral_norm;
use crate::error::{Error, Result};
use crate::manifold::SymplecticPoint;
use crate::matkit::poisson::j_left;
use crate::matkit::{expm, sym_part, DenseMatrix, MatrixRng};
use crate::scalar::Real;

/// `QΛQᵀ` of size `2n` with `Λᵢᵢ = λ^{1−i}` and Haar-like `Q`.
pub fn spd_with_decay<T: Real>(n: usize, lambda: f64, seed: u64) -> Result<DenseMatrix<T>> {
    if !(lambda >= 1.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("decay factor must be >= 1, got {lambda}")));
    }
    let m = 2 * n;
    let q = MatrixRng::new(seed).orthogonal::<T>(m);
    let diag: Vec<T> = (0..m).map(|i| T::lit(lambda.powi(-(i as i32)))).collect();
    let a = q.matmul(&DenseMatrix::from_diagonal(&diag)).matmul_tr(&q);
    sym_part(&a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gallery {
    Lehmer,
    /// `WᵀW` for the Wilkinson eigenvalue test matrix `W`.
    WilkinsonSq,
    /// `CᵀC` for the companion matrix of `1 + 2x + ... `, coefficients `1..=size+1`.
    CompanionSq,
    /// Second-difference matrix `tridiag(−1, 2, −1)`.
    CentralDiff,
}

impl std::str::FromStr for Gallery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lehmer" => Ok(Self::Lehmer),
            "wilkinson" | "wilkinson_sq" => Ok(Self::WilkinsonSq),
            "companion" | "companion_sq" => Ok(Self::CompanionSq),
            "central_diff" | "central-diff" => Ok(Self::CentralDiff),
            other => Err(Error::InvalidParameter(format!("unknown gallery matrix {other:?}"))),
        }
    }
}

impl std::fmt::Display for Gallery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Lehmer => "lehmer",
            Self::WilkinsonSq => "wilkinson_sq",
            Self::CompanionSq => "companion_sq",
            Self::CentralDiff => "central_diff",
        })
    }
}

pub fn gallery<T: Real>(kind: Gallery, size: usize) -> Result<DenseMatrix<T>> {
    if size == 0 {
        return Err(Error::InvalidParameter("gallery size must be positive".into()));
    }
    Ok(match kind {
        Gallery::Lehmer => DenseMatrix::from_fn(size, size, |i, j| {
            T::from_usize_lossy(i.min(j) + 1) / T::from_usize_lossy(i.max(j) + 1)
        }),
        Gallery::CentralDiff => DenseMatrix::from_fn(size, size, |i, j| match i.abs_diff(j) {
            0 => T::two(),
            1 => -T::one(),
            _ => T::zero(),
        }),
        Gallery::WilkinsonSq => {
            // Diagonal |−m|, ..., |m| with m = (size − 1)/2, unit off-diagonals.
            let half = T::lit((size as f64 - 1.0) / 2.0);
            let w = DenseMatrix::from_fn(size, size, |i, j| match i.abs_diff(j) {
                0 => (T::from_usize_lossy(i) - half).abs(),
                1 => T::one(),
                _ => T::zero(),
            });
            w.tr_matmul(&w)
        }
        Gallery::CompanionSq => {
            let lead = T::one();
            let c = DenseMatrix::from_fn(size, size, |i, j| {
                if i == 0 {
                    -T::from_usize_lossy(j + 2) / lead
                } else if i == j + 1 {
                    T::one()
                } else {
                    T::zero()
                }
            });
            c.tr_matmul(&c)
        }
    })
}

/// `Xᵢ = Y⁰·e^{J(Wᵢ+Wᵢᵀ)}` with `Wᵢ = spread·Gaussian(2p x 2p)`.
pub fn sample_cloud<T: Real>(
    center: &SymplecticPoint<T>,
    count: usize,
    spread: f64,
    seed: u64,
) -> Result<Vec<SymplecticPoint<T>>> {
    let mut rng = MatrixRng::new(seed);
    let k = center.matrix().cols();
    (0..count)
        .map(|_| {
            let w = rng.symmetric::<T>(k, T::lit(spread));
            let y = center.matrix().matmul(&expm(&j_left(&w))?);
            SymplecticPoint::new(y)
        })
        .collect()
}

/// `factor·A/‖A‖₂`.
pub fn scale_spectral<T: Real>(a: &DenseMatrix<T>, factor: T) -> Result<DenseMatrix<T>> {
    let s = spectral_norm(a)?;
    if s == T::zero() {
        return Err(Error::InvalidParameter("cannot normalize a zero matrix".into()));
    }
    Ok(a.scale(factor / s))
}

/// `A/‖A‖_max`.
pub fn scale_max_abs<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let s = a.max_abs();
    if s == T::zero() {
        return Err(Error::InvalidParameter("cannot normalize a zero matrix".into()));
    }
    Ok(a.scale(T::one() / s))
}

/// Leading `k` columns, for targets taken from larger inputs.
pub fn first_columns<T: Real>(a: &DenseMatrix<T>, k: usize) -> Result<DenseMatrix<T>> {
    if k > a.cols() {
        return Err(Error::dims("first_columns", format!("at least {k} columns"), a.cols()));
    }
    Ok(a.block(0, 0, a.rows(), k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::check_symplectic;
    use crate::matkit::{rand_symplectic, InitStrategy};
    use crate::problems::symplectic_eig_oracle;

    type M = DenseMatrix<f64>;

    #[test]
    fn lehmer_closed_form() {
        let l: M = gallery(Gallery::Lehmer, 3).unwrap();
        let expect = M::from_rows(&[
            vec![1.0, 0.5, 1.0 / 3.0],
            vec![0.5, 1.0, 2.0 / 3.0],
            vec![1.0 / 3.0, 2.0 / 3.0, 1.0],
        ])
        .unwrap();
        assert!((&l - &expect).max_abs() < 1e-16);
    }

    #[test]
    fn unit_decay_is_identity() {
        let a: M = spd_with_decay(3, 1.0, 5).unwrap();
        assert!((&a - &M::identity(6)).max_abs() < 1e-14);
        assert!(spd_with_decay::<f64>(3, 0.9, 5).is_err());
    }

    #[test]
    fn gallery_members_are_spd() {
        for kind in [Gallery::Lehmer, Gallery::WilkinsonSq, Gallery::CompanionSq, Gallery::CentralDiff] {
            let m: M = gallery(kind, 10).unwrap();
            assert!((&m - &m.transpose()).max_abs() < 1e-12);
            assert!(symplectic_eig_oracle(&m).is_ok(), "{kind}");
        }
        assert!("nope".parse::<Gallery>().is_err());
    }

    #[test]
    fn wilkinson_small_case() {
        // size 3: diag(1, 0, 1), unit off-diagonals.
        let m: M = gallery(Gallery::WilkinsonSq, 3).unwrap();
        let w = M::from_rows(&[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap();
        assert_eq!(m, w.tr_matmul(&w));
    }

    #[test]
    fn cloud_is_feasible() {
        let c = rand_symplectic::<f64>(2, 2, InitStrategy::RightExponential, 1).unwrap();
        let cloud = sample_cloud(&c, 20, 0.1, 2).unwrap();
        assert_eq!(cloud.len(), 20);
        for x in &cloud {
            assert!(check_symplectic(x.matrix(), 2, 2).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn scalings() {
        let a = M::from_diagonal(&[-4.0, 2.0]);
        assert_eq!(scale_max_abs(&a).unwrap(), M::from_diagonal(&[-1.0, 0.5]));
        let s = scale_spectral(&a, 2.0).unwrap();
        assert!((&s - &M::from_diagonal(&[-2.0, 1.0])).max_abs() < 1e-14);
        assert_eq!(first_columns(&M::identity(4), 2).unwrap().shape(), (4, 2));
        assert!(first_columns(&a, 3).is_err());
        assert!(scale_max_abs(&M::zeros(2, 2)).is_err());
    }
}
