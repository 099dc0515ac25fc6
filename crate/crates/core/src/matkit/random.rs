//! Seeded matrix generators.
//!
//! All draws go through ChaCha8, which is portable across platforms, so a seed
//! pins the output bit for bit. Samples are drawn in `f64` and cast, making
//! `f32` and `f64` runs consume the stream identically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::manifold::SymplecticPoint;
use crate::matkit::decomp::qr_full;
use crate::matkit::expm::expm;
use crate::matkit::poisson::j_left;
use crate::matkit::DenseMatrix;
use crate::scalar::Real;

/// Generator state. One instance per run; do not share across threads.
#[derive(Clone, Debug)]
pub struct MatrixRng {
    rng: ChaCha8Rng,
}

impl MatrixRng {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// I.i.d. standard normal entries, filled column by column.
    pub fn gaussian<T: Real>(&mut self, rows: usize, cols: usize) -> DenseMatrix<T> {
        DenseMatrix::from_fn(rows, cols, |_, _| T::lit(self.normal()))
    }

    /// Q factor of a Gaussian matrix, with the `Rᵢᵢ >= 0` convention.
    pub fn orthogonal<T: Real>(&mut self, m: usize) -> DenseMatrix<T> {
        let g = self.gaussian::<T>(m, m);
        qr_full(&g).expect("square input").0
    }

    /// `W + Wᵀ` for Gaussian `W`, scaled by `spread`.
    pub fn symmetric<T: Real>(&mut self, m: usize, spread: T) -> DenseMatrix<T> {
        let w = self.gaussian::<T>(m, m).scale(spread);
        &w + &w.transpose()
    }
}

pub fn rand_gaussian<T: Real>(rows: usize, cols: usize, seed: u64) -> DenseMatrix<T> {
    MatrixRng::new(seed).gaussian(rows, cols)
}

pub fn rand_orthogonal<T: Real>(m: usize, seed: u64) -> DenseMatrix<T> {
    MatrixRng::new(seed).orthogonal(m)
}

/// How a random starting point is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitStrategy {
    /// The canonical point `I⁰`.
    Canonical,
    /// `I⁰·e^{J(W+Wᵀ)}` with `W` of size `2p x 2p`.
    RightExponential,
    /// Columns `1..p, n+1..n+p` of `e^{J(W+Wᵀ)}` with `W` of size `2n x 2n`.
    FullExponential,
}

impl TryFrom<u8> for InitStrategy {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Self::Canonical),
            2 => Ok(Self::RightExponential),
            3 => Ok(Self::FullExponential),
            other => Err(Error::InvalidParameter(format!(
                "init strategy must be 1, 2 or 3, got {other}"
            ))),
        }
    }
}

/// Random point of `Sp(2p, 2n)`.
pub fn rand_symplectic<T: Real>(
    n: usize,
    p: usize,
    strategy: InitStrategy,
    seed: u64,
) -> Result<SymplecticPoint<T>> {
    rand_symplectic_with(n, p, strategy, &mut MatrixRng::new(seed))
}

pub fn rand_symplectic_with<T: Real>(
    n: usize,
    p: usize,
    strategy: InitStrategy,
    rng: &mut MatrixRng,
) -> Result<SymplecticPoint<T>> {
    if p == 0 || p > n {
        return Err(Error::InvalidParameter(format!("need 1 <= p <= n, got n={n}, p={p}")));
    }
    let x = match strategy {
        InitStrategy::Canonical => canonical(n, p),
        InitStrategy::RightExponential => {
            let w = rng.symmetric::<T>(2 * p, T::one());
            canonical(n, p).matmul(&expm(&j_left(&w))?)
        }
        InitStrategy::FullExponential => {
            let w = rng.symmetric::<T>(2 * n, T::one());
            let e = expm(&j_left(&w))?;
            let idx: Vec<usize> = (0..p).chain(n..n + p).collect();
            e.select_columns(&idx)
        }
    };
    SymplecticPoint::new(x)
}

/// `I⁰`: columns `1..p` and `n+1..n+p` of the `2n x 2n` identity.
pub fn canonical<T: Real>(n: usize, p: usize) -> DenseMatrix<T> {
    let mut x = DenseMatrix::zeros(2 * n, 2 * p);
    for i in 0..p {
        x[(i, i)] = T::one();
        x[(n + i, p + i)] = T::one();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::check_symplectic;

    #[test]
    fn orthogonal_factor() {
        let q = rand_orthogonal::<f64>(4, 3);
        let res = (&q.tr_matmul(&q) - &DenseMatrix::identity(4)).frobenius_norm();
        assert!(res <= 1e-13, "{res:e}");
    }

    #[test]
    fn same_seed_same_bits() {
        let a = rand_gaussian::<f64>(5, 4, 42);
        let b = rand_gaussian::<f64>(5, 4, 42);
        assert_eq!(a.as_slice(), b.as_slice());
        assert_ne!(a, rand_gaussian::<f64>(5, 4, 43));
        assert_eq!(rand_orthogonal::<f64>(6, 1), rand_orthogonal::<f64>(6, 1));
        let x = rand_symplectic::<f64>(4, 2, InitStrategy::FullExponential, 9).unwrap();
        let y = rand_symplectic::<f64>(4, 2, InitStrategy::FullExponential, 9).unwrap();
        assert_eq!(x.matrix(), y.matrix());
    }

    #[test]
    fn gaussian_sample_mean() {
        let mut rng = MatrixRng::new(7);
        let mut sum = 0.0;
        let draws = 25_000;
        for _ in 0..draws {
            sum += rng.gaussian::<f64>(2, 2).as_slice().iter().sum::<f64>();
        }
        let mean = sum / (4 * draws) as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn canonical_points() {
        let x = rand_symplectic::<f64>(1, 1, InitStrategy::Canonical, 0).unwrap();
        assert_eq!(*x.matrix(), DenseMatrix::identity(2));
        let x = rand_symplectic::<f64>(2, 1, InitStrategy::Canonical, 0).unwrap();
        let i4 = DenseMatrix::<f64>::identity(4);
        assert_eq!(*x.matrix(), i4.select_columns(&[0, 2]));
    }

    #[test]
    fn exponential_strategies_are_feasible() {
        for strategy in [InitStrategy::RightExponential, InitStrategy::FullExponential] {
            for seed in 0..5 {
                let x = rand_symplectic::<f64>(10, 3, strategy, seed).unwrap();
                let r = check_symplectic(x.matrix(), 10, 3).unwrap();
                assert!(r <= 1e-10, "{strategy:?}: {r:e}");
            }
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(rand_symplectic::<f64>(2, 3, InitStrategy::Canonical, 0).is_err());
        assert!(rand_symplectic::<f64>(2, 0, InitStrategy::Canonical, 0).is_err());
        assert!(InitStrategy::try_from(4).is_err());
        assert_eq!(InitStrategy::try_from(2).unwrap(), InitStrategy::RightExponential);
    }
}
