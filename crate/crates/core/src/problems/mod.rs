//! Objective functions and the eigenvalue oracles used to validate them.

mod eigen;
mod generators;

pub use eigen::{spectral_norm, symmetric_eigenvalues, symplectic_eig_oracle};
pub use generators::{
    first_columns, gallery, sample_cloud, scale_max_abs, scale_spectral, spd_with_decay, Gallery,
};

use log::warn;

use crate::error::{Error, Result};
use crate::manifold::SymplecticPoint;
use crate::matkit::{skew_part, sym_part, Cholesky, DenseMatrix, MatrixRng};
use crate::scalar::Real;

/// Where a problem instance came from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Descriptor {
    pub generator: String,
    pub seed: Option<u64>,
    pub source: Option<String>,
}

impl Descriptor {
    pub fn generated(generator: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            generator: generator.into(),
            seed,
            source: None,
        }
    }
}

/// A smooth objective on `2n x 2p` matrices together with its Euclidean
/// gradient.
pub trait Problem<T: Real>: Send + Sync {
    /// `(n, p)`.
    fn dims(&self) -> (usize, usize);
    fn cost(&self, x: &DenseMatrix<T>) -> T;
    fn egrad(&self, x: &DenseMatrix<T>) -> DenseMatrix<T>;
    fn descriptor(&self) -> &Descriptor;
}

fn even_dims(op: &'static str, a: &DenseMatrix<impl Real>) -> Result<(usize, usize)> {
    let (r, c) = a.shape();
    if r % 2 != 0 || c % 2 != 0 || c == 0 || c > r {
        return Err(Error::dims(op, "2n x 2p with 1 <= p <= n", format!("{r}x{c}")));
    }
    Ok((r / 2, c / 2))
}

/// `f(X) = ‖X − A‖²_F`.
#[derive(Clone, Debug)]
pub struct NearestSymplectic<T> {
    a: DenseMatrix<T>,
    n: usize,
    p: usize,
    descriptor: Descriptor,
}

impl<T: Real> NearestSymplectic<T> {
    pub fn new(a: DenseMatrix<T>) -> Result<Self> {
        let (n, p) = even_dims("nearest_symplectic", &a)?;
        Ok(Self {
            a,
            n,
            p,
            descriptor: Descriptor::generated("nearest", None),
        })
    }

    pub fn with_descriptor(mut self, d: Descriptor) -> Self {
        self.descriptor = d;
        self
    }

    pub fn target(&self) -> &DenseMatrix<T> {
        &self.a
    }
}

impl<T: Real> Problem<T> for NearestSymplectic<T> {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.p)
    }

    fn cost(&self, x: &DenseMatrix<T>) -> T {
        let d = x - &self.a;
        d.inner(&d)
    }

    fn egrad(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        (x - &self.a).scale(T::two())
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }
}

/// `f(X) = (1/N)Σ‖X − Xᵢ‖²_F`, evaluated as `‖X − X̄‖²_F + const`.
#[derive(Clone, Debug)]
pub struct ExtrinsicMean<T> {
    nearest: NearestSymplectic<T>,
    offset: T,
    count: usize,
}

impl<T: Real> ExtrinsicMean<T> {
    pub fn new(samples: &[SymplecticPoint<T>]) -> Result<Self> {
        let mut acc = ExtrinsicMeanAccumulator::new();
        for s in samples {
            acc.push(s.matrix())?;
        }
        acc.finish()
    }

    pub fn mean(&self) -> &DenseMatrix<T> {
        self.nearest.target()
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

impl<T: Real> Problem<T> for ExtrinsicMean<T> {
    fn dims(&self) -> (usize, usize) {
        self.nearest.dims()
    }

    fn cost(&self, x: &DenseMatrix<T>) -> T {
        self.nearest.cost(x) + self.offset
    }

    fn egrad(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.nearest.egrad(x)
    }

    fn descriptor(&self) -> &Descriptor {
        self.nearest.descriptor()
    }
}

/// Builds an [`ExtrinsicMean`] from a stream of samples without keeping
/// them.
#[derive(Clone, Debug, Default)]
pub struct ExtrinsicMeanAccumulator<T> {
    sum: Option<DenseMatrix<T>>,
    sq_norms: T,
    count: usize,
}

impl<T: Real> ExtrinsicMeanAccumulator<T> {
    pub fn new() -> Self {
        Self {
            sum: None,
            sq_norms: T::zero(),
            count: 0,
        }
    }

    pub fn push(&mut self, x: &DenseMatrix<T>) -> Result<()> {
        match &mut self.sum {
            None => {
                even_dims("extrinsic_mean", x)?;
                self.sum = Some(x.clone());
            }
            Some(s) => {
                if s.shape() != x.shape() {
                    return Err(Error::dims(
                        "extrinsic_mean",
                        format!("{}x{}", s.rows(), s.cols()),
                        format!("{}x{}", x.rows(), x.cols()),
                    ));
                }
                *s += x;
            }
        }
        self.sq_norms += x.inner(x);
        self.count += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<ExtrinsicMean<T>> {
        let Some(sum) = self.sum else {
            return Err(Error::InvalidParameter("extrinsic mean needs at least one sample".into()));
        };
        let inv = T::one() / T::from_usize_lossy(self.count);
        let mean = sum.scale(inv);
        let offset = self.sq_norms * inv - mean.inner(&mean);
        let nearest = NearestSymplectic::new(mean)?
            .with_descriptor(Descriptor::generated("extrinsic_mean", None));
        Ok(ExtrinsicMean {
            nearest,
            offset,
            count: self.count,
        })
    }
}

/// `f(X) = tr(XᵀAX)` with symmetric `A`.
#[derive(Clone, Debug)]
pub struct BrockettTrace<T> {
    a: DenseMatrix<T>,
    n: usize,
    p: usize,
    descriptor: Descriptor,
}

impl<T: Real> BrockettTrace<T> {
    /// Symmetrizes `a`, warning when its skew part is not negligible.
    pub fn new(a: &DenseMatrix<T>, p: usize) -> Result<Self> {
        let sym = sym_part(a)?;
        if a.rows() % 2 != 0 || p == 0 || 2 * p > a.rows() {
            return Err(Error::dims(
                "brockett_trace",
                "2n x 2n with 1 <= p <= n",
                format!("{}x{}, p={p}", a.rows(), a.cols()),
            ));
        }
        let skew = skew_part(a)?.frobenius_norm();
        let scale = a.frobenius_norm();
        if skew > T::lit(1e-12) * scale {
            warn!(
                "input matrix is not symmetric (relative skew part {:e}); using its symmetric part",
                (skew / scale).to_f64_lossy()
            );
        }
        Ok(Self {
            n: a.rows() / 2,
            a: sym,
            p,
            descriptor: Descriptor::generated("brockett", None),
        })
    }

    pub fn with_descriptor(mut self, d: Descriptor) -> Self {
        self.descriptor = d;
        self
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.a
    }
}

impl<T: Real> Problem<T> for BrockettTrace<T> {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.p)
    }

    fn cost(&self, x: &DenseMatrix<T>) -> T {
        x.inner(&self.a.matmul(x))
    }

    fn egrad(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.a.matmul(x).scale(T::two())
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }
}

/// Trace minimization whose minimum is twice the sum of the `p` smallest
/// symplectic eigenvalues of an SPD matrix `M`.
#[derive(Clone, Debug)]
pub struct SymplecticEigen<T> {
    inner: BrockettTrace<T>,
}

impl<T: Real> SymplecticEigen<T> {
    pub fn new(m: &DenseMatrix<T>, p: usize) -> Result<Self> {
        let inner = BrockettTrace::new(m, p)?;
        Cholesky::factor(inner.matrix())?;
        Ok(Self {
            inner: inner.with_descriptor(Descriptor::generated("sympeig", None)),
        })
    }

    pub fn with_descriptor(mut self, d: Descriptor) -> Self {
        self.inner = self.inner.with_descriptor(d);
        self
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        self.inner.matrix()
    }

    pub fn extract_eigenvalues(&self, x: &DenseMatrix<T>) -> Result<EigenEstimate<T>> {
        extract_eigenvalues(self.matrix(), x)
    }
}

impl<T: Real> Problem<T> for SymplecticEigen<T> {
    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    fn cost(&self, x: &DenseMatrix<T>) -> T {
        self.inner.cost(x)
    }

    fn egrad(&self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.inner.egrad(x)
    }

    fn descriptor(&self) -> &Descriptor {
        self.inner.descriptor()
    }
}

/// Symplectic eigenvalues read off a (near-)minimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenEstimate<T> {
    /// `d_j = ½(Pⱼⱼ + P_{p+j,p+j})` with `P = XᵀMX`, in column order.
    pub values: Vec<T>,
    /// `‖P − diag(D, D)‖_F`; zero when `X` diagonalizes `M` exactly.
    pub pairing_residual: T,
}

impl<T: Real> EigenEstimate<T> {
    pub fn smallest(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }
}

pub fn extract_eigenvalues<T: Real>(m: &DenseMatrix<T>, x: &DenseMatrix<T>) -> Result<EigenEstimate<T>> {
    if !m.is_square() || x.rows() != m.rows() || x.cols() % 2 != 0 {
        return Err(Error::dims(
            "extract_eigenvalues",
            format!("X with {} rows and even columns", m.rows()),
            format!("{}x{}", x.rows(), x.cols()),
        ));
    }
    let pm = x.tr_matmul(&m.matmul(x));
    let p = x.cols() / 2;
    let values: Vec<T> = (0..p).map(|j| T::half() * (pm[(j, j)] + pm[(p + j, p + j)])).collect();
    let mut off = pm;
    for (j, &d) in values.iter().enumerate() {
        off[(j, j)] -= d;
        off[(p + j, p + j)] -= d;
    }
    Ok(EigenEstimate {
        values,
        pairing_residual: off.frobenius_norm(),
    })
}

/// Relative error of the directional derivative `⟨∇f̄(X), D⟩` against a
/// central difference with `h = 1e-6·(1 + ‖X‖_F)`, for a random unit `D`.
pub fn gradient_self_test<T: Real, P: Problem<T> + ?Sized>(problem: &P, x: &DenseMatrix<T>, seed: u64) -> T {
    let mut rng = MatrixRng::new(seed);
    let mut d = rng.gaussian::<T>(x.rows(), x.cols());
    let dn = d.frobenius_norm();
    d.scale_mut(T::one() / dn);
    let h = T::lit(1e-6) * (T::one() + x.frobenius_norm());
    let mut xp = x.clone();
    xp.axpy(h, &d);
    let mut xm = x.clone();
    xm.axpy(-h, &d);
    let fd = (problem.cost(&xp) - problem.cost(&xm)) / (T::two() * h);
    let an = problem.egrad(x).inner(&d);
    (fd - an).abs() / an.abs().max(T::epsilon().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{rand_gaussian, rand_symplectic, InitStrategy};

    type M = DenseMatrix<f64>;

    fn feasible(n: usize, p: usize, seed: u64) -> SymplecticPoint<f64> {
        rand_symplectic(n, p, InitStrategy::RightExponential, seed).unwrap()
    }

    #[test]
    fn nearest_examples() {
        let x = feasible(3, 1, 1);
        let prob = NearestSymplectic::new(x.matrix().clone()).unwrap();
        assert_eq!(prob.cost(x.matrix()), 0.0);
        assert_eq!(prob.egrad(x.matrix()).frobenius_norm(), 0.0);
        let delta = rand_gaussian::<f64>(6, 2, 3);
        let shifted = x.matrix() + &delta;
        assert!((prob.cost(&shifted) - delta.inner(&delta)).abs() < 1e-12);
        assert!(NearestSymplectic::new(M::zeros(3, 2)).is_err());
        assert!(NearestSymplectic::new(M::zeros(4, 3)).is_err());
    }

    #[test]
    fn extrinsic_mean_matches_the_sample_average() {
        let samples: Vec<_> = (0..5).map(|s| feasible(2, 1, s)).collect();
        let prob = ExtrinsicMean::new(&samples).unwrap();
        let x = feasible(2, 1, 99);
        let direct = samples
            .iter()
            .map(|s| {
                let d = x.matrix() - s.matrix();
                d.inner(&d)
            })
            .sum::<f64>()
            / 5.0;
        assert!((prob.cost(x.matrix()) - direct).abs() < 1e-12 * direct);

        let one = ExtrinsicMean::new(&samples[..1]).unwrap();
        assert!(one.cost(samples[0].matrix()).abs() < 1e-14);
        assert!(ExtrinsicMean::<f64>::new(&[]).is_err());
        let mixed = [feasible(2, 1, 0), feasible(3, 1, 0)];
        assert!(ExtrinsicMean::new(&mixed).is_err());
    }

    #[test]
    fn brockett_symmetrizes_and_checks_shape() {
        let a = M::from_rows(&[
            vec![2.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 0.0],
            vec![0.0, 0.0, 3.0, 0.0],
            vec![0.0, 0.0, 0.0, 4.0],
        ])
        .unwrap();
        let b = BrockettTrace::new(&a, 1).unwrap();
        assert_eq!(b.matrix()[(0, 1)], 0.5);
        let ident = BrockettTrace::new(&M::identity(4), 1).unwrap();
        let x = feasible(2, 1, 4);
        assert!((ident.cost(x.matrix()) - x.matrix().inner(x.matrix())).abs() < 1e-12);
        assert!(BrockettTrace::new(&M::zeros(3, 3), 1).is_err());
        assert!(BrockettTrace::new(&M::zeros(4, 3), 1).is_err());
        assert!(BrockettTrace::new(&M::identity(4), 3).is_err());
    }

    #[test]
    fn gradients_pass_the_self_test() {
        let a = rand_gaussian::<f64>(8, 4, 1);
        let nearest = NearestSymplectic::new(a).unwrap();
        let spd = spd_with_decay::<f64>(4, 1.1, 2).unwrap();
        let brockett = BrockettTrace::new(&spd, 2).unwrap();
        let samples: Vec<_> = (0..4).map(|s| feasible(4, 2, 10 + s)).collect();
        let mean = ExtrinsicMean::new(&samples).unwrap();
        let problems: [&dyn Problem<f64>; 3] = [&nearest, &brockett, &mean];
        for prob in problems {
            for seed in 0..3 {
                let x = feasible(4, 2, 20 + seed);
                let err = gradient_self_test(prob, x.matrix(), seed);
                assert!(err <= 1e-6, "{:?}: {err:e}", prob.descriptor());
            }
        }
    }

    #[test]
    fn eigen_problem_rejects_indefinite_input() {
        let m = M::from_diagonal(&[1.0, -1.0, 1.0, 1.0]);
        assert_eq!(SymplecticEigen::new(&m, 1).unwrap_err(), Error::NotPositiveDefinite);
    }

    #[test]
    fn extraction_on_diagonal_matrices() {
        let m = M::from_diagonal(&[3.0, 5.0, 3.0, 5.0]);
        let prob = SymplecticEigen::new(&m, 1).unwrap();
        let x = crate::matkit::canonical::<f64>(2, 1);
        let est = prob.extract_eigenvalues(&x).unwrap();
        assert_eq!(est.values, vec![3.0]);
        assert_eq!(est.pairing_residual, 0.0);
        assert_eq!(prob.cost(&x), 6.0);

        let x2 = crate::matkit::canonical::<f64>(2, 2);
        let est = extract_eigenvalues(&m, &x2).unwrap();
        assert_eq!(est.values, vec![3.0, 5.0]);
        assert_eq!(est.smallest(), 3.0);
        let oracle = symplectic_eig_oracle(&m).unwrap();
        for (a, b) in est.values.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-8);
        }
    }
}
