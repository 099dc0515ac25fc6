use log::warn;

use super::point::{SymplecticPoint, TangentVector};
use crate::error::{Error, Result};
use crate::matkit::poisson::{j_left, j_right, jt_left};
use crate::matkit::{Cholesky, DenseMatrix};
use crate::scalar::Real;

const GRAM_COND_WARN: f64 = 1e12;

/// Orthonormalization condition imposed on the complement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricVariant {
    I,
    II,
}

impl MetricVariant {
    pub fn default_rho(self) -> f64 {
        match self {
            MetricVariant::I => 0.5,
            MetricVariant::II => 1.0,
        }
    }
}

impl std::str::FromStr for MetricVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(Self::I),
            "II" | "ii" | "2" => Ok(Self::II),
            other => Err(Error::InvalidParameter(format!("unknown metric variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for MetricVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MetricVariant::I => "I",
            MetricVariant::II => "II",
        })
    }
}

/// The metric `g_ρ`: a weight `ρ > 0` and a variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSpec {
    rho: f64,
    variant: MetricVariant,
}

impl MetricSpec {
    pub fn new(rho: f64, variant: MetricVariant) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        Ok(Self { rho, variant })
    }

    pub fn with_default_rho(variant: MetricVariant) -> Self {
        Self {
            rho: variant.default_rho(),
            variant,
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn variant(&self) -> MetricVariant {
        self.variant
    }
}

impl Default for MetricSpec {
    fn default() -> Self {
        Self::with_default_rho(MetricVariant::II)
    }
}

/// Matrix-free `B_X` and `H_X` at a fixed point.
#[derive(Clone, Debug)]
pub struct MetricOperator<T> {
    x: SymplecticPoint<T>,
    spec: MetricSpec,
    gram: Cholesky<T>,
}

impl<T: Real> MetricOperator<T> {
    pub fn new(x: &SymplecticPoint<T>, spec: MetricSpec) -> Result<Self> {
        let xm = x.matrix();
        let gram = Cholesky::factor(&xm.tr_matmul(xm))?;
        let cond = gram.condition_lower_bound().to_f64_lossy();
        if cond > GRAM_COND_WARN {
            warn!("Gram matrix XᵀX is badly conditioned (estimate {cond:e}); the iterate may be drifting");
        }
        Ok(Self {
            x: x.clone(),
            spec,
            gram,
        })
    }

    pub fn point(&self) -> &SymplecticPoint<T> {
        &self.x
    }

    pub fn spec(&self) -> MetricSpec {
        self.spec
    }

    fn rho(&self) -> T {
        T::lit(self.spec.rho)
    }

    /// `X(XᵀX)⁻¹Xᵀ·Y`.
    fn range_projection(&self, y: &DenseMatrix<T>) -> DenseMatrix<T> {
        let xm = self.x.matrix();
        let c = self.gram.solve(&xm.tr_matmul(y)).expect("conformable");
        xm.matmul(&c)
    }

    /// `B_X·Y`.
    pub fn apply(&self, y: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check(y)?;
        let xm = self.x.matrix();
        let jx = j_left(xm);
        // (1/ρ)·JX·(XᵀJᵀY)
        let mut out = jx.matmul(&xm.tr_matmul(&jt_left(y)));
        out.scale_mut(T::one() / self.rho());
        match self.spec.variant {
            MetricVariant::I => {
                // A = JXJXᵀJᵀ − J, applied twice.
                let a = |v: &DenseMatrix<T>| {
                    let xjv = xm.tr_matmul(&jt_left(v));
                    &j_left(&j_right(xm).matmul(&xjv)) - &j_left(v)
                };
                out -= &a(&a(y));
            }
            MetricVariant::II => {
                out += y;
                out -= &self.range_projection(y);
            }
        }
        Ok(out)
    }

    /// `H_X·Y`, the map taking the Euclidean gradient to `P_f`.
    pub fn apply_h(&self, y: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check(y)?;
        let xm = self.x.matrix();
        let mut out = xm.matmul(&xm.tr_matmul(y));
        out.scale_mut(self.rho() * T::half());
        match self.spec.variant {
            MetricVariant::I => {
                let jty = jt_left(y);
                let v = &jty - &self.range_projection(&jty);
                out += &j_left(&v);
            }
            MetricVariant::II => {
                // Pᵀ·Y then P·V, with P = I − XJXᵀJᵀ.
                let v = y + &j_left(&j_right(xm).matmul(&xm.tr_matmul(y)));
                let pv = &v - &j_right(xm).matmul(&xm.tr_matmul(&jt_left(&v)));
                out += &pv;
            }
        }
        Ok(out)
    }

    /// Dense `B_X`; for tests at small `n`.
    pub fn densify(&self) -> DenseMatrix<T> {
        let m = self.x.matrix().rows();
        let id = DenseMatrix::identity(m);
        let mut out = DenseMatrix::zeros(m, m);
        // B_X acts column by column, so apply it to 2p-column slabs of I.
        let w = self.x.matrix().cols();
        let mut c0 = 0;
        while c0 < m {
            let k = w.min(m - c0);
            let mut slab = DenseMatrix::zeros(m, w);
            slab.set_block(0, 0, &id.block(0, c0, m, k));
            let b = self.apply(&slab).expect("shape matches");
            out.set_block(0, c0, &b.block(0, 0, m, k));
            c0 += k;
        }
        out
    }

    fn check(&self, y: &DenseMatrix<T>) -> Result<()> {
        let s = self.x.matrix().shape();
        if y.shape() != s {
            return Err(Error::dims(
                "metric operator",
                format!("{}x{}", s.0, s.1),
                format!("{}x{}", y.rows(), y.cols()),
            ));
        }
        Ok(())
    }
}

/// `g_ρ(Z₁, Z₂) = tr(Z₁ᵀ B_X Z₂)`.
pub fn inner<T: Real>(
    x: &SymplecticPoint<T>,
    spec: MetricSpec,
    z1: &TangentVector<T>,
    z2: &TangentVector<T>,
) -> Result<T> {
    z1.check_base(x)?;
    z2.check_base(x)?;
    let b = MetricOperator::new(x, spec)?;
    Ok(z1.matrix().inner(&b.apply(z2.matrix())?))
}

/// Riemannian gradient plus the factors reused by the low-rank Cayley step.
#[derive(Clone, Debug)]
pub struct RiemannianGradient<T> {
    pub grad: TangentVector<T>,
    /// `P_f = H_X ∇f̄`.
    pub p_f: DenseMatrix<T>,
    /// `E_ρ = (ρ/2) Xᵀ∇f̄`.
    pub e_rho: DenseMatrix<T>,
}

/// `grad f = P_f·((XJ)ᵀJX) + XJ·(P_fᵀJX)`.
pub fn riemannian_gradient<T: Real>(
    x: &SymplecticPoint<T>,
    egrad: &DenseMatrix<T>,
    spec: MetricSpec,
) -> Result<RiemannianGradient<T>> {
    let op = MetricOperator::new(x, spec)?;
    let p_f = op.apply_h(egrad)?;
    let xm = x.matrix();
    let xj = j_right(xm);
    let jx = j_left(xm);
    // Kept explicit rather than replaced by the identity it equals on the
    // manifold; this keeps the step consistent when X has drifted slightly.
    let xjt_jx = xj.tr_matmul(&jx);
    let mut g = p_f.matmul(&xjt_jx);
    g += &xj.matmul(&p_f.tr_matmul(&jx));
    let mut e_rho = xm.tr_matmul(egrad);
    e_rho.scale_mut(T::lit(spec.rho()) * T::half());
    Ok(RiemannianGradient {
        grad: TangentVector::new_unchecked(x.clone(), g),
        p_f,
        e_rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{project_normal, project_tangent, tangency_residual};
    use crate::matkit::{qr_full, rand_gaussian, rand_symplectic, skew_part, InitStrategy};

    type M = DenseMatrix<f64>;

    fn point(n: usize, p: usize, seed: u64) -> SymplecticPoint<f64> {
        rand_symplectic(n, p, InitStrategy::FullExponential, seed).unwrap()
    }

    fn tangent(x: &SymplecticPoint<f64>, seed: u64) -> TangentVector<f64> {
        let (r, c) = x.matrix().shape();
        project_tangent(x, &rand_gaussian(r, c, seed)).unwrap()
    }

    #[test]
    fn identity_point_gives_identity_metric() {
        let x = SymplecticPoint::new(M::identity(2)).unwrap();
        for v in [MetricVariant::I, MetricVariant::II] {
            let b = MetricOperator::new(&x, MetricSpec::new(1.0, v).unwrap()).unwrap();
            assert!((&b.densify() - &M::identity(2)).frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn full_group_reduces_to_first_term() {
        let x = point(2, 2, 3);
        let b = MetricOperator::new(&x, MetricSpec::new(1.0, MetricVariant::I).unwrap()).unwrap();
        let y = rand_gaussian::<f64>(4, 4, 4);
        let jx = j_left(x.matrix());
        let expect = jx.matmul(&jx.tr_matmul(&y));
        let got = b.apply(&y).unwrap();
        assert!((&got - &expect).frobenius_norm() <= 1e-10 * expect.frobenius_norm());
    }

    /// Variant I against coordinates from an explicit orthonormal complement.
    #[test]
    fn variant_one_matches_complement_coordinates() {
        for seed in 0..5 {
            let x = point(3, 1, seed);
            let rho = 0.5;
            let (q, _) = qr_full(x.matrix()).unwrap();
            let xperp = q.block(0, 2, 6, 4);
            let z = tangent(&x, 50 + seed);
            let w = x.matrix().tr_matmul(&jt_left(z.matrix()));
            let k = crate::matkit::solve_dense(&xperp.tr_matmul(&j_left(&xperp)), &xperp.tr_matmul(z.matrix()))
                .unwrap();
            let expect = w.inner(&w) / rho + k.inner(&k);
            let spec = MetricSpec::new(rho, MetricVariant::I).unwrap();
            let got = inner(&x, spec, &z, &z).unwrap();
            assert!((got - expect).abs() <= 1e-9 * expect.abs(), "{got} vs {expect}");
        }
    }

    #[test]
    fn metric_is_symmetric_positive_definite() {
        for v in [MetricVariant::I, MetricVariant::II] {
            let x = point(4, 2, 6);
            let b = MetricOperator::new(&x, MetricSpec::with_default_rho(v)).unwrap().densify();
            assert!((&b - &b.transpose()).frobenius_norm() <= 1e-10 * b.frobenius_norm());
            for seed in 0..5 {
                let y = rand_gaussian::<f64>(8, 4, seed);
                let op = MetricOperator::new(&x, MetricSpec::with_default_rho(v)).unwrap();
                assert!(y.inner(&op.apply(&y).unwrap()) > 0.0);
            }
        }
    }

    #[test]
    fn normal_space_is_orthogonal_to_tangents() {
        let x = point(4, 2, 11);
        let nv = project_normal(&x, &rand_gaussian(8, 4, 12)).unwrap();
        for v in [MetricVariant::I, MetricVariant::II] {
            let op = MetricOperator::new(&x, MetricSpec::with_default_rho(v)).unwrap();
            let bn = op.apply(nv.matrix()).unwrap();
            for seed in 0..10 {
                let z = tangent(&x, 200 + seed);
                assert!(z.matrix().inner(&bn).abs() <= 1e-10, "{v}");
            }
        }
    }

    #[test]
    fn gradient_is_compatible_with_the_metric() {
        for v in [MetricVariant::I, MetricVariant::II] {
            let spec = MetricSpec::with_default_rho(v);
            let x = point(5, 2, 21);
            let egrad = rand_gaussian::<f64>(10, 4, 22);
            let rg = riemannian_gradient(&x, &egrad, spec).unwrap();
            let g = rg.grad.matrix();
            assert!(tangency_residual(x.matrix(), g) <= 1e-10 * (1.0 + g.frobenius_norm()));
            for seed in 0..10 {
                let z = tangent(&x, 300 + seed);
                let lhs = inner(&x, spec, &rg.grad, &z).unwrap();
                let rhs = egrad.inner(z.matrix());
                let tol = 1e-8 * (1.0 + egrad.frobenius_norm() * z.matrix().frobenius_norm());
                assert!((lhs - rhs).abs() <= tol, "{v}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn zero_egrad_gives_zero_gradient() {
        let x = point(3, 1, 1);
        let rg = riemannian_gradient(&x, &M::zeros(6, 2), MetricSpec::default()).unwrap();
        assert_eq!(rg.grad.matrix().frobenius_norm(), 0.0);
    }

    #[test]
    fn variants_agree_on_the_full_group() {
        let x = point(3, 3, 5);
        let egrad = rand_gaussian::<f64>(6, 6, 6);
        let a = riemannian_gradient(&x, &egrad, MetricSpec::new(0.7, MetricVariant::I).unwrap()).unwrap();
        let b = riemannian_gradient(&x, &egrad, MetricSpec::new(0.7, MetricVariant::II).unwrap()).unwrap();
        let d = (a.grad.matrix() - b.grad.matrix()).max_abs();
        assert!(d <= 1e-12 * a.grad.matrix().max_abs().max(1.0), "{d:e}");
    }

    #[test]
    fn base_mismatch_is_rejected() {
        let x = point(3, 1, 1);
        let y = point(3, 1, 1);
        let z = tangent(&y, 2);
        assert_eq!(
            inner(&x, MetricSpec::default(), &z, &z).unwrap_err(),
            Error::BasePointMismatch
        );
    }

    #[test]
    fn rho_must_be_positive() {
        assert!(MetricSpec::new(0.0, MetricVariant::I).is_err());
        assert!(MetricSpec::new(-1.0, MetricVariant::II).is_err());
        assert_eq!(MetricSpec::with_default_rho(MetricVariant::I).rho(), 0.5);
        let _ = skew_part(&M::identity(2));
    }
}
