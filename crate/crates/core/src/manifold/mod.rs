//! The symplectic Stiefel manifold `Sp(2p, 2n) = {X : XᵀJ₂ₙX = J₂ₚ}`.

mod metric;
mod point;

pub use metric::{
    inner, riemannian_gradient, MetricOperator, MetricSpec, MetricVariant, RiemannianGradient,
};
pub use point::{NormalVector, SymplecticPoint, TangentVector};

use crate::error::{Error, Result};
use crate::matkit::poisson::{j_left, j_right, jt_left};
use crate::matkit::random::{rand_symplectic_with, InitStrategy, MatrixRng};
use crate::matkit::{skew_part, DenseMatrix};
use crate::scalar::Real;

/// Feasibility bound for accepted iterates in double precision.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Feasibility bound used when validating points of scalar type `T`.
pub fn feasibility_tol<T: Real>() -> T {
    T::lit(FEASIBILITY_TOL).max(T::lit(1e4) * T::epsilon())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticStiefel {
    pub n: usize,
    pub p: usize,
}

impl SymplecticStiefel {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p == 0 || p > n {
            return Err(Error::InvalidParameter(format!("need 1 <= p <= n, got n={n}, p={p}")));
        }
        Ok(Self { n, p })
    }

    pub fn dimension(&self) -> usize {
        4 * self.n * self.p - self.p * (2 * self.p - 1)
    }

    pub fn check<T: Real>(&self, x: &DenseMatrix<T>) -> Result<T> {
        check_symplectic(x, self.n, self.p)
    }

    pub fn random_point<T: Real>(
        &self,
        strategy: InitStrategy,
        rng: &mut MatrixRng,
    ) -> Result<SymplecticPoint<T>> {
        rand_symplectic_with(self.n, self.p, strategy, rng)
    }
}

/// `‖XᵀJ₂ₙX − J₂ₚ‖_F`.
pub fn check_symplectic<T: Real>(x: &DenseMatrix<T>, n: usize, p: usize) -> Result<T> {
    if x.shape() != (2 * n, 2 * p) {
        return Err(Error::dims(
            "check_symplectic",
            format!("{}x{}", 2 * n, 2 * p),
            format!("{}x{}", x.rows(), x.cols()),
        ));
    }
    Ok(symplectic_residual(x))
}

pub(crate) fn symplectic_residual<T: Real>(x: &DenseMatrix<T>) -> T {
    let mut m = x.tr_matmul(&j_left(x));
    let p = x.cols() / 2;
    for i in 0..p {
        m[(i, p + i)] -= T::one();
        m[(p + i, i)] += T::one();
    }
    m.frobenius_norm()
}

/// `‖ZᵀJX + XᵀJZ‖_F`. Since `ZᵀJX = −(XᵀJZ)ᵀ`, this measures the skew part
/// of `XᵀJZ`.
pub fn tangency_residual<T: Real>(x: &DenseMatrix<T>, z: &DenseMatrix<T>) -> T {
    let a = x.tr_matmul(&j_left(z));
    (&a - &a.transpose()).frobenius_norm()
}

fn check_shape<T: Real>(op: &'static str, x: &SymplecticPoint<T>, y: &DenseMatrix<T>) -> Result<()> {
    if y.shape() != x.matrix().shape() {
        return Err(Error::dims(
            op,
            format!("{}x{}", x.matrix().rows(), x.matrix().cols()),
            format!("{}x{}", y.rows(), y.cols()),
        ));
    }
    Ok(())
}

/// `Ω = skew(XᵀJᵀY)`, the normal coordinate of `Y`.
fn normal_coordinate<T: Real>(x: &DenseMatrix<T>, y: &DenseMatrix<T>) -> DenseMatrix<T> {
    skew_part(&x.tr_matmul(&jt_left(y))).expect("square by construction")
}

/// Orthogonal projection onto `T_X`: `Y − XJ skew(XᵀJᵀY)`.
pub fn project_tangent<T: Real>(x: &SymplecticPoint<T>, y: &DenseMatrix<T>) -> Result<TangentVector<T>> {
    check_shape("project_tangent", x, y)?;
    let omega = normal_coordinate(x.matrix(), y);
    let z = y - &j_right(x.matrix()).matmul(&omega);
    Ok(TangentVector::new_unchecked(x.clone(), z))
}

/// Orthogonal projection onto the normal space: `XJ skew(XᵀJᵀY)`.
pub fn project_normal<T: Real>(x: &SymplecticPoint<T>, y: &DenseMatrix<T>) -> Result<NormalVector<T>> {
    check_shape("project_normal", x, y)?;
    let omega = normal_coordinate(x.matrix(), y);
    Ok(NormalVector::from_omega(x.clone(), omega))
}

/// Symmetric `S = LRᵀ + RLᵀ` with `S·J·X = Z`, kept in factored form.
#[derive(Clone, Debug)]
pub struct SFactors<T> {
    /// `L = Z − ½XJ(XᵀJᵀZ)`.
    pub l: DenseMatrix<T>,
    /// `R = XJ`.
    pub r: DenseMatrix<T>,
}

impl<T: Real> SFactors<T> {
    /// Dense `2n x 2n` matrix; for tests only.
    pub fn densify(&self) -> DenseMatrix<T> {
        &self.l.matmul_tr(&self.r) + &self.r.matmul_tr(&self.l)
    }

    /// `U = [L R]`, `V = [R L]`, so that `S = UVᵀ`.
    pub fn uv(&self) -> (DenseMatrix<T>, DenseMatrix<T>) {
        (self.l.hstack(&self.r), self.r.hstack(&self.l))
    }
}

pub fn tangent_to_s<T: Real>(x: &SymplecticPoint<T>, z: &TangentVector<T>) -> Result<SFactors<T>> {
    z.check_base(x)?;
    z.check_tangency()?;
    let xm = x.matrix();
    let r = j_right(xm);
    let w = xm.tr_matmul(&jt_left(z.matrix()));
    let mut l = z.matrix().clone();
    l.axpy(-T::half(), &r.matmul(&w));
    Ok(SFactors { l, r })
}
