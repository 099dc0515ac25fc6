use std::sync::Arc;

use super::{feasibility_tol, symplectic_residual, tangency_residual};
use crate::error::{Error, Result};
use crate::matkit::poisson::j_right;
use crate::matkit::DenseMatrix;
use crate::scalar::Real;

/// A `2n x 2p` matrix on `Sp(2p, 2n)`. Immutable; clones share storage.
#[derive(Clone, Debug)]
pub struct SymplecticPoint<T> {
    x: Arc<DenseMatrix<T>>,
}

impl<T: Real> SymplecticPoint<T> {
    /// Validates shape and feasibility against [`feasibility_tol`].
    pub fn new(x: DenseMatrix<T>) -> Result<Self> {
        let pt = Self::new_unchecked(x)?;
        let residual = pt.residual();
        if !(residual <= feasibility_tol::<T>()) {
            return Err(Error::Infeasible {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(pt)
    }

    /// Validates the shape only. Used for iterates whose feasibility is
    /// tracked separately.
    pub fn new_unchecked(x: DenseMatrix<T>) -> Result<Self> {
        let (r, c) = x.shape();
        if r % 2 != 0 || c % 2 != 0 || c == 0 || c > r {
            return Err(Error::dims("SymplecticPoint", "2n x 2p with 1 <= p <= n", format!("{r}x{c}")));
        }
        Ok(Self { x: Arc::new(x) })
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.rows() / 2
    }

    pub fn p(&self) -> usize {
        self.x.cols() / 2
    }

    pub fn residual(&self) -> T {
        symplectic_residual(&self.x)
    }

    /// Identity of the underlying storage, used to pair tangent vectors with
    /// their base point.
    pub fn same_as(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.x, &other.x)
    }
}

/// A tangent vector `Z` at a base point `X`.
#[derive(Clone, Debug)]
pub struct TangentVector<T> {
    base: SymplecticPoint<T>,
    z: DenseMatrix<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: SymplecticPoint<T>, z: DenseMatrix<T>) -> Result<Self> {
        let v = Self::new_unchecked(base, z);
        v.check_tangency()?;
        Ok(v)
    }

    pub(crate) fn new_unchecked(base: SymplecticPoint<T>, z: DenseMatrix<T>) -> Self {
        debug_assert_eq!(base.matrix().shape(), z.shape());
        Self { base, z }
    }

    pub fn zero(base: &SymplecticPoint<T>) -> Self {
        let (r, c) = base.matrix().shape();
        Self::new_unchecked(base.clone(), DenseMatrix::zeros(r, c))
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.z
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.z
    }

    pub fn base(&self) -> &SymplecticPoint<T> {
        &self.base
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new_unchecked(self.base.clone(), self.z.scale(s))
    }

    pub fn residual(&self) -> T {
        tangency_residual(self.base.matrix(), &self.z)
    }

    pub(crate) fn check_base(&self, x: &SymplecticPoint<T>) -> Result<()> {
        if self.base.same_as(x) {
            Ok(())
        } else {
            Err(Error::BasePointMismatch)
        }
    }

    /// Tangency bound `1e-10·(1 + ‖Z‖)`, widened by `‖X‖` for badly scaled
    /// base points and by the precision of `T`.
    pub(crate) fn check_tangency(&self) -> Result<()> {
        let xn = self.base.matrix().frobenius_norm().max(T::one());
        let rel = T::lit(1e-10).max(T::lit(1e3) * T::epsilon());
        let tol = rel * (T::one() + self.z.frobenius_norm()) * xn;
        let res = self.residual();
        if res <= tol {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "vector is not tangent (residual {:e} > {:e})",
                res.to_f64_lossy(),
                tol.to_f64_lossy()
            )))
        }
    }
}

/// A normal vector `N = XJΩ` with `Ω` skew-symmetric.
#[derive(Clone, Debug)]
pub struct NormalVector<T> {
    base: SymplecticPoint<T>,
    n: DenseMatrix<T>,
    omega: DenseMatrix<T>,
}

impl<T: Real> NormalVector<T> {
    pub(crate) fn from_omega(base: SymplecticPoint<T>, omega: DenseMatrix<T>) -> Self {
        let n = j_right(base.matrix()).matmul(&omega);
        Self { base, n, omega }
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.n
    }

    pub fn omega(&self) -> &DenseMatrix<T> {
        &self.omega
    }

    pub fn base(&self) -> &SymplecticPoint<T> {
        &self.base
    }
}
