use super::domain_error;
use crate::error::{Error, Result};
use crate::manifold::{tangent_to_s, SymplecticPoint, TangentVector};
use crate::matkit::poisson::{j_left, j_right, jt_left};
use crate::matkit::{DenseMatrix, Lu};
use crate::scalar::Real;

/// Inner systems with a 1-norm condition number above this are treated as
/// outside the retraction's domain.
pub const CAYLEY_COND_MAX: f64 = 1e12;

/// Solves the small inner system, mapping singularity to a domain error.
fn inner_solve<T: Real>(a: &DenseMatrix<T>, rhs: &DenseMatrix<T>, t: T) -> Result<DenseMatrix<T>> {
    let lu = Lu::factor(a).map_err(|e| domain_error(t, e))?;
    let cond = lu.condition_1().to_f64_lossy();
    if !(cond <= CAYLEY_COND_MAX) {
        return Err(domain_error(t, Error::IllConditioned { cond }));
    }
    lu.solve(rhs)
}

/// `I + s·M` for square `M`.
fn shifted<T: Real>(m: &DenseMatrix<T>, s: T) -> DenseMatrix<T> {
    let mut a = m.scale(s);
    for i in 0..a.rows() {
        a[(i, i)] += T::one();
    }
    a
}

/// Cayley step along `−grad f` from the gradient factors `P_f` and `E_ρ`:
///
/// `Y = X + t[−P_f, XJ](I + (t/2)[[E_ρ, Jᵀ], [P_fᵀJᵀP_f, −E_ρᵀ]])⁻¹[I; −E_ρᵀJ]`.
///
/// On the manifold the blocks above equal `VᵀJᵀU` and `VᵀJX` with
/// `U = [−P_f, XJ]`, `V = [XJ, −P_f]`. Those products are formed explicitly:
/// the closed-form blocks assume `XᵀJX = J` exactly, and the leftover residual
/// of `X` then gets amplified by `t` on long steps. `E_ρ` is only checked for
/// shape. The factors do not depend on `t`, so one instance serves a whole
/// backtracking loop.
#[derive(Clone, Debug)]
pub struct CayleyLowRank<T> {
    x: SymplecticPoint<T>,
    left: DenseMatrix<T>,
    m: DenseMatrix<T>,
    rhs: DenseMatrix<T>,
}

impl<T: Real> CayleyLowRank<T> {
    pub fn new(x: &SymplecticPoint<T>, p_f: &DenseMatrix<T>, e_rho: &DenseMatrix<T>) -> Result<Self> {
        let xm = x.matrix();
        let k = xm.cols();
        if p_f.shape() != xm.shape() || e_rho.shape() != (k, k) {
            return Err(Error::dims(
                "retract_cayley_lowrank",
                format!("P_f {}x{}, E_rho {k}x{k}", xm.rows(), k),
                format!("P_f {}x{}, E_rho {}x{}", p_f.rows(), p_f.cols(), e_rho.rows(), e_rho.cols()),
            ));
        }
        let xj = j_right(xm);
        let left = (-p_f).hstack(&xj);
        let v = xj.hstack(&(-p_f));
        let m = v.tr_matmul(&jt_left(&left));
        let rhs = v.tr_matmul(&j_left(xm));
        Ok(Self {
            x: x.clone(),
            left,
            m,
            rhs,
        })
    }

    pub fn retract(&self, t: T) -> Result<SymplecticPoint<T>> {
        if t == T::zero() {
            return Ok(self.x.clone());
        }
        let a = shifted(&self.m, t * T::half());
        let c = inner_solve(&a, &self.rhs, t)?;
        let mut y = self.x.matrix().clone();
        y.axpy(t, &self.left.matmul(&c));
        SymplecticPoint::new_unchecked(y)
    }
}

pub fn retract_cayley_lowrank<T: Real>(
    x: &SymplecticPoint<T>,
    p_f: &DenseMatrix<T>,
    e_rho: &DenseMatrix<T>,
    t: T,
) -> Result<SymplecticPoint<T>> {
    CayleyLowRank::new(x, p_f, e_rho)?.retract(t)
}

/// Cayley retraction along an arbitrary tangent `Z`:
/// `Y = X + tU(I + (t/2)VᵀJᵀU)⁻¹VᵀJX` with `U = [L R]`, `V = [R L]`.
#[derive(Clone, Debug)]
pub struct CayleyGeneric<T> {
    x: SymplecticPoint<T>,
    u: DenseMatrix<T>,
    vtjtu: DenseMatrix<T>,
    vtjx: DenseMatrix<T>,
}

impl<T: Real> CayleyGeneric<T> {
    pub fn new(x: &SymplecticPoint<T>, z: &TangentVector<T>) -> Result<Self> {
        let (u, v) = tangent_to_s(x, z)?.uv();
        let vtjtu = v.tr_matmul(&jt_left(&u));
        let vtjx = v.tr_matmul(&j_left(x.matrix()));
        Ok(Self {
            x: x.clone(),
            u,
            vtjtu,
            vtjx,
        })
    }

    pub fn retract(&self, t: T) -> Result<SymplecticPoint<T>> {
        if t == T::zero() {
            return Ok(self.x.clone());
        }
        let a = shifted(&self.vtjtu, t * T::half());
        let c = inner_solve(&a, &self.vtjx, t)?;
        let mut y = self.x.matrix().clone();
        y.axpy(t, &self.u.matmul(&c));
        SymplecticPoint::new_unchecked(y)
    }
}

pub fn retract_cayley_generic<T: Real>(
    x: &SymplecticPoint<T>,
    z: &TangentVector<T>,
    t: T,
) -> Result<SymplecticPoint<T>> {
    CayleyGeneric::new(x, z)?.retract(t)
}

/// Dense reference `(I − (t/2)SJ)⁻¹(I + (t/2)SJ)X`.
pub fn retract_cayley_dense<T: Real>(
    x: &SymplecticPoint<T>,
    z: &TangentVector<T>,
    t: T,
) -> Result<SymplecticPoint<T>> {
    let sj = j_right(&tangent_to_s(x, z)?.densify());
    let h = t * T::half();
    let lhs = shifted(&sj, -h);
    let xm = x.matrix();
    let mut rhs = xm.clone();
    rhs.axpy(h, &sj.matmul(xm));
    SymplecticPoint::new_unchecked(inner_solve(&lhs, &rhs, t)?)
}
