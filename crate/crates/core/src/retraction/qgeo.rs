use crate::error::Result;
use crate::manifold::{SymplecticPoint, TangentVector};
use crate::matkit::expm;
use crate::matkit::poisson::j_left;
use crate::matkit::DenseMatrix;
use crate::scalar::Real;

/// Quasi-geodesic retraction
/// `Y(t) = [X, Z]·exp(t[[−JW, JZᵀJZ], [I, −JW]])·[I; 0]·exp(tJW)`, `W = XᵀJZ`.
pub fn retract_qgeo<T: Real>(x: &SymplecticPoint<T>, z: &TangentVector<T>, t: T) -> Result<SymplecticPoint<T>> {
    z.check_base(x)?;
    let xm = x.matrix();
    let zm = z.matrix();
    let k = xm.cols();
    let w = xm.tr_matmul(&j_left(zm));
    let jw = j_left(&w);
    let jztjz = j_left(&zm.tr_matmul(&j_left(zm)));

    let mut m = DenseMatrix::zeros(2 * k, 2 * k);
    let neg_jw = jw.scale(-t);
    m.set_block(0, 0, &neg_jw);
    m.set_block(0, k, &jztjz.scale(t));
    m.set_block(k, 0, &DenseMatrix::identity(k).scale(t));
    m.set_block(k, k, &neg_jw);
    let e = expm(&m)?;
    let top = e.block(0, 0, k, k);
    let bottom = e.block(k, 0, k, k);
    let mut y = xm.matmul(&top);
    y += &zm.matmul(&bottom);
    let y = y.matmul(&expm(&jw.scale(t))?);
    SymplecticPoint::new_unchecked(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::project_tangent;
    use crate::matkit::{rand_gaussian, rand_symplectic, InitStrategy};

    fn setup(n: usize, p: usize, seed: u64) -> (SymplecticPoint<f64>, TangentVector<f64>) {
        let x = rand_symplectic(n, p, InitStrategy::FullExponential, seed).unwrap();
        let z = project_tangent(&x, &rand_gaussian(2 * n, 2 * p, seed + 1000)).unwrap();
        (x, z)
    }

    #[test]
    fn zero_step_is_identity() {
        let (x, z) = setup(4, 2, 1);
        let y = retract_qgeo(&x, &z, 0.0).unwrap();
        assert!((y.matrix() - x.matrix()).max_abs() <= 1e-14 * x.matrix().max_abs());
    }

    #[test]
    fn full_group_closed_form() {
        let (u, z) = setup(2, 2, 3);
        let t = 0.3;
        let w = u.matrix().tr_matmul(&j_left(z.matrix()));
        let expect = u.matrix().matmul(&expm(&j_left(&w).scale(-t)).unwrap());
        let got = retract_qgeo(&u, &z, t).unwrap();
        assert!((got.matrix() - &expect).max_abs() <= 1e-10);
    }

    #[test]
    fn stays_feasible_and_is_first_order() {
        let (x, z) = setup(3, 1, 5);
        let zn = z.matrix().frobenius_norm();
        let z = z.scale(1.0 / zn);
        for t in [0.5, 2.0, 5.0] {
            assert!(retract_qgeo(&x, &z, t).unwrap().residual() <= 1e-8);
        }
        let slope = |t: f64| {
            let y = retract_qgeo(&x, &z, t).unwrap();
            (&(y.matrix() - x.matrix()).scale(1.0 / t) - z.matrix()).frobenius_norm()
        };
        let (e3, e4) = (slope(1e-3), slope(1e-4));
        let c = e3 / 1e-3;
        assert!(e4 <= 2.0 * c * 1e-4, "{e3:e} {e4:e}");
        assert!(e4 < e3 / 5.0);
    }
}
