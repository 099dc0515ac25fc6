//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! of degree 3, 5, 7, 9 or 13 (Higham 2005).

use crate::error::{Error, Result};
use crate::matkit::decomp::Lu;
use crate::matkit::DenseMatrix;
use crate::scalar::Real;

const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_230e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `e^A` for square `A`.
pub fn expm<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "expm",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    let norm = a.norm_1().to_f64_lossy();
    if !norm.is_finite() {
        return Err(Error::NumericRange { op: "expm" });
    }
    if norm == 0.0 {
        return Ok(DenseMatrix::identity(n));
    }

    let out = if norm <= THETA_3 {
        pade_low(a, &B3)?
    } else if norm <= THETA_5 {
        pade_low(a, &B5)?
    } else if norm <= THETA_7 {
        pade_low(a, &B7)?
    } else if norm <= THETA_9 {
        pade_low(a, &B9)?
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        if s > 1000 {
            return Err(Error::NumericRange { op: "expm" });
        }
        let scaled = a.scale(T::lit(2f64.powi(-s)));
        let mut r = pade13(&scaled)?;
        for _ in 0..s {
            r = r.matmul(&r);
            if !r.is_finite() {
                return Err(Error::NumericRange { op: "expm" });
            }
        }
        r
    };
    if !out.is_finite() {
        return Err(Error::NumericRange { op: "expm" });
    }
    Ok(out)
}

fn pade_low<T: Real>(a: &DenseMatrix<T>, b: &[f64]) -> Result<DenseMatrix<T>> {
    let n = a.rows();
    let id = DenseMatrix::<T>::identity(n);
    let a2 = a.matmul(a);
    // powers[k] = A^(2k)
    let mut powers = vec![id.clone(), a2.clone()];
    let degree = b.len() - 1;
    while 2 * (powers.len() - 1) < degree - 1 {
        let next = powers.last().expect("nonempty").matmul(&a2);
        powers.push(next);
    }
    let mut u_inner = DenseMatrix::zeros(n, n);
    let mut v = DenseMatrix::zeros(n, n);
    for (k, &bk) in b.iter().enumerate() {
        let p = &powers[k / 2];
        if k % 2 == 1 {
            u_inner.axpy(T::lit(bk), p);
        } else {
            v.axpy(T::lit(bk), p);
        }
    }
    let u = a.matmul(&u_inner);
    pade_solve(&u, &v)
}

fn pade13<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = a.rows();
    let b = |k: usize| T::lit(B13[k]);
    let id = DenseMatrix::<T>::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let mut w1 = a6.scale(b(13));
    w1.axpy(b(11), &a4);
    w1.axpy(b(9), &a2);
    let mut w = a6.matmul(&w1);
    w.axpy(b(7), &a6);
    w.axpy(b(5), &a4);
    w.axpy(b(3), &a2);
    w.axpy(b(1), &id);
    let u = a.matmul(&w);

    let mut z1 = a6.scale(b(12));
    z1.axpy(b(10), &a4);
    z1.axpy(b(8), &a2);
    let mut v = a6.matmul(&z1);
    v.axpy(b(6), &a6);
    v.axpy(b(4), &a4);
    v.axpy(b(2), &a2);
    v.axpy(b(0), &id);
    pade_solve(&u, &v)
}

/// `(V - U)⁻¹ (V + U)`.
fn pade_solve<T: Real>(u: &DenseMatrix<T>, v: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let num = v + u;
    let den = v - u;
    let lu = Lu::factor(&den).map_err(|_| Error::NumericRange { op: "expm" })?;
    lu.solve(&num)
}
