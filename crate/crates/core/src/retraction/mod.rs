//! Retractions: quasi-geodesic curves and the Cayley transform.

mod cayley;
mod qgeo;

pub use cayley::{
    retract_cayley_dense, retract_cayley_generic, retract_cayley_lowrank, CayleyGeneric,
    CayleyLowRank, CAYLEY_COND_MAX,
};
pub use qgeo::retract_qgeo;

use crate::error::{Error, Result};
use crate::manifold::{RiemannianGradient, SymplecticPoint, TangentVector};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RetractionKind {
    QuasiGeodesic,
    CayleyLowRank,
    /// Dense `O(n³)` Cayley transform; reference only.
    CayleyDense,
}

impl std::str::FromStr for RetractionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qgeo" | "quasi-geodesic" => Ok(Self::QuasiGeodesic),
            "cayley" | "cayley-lowrank" => Ok(Self::CayleyLowRank),
            "cayley-dense" => Ok(Self::CayleyDense),
            other => Err(Error::InvalidParameter(format!("unknown retraction {other:?}"))),
        }
    }
}

impl std::fmt::Display for RetractionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::QuasiGeodesic => "qgeo",
            Self::CayleyLowRank => "cayley",
            Self::CayleyDense => "cayley-dense",
        })
    }
}

/// A step along `−grad f` prepared once per iterate and evaluated for each
/// trial step size.
#[derive(Clone, Debug)]
pub enum DescentStep<T> {
    QuasiGeodesic {
        x: SymplecticPoint<T>,
        z: TangentVector<T>,
    },
    CayleyLowRank(CayleyLowRank<T>),
    CayleyDense {
        x: SymplecticPoint<T>,
        z: TangentVector<T>,
    },
}

impl<T: Real> DescentStep<T> {
    pub fn new(kind: RetractionKind, x: &SymplecticPoint<T>, rg: &RiemannianGradient<T>) -> Result<Self> {
        let z = || rg.grad.scale(-T::one());
        Ok(match kind {
            RetractionKind::QuasiGeodesic => Self::QuasiGeodesic { x: x.clone(), z: z() },
            RetractionKind::CayleyLowRank => Self::CayleyLowRank(CayleyLowRank::new(x, &rg.p_f, &rg.e_rho)?),
            RetractionKind::CayleyDense => Self::CayleyDense { x: x.clone(), z: z() },
        })
    }

    pub fn retract(&self, t: T) -> Result<SymplecticPoint<T>> {
        match self {
            // The curve is defined for every t, but long trial steps overflow the exponential.
            Self::QuasiGeodesic { x, z } => retract_qgeo(x, z, t).map_err(|e| domain_error(t, e)),
            Self::CayleyLowRank(c) => c.retract(t),
            Self::CayleyDense { x, z } => retract_cayley_dense(x, z, t),
        }
    }
}

pub(crate) fn domain_error<T: Real>(t: T, e: Error) -> Error {
    match e {
        Error::NotInvertible { pivot, threshold } => Error::Domain {
            t: t.to_f64_lossy(),
            reason: format!("inner system singular (pivot {pivot:e} <= {threshold:e})"),
        },
        Error::IllConditioned { cond } => Error::Domain {
            t: t.to_f64_lossy(),
            reason: format!("inner system ill-conditioned (cond {cond:e})"),
        },
        Error::NumericRange { op } => Error::Domain {
            t: t.to_f64_lossy(),
            reason: format!("{op} leaves the floating-point range"),
        },
        other => other,
    }
}
