//! Riemannian gradient descent on the symplectic Stiefel manifold
//! `Sp(2p, 2n) = {X ∈ ℝ^{2n×2p} : XᵀJ₂ₙX = J₂ₚ}`.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar type for the common case.

pub mod error;
pub mod manifold;
pub mod matkit;
pub mod problems;
pub mod retraction;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use manifold::{
    check_symplectic, inner, project_normal, project_tangent, riemannian_gradient, tangent_to_s,
    MetricOperator, MetricSpec, MetricVariant, SymplecticPoint, SymplecticStiefel, TangentVector,
};
pub use matkit::DenseMatrix;
pub use retraction::RetractionKind;
pub use scalar::Real;
pub use solver::{solve, LineSearchConfig, SolveReport, StepRule, StopConfig, Termination};

pub type Mat = DenseMatrix<f64>;
pub type Mat32 = DenseMatrix<f32>;
pub type Point = SymplecticPoint<f64>;
pub type Point32 = SymplecticPoint<f32>;
pub type Tangent = TangentVector<f64>;
pub type Report = SolveReport<f64>;
