//! Dense kernels: matrix type, implicit `J`, factorizations, `expm` and
//! seeded generators.

pub mod decomp;
pub mod dense;
pub mod expm;
pub mod poisson;
pub mod random;

pub use decomp::{qr_full, solve_dense, Cholesky, Lu, PIVOT_RTOL};
pub use dense::DenseMatrix;
pub use expm::expm;
pub use poisson::{apply_j_left, poisson_dense, skew_part, sym_part, PoissonStructure};
pub use random::{
    canonical, rand_gaussian, rand_orthogonal, rand_symplectic, rand_symplectic_with,
    InitStrategy, MatrixRng,
};
