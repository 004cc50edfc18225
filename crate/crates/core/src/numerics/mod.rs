//! Small dense linear-algebra kernels in double precision.

mod affine;
mod eigen;
mod linalg;
mod polar;
mod svd;

pub use affine::{factor_affine, AffineFactors};
pub use eigen::{eig_sym3, eigenvalues_sym3, EigenTriple, REPEATED_EIGENVALUE_TOL};
pub use linalg::{AffineTransform, Mat3, Quat, SymMat3, Vec3};
pub use polar::{inv_sqrt_sym3, polar_rotation, RANK_TOL};
pub use svd::{svd3, svd_rotation_oracle, Svd3};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is rank-deficient (eigenvalue ratio {ratio:e})")]
    DegenerateInput { ratio: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
}
