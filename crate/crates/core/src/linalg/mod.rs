//! Dense complex linear algebra: Hermitian eigensolver, SVD, and the
//! congruence / Schur-complement helpers the inertia machinery is built on.

mod eigen;
mod matrix;
mod ops;
pub mod random;
mod svd;
mod tridiag;

pub use eigen::{eig_hermitian, eigvalsh, EigenDecomposition, HERMITIAN_REJECT, MAX_SWEEPS, OFF_DIAGONAL_TARGET};
pub use matrix::{normalize_phase, vec_dot, vec_kron, vec_norm, ComplexMatrix, C64, ONE, ZERO};
pub use ops::{
    congruence, determinant, inverse, kron, principal_submatrix, rank, schur_complement, solve, solve_real,
};
pub use svd::{complete_basis, svd, SvdDecomposition};
pub use tridiag::eigvalsh_tridiagonal;
