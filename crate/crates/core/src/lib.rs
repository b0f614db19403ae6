//! Inertia of partial transposes of bipartite positive semidefinite matrices.
//!
//! * [`linalg`]: dense complex kernel (Jacobi eigensolver, SVD, congruence).
//! * [`ptrans`]: partial transpose, inertia counting, product vectors.
//! * [`reduce`]: kernel-aligned normal forms and inertia rules.
//! * [`search`]: sampling, inertia catalogs, witness search, lemma checks.

pub mod error;
pub mod linalg;
pub mod ptrans;
pub mod reduce;
pub mod search;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use ptrans::{inertia, partial_transpose, BipartiteDims, Inertia, ProductVector};

