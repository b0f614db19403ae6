use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("{0} did not converge")]
    ConvergenceFailure(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of bounds for order {order}")]
    IndexOutOfBounds { index: usize, order: usize },
    #[error("leading block is singular (smallest |eigenvalue| {smallest:.3e})")]
    SingularBlock { smallest: f64 },
    #[error("vector is zero")]
    ZeroVector,
    #[error("input vectors are linearly dependent")]
    DependentInputs,
    #[error("hermitian combination degenerate: no null vector with (y, z) != 0")]
    DegenerateSystem,
    #[error("vector is not in the kernel of the partial transpose (residual {residual:.3e})")]
    NotInKernel { residual: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("rank {rank} outside 1..={order}")]
    BadRank { rank: usize, order: usize },
    #[error("invalid target inertia {target}: {reason}")]
    InvalidTarget { target: String, reason: String },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown lemma `{0}`")]
    UnknownLemma(String),
}

pub type Result<T> = std::result::Result<T, Error>;
