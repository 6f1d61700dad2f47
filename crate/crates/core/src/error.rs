use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |A - A†| = {0:.3e})")]
    NonHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("trace preservation violated: ‖L†(I)‖_max = {0:.3e}")]
    TraceViolation(f64),

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("steady state is not unique (degenerate Liouvillian kernel)")]
    DegenerateKernel,

    #[error("method {method:?} is not defined for pair type {pair}")]
    MethodUnsupported { method: String, pair: String },

    #[error("interaction {kind} is incompatible with pair type {pair}")]
    IncompatibleInteraction { kind: String, pair: String },

    #[error("incompatible subsystem pair: {0}")]
    IncompatiblePair(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
