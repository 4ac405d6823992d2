use thiserror::Error;

/// Errors raised anywhere in the synthesis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported qubit count {0} (must be 1..=128)")]
    QubitCount(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dynamical Lie algebra exceeded capacity {limit} (reached {reached} elements)")]
    Capacity { limit: usize, reached: usize },

    #[error("involution incompatible with Hamiltonian: term {0} lands in k")]
    InvolutionIncompatible(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("no distance-2 witness is guaranteed: {0}")]
    WitnessNotGuaranteed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("staging error: operator weight {weight:.3e} anticommutes with earlier generators (tolerance {tol:.1e})")]
    Staging { weight: f64, tol: f64 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("ordering theorem violated: {0}")]
    TheoremViolation(String),

    #[error("unsupported ansatz: {0}")]
    UnsupportedAnsatz(String),

    #[error("dense cap exceeded: {qubits} qubits > cap {cap}")]
    DenseCap { qubits: usize, cap: usize },

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("identity string has no state-preparation circuit")]
    IdentityString,

    #[error("unknown model family `{0}`")]
    UnknownModel(String),

    #[error("circuit contains a non-unitary gate ({0})")]
    NonUnitary(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
