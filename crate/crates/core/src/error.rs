use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no {d}-regular graph on {n} vertices: {reason}")]
    InfeasibleRegular { n: usize, d: usize, reason: &'static str },

    #[error("{n} qubits exceeds the configured cap of {cap}")]
    QubitCap { n: usize, cap: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge ({0}, {1}) has a non-finite weight")]
    NonFiniteWeight(usize, usize),

    #[error("dimension mismatch: expected {expected} amplitudes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid Pauli string: {0}")]
    InvalidPauli(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shot estimator needs at least one shot per string")]
    ZeroShots,

    #[error("reference schedule has {found} entries but the run needs {needed}")]
    ScheduleTooShort { needed: usize, found: usize },

    #[error("parameter lists differ in length: {gammas} gammas, {betas} betas")]
    LengthMismatch { gammas: usize, betas: usize },

    #[error("approximation ratio undefined for '{0}': ground energy is zero")]
    UndefinedRatio(String),

    #[error("monotonicity already fails at the lower bound dt = {lo}")]
    NoPassingDt { lo: f64 },

    #[error("malformed instance: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
