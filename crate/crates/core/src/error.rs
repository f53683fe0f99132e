use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArcError {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at evaluation point")]
    PoleAtEvaluation,
    #[error("quadrature did not converge after {levels} levels (last change {last_change:e})")]
    QuadratureNonConvergence { levels: u32, last_change: f64 },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteIntegrand { x: f64 },
    #[error("matrix not positive definite at working precision (pivot {index})")]
    NotPositiveDefinite { index: usize },
    #[error("non-positive prediction error at step {index}")]
    NonPositivePredictionError { index: usize },
    #[error("levinson and dense oracle disagree by {gap:e}")]
    OracleDisagreement { gap: f64 },
    #[error("precision escalation exhausted at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("unstable correlator request (g = {g}, p = {p})")]
    Unstable { g: u32, p: usize },
    #[error("nonzero residue of omega_(g={g},1) at a branchpoint")]
    NonzeroResidue { g: u32 },
    #[error("one-form has a pole of order {order} (simple poles required)")]
    NonSimplePole { order: usize },
    #[error("requested depth {requested} exceeds available depth {available}")]
    DepthExceeded { requested: u32, available: u32 },
    #[error("series truncation at order {order} too low for residue extraction")]
    TruncationTooLow { order: i32 },
    #[error("histogram configuration is empty")]
    EmptyBins,
    #[error("remainder class {m} has fewer than two members up to n = {n_max}")]
    InsufficientClassMembers { m: usize, n_max: usize },
    #[error("least-squares system is singular")]
    SingularFit,
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ArcError>;

impl From<std::io::Error> for ArcError {
    fn from(e: std::io::Error) -> Self {
        ArcError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for ArcError {
    fn from(e: serde_json::Error) -> Self {
        ArcError::Io(e.to_string())
    }
}
