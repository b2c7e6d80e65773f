use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("doubled site index {0} outside the representable range")]
    SiteOutOfRange(i32),
    #[error("monomial sites must be strictly ascending")]
    NonCanonicalMonomial,
    #[error("support [{lo}, {hi}] (doubled) is not representable on qubit window [{window_lo}, {window_hi}]")]
    UnrepresentableSupport { lo: i32, hi: i32, window_lo: i32, window_hi: i32 },
    #[error("window of {qubits} qubits exceeds the cap of {cap}")]
    WindowTooLarge { qubits: u32, cap: u32 },
    #[error("window bounds are empty or inverted")]
    EmptyWindow,
    #[error("element is not self-adjoint (deviation {0:e})")]
    NonHermitian(f64),
    #[error("vector ({0}, {1}, {2}) is not a unit vector")]
    NonUnitVector(f64, f64, f64),
    #[error("invalid dynamics parameters: {0}")]
    InvalidDynamics(String),
    #[error("mixing weight {0} outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("invalid partition of unity: {0}")]
    InvalidPartition(String),
    #[error("events do not commute (commutator norm {0:e})")]
    NonCommutingEvents(f64),
    #[error("grid size {0} is too small (need at least 2)")]
    GridTooSmall(usize),
    #[error("invalid double cone: {0}")]
    MalformedRegion(String),
    #[error("scenario document: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
