use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex index {index} out of range for graph with {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("invalid graph parameters: {0}")]
    InvalidParameters(String),
    #[error("graph text format error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("assignment length {got} does not match graph size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("size guard exceeded: {what} is {got}, limit {limit}")]
    SizeGuard {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("hardness parameter must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("qubit {qubit} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit indices must be distinct: {0:?}")]
    IndexCollision(Vec<usize>),
    #[error("phase factor at index {index} is not unimodular (|z| = {modulus})")]
    NotUnimodular { index: usize, modulus: f64 },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("measurement selected a branch of vanishing weight")]
    VanishingBranch,
    #[error("operation requires {expected} halt, run halted by {got}")]
    WrongHalt {
        expected: &'static str,
        got: &'static str,
    },
}
