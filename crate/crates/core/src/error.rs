use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("block {block} out of range for {m} blocks")]
    BlockOutOfRange { block: usize, m: usize },

    #[error("unknown qubit {0} for this operator")]
    UnknownQubit(usize),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("gate on qubits ({a}, {b}) in layer {layer} is not nearest-neighbor")]
    NonLocalGate { layer: usize, a: usize, b: usize },

    #[error("gate matrix in layer {layer} is not unitary (deviation {deviation:.3e})")]
    NonUnitary { layer: usize, deviation: f64 },

    #[error("overlapping targets in layer {layer}: qubit {qubit}")]
    OverlappingTargets { layer: usize, qubit: usize },

    #[error("size guard exceeded: {what} needs {needed} qubits, limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("conditioning event has probability {0:.3e}")]
    ZeroProbability(f64),

    #[error("quasi-distribution has no positive mass")]
    NoPositiveMass,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
