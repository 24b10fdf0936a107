use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("minimal polynomial must be nonzero with degree >= 1")]
    EmptyMinpoly,
    #[error("minimal polynomial {0} is not squarefree")]
    NotSquarefree(String),
    #[error("root hint does not isolate a root of {minpoly}: {reason}")]
    RootNotIsolated { minpoly: String, reason: String },
    #[error("element is not invertible: modulus has nontrivial factor {factor}")]
    ReducibleModulus { factor: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("degenerate system: {0}")]
    DegenerateSystem(String),
    #[error("pole of A(z) hit at iterate alpha^(q^{0})")]
    PoleHit(u32),
    #[error("pole of A(z) on the orbit of alpha at alpha^(q^{0})")]
    PoleOnOrbit(u32),
    #[error("point is not certified inside the punctured unit disk: {0}")]
    PointOutsideDisk(String),
    #[error("interval precision exhausted after {bits} bits: {context}")]
    AskMorePrecision { bits: u32, context: String },
    #[error("inconsistent seed at index {index}: lhs {lhs}, rhs {rhs}")]
    InconsistentSeed { index: usize, lhs: String, rhs: String },
    #[error("seed length {found} does not match required {expected}")]
    SeedLength { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
