use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("scalars live over different torsion moduli ({0} vs {1})")]
    ModulusMismatch(u32, u32),

    #[error("generator `{0}` is not registered in the generator table")]
    UnknownGenerator(String),

    #[error("invalid generator table: {0}")]
    InvalidTable(String),

    #[error("index {index} out of range for dimension n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid triple ({0}, {1}, {2}): indices must be strictly increasing")]
    InvalidTriple(usize, usize, usize),

    #[error("dimension n = {n} is not supported here (maximum {max})")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("no value assigned to generator `{0}`")]
    MissingAssignment(String),

    #[error("generator `{0}` was assigned zero")]
    ZeroAssignment(String),

    #[error("torsion modulus {0} cannot be represented by rational numbers")]
    TorsionNotRational(u32),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("integer overflow in lattice arithmetic")]
    Overflow,

    #[error("collection is not adequate")]
    NotAdequate,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconsistent normalization: {0}")]
    InconsistentNormalization(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
