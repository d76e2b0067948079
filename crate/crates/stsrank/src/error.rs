use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A (p, n, t) triple or other parameter set fails its validity rules.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A vector or matrix has the wrong dimensions for the requested operation.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// The input is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A desk-scale resource cap would be exceeded.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    /// A counting constant is neither enumerable within caps nor tabulated.
    #[error("unknown constant: {0}")]
    UnknownConstant(String),

    /// A triple system is not contained in the ambient weight-3 design.
    #[error("containment error: {0}")]
    Containment(String),

    /// A recipe or decomposition violates the required block-set structure.
    #[error("structure violation: {0}")]
    StructureViolation(String),

    /// An internal exactness assertion failed (e.g. a division expected to
    /// be exact left a remainder).
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownConstant(_) => 3,
            Error::ResourceCap(_) => 4,
            _ => 1,
        }
    }
}
