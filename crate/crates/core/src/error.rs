use thiserror::Error;

/// Failure modes shared by every layer of the simulation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The truncated Fock space cannot hold the requested state accurately.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// A nominally real quantity carried an imaginary residue above tolerance,
    /// or an input contained non-finite entries.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// tr(Π_f ρ_s) fell below the configured floor.
    #[error("pre- and postselection are nearly orthogonal (overlap {overlap:e} below floor {floor:e})")]
    NearOrthogonalSelection { overlap: f64, floor: f64 },

    /// The postselected meter state has (numerically) zero trace.
    #[error("postselection trace {0:e} vanishes")]
    VanishingPostselection(f64),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
