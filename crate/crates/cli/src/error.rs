use std::process::ExitCode;

use weakpdc::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0} invariant checks failed")]
    CheckFailed(usize),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => core_exit_code(e),
            CliError::CheckFailed(_) => 5,
        }
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

/// 2 for bad inputs, 3 for numerical or truncation trouble, 4 for singular
/// configurations.
pub fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::InvalidArgument(_) => 2,
        CoreError::SingularConfiguration(_) => 4,
        CoreError::DimensionMismatch { .. }
        | CoreError::Truncation(_)
        | CoreError::Numerical(_)
        | CoreError::NearOrthogonalSelection { .. }
        | CoreError::VanishingPostselection(_) => 3,
    }
}

/// Short machine-readable name for report rows.
pub fn core_error_kind(e: &CoreError) -> &'static str {
    match e {
        CoreError::InvalidArgument(_) => "invalid_argument",
        CoreError::DimensionMismatch { .. } => "dimension_mismatch",
        CoreError::Truncation(_) => "truncation",
        CoreError::Numerical(_) => "numerical",
        CoreError::NearOrthogonalSelection { .. } => "near_orthogonal_selection",
        CoreError::VanishingPostselection(_) => "vanishing_postselection",
        CoreError::SingularConfiguration(_) => "singular_configuration",
    }
}
