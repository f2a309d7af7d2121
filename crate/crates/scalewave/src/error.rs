use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] scalewave_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("run diverged at t = {0}")]
    Diverged(f64),
}

impl CliError {
    /// 1 usage, 2 regime or config, 3 diverged.
    pub fn exit_code(&self) -> i32 {
        use scalewave_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Csv(_) => 1,
            CliError::Config(_) | CliError::Json(_) => 2,
            CliError::Core(e) => match e {
                E::Input(_) | E::Fit(_) | E::LengthMismatch { .. } => 1,
                _ => 2,
            },
            CliError::Diverged(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
