use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("step law rejected:\n{0}")]
    Validation(String),

    #[error("check `{check}` failed: {source}")]
    Check {
        check: String,
        #[source]
        source: rwalk_core::Error,
    },

    #[error("{0}")]
    Failed(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 usage or config, 2 step-law validation, 3 check failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Output { .. } => 1,
            Self::Validation(_) => 2,
            Self::Check { .. } | Self::Failed(_) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
