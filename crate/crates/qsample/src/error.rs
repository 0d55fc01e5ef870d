use thiserror::Error;

/// Harness-level failures, mapped onto the process exit codes:
/// 1 usage, 2 resource, 4 selftest (non-convergence is exit 3 but not an error).
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Core(#[from] qsample_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Resource(String),

    #[error("selftest failed: {0}")]
    Selftest(String),
}

impl HarnessError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(qsample_core::Error::ResourceCap { .. }) => 2,
            HarnessError::Resource(_) => 2,
            HarnessError::Selftest(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
