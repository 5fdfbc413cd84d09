use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at line {line}, column {column}: {message}")]
    Config { line: usize, column: usize, message: String },
    #[error("config error in `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("task `{task}` failed: {source}")]
    Task {
        task: String,
        #[source]
        source: psg_core::Error,
    },
    #[error("unknown check `{0}`; known checks: {1}")]
    UnknownCheck(String, String),
    #[error("unknown preset `{0}`; known presets: {1}")]
    UnknownPreset(String, String),
    #[error(transparent)]
    Core(#[from] psg_core::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid { field: field.into(), message: message.into() }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io { context: context.into(), source }
    }

    /// Process exit code: 2 for input errors, 3 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config { .. } | Self::Invalid { .. } | Self::UnknownCheck(..) | Self::UnknownPreset(..) => 2,
            _ => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
