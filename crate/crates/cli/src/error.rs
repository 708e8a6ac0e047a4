use predfront_core::Error;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("missing inputs in {dir}: expected {expected:?}")]
    MissingInputs { dir: String, expected: Vec<String> },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    exit_code: i32,
    message: String,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config(_) => "config",
            CliError::MissingInputs { .. } => "missing_inputs",
            CliError::Io(_) => "io",
        }
    }

    /// 2 for bad input, 3 for solver failures, 4 for oracle violations,
    /// 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::Validation(_) | Error::Domain(_) | Error::Range(_) | Error::Bracket(_) => 2,
                Error::Geometry(_) | Error::Solver(_) | Error::Construction(_) => 3,
                Error::Oracle(_) => 4,
            },
            CliError::Config(_) | CliError::MissingInputs { .. } => 2,
            CliError::Io(_) => 1,
        }
    }

    /// Single-line JSON error document.
    pub fn to_json(&self) -> String {
        let doc =
            ErrorDoc { error: ErrorBody { kind: self.kind(), exit_code: self.exit_code(), message: self.to_string() } };
        serde_json::to_string(&doc).expect("plain strings serialize")
    }
}
