use std::fmt;

/// Failure classes of the command line tool, each with its exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Domain,
    Size,
    Internal,
    /// A verification suite ran and reported failures.
    Verify,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Input => 2,
            ErrorKind::Domain => 3,
            ErrorKind::Size => 4,
            ErrorKind::Internal | ErrorKind::Verify => 1,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ErrorKind::Input => "input",
            ErrorKind::Domain => "domain",
            ErrorKind::Size => "size",
            ErrorKind::Internal => "internal",
            ErrorKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Input, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

/// One line, `error[kind]: message`, with newlines flattened.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat = self.message.replace(['\n', '\r'], " ");
        write!(f, "error[{}]: {}", self.kind.tag(), flat)
    }
}

impl std::error::Error for CliError {}

impl From<credal_ot::Error> for CliError {
    fn from(e: credal_ot::Error) -> Self {
        let kind = match e {
            credal_ot::Error::Input(_) => ErrorKind::Input,
            credal_ot::Error::Domain(_) => ErrorKind::Domain,
            credal_ot::Error::Size { .. } => ErrorKind::Size,
            credal_ot::Error::Internal(_) => ErrorKind::Internal,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::input(format!("schema: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
