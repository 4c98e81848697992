use std::fmt;
use std::path::Path;

/// A failed run, classified by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration (exit 1).
    Usage(String),
    /// Unreadable or invalid input data (exit 2).
    Data(String),
    /// A broken internal invariant (exit 3).
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    /// Classify a core error raised while processing `path`.
    pub fn at(path: &Path, e: firestorm_core::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        Self::classify(e, msg)
    }

    fn classify(e: firestorm_core::Error, msg: String) -> Self {
        use firestorm_core::Error;
        if e.is_internal() {
            return Failure::Internal(msg);
        }
        match e {
            Error::InvalidConfig(_)
            | Error::UnknownCategory(_)
            | Error::UnknownMetric(_)
            | Error::InvalidPenalty(_)
            | Error::InvalidLabel(_)
            | Error::InfeasibleFraction { .. } => Failure::Usage(msg),
            _ => Failure::Data(msg),
        }
    }
}

impl From<firestorm_core::Error> for Failure {
    fn from(e: firestorm_core::Error) -> Self {
        let msg = e.to_string();
        Self::classify(e, msg)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Failure {}

pub type CliResult<T = ()> = Result<T, Failure>;
