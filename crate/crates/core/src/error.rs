use std::fmt;

/// Failure classes shared by every operation; the CLI maps them onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or out-of-contract input.
    Input(String),
    /// A configured resource cap would be exceeded.
    Cap {
        what: String,
        required: String,
        cap: String,
    },
    /// An invariant that should never fail did.
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn cap(
        what: impl Into<String>,
        required: impl fmt::Display,
        cap: impl fmt::Display,
    ) -> Self {
        Error::Cap {
            what: what.into(),
            required: required.to_string(),
            cap: cap.to_string(),
        }
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(m) => write!(f, "{m}"),
            Error::Cap {
                what,
                required,
                cap,
            } => {
                write!(f, "{what}: needs {required}, cap is {cap}")
            }
            Error::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
