use std::fmt;

use circadia::{Error, ErrorClass};

/// Exit statuses of the front end.
pub mod exit {
    pub const OK: i32 = 0;
    /// The requested physics lies outside the method's regime.
    pub const REGIME: i32 = 2;
    /// A numerical method did not converge or resolve its target.
    pub const NUMERICAL: i32 = 3;
    /// Malformed command line or input files.
    pub const USAGE: i32 = 64;
    /// Outputs could not be written.
    pub const IO: i32 = 74;
}

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    Io(std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) => match e.class() {
                ErrorClass::Input => exit::USAGE,
                ErrorClass::Regime => exit::REGIME,
                ErrorClass::Numerical => exit::NUMERICAL,
            },
            Failure::Usage(_) => exit::USAGE,
            Failure::Io(_) => exit::IO,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Io(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}
