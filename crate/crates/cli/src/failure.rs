//! Exit-code policy: 0 success, 2 usage/validation, 3 numerical failure.

use mezzo_core::Error;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, bad values, unusable configuration. Exit code 2.
    Usage(String),
    /// The computation itself failed or breached a tolerance. Exit code 3.
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        if error.is_validation() {
            Failure::Usage(error.to_string())
        } else {
            Failure::Numerical(error.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(error: std::io::Error) -> Self {
        Failure::Usage(format!("io error: {error}"))
    }
}

pub type CmdResult = Result<(), Failure>;
