//! Exit codes and the error carried to `main`.

use mqe_core::Error;

pub const OK: u8 = 0;
pub const INPUT: u8 = 1;
pub const USAGE: u8 = 2;
pub const NOT_ELLIPTIC: u8 = 3;
pub const INCONCLUSIVE: u8 = 4;
pub const IRREGULAR: u8 = 5;
pub const ELLIPTIC_INPUT: u8 = 6;
pub const NOT_OBSERVED: u8 = 7;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: INPUT,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Irregular(_) => IRREGULAR,
            Error::InvalidParameter(_) => USAGE,
            _ => INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;
