use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown level label `{0}`")]
    UnknownLabel(String),
    #[error("fit did not converge after {iterations} iterations (cost {cost:e})")]
    NonConvergence { iterations: usize, cost: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {{
        // NaN must fail the check, so no De Morgan rewrite of $cond
        let holds: bool = $cond;
        if !holds {
            return Err($crate::Error::InvalidInput(format!($($arg)+)));
        }
    }};
}
pub(crate) use ensure;
