use thiserror::Error;

use crate::numeric::Convergent;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ambiguous floor: {value} lies within {guard:e} of an integer")]
    AmbiguousFloor { value: f64, guard: f64 },

    #[error("precision exhausted after {} certified convergents", .convergents.len())]
    PrecisionExhausted { convergents: Vec<Convergent> },

    #[error("rational value: expansion terminated after {} convergents", .convergents.len())]
    RationalTerminated { convergents: Vec<Convergent> },

    #[error("argument must be nonzero")]
    ZeroArgument,

    #[error("range is empty: {0}")]
    RangeEmpty(String),

    #[error("invalid gamma {0}: must lie in (0, 1)")]
    InvalidGamma(f64),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("quadrature budget exceeded: need {needed} evaluations, budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("lambda0 = {lambda0} is not admissible (bound {bound})")]
    InadmissibleLambda0 { lambda0: f64, bound: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidGamma(_)
            | Error::InvalidInput(_)
            | Error::RangeEmpty(_)
            | Error::ZeroArgument
            | Error::InadmissibleLambda0 { .. }
            | Error::RationalTerminated { .. } => 3,
            Error::SizeLimit(_) | Error::BudgetExceeded { .. } => 4,
            _ => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::AmbiguousFloor { .. } => "AmbiguousFloor",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::RationalTerminated { .. } => "RationalTerminated",
            Error::ZeroArgument => "ZeroArgument",
            Error::RangeEmpty(_) => "RangeEmpty",
            Error::InvalidGamma(_) => "InvalidGamma",
            Error::Overflow(_) => "Overflow",
            Error::SizeLimit(_) => "SizeLimit",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::InadmissibleLambda0 { .. } => "InadmissibleLambda0",
            Error::Config(_) => "Config",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Invariant(_) => "Invariant",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
