use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The entangling cloner cannot reproduce a noisy channel with unit transmission.
    #[error(
        "infeasible cloner: excess noise {excess_noise} cannot be produced at unit transmission"
    )]
    InfeasibleCloner { excess_noise: f64 },

    #[error("bracket failure: objective has the same sign at {lo} and {hi}")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("no-positive-region: {0}")]
    NoPositiveRegion(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::NumericalFailure(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
