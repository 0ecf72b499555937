use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the model it feeds.
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    /// Bits must cross a link whose Shannon rate is zero.
    #[error("link has zero rate but {bits} bits must be transferred")]
    InfeasibleLink { bits: f64 },

    #[error("operation needs at least one learner in the group")]
    EmptyGroup,

    #[error("{0}: denominator is zero")]
    ZeroDenominator(&'static str),

    #[error("invalid config `{key}`: {reason}")]
    InvalidConfig {
        key: &'static str,
        reason: &'static str,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}
