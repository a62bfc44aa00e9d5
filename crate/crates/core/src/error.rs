//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::gmetric::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point (or index) does not belong to the carrier it was used with.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument is outside the admissible range of the operation.
    #[error("invalid parameter `{name}`: {message}")]
    Parameter { name: &'static str, message: String },

    /// A rate formula hit a nonpositive denominator.
    #[error("singular rate: denominator {denominator} is not positive")]
    Singularity { denominator: f64 },

    /// A coefficient schedule violates the standing bounds of the theorem it is used with.
    #[error("hypothesis violated at (i, j, k) = ({i}, {j}, {k}): {message}")]
    HypothesisViolation {
        i: usize,
        j: usize,
        k: usize,
        message: String,
    },

    /// The schedule lacks the coefficient family required by the requested mode.
    #[error("mode error: {0}")]
    Mode(String),

    /// A finite table or config document failed validation.
    #[error("invalid table: {0}")]
    Table(String),

    /// `solve` was called with a hypothesis check that does not belong to the problem.
    #[error("stale hypothesis check: verified fingerprint {verified:#018x}, problem fingerprint {current:#018x}")]
    Staleness { verified: u64, current: u64 },

    /// `solve` was called on a problem whose hypotheses did not pass.
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),

    /// The orbit did not settle on an accepted common fixed point within budget.
    #[error("no convergence after {steps} steps (last residual {residual:e})")]
    NonConvergence {
        steps: usize,
        residual: f64,
        trace: Box<crate::solver::OrbitTrace>,
    },

    /// A solve launched from one of several starting points failed.
    #[error("solve from start {start:?} failed: {source}")]
    StartFailed {
        start: Point,
        #[source]
        source: Box<Error>,
    },

    /// An enumeration exceeds its candidate budget.
    #[error("enumeration budget exceeded: {count} candidates > cap {cap}")]
    Budget { count: u128, cap: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            message: message.into(),
        }
    }
}
