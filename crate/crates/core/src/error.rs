//! Crate-wide error type.

use crate::model::Node;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Why no schedule can meet the rate demands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfeasibleCause {
    /// The node cannot reach the required power even with the whole frame.
    PowerCap(Node),
    /// Residual self-interference at the relay/terminals is too strong for the
    /// demanded rates, whatever the transmit powers.
    InsufficientCancellation,
    /// Each slot fits on its own but their minimal durations exceed the frame.
    FrameBudget { t_min_1: f64, t_min_2: f64 },
}

impl std::fmt::Display for InfeasibleCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfeasibleCause::PowerCap(n) => write!(f, "power cap of node {n} exceeded"),
            InfeasibleCause::InsufficientCancellation => {
                write!(f, "insufficient self-interference cancellation")
            }
            InfeasibleCause::FrameBudget { t_min_1, t_min_2 } => write!(
                f,
                "minimal slot durations {t_min_1:.6e} s + {t_min_2:.6e} s exceed the frame"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("transmit power {p:.6e} W exceeds the PA limit {p_max:.6e} W")]
    PowerBudget { p: f64, p_max: f64 },
    #[error("durations t1 = {t1:.6e} s, t2 = {t2:.6e} s are outside the frame")]
    DurationOutOfRange { t1: f64, t2: f64 },
    #[error("insufficient self-interference cancellation at t = {t:.6e} s")]
    InsufficientCancellation { t: f64 },
    #[error("spectral load {lambda:.3e} bit/s/Hz is too high to evaluate")]
    LoadTooHigh { lambda: f64 },
    #[error("infeasible: {0}")]
    Infeasible(InfeasibleCause),
    #[error("empty search bracket [{lo:.6e}, {hi:.6e}]")]
    EmptyBracket { lo: f64, hi: f64 },
    #[error("objective is not finite at {at:.6e}")]
    NonFinite { at: f64 },
    #[error("oracle grid contains no feasible point")]
    EmptyFeasibleSet,
    #[error("necessary condition `{constraint}` violated: relative slack {slack:.3e}")]
    NecessaryCondition {
        constraint: &'static str,
        slack: f64,
    },
}

impl Error {
    /// True for errors that mean "this scenario/duration cannot be served",
    /// as opposed to bad input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_)
                | Error::InsufficientCancellation { .. }
                | Error::LoadTooHigh { .. }
                | Error::PowerBudget { .. }
        )
    }
}
