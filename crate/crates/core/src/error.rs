use thiserror::Error;

/// Errors raised by the numerical primitives and the physics models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid bracket [{lo}, {hi}]: {reason}")]
    Bracket { lo: f64, hi: f64, reason: &'static str },

    #[error("no root found in (0, {upper}]")]
    NoRoot { upper: f64 },

    #[error("{method} did not converge within {iterations} iterations")]
    Convergence { method: &'static str, iterations: usize },

    #[error("lattice sum not cutoff-stable: |W({doubled}) - W({cutoff})| = {change:e} exceeds {tail_tol:e}")]
    CutoffInstability {
        cutoff: u32,
        doubled: u32,
        change: f64,
        tail_tol: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular derivative at r_s = {rs}: de/dr_s = {derivative:e} lies within ±{floor:e} of zero")]
    SingularDerivative { rs: f64, derivative: f64, floor: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
