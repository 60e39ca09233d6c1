use thiserror::Error;

/// Errors raised by the solver and its supporting numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge on [{lo}, {hi}]: estimated error {error:e} after {panels} panels")]
    NonConvergence {
        lo: f64,
        hi: f64,
        error: f64,
        panels: usize,
    },
    #[error("no finite interval captures all but {cutoff:e} of the envelope mass")]
    TruncationFailure { cutoff: f64 },
    #[error("bracket [{lo}, {hi}] does not straddle a root (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("support mismatch at y = {y}: reference density vanishes where the other does not")]
    SupportMismatch { y: f64 },
    #[error("tolerance {epsilon} is infeasible: must stay below D(f_1/2|f_0) - {margin:e} = {bound}")]
    InfeasibleTolerance {
        epsilon: f64,
        bound: f64,
        margin: f64,
    },
    #[error("nominal pair not usable (symmetric: {symmetric}, monotone likelihood ratio: {monotone_lr})")]
    UnvalidatedPair { symmetric: bool, monotone_lr: bool },
    #[error("robust rule is degenerate: likelihood ratio at the breakpoint is {ell_u}")]
    DegenerateRule { ell_u: f64 },
    #[error("CDF tabulation failed: {0}")]
    TabulationFailure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
