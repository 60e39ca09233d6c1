use serde::Serialize;

use super::DecisionRule;
use crate::densities::{merged_breakpoints, Density};
use crate::error::Result;
use crate::numerics::{integrate_real_line, Tolerances};
use crate::scalar::Scalar;

/// False-alarm, miss and equal-prior error probabilities of a test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorProbabilities<T> {
    /// `P_F = ∫ δ g0`
    pub pf: T,
    /// `P_M = ∫ (1 - δ) g1`
    pub pm: T,
    /// `P_E = (P_F + P_M)/2`
    pub pe: T,
}

/// Error probabilities of `rule` when the observation has density `g0`
/// under H0 and `g1` under H1, by quadrature split at the rule's and the
/// densities' breakpoints.
pub fn error_prob<T, R>(
    rule: &R,
    g0: &Density<T>,
    g1: &Density<T>,
    tol: &Tolerances<T>,
) -> Result<ErrorProbabilities<T>>
where
    T: Scalar,
    R: DecisionRule<T> + ?Sized,
{
    let rule_breaks = rule.breakpoints();
    let pf = integrate_real_line(
        |y| rule.decide_h1(y) * g0.pdf(y),
        g0,
        &merged_breakpoints(&rule_breaks, g0.breakpoints()),
        tol,
    )?;
    let pm = integrate_real_line(
        |y| (T::one() - rule.decide_h1(y)) * g1.pdf(y),
        g1,
        &merged_breakpoints(&rule_breaks, g1.breakpoints()),
        tol,
    )?;
    let half = T::one() / (T::one() + T::one());
    Ok(ErrorProbabilities {
        pf,
        pm,
        pe: half * (pf + pm),
    })
}
