use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{derive_seed, CdfTable};
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::numerics::Tolerances;
use crate::saddle::DecisionRule;
use crate::scalar::{lit, to_f64, Scalar};

pub const MIN_MC_SAMPLES: usize = 10_000;
const CHUNK: usize = 1 << 16;

/// Monte Carlo estimate of an equal-prior error probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate<T> {
    pub pe_hat: T,
    pub stderr: T,
    /// Samples drawn under each hypothesis.
    pub samples: usize,
}

impl<T: Scalar> MonteCarloEstimate<T> {
    /// `(pe_hat - reference) / stderr`, or 0 when both coincide exactly.
    pub fn z_score(&self, reference: T) -> T {
        let diff = self.pe_hat - reference;
        if self.stderr > T::zero() {
            diff / self.stderr
        } else if diff == T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    }
}

/// Sum and sum of squares of `weight(y)` over `n` samples from `table`,
/// in fixed-size chunks with seeds derived from `(seed, stream, chunk)`.
fn weighted_moments<T, W>(table: &CdfTable<T>, n: usize, seed: u64, stream: u64, weight: W) -> (f64, f64)
where
    T: Scalar,
    W: Fn(T) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2 * c as u64 + stream));
            table.sample(&mut rng, len).into_iter().fold((0.0, 0.0), |(s, q), y| {
                let w = weight(y);
                (s + w, q + w * w)
            })
        })
        .collect();
    partial
        .into_iter()
        .fold((0.0, 0.0), |(s, q), (a, b)| (s + a, q + b))
}

/// Monte Carlo error probability of `rule` with `n` samples from each of
/// `g0` and `g1`.
///
/// The rule's randomization is averaged analytically: each sample
/// contributes `δ(y)` (resp. `1 - δ(y)`) instead of a coin flip. The
/// standard error uses the empirical variance of those contributions, which
/// is the binomial variance for deterministic rules.
pub fn monte_carlo_error<T, R>(
    rule: &R,
    g0: &Density<T>,
    g1: &Density<T>,
    n: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<MonteCarloEstimate<T>>
where
    T: Scalar,
    R: DecisionRule<T> + Sync + ?Sized,
{
    if n < MIN_MC_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {n}"
        )));
    }
    let t0 = CdfTable::new(g0, tol)?;
    let t1 = CdfTable::new(g1, tol)?;
    let (s0, q0) = weighted_moments(&t0, n, seed, 0, |y| to_f64(rule.decide_h1(y)));
    let (s1, q1) = weighted_moments(&t1, n, seed, 1, |y| 1.0 - to_f64(rule.decide_h1(y)));
    let nf = n as f64;
    let (m0, m1) = (s0 / nf, s1 / nf);
    let v0 = (q0 / nf - m0 * m0).max(0.0);
    let v1 = (q1 / nf - m1 * m1).max(0.0);
    Ok(MonteCarloEstimate {
        pe_hat: lit(0.5 * (m0 + m1)),
        stderr: lit(0.5 * ((v0 + v1) / nf).sqrt()),
        samples: n,
    })
}
