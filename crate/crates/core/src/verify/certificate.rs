use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{derive_seed, probe_density_ball, Probe};
use crate::densities::kl_divergence;
use crate::error::Result;
use crate::numerics::Tolerances;
use crate::saddle::{error_prob, DecisionRule, RandomizedRule, SaddlePoint};
use crate::scalar::{lit, Scalar};

/// Gap threshold for a passing certificate.
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Slack on `D(g|f_j) <= ε` for probe densities.
const PROBE_KL_SLACK: f64 = 1e-8;
const THRESHOLD_PROBES: usize = 11;
const MIN_RANDOM_RULES: usize = 10;

/// Outcome of probing both saddle-point inequalities.
#[derive(Debug, Clone, Serialize)]
pub struct SaddleCertificate<T> {
    /// `|D(g0L|f0) - ε|`
    pub kkt_gap0: T,
    /// `|D(g1L|f1) - ε|`
    pub kkt_gap1: T,
    /// Largest `P_E(δ_R, g0, g1) - P_E(δ_R, g0L, g1L)` over probe pairs.
    pub max_rhs_violation: T,
    /// Smallest `P_E(δ, g0L, g1L) - P_E(δ_R, g0L, g1L)` over probe rules.
    pub min_lhs_gap: T,
    /// Largest `D(g|f_j) - ε` over probe densities.
    pub max_probe_excess_kl: T,
    /// `P_E(δ_R, g0L, g1L)` by quadrature.
    pub saddle_pe: T,
    /// Density probes per hypothesis.
    pub n_probes: usize,
    pub n_rule_probes: usize,
    pub seed: u64,
}

impl<T: Scalar> SaddleCertificate<T> {
    pub fn passes(&self) -> bool {
        let tol: T = lit(CERTIFICATE_TOL);
        self.kkt_gap0 <= tol
            && self.kkt_gap1 <= tol
            && self.max_rhs_violation <= tol
            && self.min_lhs_gap >= -tol
            && self.max_probe_excess_kl <= lit(PROBE_KL_SLACK)
    }
}

/// Competing decision rules for the left inequality.
#[derive(Debug, Clone)]
pub enum RuleProbe<T: Scalar> {
    Robust(RandomizedRule<T>),
    /// `1{y > tau}`
    Threshold(T),
    /// `clamp(1/2 + (y - center)/(2 width), 0, 1)`
    ClippedLinear { center: T, width: T },
    /// `values[i]` on the i-th cell delimited by sorted `cuts`.
    PiecewiseConstant { cuts: Vec<T>, values: Vec<T> },
}

impl<T: Scalar> DecisionRule<T> for RuleProbe<T> {
    fn decide_h1(&self, y: T) -> T {
        match self {
            Self::Robust(r) => r.evaluate(y),
            Self::Threshold(tau) => {
                if y > *tau {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::ClippedLinear { center, width } => {
                let v = lit::<T>(0.5) + (y - *center) / (*width + *width);
                v.max(T::zero()).min(T::one())
            }
            Self::PiecewiseConstant { cuts, values } => values[cuts.partition_point(|&c| c <= y)],
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        match self {
            Self::Robust(r) => r.breakpoints(),
            Self::Threshold(tau) => vec![*tau],
            Self::ClippedLinear { center, width } => vec![*center - *width, *center + *width],
            Self::PiecewiseConstant { cuts, .. } => cuts.clone(),
        }
    }
}

/// The default rule probes: the robust rule, a threshold sweep,
/// clipped-linear rules of several widths and random piecewise-constant
/// rules.
fn rule_probes<T: Scalar>(sp: &SaddlePoint<T>, n_random: usize, seed: u64) -> Vec<RuleProbe<T>> {
    let reach = sp.y_u() + T::one();
    let mut probes = vec![RuleProbe::Robust(sp.rule().clone())];
    for i in 0..THRESHOLD_PROBES {
        let frac = lit::<T>(i as f64 / (THRESHOLD_PROBES - 1) as f64);
        probes.push(RuleProbe::Threshold(reach * lit(4.0) * frac - reach * lit(2.0)));
    }
    let scale = sp.y_u().max(lit(0.1));
    for (center, width) in [(0.0, 0.5), (0.0, 1.0), (0.0, 2.0), (0.0, 4.0), (0.5, 1.0), (-0.5, 1.0)] {
        probes.push(RuleProbe::ClippedLinear {
            center: scale * lit(center),
            width: scale * lit(width),
        });
    }
    for r in 0..n_random {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ 0x52554c45, r as u64));
        let count = rng.random_range(3..=8);
        let span = reach * lit(3.0);
        let mut cuts: Vec<T> = (0..count)
            .map(|_| span * lit(rng.random_range(-1.0..1.0)))
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let values = (0..=count).map(|_| lit(rng.random::<f64>())).collect();
        probes.push(RuleProbe::PiecewiseConstant { cuts, values });
    }
    probes
}

/// Certifies the saddle point with `n_probes` density probes per
/// hypothesis and the default rule probes.
pub fn check_saddle<T: Scalar>(
    sp: &SaddlePoint<T>,
    n_probes: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<SaddleCertificate<T>> {
    let probes0 = probe_density_ball(sp, 0, n_probes, seed, tol)?;
    let probes1 = probe_density_ball(sp, 1, n_probes, seed, tol)?;
    let rules = rule_probes(sp, MIN_RANDOM_RULES.max(n_probes / 5), seed);
    let mut cert = check_saddle_with(sp, &probes0, &probes1, &rules, tol)?;
    cert.seed = seed;
    Ok(cert)
}

/// Certificate for explicit probe sets.
pub fn check_saddle_with<T: Scalar>(
    sp: &SaddlePoint<T>,
    probes0: &[Probe<T>],
    probes1: &[Probe<T>],
    rules: &[RuleProbe<T>],
    tol: &Tolerances<T>,
) -> Result<SaddleCertificate<T>> {
    let (f0, f1) = (sp.pair().f0(), sp.pair().f1());
    let (g0l, g1l) = (sp.lf_density_0(), sp.lf_density_1());
    let epsilon = sp.epsilon();
    let kkt_gap0 = (kl_divergence(g0l, f0, tol)? - epsilon).abs();
    let kkt_gap1 = (kl_divergence(g1l, f1, tol)? - epsilon).abs();
    let rule = sp.rule();
    let reference = error_prob(rule, g0l, g1l, tol)?;

    // P_E separates over (g0, g1), so the worst pair combines the worst
    // false-alarm probe with the worst miss probe.
    let worst = |probes: &[Probe<T>], j: usize| -> Result<T> {
        let values: Vec<T> = probes
            .par_iter()
            .map(|p| {
                let e = if j == 0 {
                    error_prob(rule, &p.density, g1l, tol)?.pf
                } else {
                    error_prob(rule, g0l, &p.density, tol)?.pm
                };
                Ok(e)
            })
            .collect::<Result<_>>()?;
        Ok(values.into_iter().fold(T::neg_infinity(), T::max))
    };
    let half: T = lit(0.5);
    let max_rhs_violation = match (probes0.is_empty(), probes1.is_empty()) {
        (true, true) => T::zero(),
        _ => {
            let pf = if probes0.is_empty() { reference.pf } else { worst(probes0, 0)? };
            let pm = if probes1.is_empty() { reference.pm } else { worst(probes1, 1)? };
            half * (pf - reference.pf) + half * (pm - reference.pm)
        }
    };

    let gaps: Vec<T> = rules
        .par_iter()
        .map(|r| Ok(error_prob(r, g0l, g1l, tol)?.pe - reference.pe))
        .collect::<Result<_>>()?;
    let min_lhs_gap = gaps.into_iter().fold(T::infinity(), T::min);
    let min_lhs_gap = if rules.is_empty() { T::zero() } else { min_lhs_gap };

    let max_probe_excess_kl = probes0
        .iter()
        .chain(probes1)
        .map(|p| p.divergence - epsilon)
        .fold(T::neg_infinity(), T::max)
        .max(-epsilon);

    Ok(SaddleCertificate {
        kkt_gap0,
        kkt_gap1,
        max_rhs_violation,
        min_lhs_gap,
        max_probe_excess_kl,
        saddle_pe: reference.pe,
        n_probes: probes0.len().max(probes1.len()),
        n_rule_probes: rules.len(),
        seed: 0,
    })
}
