//! The saddle point of the minimax test: breakpoint `y_U`, least-favorable
//! densities, robust rule and worst-case error.
//!
//! For a breakpoint `y ≥ 0` with `ℓ = L(y)`, the least-favorable density
//! under H0 is `f0/Z` below `-y`, `ℓ^{1/2}(f0 f1)^{1/2}/Z` on `[-y, y]` and
//! `ℓ f0/Z` above `y`; the one under H1 is its mirror image. Its divergence
//! from `f0`, written `D(y)`, increases from `D(0) = 0` to
//! `D(f_{1/2}|f0)`, and the solver picks the unique `y_U` with
//! `D(y_U) = ε`.
//!
//! All segment integrals are carried with `ℓ^{1/2}` factored out so that
//! large breakpoints do not overflow.

mod error_prob;
mod rule;

pub use error_prob::{error_prob, ErrorProbabilities};
pub use rule::{q_transform, DecisionRule, FnRule, RandomizedRule, ThresholdRule};

use std::cell::RefCell;

use crate::densities::{geodesic_density, kl_divergence, merged_breakpoints, Density, NominalPair};
use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_between, Interval, TailEnvelope, Tolerances};
use crate::scalar::{lit, to_f64, Scalar};

/// Tolerances at or above `D(f_{1/2}|f0)` minus this margin are rejected.
pub const FEASIBILITY_MARGIN: f64 = 1e-6;
/// Below this tolerance the nominal Bayes test is returned.
pub const DEGENERATE_EPSILON: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 64;

/// Segment integrals at breakpoint `y`, each scaled by a power of `ℓ^{1/2}`.
#[derive(Debug, Clone, Copy)]
struct Segments<T> {
    log_ell: T,
    /// `ℓ^{-1/2} ∫_{-∞}^{-y} f0`
    left: T,
    /// `∫_{-y}^{y} (f0 f1)^{1/2}`
    middle: T,
    /// `∫_0^{y} (f0 f1)^{1/2}`
    half_middle: T,
    /// `ℓ^{1/2} ∫_y^∞ f0`
    right: T,
}

impl<T: Scalar> Segments<T> {
    fn compute(pair: &NominalPair<T>, y_u: T, tol: &Tolerances<T>) -> Result<Self> {
        if y_u.is_nan() || y_u < T::zero() || y_u.is_infinite() {
            return Err(Error::InvalidParameter(format!(
                "breakpoint must be finite and >= 0, got {}",
                to_f64(y_u)
            )));
        }
        let half: T = lit(0.5);
        let log_ell = if y_u == T::zero() {
            T::zero()
        } else {
            pair.log_likelihood_ratio(y_u)?
        };
        let half_log_ell = half * log_ell;
        let (f0, f1) = (pair.f0(), pair.f1());
        let envelope = pair.envelope();
        let mut breaks = pair.breakpoints();
        breaks.extend([T::zero(), -y_u, y_u]);
        let tol = tol.tightened(lit(0.1));
        let geometric = |y: T| (half * (f0.log_pdf(y) + f1.log_pdf(y))).exp();

        let left = integrate_between(
            |y| (f0.log_pdf(y) - half_log_ell).exp(),
            T::neg_infinity(),
            -y_u,
            &envelope,
            &breaks,
            &tol,
        )?;
        let middle = integrate_between(geometric, -y_u, y_u, &envelope, &breaks, &tol)?;
        let half_middle = integrate_between(geometric, T::zero(), y_u, &envelope, &breaks, &tol)?;
        let right = integrate_between(
            |y| (f0.log_pdf(y) + half_log_ell).exp(),
            y_u,
            T::infinity(),
            &envelope,
            &breaks,
            &tol,
        )?;
        Ok(Self {
            log_ell,
            left,
            middle,
            half_middle,
            right,
        })
    }

    /// `Z / ℓ^{1/2}`
    fn scaled_normalizer(&self) -> T {
        self.left + self.middle + self.right
    }

    fn log_normalizer(&self) -> T {
        lit::<T>(0.5) * self.log_ell + self.scaled_normalizer().ln()
    }

    /// `Z^{-1}[ℓ^{1/2} ∫_0^y (f1 f0)^{1/2} + ℓ ∫_y^∞ f0]`
    fn worst_case_error(&self) -> T {
        (self.half_middle + self.right) / self.scaled_normalizer()
    }

    /// `-ln Z + Z^{-1}[ℓ ln ℓ ∫_y^∞ f0 + ℓ^{1/2} ln ℓ ∫_0^y (f1 f0)^{1/2}]`
    fn divergence(&self) -> T {
        let s = self.scaled_normalizer();
        -self.log_normalizer()
            + self.log_ell * self.right / s
            + self.log_ell * self.half_middle / s
    }
}

/// Normalizer `Z(y_U)` of the least-favorable densities at breakpoint `y_u`.
pub fn normalizer<T: Scalar>(pair: &NominalPair<T>, y_u: T, tol: &Tolerances<T>) -> Result<T> {
    pair.require_validated()?;
    Ok(Segments::compute(pair, y_u, tol)?.log_normalizer().exp())
}

/// `D(y_U)`: divergence of the least-favorable H0 density at breakpoint
/// `y_u` from `f0`, from the segment integrals.
pub fn divergence_at<T: Scalar>(pair: &NominalPair<T>, y_u: T, tol: &Tolerances<T>) -> Result<T> {
    pair.require_validated()?;
    Ok(Segments::compute(pair, y_u, tol)?.divergence())
}

/// `D(f_{1/2}|f0)`, the supremum of `D(y_U)`.
pub fn midway_divergence<T: Scalar>(pair: &NominalPair<T>, tol: &Tolerances<T>) -> Result<T> {
    let midway = geodesic_density(pair, lit(0.5), tol)?;
    kl_divergence(&midway, pair.f0(), tol)
}

/// The solved saddle point for one nominal pair and tolerance.
#[derive(Clone, Debug)]
pub struct SaddlePoint<T: Scalar> {
    pair: NominalPair<T>,
    epsilon: T,
    y_u: T,
    log_ell_u: T,
    log_z: T,
    worst_case: T,
    d_midway: T,
    g0l: Density<T>,
    g1l: Density<T>,
    rule: RandomizedRule<T>,
}

impl<T: Scalar> SaddlePoint<T> {
    pub fn pair(&self) -> &NominalPair<T> {
        &self.pair
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn y_u(&self) -> T {
        self.y_u
    }

    /// `ℓ_U = L(y_U)`
    pub fn ell_u(&self) -> T {
        self.log_ell_u.exp()
    }

    pub fn log_ell_u(&self) -> T {
        self.log_ell_u
    }

    /// `Z(y_U)`
    pub fn z(&self) -> T {
        self.log_z.exp()
    }

    pub fn log_z(&self) -> T {
        self.log_z
    }

    /// Worst-case error probability found while solving.
    pub fn worst_case_pe(&self) -> T {
        self.worst_case
    }

    /// `D(f_{1/2}|f0)`, the feasibility bound on the tolerance.
    pub fn d_midway(&self) -> T {
        self.d_midway
    }

    /// Least-favorable density under H0.
    pub fn lf_density_0(&self) -> &Density<T> {
        &self.g0l
    }

    /// Least-favorable density under H1.
    pub fn lf_density_1(&self) -> &Density<T> {
        &self.g1l
    }

    /// Least-favorable density under hypothesis `j`.
    pub fn lf_density(&self, j: usize) -> &Density<T> {
        if j == 0 {
            &self.g0l
        } else {
            &self.g1l
        }
    }

    /// The robust rule; the nominal Bayes test when the tolerance is
    /// negligible.
    pub fn rule(&self) -> &RandomizedRule<T> {
        &self.rule
    }

    /// True when the tolerance was below the degenerate threshold and the
    /// nominal pair and test were returned unchanged.
    pub fn is_degenerate(&self) -> bool {
        self.y_u == T::zero()
    }
}

/// Solves for the saddle point at tolerance `epsilon`.
///
/// The breakpoint is bracketed by doubling from `[0, 1]` until `D` exceeds
/// `epsilon`, then located with Brent's method.
pub fn solve<T: Scalar>(
    pair: &NominalPair<T>,
    epsilon: T,
    tol: &Tolerances<T>,
) -> Result<SaddlePoint<T>> {
    tol.validate()?;
    pair.require_validated()?;
    if !(epsilon > T::zero() && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be finite and > 0, got {}",
            to_f64(epsilon)
        )));
    }
    let d_midway = midway_divergence(pair, tol)?;
    let bound = d_midway - lit(FEASIBILITY_MARGIN);
    if epsilon >= bound {
        return Err(Error::InfeasibleTolerance {
            epsilon: to_f64(epsilon),
            bound: to_f64(bound),
            margin: FEASIBILITY_MARGIN,
        });
    }
    if epsilon < lit(DEGENERATE_EPSILON) {
        return Ok(SaddlePoint {
            pair: pair.clone(),
            epsilon,
            y_u: T::zero(),
            log_ell_u: T::zero(),
            log_z: T::zero(),
            worst_case: error_prob(&RandomizedRule::nominal_bayes(), pair.f0(), pair.f1(), tol)?.pe,
            d_midway,
            g0l: pair.f0().clone(),
            g1l: pair.f1().clone(),
            rule: RandomizedRule::nominal_bayes(),
        });
    }

    let mut lo = T::zero();
    let mut hi = T::one();
    let mut doublings = 0;
    while divergence_at(pair, hi, tol)? <= epsilon {
        lo = hi;
        hi = hi + hi;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::NonConvergence {
                lo: 0.0,
                hi: to_f64(hi),
                error: f64::NAN,
                panels: doublings,
            });
        }
    }

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let root = find_root(
        |y| match divergence_at(pair, y, tol) {
            Ok(d) => d - epsilon,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::nan()
            }
        },
        Interval::new(lo, hi)?,
        tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let y_u = root?;
    at_breakpoint(pair, epsilon, y_u, d_midway, tol)
}

/// Least-favorable construction at a given breakpoint `y_u > 0`.
fn at_breakpoint<T: Scalar>(
    pair: &NominalPair<T>,
    epsilon: T,
    y_u: T,
    d_midway: T,
    tol: &Tolerances<T>,
) -> Result<SaddlePoint<T>> {
    let seg = Segments::compute(pair, y_u, tol)?;
    let log_ell_u = seg.log_ell;
    let log_z = seg.log_normalizer();
    let rule = RandomizedRule::robust(pair, y_u)?;
    let (g0l, g1l) = lf_pair(pair, y_u, log_ell_u, log_z);
    Ok(SaddlePoint {
        pair: pair.clone(),
        epsilon,
        y_u,
        log_ell_u,
        log_z,
        worst_case: seg.worst_case_error(),
        d_midway,
        g0l,
        g1l,
        rule,
    })
}

/// Three-segment least-favorable densities.
fn lf_pair<T: Scalar>(
    pair: &NominalPair<T>,
    y_u: T,
    log_ell: T,
    log_z: T,
) -> (Density<T>, Density<T>) {
    let half: T = lit(0.5);
    let mut breaks = pair.breakpoints();
    breaks.extend([-y_u, y_u]);
    let breaks = merged_breakpoints(&breaks, &[]);

    let tails = |pair: &NominalPair<T>| {
        let (e0, e1) = (pair.f0().clone(), pair.f1().clone());
        move |m: T| Some(e0.mass_interval(m)?.hull(&e1.mass_interval(m)?))
    };

    let (f0, f1) = (pair.f0().clone(), pair.f1().clone());
    let g0 = Density::new(
        move |y| {
            if y > y_u {
                log_ell + f0.log_pdf(y) - log_z
            } else if y >= -y_u {
                half * log_ell + half * (f1.log_pdf(y) + f0.log_pdf(y)) - log_z
            } else {
                f0.log_pdf(y) - log_z
            }
        },
        tails(pair),
        breaks.clone(),
    );
    let (f0, f1) = (pair.f0().clone(), pair.f1().clone());
    let g1 = Density::new(
        move |y| {
            if y > y_u {
                f1.log_pdf(y) - log_z
            } else if y >= -y_u {
                half * log_ell + half * (f1.log_pdf(y) + f0.log_pdf(y)) - log_z
            } else {
                log_ell + f1.log_pdf(y) - log_z
            }
        },
        tails(pair),
        breaks,
    );
    (g0, g1)
}

/// The robust rule of a solved saddle point.
///
/// Fails with [`Error::DegenerateRule`] for a degenerate saddle point, whose
/// stored rule is the nominal Bayes test instead.
pub fn robust_rule<T: Scalar>(sp: &SaddlePoint<T>) -> Result<RandomizedRule<T>> {
    if sp.is_degenerate() {
        return Err(Error::DegenerateRule { ell_u: 1.0 });
    }
    RandomizedRule::robust(&sp.pair, sp.y_u)
}

/// Least-favorable likelihood ratio `g1L(y)/g0L(y)`: `L/ℓ_U` above `y_U`,
/// exactly 1 on `[-y_U, y_U]`, `ℓ_U·L` below `-y_U`.
pub fn lf_likelihood_ratio<T: Scalar>(sp: &SaddlePoint<T>, y: T) -> T {
    let llr = sp.pair.llr(y);
    if sp.is_degenerate() {
        return llr.exp();
    }
    if y > sp.y_u {
        (llr - sp.log_ell_u).exp()
    } else if y >= -sp.y_u {
        T::one()
    } else {
        (llr + sp.log_ell_u).exp()
    }
}

/// Worst-case error probability `P_F = P_M = P_E` of the robust rule over
/// both uncertainty balls, from the segment integrals.
pub fn worst_case_error<T: Scalar>(sp: &SaddlePoint<T>, tol: &Tolerances<T>) -> Result<T> {
    if sp.is_degenerate() {
        return Ok(error_prob(&sp.rule, sp.pair.f0(), sp.pair.f1(), tol)?.pe);
    }
    Ok(Segments::compute(&sp.pair, sp.y_u, tol)?.worst_case_error())
}
