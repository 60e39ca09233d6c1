use crate::densities::NominalPair;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// A pointwise randomized test: `decide_h1(y)` is the probability of
/// declaring H1 after observing `y`.
pub trait DecisionRule<T: Scalar> {
    fn decide_h1(&self, y: T) -> T;

    /// Points where the rule is not smooth; quadrature splits there.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }
}

impl<T: Scalar, R: DecisionRule<T> + ?Sized> DecisionRule<T> for &R {
    fn decide_h1(&self, y: T) -> T {
        (**self).decide_h1(y)
    }
    fn breakpoints(&self) -> Vec<T> {
        (**self).breakpoints()
    }
}

#[derive(Clone, Debug)]
enum RuleKind<T: Scalar> {
    /// Linear interpolation of ln L on `[-y_u, y_u]`.
    Robust {
        pair: NominalPair<T>,
        y_u: T,
        log_ell_u: T,
    },
    /// `1{y > 0}`, with 1/2 at the origin.
    NominalBayes,
}

/// The robust minimax test: 0 below `-y_U`, 1 above `y_U`, and
/// `(1 + ln L(y)/ln ℓ_U)/2` in between.
#[derive(Clone, Debug)]
pub struct RandomizedRule<T: Scalar> {
    kind: RuleKind<T>,
}

/// Below this `ℓ_U - 1` the middle segment divides by ~0.
const DEGENERATE_ELL: f64 = 1e-12;

impl<T: Scalar> RandomizedRule<T> {
    /// The robust rule with breakpoint `y_u`.
    ///
    /// Fails with [`Error::DegenerateRule`] when `ℓ_U = L(y_U)` is not
    /// measurably above 1.
    pub fn robust(pair: &NominalPair<T>, y_u: T) -> Result<Self> {
        let log_ell_u = pair.log_likelihood_ratio(y_u)?;
        let ell_u = log_ell_u.exp();
        if ell_u.is_nan() || ell_u <= T::one() + lit(DEGENERATE_ELL) || !y_u.is_finite() {
            return Err(Error::DegenerateRule { ell_u: to_f64(ell_u) });
        }
        Ok(Self {
            kind: RuleKind::Robust {
                pair: pair.clone(),
                y_u,
                log_ell_u,
            },
        })
    }

    /// The nominal Bayes test `1{y > 0}`, the zero-tolerance limit of the
    /// robust rule.
    pub fn nominal_bayes() -> Self {
        Self {
            kind: RuleKind::NominalBayes,
        }
    }

    pub fn evaluate(&self, y: T) -> T {
        match &self.kind {
            RuleKind::Robust {
                pair,
                y_u,
                log_ell_u,
            } => {
                if y > *y_u {
                    T::one()
                } else if y < -*y_u {
                    T::zero()
                } else {
                    let v = lit::<T>(0.5) * (T::one() + pair.llr(y) / *log_ell_u);
                    v.max(T::zero()).min(T::one())
                }
            }
            RuleKind::NominalBayes => {
                if y > T::zero() {
                    T::one()
                } else if y < T::zero() {
                    T::zero()
                } else {
                    lit(0.5)
                }
            }
        }
    }

    /// Breakpoint `y_U`; zero for the nominal Bayes test.
    pub fn y_u(&self) -> T {
        match &self.kind {
            RuleKind::Robust { y_u, .. } => *y_u,
            RuleKind::NominalBayes => T::zero(),
        }
    }
}

impl<T: Scalar> DecisionRule<T> for RandomizedRule<T> {
    fn decide_h1(&self, y: T) -> T {
        self.evaluate(y)
    }

    fn breakpoints(&self) -> Vec<T> {
        match &self.kind {
            RuleKind::Robust { pair, y_u, .. } => {
                let mut v = pair.breakpoints();
                v.extend([-*y_u, *y_u]);
                v
            }
            RuleKind::NominalBayes => vec![T::zero()],
        }
    }
}

/// Deterministic threshold test `1{y > tau}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdRule<T> {
    pub tau: T,
}

impl<T: Scalar> DecisionRule<T> for ThresholdRule<T> {
    fn decide_h1(&self, y: T) -> T {
        if y > self.tau {
            T::one()
        } else {
            T::zero()
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        vec![self.tau]
    }
}

/// A rule given by a closure and its breakpoints.
pub struct FnRule<F, T> {
    f: F,
    breakpoints: Vec<T>,
}

impl<F, T> FnRule<F, T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    pub fn new(f: F, breakpoints: Vec<T>) -> Self {
        Self { f, breakpoints }
    }
}

impl<F, T> DecisionRule<T> for FnRule<F, T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    fn decide_h1(&self, y: T) -> T {
        (self.f)(y)
    }

    fn breakpoints(&self) -> Vec<T> {
        self.breakpoints.clone()
    }
}

/// The likelihood-ratio flattening map:
///
/// ```text
/// q(ℓ) = ℓ/ℓ_U   for ℓ > ℓ_U
///        1       for 1/ℓ_U <= ℓ <= ℓ_U
///        ℓ_U·ℓ   for ℓ < 1/ℓ_U
/// ```
///
/// Requires `ell > 0` and `ell_u > 1`.
pub fn q_transform<T: Scalar>(ell: T, ell_u: T) -> T {
    debug_assert!(ell > T::zero() && ell_u > T::one());
    if ell > ell_u {
        ell / ell_u
    } else if ell * ell_u < T::one() {
        ell * ell_u
    } else {
        T::one()
    }
}
