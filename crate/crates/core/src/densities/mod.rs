//! Density families, nominal pairs, likelihood ratios, KL divergence and
//! the geodesic between two nominal densities.

mod divergence;
mod families;
mod pair;

pub use divergence::kl_divergence;
pub use pair::{check_monotone_lr, check_symmetry, geodesic_density, NominalPair};

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::numerics::{integrate_real_line, Interval, TailEnvelope, Tolerances};
use crate::scalar::Scalar;

type LogPdf<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
type Tails<T> = Arc<dyn Fn(T) -> Option<Interval<T>> + Send + Sync>;

/// A probability density on the real line, evaluated in log space.
///
/// Besides the log-density, a `Density` carries an analytic tail bound (the
/// interval outside of which at most a given mass lies) and the points
/// where it is not smooth, so that quadrature can truncate and split
/// correctly. Cloning is cheap and densities are immutable.
#[derive(Clone)]
pub struct Density<T: Scalar> {
    log_pdf: LogPdf<T>,
    tails: Tails<T>,
    breakpoints: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Density<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> Density<T> {
    /// Builds a density from its log-pdf, a tail bound and its breakpoints.
    ///
    /// `tails(m)` must return an interval outside of which at most `m` of the
    /// mass lies. Nothing here checks normalization.
    pub fn new<L, M>(log_pdf: L, tails: M, mut breakpoints: Vec<T>) -> Self
    where
        L: Fn(T) -> T + Send + Sync + 'static,
        M: Fn(T) -> Option<Interval<T>> + Send + Sync + 'static,
    {
        sort_dedup(&mut breakpoints);
        Self {
            log_pdf: Arc::new(log_pdf),
            tails: Arc::new(tails),
            breakpoints,
        }
    }

    #[inline]
    pub fn log_pdf(&self, y: T) -> T {
        (self.log_pdf)(y)
    }

    #[inline]
    pub fn pdf(&self, y: T) -> T {
        self.log_pdf(y).exp()
    }

    /// Points where the density is not smooth, sorted.
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Total mass over the truncated real line.
    pub fn mass(&self, tol: &Tolerances<T>) -> Result<T> {
        integrate_real_line(|y| self.pdf(y), self, &self.breakpoints, tol)
    }

    /// Density of `Y + by` when `Y` has this density.
    pub fn shifted(&self, by: T) -> Self {
        let inner = self.clone();
        let tails = self.tails.clone();
        Self::new(
            move |y| inner.log_pdf(y - by),
            move |m| tails(m).map(|iv| iv.shifted(by)),
            self.breakpoints.iter().map(|&b| b + by).collect(),
        )
    }

    /// Density of `-Y` when `Y` has this density.
    pub fn reflected(&self) -> Self {
        let inner = self.clone();
        let tails = self.tails.clone();
        Self::new(
            move |y| inner.log_pdf(-y),
            move |m| tails(m).map(|iv| iv.reflected()),
            self.breakpoints.iter().map(|&b| -b).collect(),
        )
    }

    /// The mixture `(1 - weight) * self + weight * other`.
    pub fn mixture(&self, other: &Self, weight: T) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let (ta, tb) = (self.tails.clone(), other.tails.clone());
        let (wa, wb) = ((T::one() - weight).ln(), weight.ln());
        let mut breaks = self.breakpoints.clone();
        breaks.extend_from_slice(&other.breakpoints);
        Self::new(
            move |y| log_add_exp(wa + a.log_pdf(y), wb + b.log_pdf(y)),
            move |m| Some(ta(m)?.hull(&tb(m)?)),
            breaks,
        )
    }
}

impl<T: Scalar> TailEnvelope<T> for Density<T> {
    fn mass_interval(&self, cutoff: T) -> Option<Interval<T>> {
        (self.tails)(cutoff)
    }
}

pub(crate) fn log_add_exp<T: Scalar>(x: T, y: T) -> T {
    let hi = x.max(y);
    if hi == T::neg_infinity() {
        return hi;
    }
    hi + ((x - hi).exp() + (y - hi).exp()).ln()
}

pub(crate) fn sort_dedup<T: Scalar>(v: &mut Vec<T>) {
    v.retain(|x| x.is_finite());
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v.dedup();
}

/// Union of two breakpoint lists, sorted and deduplicated.
pub(crate) fn merged_breakpoints<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let mut v: Vec<T> = a.iter().chain(b.iter()).copied().collect();
    sort_dedup(&mut v);
    v
}
