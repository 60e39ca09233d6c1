//! Deterministic scalar quadrature and bracketed root finding.
//!
//! Everything here is a pure function of its arguments. Integrals over the
//! real line are truncated using a [`TailEnvelope`], typically the nominal
//! density itself, rather than by a change of variables.

mod normal;
mod quadrature;
mod roots;

pub use normal::gaussian_tail_q;
pub use quadrature::{integrate, integrate_between, integrate_pieces, integrate_real_line};
pub use roots::find_root;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Tolerance bundle shared by quadrature, root finding, sampling and
/// verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Relative error target for every quadrature.
    pub quad_rel_err: T,
    /// Absolute error target for every quadrature.
    pub quad_abs_err: T,
    /// Final bracket width for root finding, in observation units.
    pub root_abs_err: T,
    /// Probability mass allowed outside a truncated integration range.
    pub support_mass_cutoff: T,
    /// Panel budget of the adaptive quadrature.
    pub max_subdivisions: usize,
    /// Master seed for Monte Carlo and randomized probes.
    pub mc_seed: u64,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        let floor = T::precision_floor();
        Self {
            quad_rel_err: lit::<T>(1e-10).max(floor),
            quad_abs_err: lit::<T>(1e-12).max(floor * floor),
            root_abs_err: lit::<T>(1e-9).max(floor),
            support_mass_cutoff: lit::<T>(1e-14).max(floor * floor),
            max_subdivisions: 4000,
            mc_seed: 0x005e_ed0f_d15c,
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    /// Checks the bundle invariants: every tolerance strictly positive and
    /// the relative quadrature error below `1e-3`.
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("quad_rel_err", self.quad_rel_err),
            ("quad_abs_err", self.quad_abs_err),
            ("root_abs_err", self.root_abs_err),
            ("support_mass_cutoff", self.support_mass_cutoff),
        ];
        for (name, value) in named {
            if !(value > T::zero() && value.is_finite()) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be finite and > 0, got {}",
                    to_f64(value)
                )));
            }
        }
        if self.quad_rel_err >= lit(1e-3) {
            return Err(Error::InvalidTolerance(format!(
                "quad_rel_err must be < 1e-3, got {}",
                to_f64(self.quad_rel_err)
            )));
        }
        if self.support_mass_cutoff >= lit(1e-3) {
            return Err(Error::InvalidTolerance(format!(
                "support_mass_cutoff must be < 1e-3, got {}",
                to_f64(self.support_mass_cutoff)
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidTolerance(
                "max_subdivisions must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.mc_seed = seed;
        self
    }

    /// Same bundle with tighter quadrature targets, for integrals whose
    /// results feed other integrals.
    pub(crate) fn tightened(&self, factor: T) -> Self {
        let floor = T::precision_floor();
        Self {
            quad_rel_err: (self.quad_rel_err * factor).max(floor),
            quad_abs_err: (self.quad_abs_err * factor).max(floor * floor),
            ..*self
        }
    }
}

/// Finite closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval {
                lo: to_f64(lo),
                hi: to_f64(hi),
            })
        }
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn shifted(&self, by: T) -> Self {
        Self {
            lo: self.lo + by,
            hi: self.hi + by,
        }
    }

    pub fn reflected(&self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// `n >= 2` equally spaced points from `lo` to `hi` inclusive.
    pub fn grid(&self, n: usize) -> Vec<T> {
        assert!(n >= 2, "grid needs at least two points");
        let step = self.width() / lit((n - 1) as f64);
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.hi
                } else {
                    self.lo + step * lit(i as f64)
                }
            })
            .collect()
    }
}

/// Analytic tail bound used to truncate integrals over the real line.
pub trait TailEnvelope<T: Scalar> {
    /// An interval outside of which at most `cutoff` of the envelope's
    /// probability mass lies, or `None` if no finite interval does.
    fn mass_interval(&self, cutoff: T) -> Option<Interval<T>>;
}

impl<T: Scalar, E: TailEnvelope<T> + ?Sized> TailEnvelope<T> for &E {
    fn mass_interval(&self, cutoff: T) -> Option<Interval<T>> {
        (**self).mass_interval(cutoff)
    }
}

/// Envelope of the normal distribution `N(mean, sd^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalEnvelope<T> {
    pub mean: T,
    pub sd: T,
}

impl<T: Scalar> NormalEnvelope<T> {
    pub fn standard() -> Self {
        Self {
            mean: T::zero(),
            sd: T::one(),
        }
    }
}

impl<T: Scalar> TailEnvelope<T> for NormalEnvelope<T> {
    fn mass_interval(&self, cutoff: T) -> Option<Interval<T>> {
        // Q(z) <= exp(-z^2/2) / 2, so each tail holds at most cutoff/2.
        let half_width = self.sd * normal_quantile_bound(cutoff);
        Interval::new(self.mean - half_width, self.mean + half_width).ok()
    }
}

/// `z` such that both normal tails beyond `|z|` hold at most `mass` together.
pub(crate) fn normal_quantile_bound<T: Scalar>(mass: T) -> T {
    let mass = mass.min(lit(0.5));
    (-lit::<T>(2.0) * mass.ln()).sqrt().max(T::one())
}

/// Envelope given by the hull of several envelopes.
pub struct EnvelopeHull<'a, T: Scalar>(pub Vec<&'a dyn TailEnvelope<T>>);

impl<T: Scalar> TailEnvelope<T> for EnvelopeHull<'_, T> {
    fn mass_interval(&self, cutoff: T) -> Option<Interval<T>> {
        let mut parts = self.0.iter().map(|e| e.mass_interval(cutoff));
        let first = parts.next()??;
        parts.try_fold(first, |acc, iv| Some(acc.hull(&iv?)))
    }
}
