//! Parametric families used to build nominal pairs.

use super::{Density, NominalPair};
use crate::error::{Error, Result};
use crate::numerics::{integrate_pieces, Interval, Tolerances};
use crate::scalar::{lit, to_f64, Scalar};

fn positive<T: Scalar>(name: &str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {}",
            to_f64(value)
        )))
    }
}

fn finite<T: Scalar>(name: &str, value: T) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite")))
    }
}

/// Smallest `x` in a doubling-then-bisection search with `tail(x) <= target`,
/// for a tail bound decreasing in `x`.
fn tail_threshold<T: Scalar>(start: T, target: T, tail: impl Fn(T) -> T) -> Option<T> {
    let mut hi = start.max(T::min_positive_value());
    let mut lo = T::zero();
    let mut doublings = 0;
    while tail(hi).is_nan() || tail(hi) > target {
        lo = hi;
        hi = hi + hi;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return None;
        }
    }
    for _ in 0..60 {
        let mid = lit::<T>(0.5) * (lo + hi);
        if tail(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

impl<T: Scalar> Density<T> {
    /// Normal density `N(mean, sd^2)`.
    pub fn normal(mean: T, sd: T) -> Result<Self> {
        finite("mean", mean)?;
        positive("sd", sd)?;
        let log_norm = -(sd * (T::PI() * lit(2.0)).sqrt()).ln();
        let half: T = lit(0.5);
        Ok(Self::new(
            move |y| {
                let z = (y - mean) / sd;
                log_norm - half * z * z
            },
            move |m: T| {
                // Q(z) <= exp(-z^2/2)/2 bounds each tail by m/2.
                let z = (-lit::<T>(2.0) * m.min(half).ln()).sqrt();
                Interval::new(mean - sd * z, mean + sd * z).ok()
            },
            Vec::new(),
        ))
    }

    /// Generalized normal density `a·exp(-|(y - location)/b|^alpha)` with
    /// `a`, `b` chosen for unit mass and variance `sd^2`.
    ///
    /// The constants come from two quadratures of `exp(-|t|^alpha)`.
    pub fn generalized_normal(location: T, alpha: T, sd: T) -> Result<Self> {
        finite("location", location)?;
        positive("alpha", alpha)?;
        positive("sd", sd)?;
        let (scale, amplitude) = generalized_normal_constants(alpha, sd)?;
        let log_amp = amplitude.ln();
        Ok(Self::new(
            move |y| log_amp - ((y - location) / scale).abs().powf(alpha),
            move |m: T| {
                // With s = (x/b)^alpha, each tail is bounded by
                // a·(b/alpha)·s^(1/alpha - 1)·e^(-s) for alpha >= 1.
                let bound = |x: T| {
                    let s = (x / scale).powf(alpha);
                    amplitude * scale / alpha * s.powf(alpha.recip() - T::one()) * (-s).exp()
                };
                let x = tail_threshold(scale, lit::<T>(0.5) * m, bound)?;
                Interval::new(location - x, location + x).ok()
            },
            vec![location],
        ))
    }

    /// Asymmetric Laplace density: `c·e^{-a n}` for `n >= 0` and `c·e^{b n}`
    /// for `n <= 0`, with `n = y - location` and `c = (1/a + 1/b)^{-1}`.
    pub fn asymmetric_laplace(location: T, a: T, b: T) -> Result<Self> {
        finite("location", location)?;
        positive("a", a)?;
        positive("b", b)?;
        let c = (a.recip() + b.recip()).recip();
        let log_c = c.ln();
        let two: T = lit(2.0);
        Ok(Self::new(
            move |y| {
                let n = y - location;
                if n >= T::zero() {
                    log_c - a * n
                } else {
                    log_c + b * n
                }
            },
            move |m: T| {
                let right = ((two * c / (a * m)).ln() / a).max(T::zero());
                let left = ((two * c / (b * m)).ln() / b).max(T::zero());
                Interval::new(location - left, location + right).ok()
            },
            vec![location],
        ))
    }

    /// Cauchy density with the given location and scale.
    pub fn cauchy(location: T, scale: T) -> Result<Self> {
        finite("location", location)?;
        positive("scale", scale)?;
        let log_norm = -(T::PI() * scale).ln();
        Ok(Self::new(
            move |y| {
                let z = (y - location) / scale;
                log_norm - (T::one() + z * z).ln()
            },
            move |m: T| {
                // Each tail beyond x holds at most scale/(π x).
                let x = lit::<T>(2.0) * scale / (T::PI() * m);
                Interval::new(location - x, location + x).ok()
            },
            // Decade-spaced panels: a single panel spanning the heavy tail
            // would sample it only far from the peak and report false
            // convergence.
            (0..=16)
                .flat_map(|k| {
                    let d = scale * lit::<T>(10f64.powi(k));
                    [location - d, location + d]
                })
                .chain(std::iter::once(location))
                .collect(),
        ))
    }
}

/// Scale `b` and amplitude `a` of `a·exp(-|n/b|^alpha)` with unit mass and
/// variance `sd^2`.
pub(crate) fn generalized_normal_constants<T: Scalar>(alpha: T, sd: T) -> Result<(T, T)> {
    let tol = Tolerances {
        quad_rel_err: lit::<T>(1e-14).max(T::precision_floor()),
        quad_abs_err: T::min_positive_value(),
        ..Tolerances::default()
    };
    // exp(-t^alpha) < e^{-60} beyond this point.
    let upper = lit::<T>(60.0).powf(alpha.recip());
    let nodes = [T::zero(), T::one().min(upper), upper];
    let kernel = |t: T| (-t.powf(alpha)).exp();
    let half_mass = integrate_pieces(kernel, &nodes, &tol)?;
    let half_second = integrate_pieces(|t: T| t * t * kernel(t), &nodes, &tol)?;
    // mass = 2b·I0, variance = b²·I2/I0.
    let scale = sd * (half_mass / half_second).sqrt();
    let amplitude = (lit::<T>(2.0) * scale * half_mass).recip();
    Ok((scale, amplitude))
}

impl<T: Scalar> NominalPair<T> {
    /// `f0 = N(-1, sigma^2)`, `f1 = N(+1, sigma^2)`.
    pub fn gaussian(sigma: T) -> Result<Self> {
        positive("sigma", sigma)?;
        let f0 = Density::normal(-T::one(), sigma)?;
        let f1 = Density::normal(T::one(), sigma)?;
        Ok(Self::new(f0, f1))
    }

    /// Antipodal signals `∓1` in generalized Gaussian noise of variance
    /// `sigma^2`. Requires `alpha > 1` for a strictly monotone likelihood
    /// ratio.
    pub fn generalized_gaussian(alpha: T, sigma: T) -> Result<Self> {
        positive("sigma", sigma)?;
        if !(alpha > T::one() && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "generalized Gaussian shape must be finite and > 1, got {}",
                to_f64(alpha)
            )));
        }
        let f1 = Density::generalized_normal(T::one(), alpha, sigma)?;
        let f0 = f1.reflected();
        Ok(Self::new(f0, f1))
    }

    /// Antipodal signals in asymmetric Laplace noise: `f1(y) = f_L(y - 1)`
    /// and `f0(y) = f_L(-(y + 1))`. Requires `b > a > 0`.
    pub fn asymmetric_laplace(a: T, b: T) -> Result<Self> {
        positive("a", a)?;
        if !(b > a && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "asymmetric Laplace needs b > a, got a = {}, b = {}",
                to_f64(a),
                to_f64(b)
            )));
        }
        let f1 = Density::asymmetric_laplace(T::one(), a, b)?;
        let f0 = f1.reflected();
        Ok(Self::new(f0, f1))
    }

    /// Antipodal signals in Cauchy noise. The pair is symmetric but its
    /// likelihood ratio is not monotone, so it fails validation.
    pub fn cauchy(scale: T) -> Result<Self> {
        let f1 = Density::cauchy(T::one(), scale)?;
        let f0 = f1.reflected();
        Ok(Self::new(f0, f1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(NominalPair::<f64>::gaussian(0.0).is_err());
        assert!(NominalPair::<f64>::gaussian(-1.0).is_err());
        assert!(NominalPair::<f64>::generalized_gaussian(1.0, 1.0).is_err());
        assert!(NominalPair::<f64>::generalized_gaussian(0.5, 1.0).is_err());
        assert!(NominalPair::<f64>::asymmetric_laplace(2.0, 2.0).is_err());
        assert!(NominalPair::<f64>::asymmetric_laplace(4.0, 2.0).is_err());
        assert!(NominalPair::<f64>::asymmetric_laplace(0.0, 2.0).is_err());
        assert!(NominalPair::<f64>::cauchy(0.0).is_err());
        assert!(matches!(
            NominalPair::<f64>::asymmetric_laplace(2.0, 1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn gaussian_alpha_two_constants() {
        let (b, a) = generalized_normal_constants(2.0f64, 1.0).unwrap();
        assert!((b - 2f64.sqrt()).abs() < 1e-12);
        assert!((a - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn laplace_normalizer_matches_closed_form() {
        let c = 1.0 / (1.0 / 2.0 + 1.0 / 4.0);
        assert!((c - 4.0f64 / 3.0).abs() < 1e-15);
        let d = Density::asymmetric_laplace(0.0f64, 2.0, 4.0).unwrap();
        assert!((d.pdf(0.0) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tail_bounds_hold() {
        let tol = Tolerances::<f64>::default();
        for d in [
            Density::normal(0.3, 2.0).unwrap(),
            Density::generalized_normal(0.0, 1.5, 1.0).unwrap(),
            Density::generalized_normal(0.0, 4.0, 0.5).unwrap(),
            Density::asymmetric_laplace(1.0, 2.0, 4.0).unwrap(),
        ] {
            let iv = crate::numerics::TailEnvelope::mass_interval(&d, 1e-9).unwrap();
            let inside = crate::numerics::integrate(|y| d.pdf(y), iv, &tol).unwrap();
            assert!(1.0 - inside <= 1e-9 + 1e-10, "{}", 1.0 - inside);
        }
    }
}
