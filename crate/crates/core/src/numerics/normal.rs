use super::{integrate, Interval, Tolerances};
use crate::scalar::{lit, Scalar};

/// Upper tail of the standard normal distribution,
/// `Q(x) = ∫_x^∞ φ(t) dt`, by adaptive quadrature.
///
/// Only the tail beyond `|x|` is ever integrated, so the relative accuracy
/// holds far into the tail; `Q(-x)` is obtained as `1 - Q(x)`.
pub fn gaussian_tail_q<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x == T::zero() {
        return lit(0.5);
    }
    if x < T::zero() {
        return T::one() - gaussian_tail_q(-x);
    }
    if x.is_infinite() {
        return T::zero();
    }
    let norm = T::one() / (T::PI() * lit(2.0)).sqrt();
    let half: T = lit(0.5);
    // φ(upper) = φ(x)·e^{-50}: the omitted tail is negligible relative to Q(x).
    let upper = (x * x + lit(100.0)).sqrt();
    let tol = Tolerances {
        quad_rel_err: lit::<T>(1e-14).max(T::precision_floor()),
        quad_abs_err: T::min_positive_value(),
        max_subdivisions: 500,
        ..Tolerances::default()
    };
    let Ok(iv) = Interval::new(x, upper) else {
        return T::zero();
    };
    // Factor φ(x) out so the integrand stays O(1) even when φ(x) underflows.
    let scaled = integrate(
        |t: T| (-(half * (t - x) * (t + x))).exp(),
        iv,
        &tol,
    )
    .expect("normal tail quadrature converges on a smooth integrand");
    norm * (-(half * x * x)).exp() * scaled
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_at_zero_is_half() {
        assert_eq!(gaussian_tail_q(0.0f64), 0.5);
    }

    #[test]
    fn reflection_identity() {
        for &x in &[0.1, 0.7, 1.0, 2.5, 6.0] {
            let s = gaussian_tail_q(x) + gaussian_tail_q(-x);
            assert!((s - 1.0f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn deep_tail_stays_positive() {
        let q = gaussian_tail_q(30.0f64);
        assert!(q > 0.0 && q < 1e-190);
        assert_eq!(gaussian_tail_q(f64::INFINITY), 0.0);
    }

    #[test]
    fn single_precision() {
        let q = gaussian_tail_q(1.0f32);
        assert!((q - 0.158_655_26).abs() < 1e-6);
    }
}
