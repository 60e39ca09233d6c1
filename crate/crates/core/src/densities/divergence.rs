use std::cell::Cell;

use super::{merged_breakpoints, Density};
use crate::error::{Error, Result};
use crate::numerics::{integrate_real_line, Tolerances};
use crate::scalar::{to_f64, Scalar};

/// Relative entropy `D(g|f) = ∫ g ln(g/f)` in nats.
///
/// The integrand is evaluated as `g·(ln g - ln f)` with `0·ln 0 = 0`; the
/// range is truncated by `g`'s tails and split at both densities'
/// breakpoints.
pub fn kl_divergence<T: Scalar>(g: &Density<T>, f: &Density<T>, tol: &Tolerances<T>) -> Result<T> {
    let mismatch: Cell<Option<T>> = Cell::new(None);
    let breaks = merged_breakpoints(g.breakpoints(), f.breakpoints());
    let value = integrate_real_line(
        |y| {
            let lg = g.log_pdf(y);
            if lg == T::neg_infinity() {
                return T::zero();
            }
            let lf = f.log_pdf(y);
            if lf == T::neg_infinity() {
                if mismatch.get().is_none() {
                    mismatch.set(Some(y));
                }
                return T::zero();
            }
            lg.exp() * (lg - lf)
        },
        g,
        &breaks,
        tol,
    )?;
    match mismatch.get() {
        Some(y) => Err(Error::SupportMismatch { y: to_f64(y) }),
        None => Ok(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Interval;

    #[test]
    fn divergence_from_itself_is_zero() {
        let tol = Tolerances::default();
        let f = Density::asymmetric_laplace(0.0f64, 2.0, 4.0).unwrap();
        assert!(kl_divergence(&f, &f, &tol).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn normal_closed_form() {
        let tol = Tolerances::default();
        // D(N(m1,s1)|N(m0,s0)) = ln(s0/s1) + (s1² + (m1-m0)²)/(2 s0²) - 1/2
        let g = Density::normal(0.5f64, 0.8).unwrap();
        let f = Density::normal(-0.2f64, 1.3).unwrap();
        let exact = (1.3f64 / 0.8).ln() + (0.64 + 0.49) / (2.0 * 1.69) - 0.5;
        let d = kl_divergence(&g, &f, &tol).unwrap();
        assert!((d - exact).abs() < 1e-10, "{d} vs {exact}");
    }

    #[test]
    fn support_mismatch_is_reported() {
        let tol = Tolerances::default();
        let half_line = Density::new(
            |y: f64| if y >= 0.0 { -y } else { f64::NEG_INFINITY },
            |m: f64| Interval::new(0.0, -m.ln()).ok(),
            vec![0.0],
        );
        let g = Density::normal(0.0, 1.0).unwrap();
        assert!(matches!(
            kl_divergence(&g, &half_line, &tol),
            Err(Error::SupportMismatch { .. })
        ));
        // The other direction is fine: 0·ln 0 contributes nothing.
        assert!(kl_divergence(&half_line, &g, &tol).unwrap().is_finite());
    }
}
