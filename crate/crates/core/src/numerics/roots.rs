use super::{Interval, Tolerances};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

const MAX_ITERATIONS: usize = 200;

/// Brent's method on a sign-changing bracket.
///
/// Iterates never leave the bracket; secant and inverse quadratic steps are
/// rejected in favour of bisection whenever they would not shrink it fast
/// enough. Returns once the bracket is narrower than `root_abs_err`.
pub fn find_root<T, F>(f: F, bracket: Interval<T>, tol: &Tolerances<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: to_f64(a),
            hi: to_f64(b),
            f_lo: to_f64(fa),
            f_hi: to_f64(fb),
        });
    }

    let two: T = lit(2.0);
    let three: T = lit(3.0);
    let half: T = lit(0.5);
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol.root_abs_err;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else {
            b + tol1 * xm.signum()
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonConvergence {
                lo: to_f64(bracket.lo),
                hi: to_f64(bracket.hi),
                error: f64::NAN,
                panels: 0,
            });
        }
    }
    Err(Error::NonConvergence {
        lo: to_f64(bracket.lo),
        hi: to_f64(bracket.hi),
        error: to_f64((c - b).abs()),
        panels: MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn cube_root_of_two() {
        let x = find_root(|x: f64| x * x * x - 2.0, Interval::new(1.0, 2.0).unwrap(), &tol()).unwrap();
        assert!((x - 2f64.cbrt()).abs() <= 1e-9);
    }

    #[test]
    fn identity_root_at_zero() {
        let x = find_root(|x: f64| x, Interval::new(-1.0, 1.0).unwrap(), &tol()).unwrap();
        assert!(x.abs() <= 1e-9);
    }

    #[test]
    fn cosine_root_is_half_pi() {
        let x = find_root(f64::cos, Interval::new(1.0, 2.0).unwrap(), &tol()).unwrap();
        assert!((x - std::f64::consts::FRAC_PI_2).abs() <= 1e-9);
    }

    #[test]
    fn same_sign_bracket_is_rejected() {
        let err = find_root(|x: f64| x * x + 1.0, Interval::new(-1.0, 1.0).unwrap(), &tol()).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn endpoint_roots_are_returned() {
        let x = find_root(|x: f64| x - 1.0, Interval::new(1.0, 3.0).unwrap(), &tol()).unwrap();
        assert_eq!(x, 1.0);
    }

    #[test]
    fn step_function_converges_by_bisection() {
        let x = find_root(
            |x: f64| if x < 0.3 { -1.0 } else { 1.0 },
            Interval::new(0.0, 1.0).unwrap(),
            &tol(),
        )
        .unwrap();
        assert!((x - 0.3).abs() <= 1e-9);
    }
}
