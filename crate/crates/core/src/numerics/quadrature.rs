use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Interval, TailEnvelope, Tolerances};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Panel<T> {}
impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod15<T: Scalar, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Panel<T> {
    let half: T = lit(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);
    let fc = f(center);
    let mut res_k = fc * lit(WGK[7]);
    let mut res_g = fc * lit(WG[3]);
    let mut res_abs = fc.abs() * lit(WGK[7]);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = lit::<T>(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + lit::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = lit::<T>(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + lit::<T>(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut error = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && error != T::zero() {
        let ratio = (lit::<T>(200.0) * error / res_asc).powf(lit(1.5));
        error = res_asc * ratio.min(T::one());
    }
    let eps = T::epsilon();
    if res_abs > T::min_positive_value() / (lit::<T>(50.0) * eps) {
        error = error.max(lit::<T>(50.0) * eps * res_abs);
    }
    Panel {
        lo,
        hi,
        value,
        error,
    }
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `iv`.
///
/// Succeeds once the summed error estimate is at most
/// `max(quad_abs_err, quad_rel_err * |result|)`.
pub fn integrate<T, F>(f: F, iv: Interval<T>, tol: &Tolerances<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    integrate_pieces(f, &[iv.lo, iv.hi], tol)
}

/// Adaptive quadrature over `[nodes[0], nodes[last]]`, with the panels
/// initially split at every node.
///
/// The tolerance applies to the total, not to each piece. Nodes must be
/// non-decreasing; repeated nodes are skipped.
pub fn integrate_pieces<T, F>(f: F, nodes: &[T], tol: &Tolerances<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if nodes.len() < 2 {
        return Err(Error::InvalidParameter(
            "integration needs at least two nodes".into(),
        ));
    }
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    Interval::new(first, last)?;

    let mut heap = BinaryHeap::new();
    // Panels too narrow to bisect further; their error is frozen.
    let mut frozen_value = T::zero();
    let mut frozen_error = T::zero();
    for w in nodes.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(&f, w[0], w[1]));
        } else if w[1] < w[0] {
            return Err(Error::InvalidParameter("integration nodes must be sorted".into()));
        }
    }

    let nonconvergence = |error: T, panels: usize| Error::NonConvergence {
        lo: to_f64(first),
        hi: to_f64(last),
        error: to_f64(error),
        panels,
    };

    loop {
        let (mut total, mut error) = (frozen_value, frozen_error);
        for p in heap.iter() {
            total = total + p.value;
            error = error + p.error;
        }
        if !total.is_finite() || !error.is_finite() {
            return Err(nonconvergence(error, heap.len()));
        }
        let target = tol.quad_abs_err.max(tol.quad_rel_err * total.abs());
        if error <= target {
            return Ok(total);
        }
        let count = heap.len();
        if count >= tol.max_subdivisions {
            return Err(nonconvergence(error, count));
        }
        let Some(worst) = heap.pop() else {
            return Err(nonconvergence(error, count));
        };
        let mid = lit::<T>(0.5) * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            frozen_value = frozen_value + worst.value;
            frozen_error = frozen_error + worst.error;
            continue;
        }
        heap.push(kronrod15(&f, worst.lo, mid));
        heap.push(kronrod15(&f, mid, worst.hi));
    }
}

/// Integral of `f` over `[lo, hi]`, where either end may be infinite.
///
/// The range is clipped to the envelope's mass interval at
/// `support_mass_cutoff`, and panels are split at every breakpoint inside
/// it. An empty clipped range integrates to zero.
pub fn integrate_between<T, F, E>(
    f: F,
    lo: T,
    hi: T,
    envelope: &E,
    breakpoints: &[T],
    tol: &Tolerances<T>,
) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
    E: TailEnvelope<T> + ?Sized,
{
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidInterval {
            lo: to_f64(lo),
            hi: to_f64(hi),
        });
    }
    let support = envelope
        .mass_interval(tol.support_mass_cutoff)
        .filter(|iv| iv.lo.is_finite() && iv.hi.is_finite())
        .ok_or(Error::TruncationFailure {
            cutoff: to_f64(tol.support_mass_cutoff),
        })?;
    let a = lo.max(support.lo);
    let b = hi.min(support.hi);
    if a >= b {
        return Ok(T::zero());
    }
    let mut nodes = Vec::with_capacity(breakpoints.len() + 2);
    nodes.push(a);
    let mut inner: Vec<T> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    nodes.extend(inner);
    nodes.push(b);
    integrate_pieces(f, &nodes, tol)
}

/// Integral of `f` over the whole real line, truncated by `envelope`.
pub fn integrate_real_line<T, F, E>(
    f: F,
    envelope: &E,
    breakpoints: &[T],
    tol: &Tolerances<T>,
) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
    E: TailEnvelope<T> + ?Sized,
{
    integrate_between(
        f,
        T::neg_infinity(),
        T::infinity(),
        envelope,
        breakpoints,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::NormalEnvelope;

    fn phi(y: f64) -> f64 {
        (-0.5 * y * y).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn normal_pdf_normalizes() {
        let iv = Interval::new(-10.0, 10.0).unwrap();
        let v = integrate(phi, iv, &tol()).unwrap();
        assert!((v - 1.0).abs() <= 1e-10, "{v}");
    }

    #[test]
    fn odd_integrand_vanishes() {
        let iv = Interval::new(-10.0, 10.0).unwrap();
        let v = integrate(|y| y * phi(y), iv, &tol()).unwrap();
        assert!(v.abs() <= 1e-10, "{v}");
    }

    #[test]
    fn exponential_matches_antiderivative() {
        let iv = Interval::new(0.0, 20.0).unwrap();
        let v = integrate(|y: f64| (-y).exp(), iv, &tol()).unwrap();
        let exact = 1.0 - (-20.0f64).exp();
        assert!((v - exact).abs() <= 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn kink_is_resolved_when_split() {
        let t = tol();
        let v = integrate_pieces(|y: f64| y.abs(), &[-1.0, 0.0, 2.0], &t).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
        // Without the split the adaptive rule still converges, just slower.
        let v = integrate(|y: f64| (y - 0.3).abs(), Interval::new(-1.0, 2.0).unwrap(), &t).unwrap();
        assert!((v - (1.3 * 1.3 + 1.7 * 1.7) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut t = tol();
        t.max_subdivisions = 3;
        let err = integrate(
            |y: f64| (50.0 * y).sin().abs(),
            Interval::new(0.0, 10.0).unwrap(),
            &t,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let err = integrate(|_| f64::NAN, Interval::new(0.0, 1.0).unwrap(), &tol()).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn real_line_uses_envelope() {
        let env = NormalEnvelope::standard();
        let v = integrate_real_line(phi, &env, &[], &tol()).unwrap();
        assert!((v - 1.0).abs() <= 1e-10);
        let half = integrate_between(phi, 0.0, f64::INFINITY, &env, &[], &tol()).unwrap();
        assert!((half - 0.5).abs() <= 1e-10);
        let none = integrate_between(phi, 50.0, f64::INFINITY, &env, &[], &tol()).unwrap();
        assert_eq!(none, 0.0);
    }

    struct NoTails;
    impl TailEnvelope<f64> for NoTails {
        fn mass_interval(&self, _: f64) -> Option<Interval<f64>> {
            None
        }
    }

    #[test]
    fn missing_envelope_is_truncation_failure() {
        let err = integrate_real_line(phi, &NoTails, &[], &tol()).unwrap_err();
        assert!(matches!(err, Error::TruncationFailure { .. }));
    }

    #[test]
    fn works_in_single_precision() {
        let t = Tolerances::<f32>::default();
        let v = integrate(
            |y: f32| (-y).exp(),
            Interval::new(0.0f32, 20.0).unwrap(),
            &t,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-5);
    }
}
