//! Test-only oracles, independent of the library's quadrature.
#![allow(dead_code)]

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Trapezoid rule on a uniform grid of `points` points.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, points: usize) -> f64 {
    let h = (b - a) / (points - 1) as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..points - 1 {
        s += f(a + h * i as f64);
    }
    s * h
}

/// Plain bisection for an increasing function.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn normal_pdf(y: f64, mean: f64, sd: f64) -> f64 {
    let z = (y - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

/// Q(x) from the complementary error function.
pub fn q_oracle(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Brute-force D(y_U) for the Gaussian pair N(∓1, σ²): the three-segment
/// density is tabulated on a fine grid, normalized by trapezoid, and its
/// divergence from f0 summed directly.
pub fn gaussian_divergence_bruteforce(sigma: f64, y_u: f64, points: usize) -> f64 {
    let f0 = |y: f64| normal_pdf(y, -1.0, sigma);
    let f1 = |y: f64| normal_pdf(y, 1.0, sigma);
    let ell = (2.0 * y_u / (sigma * sigma)).exp();
    let raw = |y: f64| {
        if y > y_u {
            ell * f0(y)
        } else if y >= -y_u {
            ell.sqrt() * (f0(y) * f1(y)).sqrt()
        } else {
            f0(y)
        }
    };
    let (a, b) = (-1.0 - 12.0 * sigma, 1.0 + 12.0 * sigma);
    let z = trapezoid(raw, a, b, points);
    trapezoid(
        |y| {
            let g = raw(y) / z;
            if g > 0.0 {
                g * (g / f0(y)).ln()
            } else {
                0.0
            }
        },
        a,
        b,
        points,
    )
}
