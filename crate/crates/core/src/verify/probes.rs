use std::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::derive_seed;
use crate::densities::{geodesic_density, kl_divergence, Density};
use crate::error::{Error, Result};
use crate::numerics::{find_root, Interval, Tolerances};
use crate::saddle::SaddlePoint;
use crate::scalar::{lit, Scalar};

/// Parametric family a probe density was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeFamily {
    /// The least-favorable density itself.
    LeastFavorable,
    /// Geodesic tilt of the nominal toward the competing nominal.
    GeodesicTilt,
    /// Location shift of the nominal.
    Shift,
    /// Mixture of the nominal with the least-favorable density.
    Mixture,
}

/// A density inside one of the KL balls.
#[derive(Debug, Clone)]
pub struct Probe<T: Scalar> {
    pub density: Density<T>,
    pub family: ProbeFamily,
    /// Family parameter: tilt `u`, shift, or mixture weight.
    pub parameter: T,
    /// `D(g|f_j)` measured after construction.
    pub divergence: T,
}

/// Solves `divergence(param) = target` on `bracket`, surfacing any
/// quadrature error raised along the way.
fn calibrate<T, F>(divergence: F, target: T, bracket: Interval<T>, tol: &Tolerances<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> Result<T>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let root = find_root(
        |p| match divergence(p) {
            Ok(d) => d - target,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::nan()
            }
        },
        bracket,
        tol,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => root,
    }
}

/// `n` densities `g` with `D(g|f_j) <= ε`, where `f_j` is the nominal under
/// `hypothesis` and `ε` the saddle point's tolerance.
///
/// Probe 0 is the least-favorable density. The rest cycle through geodesic
/// tilts toward the other nominal, location shifts in both directions and
/// mixtures with the least-favorable density. The first probe of each kind
/// sits on the ball boundary; later ones target a random fraction of `ε`
/// drawn from a generator seeded by `(seed, index)`.
pub fn probe_density_ball<T: Scalar>(
    sp: &SaddlePoint<T>,
    hypothesis: usize,
    n: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<Vec<Probe<T>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one probe".into()));
    }
    if hypothesis > 1 {
        return Err(Error::InvalidParameter(format!(
            "hypothesis must be 0 or 1, got {hypothesis}"
        )));
    }
    (0..n)
        .into_par_iter()
        .map(|k| build_probe(sp, hypothesis, k, seed, tol))
        .collect()
}

fn build_probe<T: Scalar>(
    sp: &SaddlePoint<T>,
    j: usize,
    k: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<Probe<T>> {
    let nominal = sp.pair().nominal(j);
    let lf = sp.lf_density(j);
    let epsilon = sp.epsilon();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, (k as u64) << 1 | j as u64));
    let fraction: T = if k <= 4 {
        T::one()
    } else {
        lit(rng.random_range(0.05..1.0))
    };
    let target = epsilon * fraction;

    let (density, family, parameter) = match k {
        0 => (lf.clone(), ProbeFamily::LeastFavorable, T::one()),
        _ => match (k - 1) % 4 {
            0 => {
                // Tilt parameter measured from f_j toward the other nominal.
                let along = |t: T| if j == 0 { t } else { T::one() - t };
                let u = calibrate(
                    |t| kl_divergence(&geodesic_density(sp.pair(), along(t), tol)?, nominal, tol),
                    target,
                    Interval::new(T::zero(), T::one())?,
                    tol,
                )?;
                let g = geodesic_density(sp.pair(), along(u), tol)?;
                (g, ProbeFamily::GeodesicTilt, u)
            }
            step @ (1 | 2) => {
                let sign = if step == 1 { T::one() } else { -T::one() };
                let kl = |s: T| kl_divergence(&nominal.shifted(sign * s), nominal, tol);
                let mut hi: T = lit(0.25);
                let mut doublings = 0;
                while kl(hi)? <= target {
                    hi = hi + hi;
                    doublings += 1;
                    if doublings > 40 {
                        return Err(Error::InvalidParameter(
                            "shift probe cannot reach the ball boundary".into(),
                        ));
                    }
                }
                let s = calibrate(kl, target, Interval::new(T::zero(), hi)?, tol)?;
                (nominal.shifted(sign * s), ProbeFamily::Shift, sign * s)
            }
            _ => (
                nominal.mixture(lf, fraction),
                ProbeFamily::Mixture,
                fraction,
            ),
        },
    };
    let divergence = kl_divergence(&density, nominal, tol)?;
    Ok(Probe {
        density,
        family,
        parameter,
        divergence,
    })
}
