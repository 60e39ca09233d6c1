use super::{merged_breakpoints, Density};
use crate::error::{Error, Result};
use crate::numerics::{integrate_real_line, EnvelopeHull, Interval, TailEnvelope, Tolerances};
use crate::scalar::{lit, to_f64, Scalar};

/// Mass left outside the validation grid.
const VALIDATION_MASS: f64 = 1e-12;
/// Maximum `|log f1(y) - log f0(-y)|` accepted as symmetric.
const SYMMETRY_TOL: f64 = 1e-10;
/// Consecutive log-LR differences this small count as ties.
const TIE_TOL: f64 = 1e-12;

pub(crate) const SYMMETRY_GRID: usize = 1001;
pub(crate) const MONOTONE_GRID: usize = 4001;

/// Nominal densities `(f0, f1)` together with the outcome of the symmetry
/// and monotone likelihood-ratio checks, run once at construction.
#[derive(Clone, Debug)]
pub struct NominalPair<T: Scalar> {
    f0: Density<T>,
    f1: Density<T>,
    validated_symmetric: bool,
    validated_monotone_lr: bool,
}

impl<T: Scalar> NominalPair<T> {
    /// Wraps an arbitrary pair and validates it on the default grids.
    pub fn new(f0: Density<T>, f1: Density<T>) -> Self {
        let mut pair = Self {
            f0,
            f1,
            validated_symmetric: false,
            validated_monotone_lr: false,
        };
        pair.validated_symmetric = check_symmetry(&pair, SYMMETRY_GRID);
        pair.validated_monotone_lr = check_monotone_lr(&pair, MONOTONE_GRID);
        pair
    }

    pub fn f0(&self) -> &Density<T> {
        &self.f0
    }

    pub fn f1(&self) -> &Density<T> {
        &self.f1
    }

    /// Nominal density under hypothesis `j` (0 or 1).
    pub fn nominal(&self, j: usize) -> &Density<T> {
        if j == 0 {
            &self.f0
        } else {
            &self.f1
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.validated_symmetric
    }

    pub fn has_monotone_lr(&self) -> bool {
        self.validated_monotone_lr
    }

    /// Both checks passed; only such pairs are accepted by the solver.
    pub fn is_validated(&self) -> bool {
        self.validated_symmetric && self.validated_monotone_lr
    }

    pub fn require_validated(&self) -> Result<()> {
        if self.is_validated() {
            Ok(())
        } else {
            Err(Error::UnvalidatedPair {
                symmetric: self.validated_symmetric,
                monotone_lr: self.validated_monotone_lr,
            })
        }
    }

    /// `ln L(y) = ln f1(y) - ln f0(y)`.
    pub fn log_likelihood_ratio(&self, y: T) -> Result<T> {
        let l0 = self.f0.log_pdf(y);
        if l0 == T::neg_infinity() || l0.is_nan() {
            return Err(Error::SupportMismatch { y: to_f64(y) });
        }
        Ok(self.f1.log_pdf(y) - l0)
    }

    /// `ln L(y)` without the support check.
    #[inline]
    pub(crate) fn llr(&self, y: T) -> T {
        self.f1.log_pdf(y) - self.f0.log_pdf(y)
    }

    /// Breakpoints of both nominal densities.
    pub fn breakpoints(&self) -> Vec<T> {
        merged_breakpoints(self.f0.breakpoints(), self.f1.breakpoints())
    }

    /// Envelope covering both nominal densities.
    pub fn envelope(&self) -> EnvelopeHull<'_, T> {
        EnvelopeHull(vec![&self.f0, &self.f1])
    }

    /// Interval holding all but `1e-12` of either nominal's mass.
    pub fn validation_interval(&self) -> Option<Interval<T>> {
        self.envelope().mass_interval(lit(VALIDATION_MASS))
    }

    /// Normalizer `Z(u) = ∫ f1^u f0^{1-u}` of the geodesic density.
    pub fn geodesic_normalizer(&self, u: T, tol: &Tolerances<T>) -> Result<T> {
        check_unit(u)?;
        if u == T::zero() || u == T::one() {
            return Ok(T::one());
        }
        let (f0, f1) = (&self.f0, &self.f1);
        integrate_real_line(
            |y| (u * f1.log_pdf(y) + (T::one() - u) * f0.log_pdf(y)).exp(),
            &self.envelope(),
            &self.breakpoints(),
            &tol.tightened(lit(0.01)),
        )
    }
}

fn check_unit<T: Scalar>(u: T) -> Result<()> {
    if u >= T::zero() && u <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "geodesic parameter must lie in [0, 1], got {}",
            to_f64(u)
        )))
    }
}

/// Whether `f1(y) = f0(-y)` holds in log space on a uniform grid of
/// `grid_size` points spanning all but `1e-12` of the nominal mass.
pub fn check_symmetry<T: Scalar>(pair: &NominalPair<T>, grid_size: usize) -> bool {
    let Some(iv) = pair.validation_interval() else {
        return false;
    };
    let grid_size = grid_size.max(100);
    // Symmetric around the origin so that y and -y are both probed.
    let half = iv.lo.abs().max(iv.hi.abs());
    let Ok(iv) = Interval::new(-half, half) else {
        return false;
    };
    let floor = T::precision_floor();
    iv.grid(grid_size).into_iter().all(|y| {
        let a = pair.f1.log_pdf(y);
        let b = pair.f0.log_pdf(-y);
        if a == T::neg_infinity() && b == T::neg_infinity() {
            return true;
        }
        let scale = T::one() + a.abs().max(b.abs());
        (a - b).abs() <= lit::<T>(SYMMETRY_TOL).max(floor * scale)
    })
}

/// Whether `ln L` is strictly increasing across a uniform grid of
/// `grid_size` points spanning all but `1e-12` of the nominal mass.
///
/// A step smaller than `1e-12` in magnitude counts as a tie; an isolated
/// tie is accepted as rounding, two ties in a row mean a flat stretch and
/// fail the check.
pub fn check_monotone_lr<T: Scalar>(pair: &NominalPair<T>, grid_size: usize) -> bool {
    let Some(iv) = pair.validation_interval() else {
        return false;
    };
    let grid = iv.grid(grid_size.max(1000));
    let values: Vec<T> = grid.iter().map(|&y| pair.llr(y)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let floor = T::precision_floor();
    let mut previous_tie = false;
    for w in values.windows(2) {
        let step = w[1] - w[0];
        let tie_tol = lit::<T>(TIE_TOL).max(floor * (T::one() + w[1].abs()));
        if step < -tie_tol {
            return false;
        }
        let tie = step <= tie_tol;
        if tie && previous_tie {
            return false;
        }
        previous_tie = tie;
    }
    true
}

/// The geodesic density `f_u ∝ f1^u f0^{1-u}` between the two nominals.
pub fn geodesic_density<T: Scalar>(
    pair: &NominalPair<T>,
    u: T,
    tol: &Tolerances<T>,
) -> Result<Density<T>> {
    check_unit(u)?;
    if u == T::zero() {
        return Ok(pair.f0.clone());
    }
    if u == T::one() {
        return Ok(pair.f1.clone());
    }
    let z = pair.geodesic_normalizer(u, tol)?;
    let log_z = z.ln();
    let (f0, f1) = (pair.f0.clone(), pair.f1.clone());
    let (e0, e1) = (pair.f0.clone(), pair.f1.clone());
    let v = T::one() - u;
    Ok(Density::new(
        move |y| u * f1.log_pdf(y) + v * f0.log_pdf(y) - log_z,
        // f1^u f0^{1-u} <= u f1 + (1-u) f0, so the normalized tails hold at
        // most cutoff/Z of mass beyond the nominal intervals at cutoff.
        move |m| {
            let m = m * z.min(T::one());
            Some(e0.mass_interval(m)?.hull(&e1.mass_interval(m)?))
        },
        pair.breakpoints(),
    ))
}
