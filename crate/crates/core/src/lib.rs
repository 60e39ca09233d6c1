//! Minimax robust binary hypothesis testing when the true densities may
//! lie anywhere inside relative-entropy (KL) balls around two nominal
//! densities.
//!
//! Given a symmetric nominal pair `(f0, f1)` with monotone likelihood ratio
//! and a tolerance `ε`, [`saddle::solve`] returns the saddle point of the
//! minimax problem: the least-favorable densities, the randomized robust
//! test and its worst-case error probability. [`verify`] certifies the
//! result by probing both saddle inequalities and by Monte Carlo.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below cover the common case.
//!
//! ```
//! use robust_kl::{solve, NominalPair64, Tolerances64};
//!
//! let pair = NominalPair64::gaussian(1.0).unwrap();
//! let sp = solve(&pair, 0.1, &Tolerances64::default()).unwrap();
//! assert!((sp.y_u() - 0.608).abs() < 5e-3);
//! ```

pub mod densities;
pub mod error;
pub mod numerics;
pub mod saddle;
pub mod scalar;
pub mod verify;

pub use densities::{check_monotone_lr, check_symmetry, geodesic_density, kl_divergence, Density, NominalPair};
pub use error::{Error, Result};
pub use numerics::{find_root, gaussian_tail_q, integrate, integrate_real_line, Interval, TailEnvelope, Tolerances};
pub use saddle::{
    divergence_at, error_prob, lf_likelihood_ratio, normalizer, q_transform, robust_rule, solve,
    worst_case_error, DecisionRule, ErrorProbabilities, RandomizedRule, SaddlePoint,
};
pub use scalar::Scalar;
pub use verify::{check_saddle, monte_carlo_error, probe_density_ball, sample_density, SaddleCertificate};

pub type Density64 = Density<f64>;
pub type NominalPair64 = NominalPair<f64>;
pub type SaddlePoint64 = SaddlePoint<f64>;
pub type RandomizedRule64 = RandomizedRule<f64>;
pub type Tolerances64 = Tolerances<f64>;
pub type Interval64 = Interval<f64>;
pub type SaddleCertificate64 = SaddleCertificate<f64>;

pub type Density32 = Density<f32>;
pub type NominalPair32 = NominalPair<f32>;
pub type SaddlePoint32 = SaddlePoint<f32>;
pub type RandomizedRule32 = RandomizedRule<f32>;
pub type Tolerances32 = Tolerances<f32>;
pub type Interval32 = Interval<f32>;
pub type SaddleCertificate32 = SaddleCertificate<f32>;
