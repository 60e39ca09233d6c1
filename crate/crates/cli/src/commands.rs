use rayon::prelude::*;
use robust_kl::verify::MonteCarloEstimate;
use robust_kl::{
    check_saddle, divergence_at, gaussian_tail_q, lf_likelihood_ratio, monte_carlo_error, Error,
    NominalPair64, SaddleCertificate64, SaddlePoint64,
};
use serde::Serialize;

use crate::output::Table;
use crate::{Common, Grid};

/// Largest |z| at which Monte Carlo and quadrature are taken to agree.
const MC_Z_LIMIT: f64 = 4.0;

#[derive(Serialize)]
pub struct SolveReport {
    family: &'static str,
    epsilon: f64,
    #[serde(rename = "y_U")]
    y_u: f64,
    #[serde(rename = "ell_U")]
    ell_u: f64,
    #[serde(rename = "Z")]
    z: f64,
    worst_case_pe: f64,
    d_midway: f64,
}

impl SolveReport {
    fn new(family: &'static str, sp: &SaddlePoint64) -> Self {
        Self {
            family,
            epsilon: sp.epsilon(),
            y_u: sp.y_u(),
            ell_u: sp.ell_u(),
            z: sp.z(),
            worst_case_pe: sp.worst_case_pe(),
            d_midway: sp.d_midway(),
        }
    }
}

pub fn solve_pair(common: &Common, epsilon: f64) -> anyhow::Result<SaddlePoint64> {
    let tol = common.tolerances()?;
    let pair = common.validated_pair()?;
    Ok(robust_kl::solve(&pair, epsilon, &tol)?)
}

pub fn solve(common: &Common, epsilon: f64) -> anyhow::Result<SolveReport> {
    let sp = solve_pair(common, epsilon)?;
    Ok(SolveReport::new(common.family.name(), &sp))
}

pub fn divergence_curve(common: &Common, grid: &Grid) -> anyhow::Result<Table> {
    let tol = common.tolerances()?;
    let pair = common.validated_pair()?;
    let points = grid.points();
    if points.iter().any(|&y| y < 0.0) {
        anyhow::bail!("breakpoint grid must be non-negative");
    }
    let rows = points
        .par_iter()
        .map(|&y| Ok(vec![Some(y), Some(divergence_at(&pair, y, &tol)?)]))
        .collect::<robust_kl::Result<Vec<_>>>()?;
    Ok(Table {
        columns: vec!["y_U".into(), "D".into()],
        rows,
    })
}

pub fn dump_densities(common: &Common, epsilon: f64, grid: &Grid) -> anyhow::Result<Table> {
    let sp = solve_pair(common, epsilon)?;
    let pair = sp.pair();
    let rows = grid
        .points()
        .into_iter()
        .map(|y| {
            let cells = [
                y,
                pair.f0().pdf(y),
                pair.f1().pdf(y),
                sp.lf_density_0().pdf(y),
                sp.lf_density_1().pdf(y),
                sp.rule().evaluate(y),
                pair.log_likelihood_ratio(y)?.exp(),
                lf_likelihood_ratio(&sp, y),
            ];
            Ok(cells.into_iter().map(Some).collect())
        })
        .collect::<robust_kl::Result<Vec<_>>>()?;
    Ok(Table {
        columns: ["y", "f0", "f1", "g0L", "g1L", "delta_R", "L", "L_L"]
            .into_iter()
            .map(String::from)
            .collect(),
        rows,
    })
}

/// One row per SNR point: `snr_db, pe_ml, pe_worst_<ε>...`. An infeasible
/// `ε` leaves its cell empty and is reported on standard error.
pub fn sweep_snr(common: &Common, epsilons: &[f64], snr_db: &Grid) -> anyhow::Result<Table> {
    let tol = common.tolerances()?;
    let points = snr_db.points();
    let rows = points
        .par_iter()
        .map(|&db| -> anyhow::Result<(Vec<Option<f64>>, Vec<String>)> {
            // SNR = 1/σ², SNR_dB = 10 log10(1/σ²).
            let sigma = 10f64.powf(-db / 20.0);
            let pair = NominalPair64::gaussian(sigma)?;
            let mut row = vec![Some(db), Some(gaussian_tail_q(sigma.recip()))];
            let mut warnings = Vec::new();
            for &eps in epsilons {
                match robust_kl::solve(&pair, eps, &tol) {
                    Ok(sp) => row.push(Some(sp.worst_case_pe())),
                    Err(Error::InfeasibleTolerance { bound, .. }) => {
                        warnings.push(format!(
                            "warning: skipping snr_db={db}, epsilon={eps}: infeasible (bound {bound})"
                        ));
                        row.push(None);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok((row, warnings))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut columns = vec!["snr_db".to_string(), "pe_ml".to_string()];
    columns.extend(epsilons.iter().map(|e| format!("pe_worst_{e}")));
    let rows = rows
        .into_iter()
        .map(|(row, warnings)| {
            for w in warnings {
                eprintln!("{w}");
            }
            row
        })
        .collect();
    Ok(Table { columns, rows })
}

#[derive(Serialize)]
pub struct MonteCarloReport {
    samples: usize,
    seed: u64,
    pe_hat: f64,
    stderr: f64,
    quadrature_pe: f64,
    z_score: f64,
    z_limit: f64,
    agrees: bool,
}

impl MonteCarloReport {
    fn new(est: MonteCarloEstimate<f64>, quadrature_pe: f64, seed: u64) -> Self {
        let z = est.z_score(quadrature_pe);
        Self {
            samples: est.samples,
            seed,
            pe_hat: est.pe_hat,
            stderr: est.stderr,
            quadrature_pe,
            z_score: z,
            z_limit: MC_Z_LIMIT,
            agrees: z.abs() <= MC_Z_LIMIT,
        }
    }
}

#[derive(Serialize)]
pub struct VerifyReport {
    family: &'static str,
    epsilon: f64,
    #[serde(rename = "y_U")]
    y_u: f64,
    worst_case_pe: f64,
    passes: bool,
    certificate_passes: bool,
    certificate: SaddleCertificate64,
    monte_carlo: MonteCarloReport,
}

pub fn verify(
    common: &Common,
    epsilon: f64,
    n_probes: usize,
    mc_samples: usize,
) -> anyhow::Result<(VerifyReport, bool)> {
    if n_probes == 0 {
        anyhow::bail!("--probes must be at least 1");
    }
    let tol = common.tolerances()?;
    let sp = solve_pair(common, epsilon)?;
    let cert = check_saddle(&sp, n_probes, common.seed, &tol)?;
    let est = monte_carlo_error(
        sp.rule(),
        sp.lf_density_0(),
        sp.lf_density_1(),
        mc_samples,
        common.seed,
        &tol,
    )?;
    let mc = MonteCarloReport::new(est, cert.saddle_pe, common.seed);
    let certificate_passes = cert.passes();
    let passes = certificate_passes && mc.agrees;
    let report = VerifyReport {
        family: common.family.name(),
        epsilon,
        y_u: sp.y_u(),
        worst_case_pe: sp.worst_case_pe(),
        passes,
        certificate_passes,
        certificate: cert,
        monte_carlo: mc,
    };
    Ok((report, passes))
}
