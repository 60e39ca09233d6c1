//! `robust-kl`: solve, tabulate and verify minimax robust tests between
//! two KL balls.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use robust_kl::{Error, NominalPair64, Tolerances64};

use crate::output::Format;

/// Exit code for an infeasible tolerance.
const EXIT_INFEASIBLE: u8 = 2;
/// Exit code for a nominal pair failing the symmetry or monotone-LR check.
const EXIT_UNVALIDATED: u8 = 3;
/// Exit code for a failed saddle-point certificate.
const EXIT_VERIFY_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "robust-kl", version, about = "Minimax robust hypothesis tests under KL uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the saddle point at one tolerance.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        epsilon: f64,
    },
    /// Tabulate D(y_U) over a grid of breakpoints.
    DivergenceCurve {
        #[command(flatten)]
        common: Common,
        /// Breakpoint grid as lo:hi:step.
        #[arg(long, default_value = "0:3:0.015", value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Tabulate nominal and least-favorable densities, the robust rule and
    /// both likelihood ratios.
    DumpDensities {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        epsilon: f64,
        /// Observation grid as lo:hi:step.
        #[arg(long, default_value = "-4:4:0.01", value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Worst-case and nominal ML error probability against SNR (gaussian only).
    SweepSnr {
        #[command(flatten)]
        common: Common,
        /// Tolerances to sweep; repeat the flag for several.
        #[arg(long, num_args = 1, default_values_t = [0.01, 0.1])]
        epsilon: Vec<f64>,
        /// SNR grid in dB as lo:hi:step.
        #[arg(long, default_value = "0:15:0.5", value_parser = parse_grid, allow_hyphen_values = true)]
        snr_db: Grid,
    },
    /// Certify the saddle point by probing both inequalities and by Monte Carlo.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        epsilon: f64,
        /// Density probes per hypothesis.
        #[arg(long, default_value_t = 50)]
        probes: usize,
        /// Monte Carlo samples per hypothesis; accepts forms like 1e6.
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        mc_samples: usize,
    },
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    tolerances: ToleranceArgs,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Gaussian,
    GenGaussian,
    AsymLaplace,
    Cauchy,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    family: Family,
    /// Noise standard deviation (gaussian, gen-gaussian).
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Shape exponent (gen-gaussian), > 1.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Right decay rate (asym-laplace).
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Left decay rate (asym-laplace), > a.
    #[arg(long, default_value_t = 4.0)]
    b: f64,
    /// Scale (cauchy).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

impl FamilyArgs {
    fn name(&self) -> &'static str {
        match self.family {
            Family::Gaussian => "gaussian",
            Family::GenGaussian => "gen-gaussian",
            Family::AsymLaplace => "asym-laplace",
            Family::Cauchy => "cauchy",
        }
    }

    fn pair(&self) -> robust_kl::Result<NominalPair64> {
        match self.family {
            Family::Gaussian => NominalPair64::gaussian(self.sigma),
            Family::GenGaussian => NominalPair64::generalized_gaussian(self.alpha, self.sigma),
            Family::AsymLaplace => NominalPair64::asymmetric_laplace(self.a, self.b),
            Family::Cauchy => NominalPair64::cauchy(self.scale),
        }
    }
}

#[derive(Args)]
struct ToleranceArgs {
    #[arg(long)]
    quad_rel_err: Option<f64>,
    #[arg(long)]
    quad_abs_err: Option<f64>,
    #[arg(long)]
    root_abs_err: Option<f64>,
    #[arg(long)]
    support_mass_cutoff: Option<f64>,
    #[arg(long)]
    max_subdivisions: Option<usize>,
}

impl Common {
    fn tolerances(&self) -> robust_kl::Result<Tolerances64> {
        let t = &self.tolerances;
        let mut tol = Tolerances64::default().with_seed(self.seed);
        if let Some(v) = t.quad_rel_err {
            tol.quad_rel_err = v;
        }
        if let Some(v) = t.quad_abs_err {
            tol.quad_abs_err = v;
        }
        if let Some(v) = t.root_abs_err {
            tol.root_abs_err = v;
        }
        if let Some(v) = t.support_mass_cutoff {
            tol.support_mass_cutoff = v;
        }
        if let Some(v) = t.max_subdivisions {
            tol.max_subdivisions = v;
        }
        tol.validate()?;
        Ok(tol)
    }

    /// A validated pair; an unvalidated one is reported before any solve.
    fn validated_pair(&self) -> robust_kl::Result<NominalPair64> {
        let pair = self.family.pair()?;
        pair.require_validated()?;
        Ok(pair)
    }
}

/// Inclusive grid `lo, lo + step, ...` up to `hi` within half a step.
#[derive(Clone, Debug)]
struct Grid {
    lo: f64,
    step: f64,
    count: usize,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.lo + self.step * i as f64).collect()
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected lo:hi:step, got {s:?}"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err("grid bounds and step must be finite".into());
    }
    if step <= 0.0 {
        return Err("grid step must be > 0".into());
    }
    if hi < lo {
        return Err("grid needs lo <= hi".into());
    }
    let intervals = ((hi - lo) / step + 0.5).floor();
    if intervals > 1e7 {
        return Err("grid has more than 10^7 points".into());
    }
    Ok(Grid {
        lo,
        step,
        count: intervals as usize + 1,
    })
}

fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(format!("not a non-negative integer: {s:?}"))
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::InfeasibleTolerance { .. }) => EXIT_INFEASIBLE,
        Some(Error::UnvalidatedPair { .. }) => EXIT_UNVALIDATED,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let (common, rendered, code) = match &cli.command {
        Command::Solve { common, epsilon } => {
            let doc = commands::solve(common, *epsilon)?;
            (common, output::render_record(&doc, common.format.unwrap_or(Format::Json))?, 0)
        }
        Command::DivergenceCurve { common, grid } => {
            let table = commands::divergence_curve(common, grid)?;
            (common, table.render(common.format.unwrap_or(Format::Csv))?, 0)
        }
        Command::DumpDensities { common, epsilon, grid } => {
            let table = commands::dump_densities(common, *epsilon, grid)?;
            (common, table.render(common.format.unwrap_or(Format::Csv))?, 0)
        }
        Command::SweepSnr { common, epsilon, snr_db } => {
            if common.family.family != Family::Gaussian {
                bail!("sweep-snr supports only --family gaussian");
            }
            let table = commands::sweep_snr(common, epsilon, snr_db)?;
            (common, table.render(common.format.unwrap_or(Format::Csv))?, 0)
        }
        Command::Verify { common, epsilon, probes, mc_samples } => {
            let (doc, passed) = commands::verify(common, *epsilon, *probes, *mc_samples)?;
            let code = if passed { 0 } else { EXIT_VERIFY_FAILED };
            (common, output::render_record(&doc, common.format.unwrap_or(Format::Json))?, code)
        }
    };
    match &common.out {
        Some(path) => std::fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?,
        None => output::write_stdout(&rendered)?,
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => {
            if code == EXIT_VERIFY_FAILED {
                eprintln!("error: saddle-point certificate failed");
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
