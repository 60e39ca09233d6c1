//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use robust_kl::saddle::midway_divergence;
use robust_kl::{
    check_saddle, error_prob, geodesic_density, kl_divergence, monte_carlo_error, q_transform, solve,
    worst_case_error, NominalPair64, SaddlePoint64, Tolerances64,
};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robust-kl"))
}

fn run(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = bin().args(args).output().expect("binary runs");
    (out, start.elapsed())
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON")
}

/// Parses CSV output into its header and numeric rows; empty cells are NaN.
fn csv_table(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = stdout(out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| {
            r.unwrap()
                .iter()
                .map(|c| if c.is_empty() { f64::NAN } else { c.parse().unwrap() })
                .collect()
        })
        .collect();
    (header, rows)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tol() -> Tolerances64 {
    Tolerances64::default()
}

fn golden(args: &[&str], expected: f64) -> Outcome {
    let (out, elapsed) = run(args);
    if !out.status.success() {
        return Err(format!("exit status {:?}", out.status.code()));
    }
    let y_u = json(&out)["y_U"].as_f64().ok_or("missing y_U")?;
    check(
        (y_u - expected).abs() <= 5e-3 && elapsed < Duration::from_secs(1),
        format!("y_U = {y_u:.6} (expected {expected} ± 5e-3), {:.3} s (< 1 s)", elapsed.as_secs_f64()),
    )
}

fn criterion_1() -> Outcome {
    golden(&["solve", "--family", "gaussian", "--sigma", "1", "--epsilon", "0.1"], 0.6080)
}

fn criterion_2() -> Outcome {
    golden(&["solve", "--family", "asym-laplace", "--a", "2", "--b", "4", "--epsilon", "0.1"], 0.3640)
}

fn criterion_3() -> Outcome {
    // 200 points: 0, 0.015, ..., 2.985.
    let (out, _) = run(&["divergence-curve", "--family", "gaussian", "--sigma", "1", "--grid", "0:2.985:0.015"]);
    if !out.status.success() {
        return Err(format!("exit status {:?}", out.status.code()));
    }
    let (header, rows) = csv_table(&out);
    if header != ["y_U", "D"] || rows.len() != 200 {
        return Err(format!("unexpected table shape {header:?} x {}", rows.len()));
    }
    let d0 = rows[0][1];
    let increasing = rows.windows(2).all(|w| w[1][1] > w[0][1]);
    let (far, _) = run(&["divergence-curve", "--family", "gaussian", "--sigma", "1", "--grid", "50:50:1"]);
    let d_far = csv_table(&far).1[0][1];
    let limit = midway_divergence(&NominalPair64::gaussian(1.0).unwrap(), &tol()).map_err(|e| e.to_string())?;
    check(
        d0.abs() <= 1e-10 && increasing && (d_far - limit).abs() <= 1e-4 && (limit - 0.5).abs() <= 1e-4,
        format!(
            "D(0) = {d0:.1e}, strictly increasing on 200 points: {increasing}, D(50) = {d_far:.8} vs D(f_1/2|f0) = {limit:.8}"
        ),
    )
}

fn families() -> Vec<(&'static str, NominalPair64)> {
    vec![
        ("gaussian(1)", NominalPair64::gaussian(1.0).unwrap()),
        ("gen-gaussian(1.5, 1)", NominalPair64::generalized_gaussian(1.5, 1.0).unwrap()),
        ("asym-laplace(2, 4)", NominalPair64::asymmetric_laplace(2.0, 4.0).unwrap()),
    ]
}

fn criterion_4() -> Outcome {
    let t = tol();
    let mut worst: f64 = 0.0;
    for (name, pair) in families() {
        for eps in [0.01, 0.05, 0.1] {
            let sp = solve(&pair, eps, &t).map_err(|e| format!("{name} ε={eps}: {e}"))?;
            let d0 = kl_divergence(sp.lf_density_0(), pair.f0(), &t).map_err(|e| e.to_string())?;
            let d1 = kl_divergence(sp.lf_density_1(), pair.f1(), &t).map_err(|e| e.to_string())?;
            let gap = (d0 - eps).abs().max((d1 - eps).abs());
            if gap > 1e-6 {
                return Err(format!("{name} ε={eps}: KKT gap {gap:.2e}"));
            }
            worst = worst.max(gap);
        }
    }
    Ok(format!("3 families x ε ∈ {{0.01, 0.05, 0.1}}: max |D(g_jL|f_j) - ε| = {worst:.2e} (≤ 1e-6)"))
}

fn criterion_5() -> Outcome {
    let t = tol();
    let start = Instant::now();
    let mut details = Vec::new();
    for (name, pair) in [
        ("gaussian", NominalPair64::gaussian(1.0).unwrap()),
        ("laplace", NominalPair64::asymmetric_laplace(2.0, 4.0).unwrap()),
    ] {
        let sp = solve(&pair, 0.1, &t).map_err(|e| e.to_string())?;
        let cert = check_saddle(&sp, 50, 7, &t).map_err(|e| e.to_string())?;
        if !cert.passes() || cert.n_probes < 50 || cert.n_rule_probes < 20 {
            return Err(format!("{name}: {cert:?}"));
        }
        details.push(format!(
            "{name}: rhs {:.1e}, lhs {:.1e}, {} density / {} rule probes",
            cert.max_rhs_violation, cert.min_lhs_gap, cert.n_probes, cert.n_rule_probes
        ));
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(60),
        format!("{}; {:.2} s (< 60 s)", details.join("; "), elapsed.as_secs_f64()),
    )
}

fn triangle(name: &str, sp: &SaddlePoint64, seed: u64) -> Outcome {
    let t = tol();
    let closed = worst_case_error(sp, &t).map_err(|e| e.to_string())?;
    let quad = error_prob(sp.rule(), sp.lf_density_0(), sp.lf_density_1(), &t).map_err(|e| e.to_string())?.pe;
    let mc = monte_carlo_error(sp.rule(), sp.lf_density_0(), sp.lf_density_1(), 1_000_000, seed, &t)
        .map_err(|e| e.to_string())?;
    let z = mc.z_score(quad);
    check(
        (closed - quad).abs() <= 1e-6 && z.abs() <= 4.0,
        format!("{name}: closed form {closed:.8}, quadrature {quad:.8}, MC {:.5} (z = {z:.2})", mc.pe_hat),
    )
}

fn criterion_6() -> Outcome {
    let t = tol();
    let g = solve(&NominalPair64::gaussian(1.0).unwrap(), 0.1, &t).map_err(|e| e.to_string())?;
    let l = solve(&NominalPair64::asymmetric_laplace(2.0, 4.0).unwrap(), 0.1, &t).map_err(|e| e.to_string())?;
    let a = triangle("gaussian", &g, 11)?;
    let b = triangle("laplace", &l, 12)?;
    Ok(format!("{a}; {b}"))
}

fn criterion_7() -> Outcome {
    let (out, _) = run(&["sweep-snr", "--snr-db", "0:15:0.5", "--epsilon", "0.01", "--epsilon", "0.1"]);
    if !out.status.success() {
        return Err(format!("exit status {:?}", out.status.code()));
    }
    let (header, rows) = csv_table(&out);
    if header != ["snr_db", "pe_ml", "pe_worst_0.01", "pe_worst_0.1"] || rows.len() != 31 {
        return Err(format!("unexpected table shape {header:?} x {}", rows.len()));
    }
    for r in &rows {
        let (db, ml, w1, w10) = (r[0], r[1], r[2], r[3]);
        if !(w1 >= ml && w10 >= ml && w10 >= w1) {
            return Err(format!("ordering fails at {db} dB: ml {ml}, ε=0.01 {w1}, ε=0.1 {w10}"));
        }
    }
    let (ml0, w0) = (rows[0][1], rows[0][3]);
    check(
        w0 > 2.0 * ml0 && (ml0 - 0.158_655_253_931).abs() <= 1e-6,
        format!("31 points, 0-15 dB, ordered; at 0 dB pe_worst(0.1) = {w0:.5} > 2 x pe_ml = {:.5}", 2.0 * ml0),
    )
}

fn criterion_8() -> Outcome {
    let t = tol();
    let g = NominalPair64::gaussian(1.0).unwrap();
    let half = geodesic_density(&g, 0.5, &t).map_err(|e| e.to_string())?;
    let log_phi = |y: f64| -0.5 * y * y - 0.5 * (2.0 * std::f64::consts::PI).ln();
    let dev = (0..=1600)
        .map(|k| -8.0 + 0.01 * k as f64)
        .map(|y| (half.log_pdf(y) - log_phi(y)).abs())
        .fold(0.0, f64::max);
    let l = NominalPair64::asymmetric_laplace(2.0, 4.0).unwrap();
    let lh = geodesic_density(&l, 0.5, &t).map_err(|e| e.to_string())?;
    let c = lh.pdf(0.0);
    let spread = (0..=2000)
        .map(|k| -1.0 + 0.001 * k as f64)
        .map(|y| (lh.pdf(y) - c).abs())
        .fold(0.0, f64::max);
    check(
        dev <= 1e-8 && spread <= 1e-10,
        format!("gaussian max |log f_1/2 - log N(0,1)| = {dev:.1e}; laplace f_1/2 spread on [-1, 1] = {spread:.1e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut codes = Vec::new();
    for args in [
        &["solve", "--family", "cauchy", "--scale", "1", "--epsilon", "0.1"][..],
        &["verify", "--family", "cauchy", "--epsilon", "0.1"][..],
        &["divergence-curve", "--family", "cauchy"][..],
    ] {
        let (out, _) = run(args);
        codes.push(out.status.code());
    }
    check(
        codes.iter().all(|&c| c == Some(3)),
        format!("cauchy exit codes (solve, verify, divergence-curve) = {codes:?}"),
    )
}

fn criterion_10() -> Outcome {
    let ell_u: f64 = 3.0;
    let grid: Vec<f64> = (0..=600).map(|k| 10f64.powf(-3.0 + 0.01 * k as f64)).collect();
    let unit = q_transform(1.0, ell_u) == 1.0;
    let monotone = grid.windows(2).all(|w| q_transform(w[1], ell_u) >= q_transform(w[0], ell_u));
    let reciprocal = grid
        .iter()
        .map(|&l| (q_transform(1.0 / l, ell_u) - 1.0 / q_transform(l, ell_u)).abs())
        .fold(0.0, f64::max);
    let branches = grid.iter().all(|&l| {
        let want = if l > ell_u {
            l / ell_u
        } else if l >= 1.0 / ell_u {
            1.0
        } else {
            ell_u * l
        };
        q_transform(l, ell_u) == want
    });
    check(
        unit && monotone && reciprocal <= 1e-12 && branches,
        format!("q(1) = 1: {unit}, nondecreasing: {monotone}, max |q(1/ℓ) - 1/q(ℓ)| = {reciprocal:.1e}, branches exact: {branches}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("gaussian golden y_U", criterion_1),
        ("laplace golden y_U", criterion_2),
        ("divergence-curve endpoints and monotonicity", criterion_3),
        ("KKT certification", criterion_4),
        ("saddle inequalities", criterion_5),
        ("error probability consistency triangle", criterion_6),
        ("SNR sweep ordering", criterion_7),
        ("mid-way density identities", criterion_8),
        ("cauchy rejected with exit code 3", criterion_9),
        ("LR flattening properties", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
