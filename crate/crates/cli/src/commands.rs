//! Subcommand implementations. Every function returns the process exit code:
//! 0 success, 1 failed checks or aborted runs, 2 usage errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::json;

use crate::certificate::{Certificate, Tolerances};
use crate::config::{build_config, resolve_seed, ConfigPair};
use crate::suites::{flow_drifts, run_suite, suite_names, SuiteContext};
use pencil_lab::dynamics::{
    flow_csv, hamiltonian_flow, sample_chart_state, Chart, ChartState, FlowOptions,
};
use pencil_lab::fibration::{codim_stratum, grassmann_codim, spectral_value};
use pencil_lab::jsonio::to_pair;
use pencil_lab::scalar::C64;
use pencil_lab::seed::child_rng;
use pencil_lab::tol;
use pencil_lab::variety::{
    membership_residual, sample_cotangent, sample_point, CotangentSample, Covector, Point,
};
use pencil_lab::verify::{binomial, freeness_rank};

fn usage(message: &str) -> i32 {
    eprintln!("error: {message}");
    2
}

/// Writes a line to stdout; a consumer that closes the pipe early (head,
/// less) must end the process quietly with the conventional status instead
/// of a panic.
fn stdout_line(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() {
        std::process::exit(141);
    }
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            stdout_line(payload);
            Ok(())
        }
    }
}

fn pairs(values: &[C64]) -> Vec<[f64; 2]> {
    values.iter().map(to_pair).collect()
}

fn parse_complex_list(text: &str, expected: usize, what: &str) -> Result<Vec<C64>, String> {
    let raw: Vec<[f64; 2]> = serde_json::from_str(text)
        .map_err(|e| format!("{what} must be JSON [[re,im],...]: {e}"))?;
    if raw.len() != expected {
        return Err(format!(
            "{what} must have {expected} entries, got {}",
            raw.len()
        ));
    }
    Ok(raw.iter().map(|[re, im]| C64::new(*re, *im)).collect())
}

// ----------------------------------------------------------------- verify

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Variety dimension; the pencil lives in n + 3 variables.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Comma-separated list of n + 3 distinct rationals, or "random".
    #[arg(long, default_value = "random")]
    pub mu: String,
    /// Master seed; falls back to PENCIL_LAB_SEED, then the built-in default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample count for randomized checks.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Tolerance override as name=value; repeatable. Names: roots, gram,
    /// round-trip, gauge, homogeneity, rescale, bracket, drift, dual,
    /// encoding, membership.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Suite to run: all, algebra, geometry, dynamics, or curves.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Write the certificate to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_verify(args: &VerifyArgs) -> i32 {
    let seed = match resolve_seed(args.seed) {
        Ok(s) => s,
        Err(e) => return usage(&e),
    };
    let pair = match build_config(args.n, &args.mu, seed) {
        Ok(p) => p,
        Err(e) => return usage(&e),
    };
    let mut tols = Tolerances::default();
    for entry in &args.tol {
        if let Err(e) = tols.apply(entry) {
            return usage(&e);
        }
    }
    if !suite_names().contains(&args.suite.as_str()) {
        return usage(&format!(
            "unknown suite {:?}; choose one of {}",
            args.suite,
            suite_names().join("|")
        ));
    }
    let started = Instant::now();
    let ConfigPair {
        exact,
        float,
        exact_text,
    } = pair;
    let ctx = SuiteContext {
        exact,
        float,
        seed,
        samples: args.samples,
        tols: tols.clone(),
    };
    let checks = match run_suite(&ctx, &args.suite) {
        Ok(c) => c,
        Err(e) => return usage(&e),
    };
    let certificate = Certificate::assemble(
        ctx.float.n(),
        ctx.float.mu(),
        exact_text,
        seed,
        args.samples,
        args.suite.clone(),
        tols,
        checks,
        started.elapsed().as_secs_f64(),
    );
    let payload = match serde_json::to_string_pretty(&certificate) {
        Ok(p) => p,
        Err(e) => return usage(&format!("certificate serialization failed: {e}")),
    };
    if let Err(e) = emit(&args.out, &payload) {
        return usage(&e);
    }
    if certificate.overall_pass {
        0
    } else {
        1
    }
}

// -------------------------------------------------------------------- phi

#[derive(Debug, Args)]
pub struct PhiArgs {
    /// Variety dimension; the pencil lives in n + 3 variables.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Comma-separated list of n + 3 distinct rationals, or "random".
    #[arg(long, default_value = "random")]
    pub mu: String,
    /// Master seed; falls back to PENCIL_LAB_SEED, then the built-in default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Point coordinates as JSON [[re,im],...] with n + 3 entries; must lie
    /// on both quadrics. Requires --xi.
    #[arg(long, requires = "xi")]
    pub point: Option<String>,
    /// Covector coordinates as JSON [[re,im],...] with n + 3 entries; must
    /// annihilate the point. Requires --point.
    #[arg(long, requires = "point")]
    pub xi: Option<String>,
    /// Multiply the covector by this factor before evaluating.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

fn user_sample(args: &PhiArgs, ambient: usize) -> Result<CotangentSample, String> {
    let point_text = args.point.as_deref().expect("clap enforces the pairing");
    let xi_text = args.xi.as_deref().expect("clap enforces the pairing");
    let point = parse_complex_list(point_text, ambient, "--point")?;
    let xi = parse_complex_list(xi_text, ambient, "--xi")?;
    Ok(CotangentSample {
        point: Point(point),
        covector: Covector(xi),
    })
}

pub fn run_phi(args: &PhiArgs) -> i32 {
    let seed = match resolve_seed(args.seed) {
        Ok(s) => s,
        Err(e) => return usage(&e),
    };
    let pair = match build_config(args.n, &args.mu, seed) {
        Ok(p) => p,
        Err(e) => return usage(&e),
    };
    let cfg = &pair.float;
    let sample = if args.point.is_some() {
        let sample = match user_sample(args, cfg.ambient_dim()) {
            Ok(s) => s,
            Err(e) => return usage(&e),
        };
        let residual = membership_residual(cfg, &sample.point.0);
        if residual > tol::MEMBERSHIP {
            return usage(&format!(
                "point is off the variety (membership residual {residual:.3e})"
            ));
        }
        let dot: C64 = sample
            .point
            .0
            .iter()
            .zip(&sample.covector.0)
            .map(|(a, b)| a * b)
            .sum();
        let scale = sample
            .point
            .0
            .iter()
            .zip(&sample.covector.0)
            .map(|(a, b)| a.norm() * b.norm())
            .sum::<f64>()
            .max(1e-300);
        if dot.norm() / scale > tol::MEMBERSHIP {
            return usage(&format!(
                "covector must annihilate the point (pairing residual {:.3e})",
                dot.norm() / scale
            ));
        }
        sample
    } else {
        let mut rng = child_rng(seed, 0x011);
        match sample_point(cfg, &mut rng)
            .and_then(|point| sample_cotangent(cfg, &point, &mut rng))
        {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: sampling failed: {e}");
                return 1;
            }
        }
    };
    let factor = C64::new(args.scale, 0.0);
    let scaled = CotangentSample {
        point: sample.point.clone(),
        covector: Covector(sample.covector.0.iter().map(|z| z * factor).collect()),
    };
    let value = match spectral_value(cfg, &scaled) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: spectral evaluation failed: {e}");
            return 1;
        }
    };
    let payload = json!({
        "n": cfg.n(),
        "mu": pairs(cfg.mu()),
        "seed": seed,
        "scale": args.scale,
        "point": pairs(&scaled.point.0),
        "covector": pairs(&scaled.covector.0),
        "s": pairs(&value.s),
        "psi": pairs(&value.psi),
        "roots": pairs(&value.roots),
    });
    stdout_line(&serde_json::to_string_pretty(&payload).expect("plain data"));
    0
}

// ------------------------------------------------------------------- flow

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// Variety dimension; the pencil lives in n + 3 variables.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Comma-separated list of n + 3 distinct rationals, or "random".
    #[arg(long, default_value = "random")]
    pub mu: String,
    /// Master seed; falls back to PENCIL_LAB_SEED, then the built-in default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Index of the component whose Hamiltonian flow is integrated.
    #[arg(long = "h-index", default_value_t = 0)]
    pub h_index: usize,
    /// Integration step.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Number of steps.
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Record every k-th step (the initial and final states always appear).
    #[arg(long = "record-every", default_value_t = 10)]
    pub record_every: usize,
    /// Damping factor applied to the sampled initial momentum; keeps long
    /// trajectories inside the coordinate chart.
    #[arg(long, default_value_t = 0.2)]
    pub damp: f64,
    /// Write the CSV here; otherwise it goes to stdout and the summary to
    /// stderr. Columns: s, then u{k}_re, u{k}_im, p{k}_re, p{k}_im,
    /// phi{j}_re, phi{j}_im.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_flow(args: &FlowArgs) -> i32 {
    let seed = match resolve_seed(args.seed) {
        Ok(s) => s,
        Err(e) => return usage(&e),
    };
    let pair = match build_config(args.n, &args.mu, seed) {
        Ok(p) => p,
        Err(e) => return usage(&e),
    };
    let cfg = &pair.float;
    if args.h_index >= cfg.n() {
        return usage(&format!(
            "--h-index must be below {}, got {}",
            cfg.n(),
            args.h_index
        ));
    }
    if !(args.dt.is_finite() && args.dt > 0.0) {
        return usage("--dt must be positive and finite");
    }
    let chart = Chart::default();
    let mut rng = child_rng(seed, 0x0F1);
    let raw = match sample_chart_state(cfg, &chart, &mut rng) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: chart sampling failed: {e}");
            return 1;
        }
    };
    let state = ChartState {
        u: raw.u.clone(),
        p: raw.p.iter().map(|z| z * args.damp).collect(),
    };
    let indices: Vec<usize> = (0..cfg.n()).collect();
    let options = FlowOptions {
        dt: args.dt,
        steps: args.steps,
        reject_threshold: Some(tol::STEP_REJECT),
        record_every: args.record_every.max(1),
    };
    let run = match hamiltonian_flow(cfg, &chart, args.h_index, &state, &indices, options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: flow setup failed: {e}");
            return 1;
        }
    };
    let mut csv = flow_csv(&run);
    if let Some(reason) = &run.abort {
        csv.push_str(&format!("# abort: {reason}\n"));
    }
    if let Err(e) = emit(&args.out, csv.trim_end()) {
        return usage(&e);
    }
    let drifts = flow_drifts(&run);
    let mut summary = format!(
        "flow h_index={} dt={} steps={} records={}",
        args.h_index,
        args.dt,
        args.steps,
        run.records.len()
    );
    for (j, d) in drifts.iter().enumerate() {
        summary.push_str(&format!(" drift_phi{j}={d:.3e}"));
    }
    if let Some(reason) = &run.abort {
        summary.push_str(&format!(" aborted: {reason}"));
    }
    if args.out.is_some() {
        stdout_line(&summary);
    } else {
        eprintln!("{summary}");
    }
    if run.abort.is_some() {
        1
    } else {
        0
    }
}

// ------------------------------------------------------------------- dims

#[derive(Debug, Args)]
pub struct DimsArgs {
    /// Variety dimension; the pencil lives in n + 3 variables.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Largest monomial degree to test.
    #[arg(long, default_value_t = 4)]
    pub dmax: usize,
    /// Comma-separated list of n + 3 distinct rationals, or "random".
    #[arg(long, default_value = "random")]
    pub mu: String,
    /// Master seed; falls back to PENCIL_LAB_SEED, then the built-in default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the degeneracy-stratum codimension grid instead of the
    /// monomial-count table.
    #[arg(long)]
    pub strata: bool,
    /// Emit JSON instead of an aligned table.
    #[arg(long)]
    pub json: bool,
}

pub fn run_dims(args: &DimsArgs) -> i32 {
    if args.strata {
        return run_strata(args);
    }
    let seed = match resolve_seed(args.seed) {
        Ok(s) => s,
        Err(e) => return usage(&e),
    };
    let pair = match build_config(args.n, &args.mu, seed) {
        Ok(p) => p,
        Err(e) => return usage(&e),
    };
    let cfg = &pair.float;
    let indices: Vec<usize> = (0..cfg.n()).collect();
    let mut rows = Vec::new();
    for degree in 1..=args.dmax {
        let expected = binomial(cfg.n() + degree - 1, degree);
        let mut rng = child_rng(seed, 500 + degree as u64);
        let measured = match freeness_rank(cfg, degree, &indices, 0, &mut rng) {
            Ok(rank) => rank,
            Err(e) => {
                eprintln!("error: rank measurement failed at degree {degree}: {e}");
                return 1;
            }
        };
        rows.push((degree, expected, measured, expected == measured));
    }
    if args.json {
        let payload: Vec<_> = rows
            .iter()
            .map(|(d, expected, measured, pass)| {
                json!({"degree": d, "expected": expected, "measured": measured, "pass": pass})
            })
            .collect();
        stdout_line(&serde_json::to_string_pretty(&payload).expect("plain data"));
    } else {
        stdout_line(&format!(
            "{:>6} {:>9} {:>9} {:>5}",
            "degree", "expected", "measured", "pass"
        ));
        for (d, expected, measured, pass) in &rows {
            stdout_line(&format!("{d:>6} {expected:>9} {measured:>9} {pass:>5}"));
        }
    }
    0
}

fn run_strata(args: &DimsArgs) -> i32 {
    let kmax = args.dmax.max(1) as i64;
    let mut rows = Vec::new();
    for k in 0..=kmax {
        for l in -1..=k {
            let stratum = match codim_stratum(k, l) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            };
            let ambient = match grassmann_codim(k, l) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            };
            rows.push((k, l, stratum, ambient));
        }
    }
    if args.json {
        let payload: Vec<_> = rows
            .iter()
            .map(|(k, l, stratum, ambient)| {
                json!({"k": k, "l": l, "codim": stratum, "ambient": ambient})
            })
            .collect();
        stdout_line(&serde_json::to_string_pretty(&payload).expect("plain data"));
    } else {
        stdout_line(&format!("{:>3} {:>3} {:>6} {:>8}", "k", "l", "codim", "ambient"));
        for (k, l, stratum, ambient) in &rows {
            stdout_line(&format!("{k:>3} {l:>3} {stratum:>6} {ambient:>8}"));
        }
    }
    0
}
