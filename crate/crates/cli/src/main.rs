//! Command line driver: solve | branch | spectrum | sobolev | verify.
//!
//! Exit codes: 0 success, 1 bad configuration, 2 solver failure,
//! 3 verification failure.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{Mode, RunConfig};
use plasma_branch::branch::{self, Termination, TraceOptions};
use plasma_branch::verify::{run_all, VerifyConfig};
use plasma_branch::{solver, spectral, Error, Resolution};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "plasmabranch",
    version,
    about = "Constrained plasma states, branch continuation and spectra on unit-area domains"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the constrained state at one lambda and write a one-row CSV.
    Solve(CommonArgs),
    /// Trace the branch from lambda = 0 and write CSV + sidecar.
    Branch(CommonArgs),
    /// Constrained spectrum and nu_1 at one lambda (JSON).
    Spectrum(CommonArgs),
    /// Sobolev best constant Lambda(domain, t) with t passed as --p (JSON).
    Sobolev(CommonArgs),
    /// Run the verification suite and write the JSON report.
    Verify(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// square | disk | ballN
    #[arg(long)]
    domain: Option<String>,
    /// nodes per direction, or RADIALxANGULAR for the disk
    #[arg(long)]
    res: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    alpha_tol: Option<f64>,
    /// Output stem; artifacts get .csv/.json/.gp suffixes.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Disk azimuthal cutoff for eigensolves.
    #[arg(long)]
    modes: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let (mode, args) = match &cli.cmd {
        Cmd::Solve(a) => (Mode::Solve, a),
        Cmd::Branch(a) => (Mode::Branch, a),
        Cmd::Spectrum(a) => (Mode::Spectrum, a),
        Cmd::Sobolev(a) => (Mode::Sobolev, a),
        Cmd::Verify(a) => (Mode::Verify, a),
    };
    let cfg = match load_config(mode, args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            std::process::exit(1);
        }
    };
    let code = match run(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("solver failure: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn load_config(mode: Mode, args: &CommonArgs) -> anyhow::Result<RunConfig> {
    let file: config::ConfigFile = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("field 'config': cannot read {path:?}: {e}"))?;
            serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("config file {path:?}: {e}"))?
        }
        None => Default::default(),
    };
    let domain_name = args
        .domain
        .clone()
        .or(file.domain.clone())
        .unwrap_or_else(|| "disk".into());
    let domain = config::parse_domain(&domain_name)?;
    let res_spec = args.res.clone().or(file.res.clone());
    let resolution = config::parse_resolution(domain, res_spec.as_deref())?;
    let cfg = RunConfig {
        domain,
        resolution,
        p: args.p.or(file.p).unwrap_or(1.0),
        mode,
        lambda: args.lambda.or(file.lambda),
        lambda_max: args.lambda_max.or(file.lambda_max),
        alpha_tol: args.alpha_tol.or(file.alpha_tol).unwrap_or(1e-3),
        out: args.out.clone().or(file.out.clone()),
        seed: args.seed.or(file.seed).unwrap_or(42),
        modes: args.modes.or(file.modes).unwrap_or(8),
        k: file.k.unwrap_or(3),
        plot: file.plot.unwrap_or(true),
        file,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn trace_options(cfg: &RunConfig) -> TraceOptions {
    let mut opts = TraceOptions::default();
    opts.eig.max_mode = cfg.modes;
    opts
}

fn run(cfg: &RunConfig) -> anyhow::Result<i32> {
    match cfg.mode {
        Mode::Solve => run_solve(cfg),
        Mode::Branch => run_branch(cfg),
        Mode::Spectrum => run_spectrum(cfg),
        Mode::Sobolev => run_sobolev(cfg),
        Mode::Verify => run_verify(cfg),
    }
}

fn write_artifact(
    cfg: &RunConfig,
    suffix: &str,
    contents: &str,
) -> anyhow::Result<Option<PathBuf>> {
    match &cfg.out {
        Some(stem) => {
            let mut path = stem.clone();
            let name = format!(
                "{}{}",
                path.file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                suffix
            );
            path.set_file_name(name);
            std::fs::write(&path, contents)?;
            Ok(Some(path))
        }
        None => {
            print!("{contents}");
            Ok(None)
        }
    }
}

fn solve_at(cfg: &RunConfig, lambda: f64) -> anyhow::Result<solver::Solution> {
    let domain = cfg.build_domain()?;
    match solver::solve_small_lambda(&domain, lambda, cfg.p) {
        Ok(sol) => Ok(sol),
        Err(Error::NonContraction { .. }) => {
            // outside the contraction regime: continue from lambda = 0
            let opts = trace_options(cfg);
            let b = branch::trace_branch(&domain, cfg.p, Termination::LambdaMax(lambda), &opts)?;
            if !matches!(b.reason, branch::TerminationReason::LambdaMaxReached) {
                anyhow::bail!(
                    "continuation stopped: {}",
                    output::termination_string(&b.reason)
                );
            }
            Ok(b.points.last().unwrap().solution.clone())
        }
        Err(e) => Err(e.into()),
    }
}

fn run_solve(cfg: &RunConfig) -> anyhow::Result<i32> {
    let lambda = cfg.lambda.unwrap_or(0.0);
    let sol = solve_at(cfg, lambda)?;
    let opts = trace_options(cfg);
    let point = branch::point_from_solution(sol, &opts)?;
    write_artifact(cfg, ".csv", &output::point_csv(cfg.p, &point))?;
    Ok(0)
}

fn run_branch(cfg: &RunConfig) -> anyhow::Result<i32> {
    let start = std::time::Instant::now();
    let domain = cfg.build_domain()?;
    let opts = trace_options(cfg);
    let termination = match cfg.lambda_max {
        Some(lmax) => Termination::LambdaMax(lmax),
        None => Termination::AlphaTol(cfg.alpha_tol),
    };
    let b = branch::trace_branch(&domain, cfg.p, termination, &opts)?;
    if let branch::TerminationReason::SolverFailure(msg) = &b.reason {
        eprintln!("branch terminated early: {msg}");
    }
    let csv = output::branch_csv(&b);
    let csv_path = write_artifact(cfg, ".csv", &csv)?;
    let sidecar = output::Sidecar {
        domain: format!("{:?}", cfg.domain),
        resolution: format!("{:?}", cfg.resolution),
        p: cfg.p,
        mode: "branch",
        termination: output::termination_string(&b.reason),
        points: b.points.len(),
        endpoint: b.endpoint.map(|ep| output::EndpointOut {
            lambda: ep.lambda,
            energy: ep.energy,
        }),
        seed: cfg.seed,
        modes: cfg.modes,
        tolerances: Default::default(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    write_artifact(cfg, ".json", &serde_json::to_string_pretty(&sidecar)?)?;
    if cfg.plot {
        if let Some(csv_path) = csv_path {
            let name = csv_path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "branch.csv".into());
            write_artifact(cfg, ".gp", &output::gnuplot_script(&name))?;
        }
    }
    let failed = matches!(b.reason, branch::TerminationReason::SolverFailure(_));
    Ok(if failed { 2 } else { 0 })
}

fn run_spectrum(cfg: &RunConfig) -> anyhow::Result<i32> {
    let lambda = cfg.lambda.unwrap_or(0.0);
    let domain = cfg.build_domain()?;
    let sol = solve_at(cfg, lambda)?;
    let opts = trace_options(cfg);
    let spec = spectral::constrained_eigs_opts(&domain, &sol, cfg.k, &opts.eig, None)?;
    #[derive(serde::Serialize)]
    struct SpectrumOut {
        lambda: f64,
        p: f64,
        alpha: f64,
        sigmas: Vec<f64>,
        means: Vec<f64>,
        azimuthal: Option<Vec<usize>>,
        residuals: Vec<f64>,
        nu1: f64,
        weight_mass: f64,
    }
    let out = SpectrumOut {
        lambda,
        p: cfg.p,
        alpha: sol.alpha,
        sigmas: spec.sigmas.clone(),
        means: spec.means.clone(),
        azimuthal: spec.azimuthal.clone(),
        residuals: spec.residuals.clone(),
        nu1: spec.nu1,
        weight_mass: spec.m,
    };
    write_artifact(cfg, ".json", &serde_json::to_string_pretty(&out)?)?;
    Ok(0)
}

fn run_sobolev(cfg: &RunConfig) -> anyhow::Result<i32> {
    let domain = cfg.build_domain()?;
    let t = cfg.p;
    let res = spectral::sobolev_constant(&domain, t)?;
    let cross = spectral::rayleigh_minimize(&domain, t, 3000)?;
    #[derive(serde::Serialize)]
    struct SobolevOut {
        t: f64,
        lambda: f64,
        iterations: usize,
        gradient_route: f64,
        relative_gap: f64,
    }
    let out = SobolevOut {
        t,
        lambda: res.lambda,
        iterations: res.iterations,
        gradient_route: cross,
        relative_gap: ((cross - res.lambda) / res.lambda).abs(),
    };
    write_artifact(cfg, ".json", &serde_json::to_string_pretty(&out)?)?;
    Ok(0)
}

fn run_verify(cfg: &RunConfig) -> anyhow::Result<i32> {
    let mut vc = VerifyConfig {
        seed: cfg.seed,
        max_mode: cfg.modes,
        alpha_tol: cfg.alpha_tol,
        ..Default::default()
    };
    if cfg.file.res.is_some() || matches!(cfg.resolution, Resolution::Disk { .. }) {
        if let Resolution::Disk { radial, angular } = cfg.resolution {
            vc.disk_radial = radial;
            vc.disk_angular = angular;
        }
    }
    if let Some(n) = cfg.file.disk_radial {
        vc.disk_radial = n;
    }
    if let Some(n) = cfg.file.disk_angular {
        vc.disk_angular = n;
    }
    if let Some(n) = cfg.file.square_nodes {
        vc.square_nodes = n;
    }
    if let Some(n) = cfg.file.ball_nodes {
        vc.ball_nodes = n;
    }
    if let Some(n) = cfg.file.samples {
        vc.samples = n;
    }
    let results = run_all(&vc)?;
    let mut all_pass = true;
    for r in &results {
        println!("{}", r.line());
        for d in &r.details {
            println!("        {d}");
        }
        all_pass &= r.pass;
    }
    let records = output::report_records(&results);
    let json = serde_json::to_string_pretty(&records)?;
    match &cfg.out {
        Some(_) => {
            write_artifact(cfg, ".json", &json)?;
        }
        None => {
            std::fs::write("verify_report.json", &json)?;
        }
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!(
        "verification: {passed}/{} criteria passed{}",
        results.len(),
        if all_pass { "" } else { " -- FAILURES PRESENT" }
    );
    Ok(if all_pass { 0 } else { 3 })
}
