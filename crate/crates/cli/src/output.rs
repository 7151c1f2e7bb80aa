//! Branch CSV, JSON sidecars, verification reports and gnuplot scripts.

use plasma_branch::branch::{Branch, BranchPoint, TerminationReason};
use plasma_branch::verify::CriterionResult;
use serde::Serialize;
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "s,lambda,alpha,E,sigma1,nu1,dalpha_dlambda,dE_dlambda,fold,I,gamma";

/// Full-precision decimal so downstream finite differences stay meaningful.
fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn free_boundary_cols(p: f64, lambda: f64, alpha: f64) -> (f64, f64) {
    if p > 1.0 && lambda > 0.0 {
        let q = p / (p - 1.0);
        (lambda.powf(q), lambda.powf(1.0 / (p - 1.0)) * alpha)
    } else {
        (f64::NAN, f64::NAN)
    }
}

fn csv_row(p: f64, pt: &BranchPoint) -> String {
    let (current, gamma) = free_boundary_cols(p, pt.lambda, pt.solution.alpha);
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        num(pt.s),
        num(pt.lambda),
        num(pt.solution.alpha),
        num(pt.energy),
        num(pt.sigma1),
        num(pt.nu1),
        num(pt.dalpha_dlambda),
        num(pt.denergy_dlambda),
        if pt.fold_flag { 1 } else { 0 },
        num(current),
        num(gamma),
    )
}

pub fn branch_csv(branch: &Branch) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for pt in &branch.points {
        out.push_str(&csv_row(branch.p, pt));
        out.push('\n');
    }
    if let Some(ep) = branch.endpoint {
        let (current, _) = free_boundary_cols(branch.p, ep.lambda, 0.0);
        let gamma = if branch.p > 1.0 { 0.0 } else { f64::NAN };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},nan,nan,0,{},{}",
            num(ep.s),
            num(ep.lambda),
            num(0.0),
            num(ep.energy),
            num(ep.sigma1),
            num(ep.nu1),
            num(current),
            num(gamma),
        );
    }
    out
}

pub fn point_csv(p: f64, pt: &BranchPoint) -> String {
    format!("{}\n{}\n", CSV_HEADER, csv_row(p, pt))
}

#[derive(Serialize)]
pub struct Sidecar<'a> {
    pub domain: String,
    pub resolution: String,
    pub p: f64,
    pub mode: &'a str,
    pub termination: String,
    pub points: usize,
    pub endpoint: Option<EndpointOut>,
    pub seed: u64,
    pub modes: usize,
    pub tolerances: Tolerances,
    pub runtime_seconds: f64,
}

#[derive(Serialize)]
pub struct EndpointOut {
    pub lambda: f64,
    pub energy: f64,
}

#[derive(Serialize)]
pub struct Tolerances {
    pub newton_residual: f64,
    pub mass: f64,
    pub linear_solve: f64,
    pub eigen_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            newton_residual: 1e-9,
            mass: 1e-10,
            linear_solve: 1e-12,
            eigen_residual: 1e-8,
        }
    }
}

pub fn termination_string(reason: &TerminationReason) -> String {
    match reason {
        TerminationReason::LambdaMaxReached => "lambda_max reached".into(),
        TerminationReason::AlphaTol => "alpha tolerance reached".into(),
        TerminationReason::FoldLimit => "fold limit exceeded".into(),
        TerminationReason::SolverFailure(msg) => format!("solver failure: {msg}"),
    }
}

/// gnuplot script plotting alpha(lambda) and E(lambda) from the CSV.
pub fn gnuplot_script(csv_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'lambda'\n\
         set terminal pngcairo size 900,600\n\
         set output 'branch_alpha.png'\n\
         plot '{csv_name}' using 2:3 with linespoints title 'alpha'\n\
         set output 'branch_energy.png'\n\
         plot '{csv_name}' using 2:4 with linespoints title 'E'\n\
         set output 'branch_sigma1.png'\n\
         plot '{csv_name}' using 2:5 with linespoints title 'sigma1', \
         '{csv_name}' using 2:6 with linespoints title 'nu1'\n"
    )
}

#[derive(Serialize)]
pub struct ReportRecord {
    pub id: usize,
    pub name: String,
    pub reference: String,
    pub expected: String,
    pub measured: String,
    pub tolerance: String,
    pub pass: bool,
    pub informative: bool,
    pub details: Vec<String>,
    pub seconds: f64,
}

pub fn report_records(results: &[CriterionResult]) -> Vec<ReportRecord> {
    results
        .iter()
        .map(|r| ReportRecord {
            id: r.id,
            name: r.name.to_string(),
            reference: r.reference.to_string(),
            expected: r.expected.clone(),
            measured: r.measured.clone(),
            tolerance: r.tolerance.clone(),
            pass: r.pass,
            informative: r.informative,
            details: r.details.clone(),
            seconds: r.seconds,
        })
        .collect()
}
