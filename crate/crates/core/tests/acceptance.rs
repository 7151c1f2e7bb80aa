//! Acceptance suite: runs every verification criterion at the default
//! desk-scale grids and prints one pass/fail line per criterion.
//!
//! The expensive artifacts (branches, constants, spectra) are computed
//! once and shared across the per-criterion tests.

use plasma_branch::verify::{run_all, CriterionResult, VerifyConfig};
use std::sync::OnceLock;

static RESULTS: OnceLock<Vec<CriterionResult>> = OnceLock::new();

fn results() -> &'static [CriterionResult] {
    RESULTS.get_or_init(|| run_all(&VerifyConfig::default()).expect("verification suite runs"))
}

fn check(id: usize) {
    let r = results()
        .iter()
        .find(|r| r.id == id)
        .expect("criterion evaluated");
    println!("{}", r.line());
    for d in &r.details {
        println!("        {d}");
    }
    assert!(
        r.pass,
        "criterion {id} ({}) failed: measured {} | tolerance {}\n{}",
        r.name,
        r.measured,
        r.tolerance,
        r.details.join("\n")
    );
}

#[test]
fn criterion_01_disk_base_constants() {
    check(1);
}

#[test]
fn criterion_02_ball_torsion_closed_form() {
    check(2);
}

#[test]
fn criterion_03_disk_spectrum_at_origin() {
    check(3);
}

#[test]
fn criterion_04_eigenvalue_inequalities() {
    check(4);
}

#[test]
fn criterion_05_identity_suite() {
    check(5);
}

#[test]
fn criterion_06_monotone_branch_data() {
    check(6);
}

#[test]
fn criterion_07_disk_branch_endpoint_p1() {
    check(7);
}

#[test]
fn criterion_08_disk_branch_endpoints_superlinear() {
    check(8);
}

#[test]
fn criterion_09_gamma_nonmonotone() {
    check(9);
}

#[test]
fn criterion_10_positivity_threshold() {
    check(10);
}

#[test]
fn criterion_11_second_variation_sign() {
    check(11);
}

#[test]
fn criterion_12_fold_behavior() {
    check(12);
}

#[test]
fn criterion_13_cross_solver_agreement() {
    check(13);
}

#[test]
fn criterion_14_grid_convergence() {
    check(14);
}
