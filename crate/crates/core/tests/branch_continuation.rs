//! Continuation checks: tangents against finite differences and closed
//! forms, stepping, full traces and their endpoint extrapolation.

mod common;
use common::*;
use plasma_branch::branch::{self, Termination, TerminationReason, TraceOptions};
use plasma_branch::{solver, Error};

const PI: f64 = std::f64::consts::PI;

#[test]
fn tangent_at_origin() {
    let d = disk(192, 32);
    let sol0 = solver::solve_small_lambda(&d, 0.0, 1.0).unwrap();
    let (da, eta) = branch::tangent(&sol0).unwrap();
    // d alpha/d lambda at lambda = 0 is -2 E0 for every p
    assert!((da + 1.0 / (8.0 * PI)).abs() * 8.0 * PI < 0.01);
    // finite-difference oracle across lambda = 0 (the analytic extension
    // to slightly negative lambda is legitimate)
    let h = 1e-4;
    let plus = solver::newton_solve(&d, h, 1.0, (1.0, &sol0.psi)).unwrap();
    let minus = solver::newton_solve(&d, -h, 1.0, (1.0, &sol0.psi)).unwrap();
    let fd = (plus.alpha - minus.alpha) / (2.0 * h);
    assert!(((fd - da) / da).abs() < 1e-4, "fd {fd} vs tangent {da}");
    // energy slope against the same probe
    let de = branch::energy_slope(&sol0, &eta).unwrap();
    let e = |s: &solver::Solution| {
        0.5 * s.domain.wdot(
            s.rho.values(),
            s.psi.values(),
            &vec![1.0; s.domain.node_count()],
        )
    };
    let fd_e = (e(&plus) - e(&minus)) / (2.0 * h);
    assert!(((fd_e - de) / de).abs() < 1e-4, "fd {fd_e} vs slope {de}");
}

#[test]
fn w_derivative_relations() {
    let d = disk(192, 32);
    // at lambda = 0 the u-derivative reduces to the torsion state
    let sol0 = solver::solve_small_lambda(&d, 0.0, 2.0).unwrap();
    let (w0, _) = branch::w_derivative(&sol0).unwrap();
    let gap = w0
        .values()
        .iter()
        .zip(sol0.psi.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap < 1e-10);

    // p = 1: <w> = 2E, and w = psi + lambda eta
    let sol = solver::solve_small_lambda(&d, 3.0, 1.0).unwrap();
    let (w, da_w) = branch::w_derivative(&sol).unwrap();
    let (da, eta) = branch::tangent(&sol).unwrap();
    assert!(((da - da_w) / da).abs() < 1e-6);
    let energy = 0.5
        * d.wdot(
            sol.rho.values(),
            sol.psi.values(),
            &vec![1.0; d.node_count()],
        );
    let mw = sol.mean(&w);
    assert!(((mw - 2.0 * energy) / (2.0 * energy)).abs() < 1e-6);
    let recon = sol.psi.axpy(sol.lambda, &eta);
    let gap = w
        .values()
        .iter()
        .zip(recon.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap < 1e-7, "w identity gap {gap}");
}

#[test]
fn slope_spectral_bound_and_fourier() {
    let d = disk(160, 32);
    let sol = solver::solve_small_lambda(&d, 1.5, 2.0).unwrap();
    let spec = plasma_branch::spectral::constrained_eigs(&d, &sol, 3).unwrap();
    let (_, eta) = branch::tangent(&sol).unwrap();
    // p <[eta],[psi]> >= sigma_1 ||[eta]||^2
    let fl_eta = sol.fluctuation(&eta);
    let fl_psi = sol.fluctuation(&sol.psi);
    let lhs = sol.p * sol.inner(&fl_eta, &fl_psi);
    let rhs = spec.sigmas[0] * sol.inner(&fl_eta, &fl_eta);
    assert!(lhs >= rhs - 1e-10 * lhs.abs());
    // per-mode slope relation
    let chk = branch::fourier_slope_check(&sol, &spec, &eta);
    assert!(chk.residual <= 1e-6 * chk.scale.max(1e-9));
    // positive energy slope at a regular point
    assert!(branch::energy_slope(&sol, &eta).unwrap() > 0.0);
}

#[test]
fn natural_step_basics() {
    let d = disk(128, 32);
    let opts = TraceOptions::default();
    let sol = solver::solve_small_lambda(&d, 1.0, 2.0).unwrap();
    let pt = branch::point_from_solution(sol, &opts).unwrap();
    // zero step reproduces the point
    let same = branch::natural_step(&pt, 0.0, &opts).unwrap();
    assert!((same.lambda - pt.lambda).abs() < 1e-14);
    assert!((same.solution.alpha - pt.solution.alpha).abs() < 1e-12);
    // a real step advances and keeps alpha decreasing
    let next = branch::natural_step(&pt, 0.2, &opts).unwrap();
    assert!((next.lambda - 1.2).abs() < 1e-14);
    assert!(next.solution.alpha < pt.solution.alpha);
    assert!(next.s > pt.s);
}

#[test]
fn arclength_step_consistency() {
    let d = disk(128, 32);
    let opts = TraceOptions::default();
    let b = branch::trace_branch(&d, 2.0, Termination::LambdaMax(2.0), &opts).unwrap();
    let base = b.last();
    assert!((base.lambda - 2.0).abs() < 1e-9);
    // an arclength step lands on the branch: resolving at the stepped
    // lambda reproduces the same state
    let step = branch::arclength_step(base, 0.05, &opts).unwrap();
    assert!(step.lambda > base.lambda);
    let re = solver::newton_solve(
        &d,
        step.lambda,
        2.0,
        (step.solution.alpha, &step.solution.psi),
    )
    .unwrap();
    assert!((re.alpha - step.solution.alpha).abs() < 1e-9);
    // vanishing step size returns the same point
    let tiny = branch::arclength_step(base, 1e-9, &opts).unwrap();
    assert!((tiny.lambda - base.lambda).abs() < 1e-7);

    // transversality guard: fold handling demands a mean-carrying phi_1;
    // at this state the lowest pair is a first harmonic with zero mean
    let mut fake_fold = base.clone();
    fake_fold.fold_flag = true;
    assert!(fake_fold.transversality.abs() < 1e-4);
    assert!(matches!(
        branch::arclength_step(&fake_fold, 0.05, &opts),
        Err(Error::TransversalityLoss(_))
    ));

    // not available on the square backend
    let sq = square(33);
    let sq_sol = solver::solve_small_lambda(&sq, 0.5, 2.0).unwrap();
    let sq_pt = branch::point_from_solution(sq_sol, &opts).unwrap();
    assert!(matches!(
        branch::arclength_step(&sq_pt, 0.05, &opts),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn full_disk_trace_p1() {
    let d = disk(192, 32);
    let b = branch::trace_branch(
        &d,
        1.0,
        Termination::AlphaTol(1e-3),
        &TraceOptions::default(),
    )
    .unwrap();
    assert_eq!(b.reason, TerminationReason::AlphaTol);
    // starts at (0, 1, G[1])
    assert_eq!(b.points[0].lambda, 0.0);
    assert_eq!(b.points[0].solution.alpha, 1.0);
    let ep = b.endpoint.expect("extrapolated endpoint");
    assert!(((ep.lambda - PI * J0_ZERO1 * J0_ZERO1) / ep.lambda).abs() < 0.01);
    assert!((ep.energy - 1.0 / (8.0 * PI)).abs() * 8.0 * PI < 0.01);
    // monotone data, increasing arclength, no duplicate points
    for w in b.points.windows(2) {
        assert!(w[1].solution.alpha < w[0].solution.alpha);
        assert!(w[1].energy > w[0].energy);
        assert!(w[1].s > w[0].s);
    }
    // regular-regime signs
    for pt in &b.points {
        assert!(pt.dalpha_dlambda < 0.0);
        assert!(pt.denergy_dlambda > 0.0);
        assert!(pt.sigma1 > pt.nu1);
    }
}

#[test]
fn square_trace_to_lambda_max() {
    let sq = square(49);
    let mut opts = TraceOptions::default();
    opts.max_dlambda = 0.6;
    let b = branch::trace_branch(&sq, 2.0, Termination::LambdaMax(6.1), &opts).unwrap();
    assert_eq!(b.reason, TerminationReason::LambdaMaxReached);
    // lands exactly on the requested endpoint, with alpha still positive
    assert!((b.last().lambda - 6.1).abs() < 1e-12);
    assert!(b.last().solution.alpha > 0.0);
    assert!(b.endpoint.is_none());
}

#[test]
fn trace_many_matches_individual() {
    let d = disk(96, 16);
    let opts = TraceOptions::default();
    let jobs = vec![
        (d.clone(), 1.0, Termination::LambdaMax(2.0)),
        (d.clone(), 2.0, Termination::LambdaMax(2.0)),
    ];
    let batch = branch::trace_many(&jobs, &opts);
    for ((dom, p, term), res) in jobs.iter().zip(batch) {
        let single = branch::trace_branch(dom, *p, *term, &opts).unwrap();
        let b = res.unwrap();
        assert_eq!(b.points.len(), single.points.len());
        assert_eq!(b.last().solution.alpha, single.last().solution.alpha);
    }
}
