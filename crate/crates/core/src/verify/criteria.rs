//! The individual verification criteria.

use super::{CriterionResult, Ctx};
use crate::branch::{self, TerminationReason};
use crate::observables;
use crate::solver;
use crate::spectral;

const PI: f64 = std::f64::consts::PI;
const J0_ZERO1: f64 = 2.404825557695773;
const J1_ZERO1: f64 = 3.831705970207512;

fn tol_str(base: f64, scale: f64, suffix: &str) -> String {
    if scale > 1.0 {
        format!(
            "{:.2}% {} (x{:.0} coarse grid)",
            100.0 * base * scale,
            suffix,
            scale
        )
    } else {
        format!("{:.1}% {}", 100.0 * base, suffix)
    }
}

fn rel(measured: f64, expected: f64) -> f64 {
    ((measured - expected) / expected).abs()
}

/// Paper-stated closed form of the unit-volume ball torsion energy.
fn ball_torsion_stated(n: u32) -> f64 {
    let b1 = crate::domain::unit_ball_volume(n);
    b1.powf(-2.0 / n as f64) / (4.0 * (n as f64 + 2.0))
}

/// The same constant derived directly from the radial Poisson solution
/// psi_0 = (R^2 - r^2)/(2N): E_0 = |B_1|^{-2/N} / (2N(N+2)).
fn ball_torsion_direct(n: u32) -> f64 {
    let b1 = crate::domain::unit_ball_volume(n);
    b1.powf(-2.0 / n as f64) / (2.0 * n as f64 * (n as f64 + 2.0))
}

fn result(
    id: usize,
    name: &'static str,
    reference: &'static str,
    expected: String,
    measured: String,
    tolerance: String,
    pass: bool,
) -> CriterionResult {
    CriterionResult {
        id,
        name,
        reference,
        expected,
        measured,
        tolerance,
        pass,
        informative: false,
        details: Vec::new(),
        seconds: 0.0,
    }
}

pub(crate) fn c01_disk_base_constants(ctx: &Ctx) -> CriterionResult {
    let e0 = observables::torsion_energy(&ctx.disk).unwrap_or(f64::NAN);
    let psi0 = ctx
        .disk
        .green(&ctx.disk.constant(1.0))
        .map(|f| f.values()[0])
        .unwrap_or(f64::NAN);
    let e_exp = 1.0 / (16.0 * PI);
    let p_exp = 1.0 / (4.0 * PI);
    let tol = 0.005 * ctx.tol_scale("disk");
    let pass = rel(e0, e_exp) <= tol && rel(psi0, p_exp) <= tol;
    let mut r = result(
        1,
        "disk base constants",
        "E0(disk) = 1/(16 pi), psi0(0) = 1/(4 pi)",
        format!("E0={e_exp:.7e}, psi0(0)={p_exp:.7e}"),
        format!("E0={e0:.7e}, psi0(0)={psi0:.7e}"),
        tol_str(0.005, ctx.tol_scale("disk"), "each"),
        pass,
    );
    r.details.push(format!(
        "relative errors: E0 {:.2e}, psi0(0) {:.2e}",
        rel(e0, e_exp),
        rel(psi0, p_exp)
    ));
    r
}

pub(crate) fn c02_ball_torsion_formula(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut details = Vec::new();
    let mut measured = Vec::new();
    let mut expected = Vec::new();
    for (n, dom) in &ctx.balls {
        let e = observables::torsion_energy(dom).unwrap_or(f64::NAN);
        let stated = ball_torsion_stated(*n);
        let direct = ball_torsion_direct(*n);
        let ok = rel(e, stated) <= 0.005 * ctx.tol_scale("ball");
        pass &= ok;
        measured.push(format!("N={n}: {e:.7e}"));
        expected.push(format!("N={n}: {stated:.7e}"));
        details.push(format!(
            "N={n}: measured {:.7e}, stated closed form {:.7e} (rel {:.2e}, {}), \
             direct radial integral {:.7e} (rel {:.2e})",
            e,
            stated,
            rel(e, stated),
            if ok { "ok" } else { "FAIL" },
            direct,
            rel(e, direct),
        ));
    }
    let mut r = result(
        2,
        "ball torsion closed form",
        "E0 of the unit-volume N-ball vs |B1|^{-2/N}/(4(N+2)), N = 2, 3, 4",
        expected.join("; "),
        measured.join("; "),
        tol_str(0.005, ctx.tol_scale("ball"), ""),
        pass,
    );
    if !pass {
        r.details.push(
            "measured torsion energies converge (second order) to |B1|^{-2/N}/(2N(N+2)), \
             which matches the stated constant only at N = 2"
                .into(),
        );
    }
    r.details.extend(details);
    r
}

pub(crate) fn c03_disk_spectrum_origin(ctx: &Ctx) -> CriterionResult {
    let spec = &ctx.branch("disk", 1.0).points[0].spectrum;
    let target = PI * J1_ZERO1 * J1_ZERO1;
    let sigma1 = spec.sigmas[0];
    let cluster = (spec.sigmas[2] - spec.sigmas[0]) / spec.sigmas[0];
    let scale = ctx.tol_scale("disk");
    let pass = rel(sigma1, target) <= 0.01 * scale && cluster.abs() <= 0.02 * scale;
    let mut r = result(
        3,
        "disk spectrum at origin",
        "sigma_1 at lambda=0 equals pi j_{1,1}^2 with a triple cluster",
        format!("sigma1={target:.6} (triple)"),
        format!(
            "sigma=[{:.4}, {:.4}, {:.4}]",
            spec.sigmas[0], spec.sigmas[1], spec.sigmas[2]
        ),
        tol_str(0.01, scale, "value, 2% cluster spread"),
        pass,
    );
    r.details.push(format!(
        "azimuthal modes {:?}, cluster spread {:.2e}",
        spec.azimuthal, cluster
    ));
    r
}

pub(crate) fn c04_eigenvalue_inequalities(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut min_gap = f64::INFINITY;
    let mut min_nu_slack = f64::INFINITY;
    let mut min_tau_sigma = f64::INFINITY;
    let mut details = Vec::new();
    for job in &ctx.branches {
        let lam2p = ctx.lambda(job.label, 2.0 * job.p);
        let idx = ctx.sample_indices(&job.branch, ctx.cfg.samples);
        let mut worst_gap = f64::INFINITY;
        let mut worst_slack = f64::INFINITY;
        for &i in &idx {
            let pt = &job.branch.points[i];
            let gap = pt.sigma1 - pt.nu1;
            let margin = 10.0 * 1e-8 * pt.sigma1.abs().max(1.0);
            if gap <= margin {
                pass = false;
            }
            worst_gap = worst_gap.min(gap);
            let slack = pt.nu1 - (lam2p - job.p * pt.lambda) + 0.01 * lam2p;
            if slack < 0.0 {
                pass = false;
            }
            worst_slack = worst_slack.min(slack);
            let ts = pt.solution.tau + pt.sigma1;
            if ts <= 0.0 {
                pass = false;
            }
            min_tau_sigma = min_tau_sigma.min(ts);
        }
        min_gap = min_gap.min(worst_gap);
        min_nu_slack = min_nu_slack.min(worst_slack);
        details.push(format!(
            "{} p={}: {} samples, min(sigma1-nu1)={:.4}, min nu1-(Lambda-p lambda)+1% = {:.4}",
            job.label,
            job.p,
            idx.len(),
            worst_gap,
            worst_slack
        ));
    }
    let mut r = result(
        4,
        "eigenvalue inequalities",
        "sigma_1 > nu_1, nu_1 >= Lambda(Omega,2p) - p lambda, tau + sigma_1 > 0 along branches",
        "all inequalities with stated margins".into(),
        format!(
            "min gap {:.4}, min slack {:.4}, min tau+sigma1 {:.4}",
            min_gap, min_nu_slack, min_tau_sigma
        ),
        "gap > 1e-7 scale, nu bound within 1%, tau+sigma1 > 0".into(),
        pass,
    );
    r.details = details;
    r
}

pub(crate) fn c05_identity_suite(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut worst_eig = 0.0f64;
    let mut worst_fourier = 0.0f64;
    let mut worst_energy = 0.0f64;
    let mut worst_w = 0.0f64;
    let mut worst_p1 = 0.0f64;
    for job in &ctx.branches {
        let idx = ctx.sample_indices(&job.branch, ctx.cfg.samples);
        for &i in &idx {
            let pt = &job.branch.points[i];
            if pt.fold_flag || !pt.dalpha_dlambda.is_finite() {
                continue;
            }
            for j in 0..pt.spectrum.sigmas.len().min(3) {
                let resid = spectral::check_eigen_identity(&pt.solution, &pt.spectrum, j)
                    .unwrap_or(f64::INFINITY);
                let scaled = resid / pt.spectrum.sigmas[j].abs().max(1.0);
                worst_eig = worst_eig.max(scaled);
                if scaled > 1e-7 {
                    pass = false;
                }
            }
            let fc = branch::fourier_slope_check(&pt.solution, &pt.spectrum, &pt.eta);
            let scaled = fc.residual / fc.scale.max(1e-9);
            worst_fourier = worst_fourier.max(scaled);
            if scaled > 1e-6 {
                pass = false;
            }
            // the two energy-slope expressions
            let ones = vec![1.0; pt.solution.domain.node_count()];
            let e1 = pt
                .solution
                .domain
                .wdot(pt.solution.rho.values(), pt.eta.values(), &ones);
            let fl_eta = pt.solution.fluctuation(&pt.eta);
            let fl_psi = pt.solution.fluctuation(&pt.solution.psi);
            let e2 = pt.solution.m
                * (pt.solution.tau * pt.solution.inner(&fl_eta, &fl_psi)
                    + pt.solution.p * pt.solution.inner(&fl_psi, &fl_psi));
            let egap = (e1 - e2).abs() / e1.abs().max(e2.abs()).max(1e-300);
            worst_energy = worst_energy.max(egap);
            if egap > 1e-6 {
                pass = false;
            }
            let wgap = pt.w_identity_gap / pt.w.max_abs().max(1.0);
            worst_w = worst_w.max(pt.w_identity_gap);
            if wgap > 1e-7 || pt.w_identity_gap > 1e-7 {
                pass = false;
            }
            if job.p == 1.0 {
                let mw = pt.solution.mean(&pt.w);
                let gap = rel(mw, 2.0 * pt.energy);
                worst_p1 = worst_p1.max(gap);
                if gap > 1e-6 {
                    pass = false;
                }
            }
        }
    }
    result(
        5,
        "identity suite",
        "eigenpair mean identity, per-mode slope relation, energy slope forms, \
         w = psi + lambda eta, and <w> = 2E at p = 1",
        "residuals below stated bounds".into(),
        format!(
            "worst: eig {:.1e}, fourier {:.1e}, energy {:.1e}, w {:.1e}, p1 {:.1e}",
            worst_eig, worst_fourier, worst_energy, worst_w, worst_p1
        ),
        "1e-7 / 1e-6 / 1e-6 / 1e-7 / 1e-6".into(),
        pass,
    )
}

pub(crate) fn c06_monotonicity(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut worst_fd = 0.0f64;
    let mut details = Vec::new();
    for job in &ctx.branches {
        let pts = &job.branch.points;
        for w in pts.windows(2) {
            if w[0].sigma1 > 0.0 && w[1].sigma1 > 0.0 {
                if !(w[1].solution.alpha < w[0].solution.alpha) {
                    pass = false;
                    details.push(format!("{} p={}: alpha not decreasing", job.label, job.p));
                }
                if !(w[1].energy > w[0].energy) {
                    pass = false;
                    details.push(format!("{} p={}: E not increasing", job.label, job.p));
                }
            }
        }
        // centered nonuniform finite differences of the branch data
        let mut branch_worst = 0.0f64;
        for i in 1..pts.len().saturating_sub(1) {
            let (a, b, c) = (&pts[i - 1], &pts[i], &pts[i + 1]);
            if b.fold_flag || !b.dalpha_dlambda.is_finite() {
                continue;
            }
            let hm = b.lambda - a.lambda;
            let hp = c.lambda - b.lambda;
            if hm <= 0.0 || hp <= 0.0 {
                continue;
            }
            let fd = |fm: f64, f0: f64, fp: f64| {
                fp * hm / (hp * (hm + hp)) + f0 * (hp - hm) / (hp * hm) - fm * hp / (hm * (hm + hp))
            };
            let fd_alpha = fd(a.solution.alpha, b.solution.alpha, c.solution.alpha);
            let fd_energy = fd(a.energy, b.energy, c.energy);
            let e_alpha = rel(fd_alpha, b.dalpha_dlambda);
            let e_energy = rel(fd_energy, b.denergy_dlambda);
            branch_worst = branch_worst.max(e_alpha).max(e_energy);
        }
        worst_fd = worst_fd.max(branch_worst);
        if branch_worst > 1e-3 {
            pass = false;
            details.push(format!(
                "{} p={}: finite-difference slope mismatch {:.2e}",
                job.label, job.p, branch_worst
            ));
        }
    }
    let mut r = result(
        6,
        "monotone branch data",
        "alpha strictly decreasing, E strictly increasing where sigma_1 > 0; \
         slopes match centered differences of the branch data",
        "monotone, slope agreement within 1e-3".into(),
        format!("worst slope mismatch {:.2e}", worst_fd),
        "1e-3 relative".into(),
        pass,
    );
    r.details = details;
    r
}

pub(crate) fn c07_disk_branch_p1(ctx: &Ctx) -> CriterionResult {
    let b = ctx.branch("disk", 1.0);
    let (le, ee) = (PI * J0_ZERO1 * J0_ZERO1, 1.0 / (8.0 * PI));
    let tol = 0.01 * ctx.tol_scale("disk");
    match b.endpoint {
        Some(ep) => {
            let pass = rel(ep.lambda, le) <= tol && rel(ep.energy, ee) <= tol;
            result(
                7,
                "disk branch endpoint, p=1",
                "branch ends at lambda = pi j_{0,1}^2 with E = 1/(8 pi)",
                format!("lambda={le:.6}, E={ee:.7e}"),
                format!("lambda={:.6}, E={:.7e}", ep.lambda, ep.energy),
                "1% each".into(),
                pass,
            )
        }
        None => result(
            7,
            "disk branch endpoint, p=1",
            "branch ends at lambda = pi j_{0,1}^2 with E = 1/(8 pi)",
            format!("lambda={le:.6}, E={ee:.7e}"),
            format!("no endpoint: {:?}", b.reason),
            "1% each".into(),
            false,
        ),
    }
}

pub(crate) fn c08_disk_branch_superlinear(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut details = Vec::new();
    let mut measured = Vec::new();
    for p in [2.0f64, 3.0] {
        let lam = ctx.lambda("disk", p + 1.0);
        let cross = spectral::rayleigh_minimize(&ctx.disk, p + 1.0, 3000).unwrap_or(f64::NAN);
        let lam_ok = rel(cross, lam) <= 0.005 * ctx.tol_scale("disk");
        pass &= lam_ok;
        details.push(format!(
            "Lambda(disk,{}) = {:.6} (fixed point) vs {:.6} (gradient route), rel {:.2e}",
            p + 1.0,
            lam,
            cross,
            rel(cross, lam)
        ));
        let lstar = observables::lambda_star_disk(p, lam);
        let e_end = (p + 1.0) / (16.0 * PI);
        let b = ctx.branch("disk", p);
        match b.endpoint {
            Some(ep) => {
                let tol = 0.01 * ctx.tol_scale("disk");
                let ok = rel(ep.lambda, lstar) <= tol && rel(ep.energy, e_end) <= tol;
                pass &= ok;
                measured.push(format!(
                    "p={p}: lambda={:.5} (closed form {:.5}), E={:.6e}",
                    ep.lambda, lstar, ep.energy
                ));
                let e_lo = 1.0 / (16.0 * PI) * 0.99;
                let e_hi = e_end * 1.01;
                let in_range = b
                    .points
                    .iter()
                    .all(|pt| pt.energy >= e_lo && pt.energy <= e_hi);
                pass &= in_range;
                details.push(format!(
                    "p={p}: energies in [{:.5e}, {:.5e}] within 1%: {}",
                    1.0 / (16.0 * PI),
                    e_end,
                    in_range
                ));
            }
            None => {
                pass = false;
                measured.push(format!("p={p}: no endpoint ({:?})", b.reason));
            }
        }
    }
    let mut r = result(
        8,
        "disk branch endpoints, p=2,3",
        "endpoint lambda matches (8 pi/(p+1))^{(p-1)/2p} Lambda(disk,p+1)^{(p+1)/2p}; \
         endpoint E = (p+1)/(16 pi); energies span [1/(16 pi), (p+1)/(16 pi)]",
        "closed forms within 1%".into(),
        measured.join(" | "),
        "1% endpoints, 0.5% constant cross-check".into(),
        pass,
    );
    r.details = details;
    r
}

pub(crate) fn c09_gamma_nonmonotone(ctx: &Ctx) -> CriterionResult {
    let b = ctx.branch("disk", 2.0);
    let gamma = |lambda: f64, alpha: f64| lambda * alpha; // p = 2: lambda^{1/(p-1)} = lambda
    let g_first = gamma(b.points[0].lambda, b.points[0].solution.alpha);
    let g_end = b
        .endpoint
        .map(|ep| gamma(ep.lambda, 0.0))
        .unwrap_or(f64::NAN);
    let g_max = b
        .points
        .iter()
        .map(|pt| gamma(pt.lambda, pt.solution.alpha))
        .fold(0.0f64, f64::max);
    let last = b.points.last().unwrap();
    let pass = g_first.abs() <= 2e-3 && g_end.abs() <= 2e-3 && g_max > 0.05;
    let mut r = result(
        9,
        "gamma non-monotone, disk p=2",
        "gamma = lambda^{1/(p-1)} alpha vanishes at both branch ends and is large between",
        "|gamma| <= 2e-3 at the ends, interior max > 0.05".into(),
        format!("ends ({g_first:.1e}, {g_end:.1e}), interior max {g_max:.3}"),
        "2e-3 / 0.05".into(),
        pass,
    );
    r.details.push(format!(
        "gamma at the last computed point (alpha = {:.1e}): {:.3e}, linear in alpha toward 0",
        last.solution.alpha,
        gamma(last.lambda, last.solution.alpha)
    ));
    r
}

pub(crate) fn c10_threshold(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut details = Vec::new();
    for label in ["disk", "square"] {
        for p in [1.0f64, 2.0] {
            let threshold = ctx.lambda(label, 2.0 * p) / p;
            let b = ctx.branch(label, p);
            // the only alpha->0 / sigma_1->0 events are at branch ends
            let mut event = f64::INFINITY;
            for pt in &b.points {
                if pt.solution.alpha <= 0.0 || pt.sigma1 <= 0.0 {
                    event = event.min(pt.lambda);
                }
            }
            if b.reason == TerminationReason::AlphaTol {
                if let Some(ep) = b.endpoint {
                    event = event.min(ep.lambda);
                }
            }
            let margin = 0.01 * ctx.tol_scale(label);
            let ok = event.is_infinite() || event >= threshold * (1.0 - margin);
            pass &= ok;
            details.push(format!(
                "{} p={}: first event at lambda {}, threshold {:.5} ({})",
                label,
                p,
                if event.is_infinite() {
                    "none".into()
                } else {
                    format!("{event:.5}")
                },
                threshold,
                if ok { "ok" } else { "FAIL" }
            ));
        }
    }
    // sharpness at p=1 on the disk
    let sharp = ctx
        .branch("disk", 1.0)
        .endpoint
        .map(|ep| rel(ep.lambda, ctx.lambda("disk", 2.0)))
        .unwrap_or(f64::INFINITY);
    pass &= sharp <= 0.01 * ctx.tol_scale("disk");
    let mut r = result(
        10,
        "positivity threshold",
        "no alpha <= 0 or sigma_1 <= 0 event below Lambda(Omega,2p)/p; \
         the p=1 disk endpoint equals Lambda(disk,2)",
        "events only above the threshold; sharpness within 1%".into(),
        format!("p=1 disk endpoint vs Lambda(disk,2): rel {:.2e}", sharp),
        "1%".into(),
        pass,
    );
    r.details = details;
    r
}

pub(crate) fn c11_second_variation(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut worst = 0.0f64;
    for job in &ctx.branches {
        let idx = ctx.sample_indices(&job.branch, 10);
        for &i in &idx {
            let pt = &job.branch.points[i];
            if pt.fold_flag || pt.sigma1.abs() < 1e-8 {
                continue;
            }
            let a = match spectral::second_variation_form(&pt.solution, &pt.spectrum.phis[0]) {
                Ok(a) => a,
                Err(_) => {
                    pass = false;
                    continue;
                }
            };
            if a * pt.sigma1 <= 0.0 {
                pass = false;
            }
            let expected = pt.sigma1 / (pt.solution.tau + pt.sigma1);
            let gap = rel(a / pt.solution.m, expected);
            worst = worst.max(gap);
            if gap > 1e-6 {
                pass = false;
            }
        }
    }
    result(
        11,
        "second variation sign",
        "A(phi_1) carries the sign of sigma_1 and A(phi_1)/m = sigma_1/(tau + sigma_1)",
        "sign agreement, identity to 1e-6".into(),
        format!("worst identity gap {:.2e}", worst),
        "1e-6 relative".into(),
        pass,
    )
}

pub(crate) fn c12_fold_behavior(ctx: &Ctx) -> CriterionResult {
    let mut fold_jobs = Vec::new();
    for job in &ctx.branches {
        if job.branch.points.iter().any(|pt| pt.fold_flag) {
            fold_jobs.push(job);
        }
    }
    if fold_jobs.is_empty() {
        let mut r = result(
            12,
            "fold behavior",
            "lambda'(s) and sigma_1(s) change sign together with transversal phi_1 \
             and diverging natural slopes, when a fold occurs",
            "checked only if a fold occurs".into(),
            "no fold encountered before alpha = 0 on any traced branch".into(),
            "informative".into(),
            true,
        );
        r.informative = true;
        return r;
    }
    let mut pass = true;
    let mut details = Vec::new();
    for job in fold_jobs {
        let pts = &job.branch.points;
        for (i, pt) in pts.iter().enumerate() {
            if !pt.fold_flag {
                continue;
            }
            if pt.transversality.abs() <= 1e-4 {
                pass = false;
                details.push(format!(
                    "{} p={}: transversality {:.2e} at fold",
                    job.label, job.p, pt.transversality
                ));
            }
            // lambda'(s) and sigma_1 sign agreement across the fold
            if i > 0 && i + 1 < pts.len() {
                let dl_before = pts[i].lambda - pts[i - 1].lambda;
                let dl_after = pts[i + 1].lambda - pts[i].lambda;
                let sig_before = pts[i - 1].sigma1;
                let sig_after = pts[i + 1].sigma1;
                if dl_before * sig_before < 0.0 || dl_after * sig_after < 0.0 {
                    pass = false;
                    details.push(format!(
                        "{} p={}: lambda'/sigma_1 sign mismatch at fold index {}",
                        job.label, job.p, i
                    ));
                }
            }
            // diverging natural-parameter slopes before the switch
            let max_slope = pts[..i]
                .iter()
                .rev()
                .take(3)
                .map(|q| q.dalpha_dlambda.abs().max(q.denergy_dlambda.abs()))
                .fold(0.0f64, f64::max);
            if max_slope <= 1e3 {
                pass = false;
                details.push(format!(
                    "{} p={}: slopes reached only {:.2e} before the fold",
                    job.label, job.p, max_slope
                ));
            }
        }
    }
    let mut r = result(
        12,
        "fold behavior",
        "lambda'(s) and sigma_1(s) change sign together with transversal phi_1 \
         and diverging natural slopes, when a fold occurs",
        "sign agreement, |<phi_1>| > 1e-4, slopes beyond 1e3".into(),
        format!(
            "{} fold(s) checked",
            ctx.branches
                .iter()
                .map(|j| j.branch.points.iter().filter(|p| p.fold_flag).count())
                .sum::<usize>()
        ),
        "per stated bounds".into(),
        pass,
    );
    r.details = details;
    r
}

pub(crate) fn c13_cross_solver(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut worst_alpha = 0.0f64;
    let mut worst_psi = 0.0f64;
    let mut details = Vec::new();
    for label in ["disk", "square"] {
        let domain = ctx.domain_of(label);
        let psi0 = match domain.green(&domain.constant(1.0)) {
            Ok(f) => f,
            Err(e) => {
                return result(
                    13,
                    "cross-solver agreement",
                    "contraction path and Newton path produce the same small-lambda states",
                    "agreement to 1e-7".into(),
                    format!("setup failure: {e}"),
                    "1e-7".into(),
                    false,
                )
            }
        };
        for p in [1.0f64, 2.0, 3.0] {
            let scale = 0.4 * ctx.lambda(label, 2.0 * p) / p;
            for j in 1..=5 {
                let lambda = scale * j as f64 / 5.0;
                let a = solver::solve_small_lambda(domain, lambda, p);
                let b = solver::newton_solve(domain, lambda, p, (1.0, &psi0));
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        let da = (a.alpha - b.alpha).abs();
                        let dpsi = a
                            .psi
                            .values()
                            .iter()
                            .zip(b.psi.values())
                            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                        worst_alpha = worst_alpha.max(da);
                        worst_psi = worst_psi.max(dpsi);
                        if da > 1e-7 || dpsi > 1e-7 {
                            pass = false;
                            details.push(format!(
                                "{label} p={p} lambda={lambda:.4}: dalpha {da:.2e}, dpsi {dpsi:.2e}"
                            ));
                        }
                    }
                    (a, b) => {
                        pass = false;
                        details.push(format!(
                            "{label} p={p} lambda={lambda:.4}: solver failure ({:?} / {:?})",
                            a.err().map(|e| e.to_string()),
                            b.err().map(|e| e.to_string())
                        ));
                    }
                }
            }
        }
    }
    let mut r = result(
        13,
        "cross-solver agreement",
        "contraction path and Newton path produce the same small-lambda states",
        "agreement to 1e-7 in alpha and max-norm psi".into(),
        format!(
            "worst dalpha {:.2e}, worst dpsi {:.2e}",
            worst_alpha, worst_psi
        ),
        "1e-7".into(),
        pass,
    );
    r.details = details;
    r
}

pub(crate) fn c14_grid_convergence(ctx: &Ctx) -> CriterionResult {
    let mut pass = true;
    let mut details = Vec::new();
    let mut ratios = Vec::new();
    let mut check = |name: String, coarse_err: f64, fine_err: f64, expect_improve: bool| {
        // below the rounding floor there is no order left to measure
        let at_floor = coarse_err < 1e-11 && fine_err < 1e-11;
        let ratio = coarse_err / fine_err.max(1e-300);
        let ok = !expect_improve || at_floor || ratio >= 3.0;
        if expect_improve {
            pass &= ok;
        }
        ratios.push(if at_floor {
            format!("{name}: exact")
        } else {
            format!("{name}: {ratio:.2}")
        });
        details.push(format!(
            "{name}: coarse err {coarse_err:.3e}, doubled err {fine_err:.3e}, ratio {ratio:.2} ({})",
            if at_floor {
                "converged to rounding"
            } else if !expect_improve {
                "informative"
            } else if ok {
                "ok"
            } else {
                "FAIL"
            }
        ));
    };

    // criterion 1 quantities on the disk
    let e_exp = 1.0 / (16.0 * PI);
    let p_exp = 1.0 / (4.0 * PI);
    let e_c = observables::torsion_energy(&ctx.disk).unwrap_or(f64::NAN);
    let e_f = observables::torsion_energy(&ctx.disk_fine).unwrap_or(f64::NAN);
    check("E0(disk)".into(), rel(e_c, e_exp), rel(e_f, e_exp), true);
    let p_c = ctx
        .disk
        .green(&ctx.disk.constant(1.0))
        .map(|f| f.values()[0])
        .unwrap_or(f64::NAN);
    let p_f = ctx
        .disk_fine
        .green(&ctx.disk_fine.constant(1.0))
        .map(|f| f.values()[0])
        .unwrap_or(f64::NAN);
    check("psi0(0)".into(), rel(p_c, p_exp), rel(p_f, p_exp), true);

    // criterion 2 quantities: convergence is toward the direct constant;
    // against the stated closed form the N >= 3 errors cannot improve
    for ((n, coarse), (_, fine)) in ctx.balls.iter().zip(&ctx.balls_fine) {
        let stated = ball_torsion_stated(*n);
        let direct = ball_torsion_direct(*n);
        let e_c = observables::torsion_energy(coarse).unwrap_or(f64::NAN);
        let e_f = observables::torsion_energy(fine).unwrap_or(f64::NAN);
        check(
            format!("E0(ball{n}) vs stated"),
            rel(e_c, stated),
            rel(e_f, stated),
            true,
        );
        check(
            format!("E0(ball{n}) vs direct"),
            rel(e_c, direct),
            rel(e_f, direct),
            false,
        );
    }

    // criterion 3 quantity: sigma_1 at the origin of the disk branch
    let target = PI * J1_ZERO1 * J1_ZERO1;
    let sig = |domain: &crate::domain::Domain| -> f64 {
        solver::solve_small_lambda(domain, 0.0, 1.0)
            .and_then(|sol| spectral::constrained_eigs(domain, &sol, 1))
            .map(|s| s.sigmas[0])
            .unwrap_or(f64::NAN)
    };
    let s_c = sig(&ctx.disk);
    let s_f = sig(&ctx.disk_fine);
    check("sigma1(0)".into(), rel(s_c, target), rel(s_f, target), true);

    let mut r = result(
        14,
        "grid convergence",
        "errors of the base-constant criteria shrink ~4x under grid doubling",
        "ratio >= 3 per quantity".into(),
        ratios.join(", "),
        "second order".into(),
        pass,
    );
    r.details = details;
    r
}
