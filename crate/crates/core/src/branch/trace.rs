//! Full branch tracing from lambda = 0 with adaptive steps, fold handling
//! and endpoint extrapolation at the positivity threshold.

use super::{
    arclength_step, make_point, natural_step, Branch, BranchEndpoint, BranchPoint, Termination,
    TerminationReason, TraceOptions,
};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::solver;

/// Trace the branch of positive solutions starting at (0, 1, G[1]).
/// Natural-parameter stepping at regular points, pseudo-arclength stepping
/// when sigma_1 falls under the threshold, endpoint extrapolation in
/// alpha -> 0 for the `AlphaTol` termination.
pub fn trace_branch(
    domain: &Domain,
    p: f64,
    termination: Termination,
    opts: &TraceOptions,
) -> Result<Branch> {
    let alpha_tol = match termination {
        Termination::AlphaTol(tol) => tol,
        _ => 1e-3,
    };
    let origin = solver::solve_small_lambda(domain, 0.0, p)?;
    let first = make_point(origin, 0.0, false, opts, None)?;
    let sigma_ref = first.sigma1;
    let sigma_threshold = opts.sigma_threshold_frac * sigma_ref;
    let mut points = vec![first];
    let mut dlambda = opts.max_dlambda;
    let mut folds = 0usize;
    let mut reason = None;

    'outer: while points.len() < opts.max_points {
        let cur = points.last().unwrap();
        let alpha = cur.solution.alpha;
        match termination {
            Termination::LambdaMax(lmax) => {
                if cur.lambda >= lmax - 1e-12 {
                    reason = Some(TerminationReason::LambdaMaxReached);
                    break;
                }
            }
            Termination::AlphaTol(tol) => {
                if alpha <= tol {
                    reason = Some(TerminationReason::AlphaTol);
                    break;
                }
            }
        }

        let regular = cur.sigma1 > sigma_threshold && cur.dalpha_dlambda.is_finite();
        let next = if regular {
            // clip the step to the termination targets
            let mut dl = dlambda;
            if let Termination::LambdaMax(lmax) = termination {
                dl = dl.min(lmax - cur.lambda);
            }
            if matches!(termination, Termination::AlphaTol(_)) && cur.dalpha_dlambda < 0.0 {
                // aim just below the tolerance rather than far past it
                let to_target = (alpha_tol * 0.85 - alpha) / cur.dalpha_dlambda;
                if to_target > 0.0 {
                    dl = dl.min(to_target);
                }
                // slopes steepen toward the positivity threshold; refine the
                // march proportionally to alpha so the branch data stays
                // resolvable by centered differences
                if alpha < 0.15 {
                    dl = dl.min(opts.max_dlambda * (alpha / 0.15).max(0.08));
                }
            }
            let mut attempt = dl.max(opts.min_dlambda);
            loop {
                match natural_step(cur, attempt, opts) {
                    Ok(bp) => {
                        // keep the corrector cheap: grow while it converges
                        // in few iterations, back off when it labors
                        let grow = if bp.corrector_iterations > opts.target_corrector_iters {
                            0.7
                        } else {
                            1.4
                        };
                        dlambda = if attempt >= dl - 1e-15 {
                            (dlambda * grow).min(opts.max_dlambda)
                        } else {
                            (attempt * grow).min(opts.max_dlambda)
                        };
                        break Ok(bp);
                    }
                    Err(_) if attempt > opts.min_dlambda => {
                        attempt = (attempt * 0.5).max(opts.min_dlambda);
                    }
                    Err(_) => break Err(Error::StepUnderflow(cur.lambda)),
                }
            }
        } else {
            // near-singular regime: arclength steps sized from the last
            // accepted spacing
            let ds = if points.len() >= 2 {
                let a = &points[points.len() - 1];
                let b = &points[points.len() - 2];
                (a.s - b.s).max(1e-6)
            } else {
                0.05
            };
            arclength_step(cur, ds, opts)
        };
        match next {
            Ok(bp) => {
                let prev_sigma = points.last().unwrap().sigma1;
                let mut bp = bp;
                if prev_sigma * bp.sigma1 < 0.0 {
                    bp.fold_flag = true;
                    folds += 1;
                    if folds > opts.fold_limit {
                        reason = Some(TerminationReason::FoldLimit);
                        points.push(bp);
                        break 'outer;
                    }
                }
                points.push(bp);
            }
            Err(Error::StepUnderflow(l)) => {
                reason = Some(TerminationReason::SolverFailure(format!(
                    "step underflow at lambda={l}"
                )));
                break;
            }
            Err(e) => {
                reason = Some(TerminationReason::SolverFailure(e.to_string()));
                break;
            }
        }
    }

    let reason = reason.unwrap_or(TerminationReason::SolverFailure(
        "point budget exhausted".into(),
    ));
    let endpoint = if reason == TerminationReason::AlphaTol {
        extrapolate_endpoint(&points)
    } else {
        None
    };
    Ok(Branch {
        domain: domain.clone(),
        p,
        points,
        endpoint,
        reason,
    })
}

/// Quadratic extrapolation of (lambda, E, sigma_1, nu_1) in alpha -> 0 from
/// the last three accepted points.
fn extrapolate_endpoint(points: &[BranchPoint]) -> Option<BranchEndpoint> {
    if points.len() < 3 {
        return None;
    }
    let tail = &points[points.len() - 3..];
    let a: Vec<f64> = tail.iter().map(|p| p.solution.alpha).collect();
    let at = |f: &dyn Fn(&BranchPoint) -> f64| -> f64 {
        // Lagrange interpolation evaluated at alpha = 0
        let y: Vec<f64> = tail.iter().map(|p| f(p)).collect();
        let mut s = 0.0;
        for i in 0..3 {
            let mut li = 1.0;
            for j in 0..3 {
                if i != j {
                    li *= (0.0 - a[j]) / (a[i] - a[j]);
                }
            }
            s += li * y[i];
        }
        s
    };
    Some(BranchEndpoint {
        s: at(&|p| p.s),
        lambda: at(&|p| p.lambda),
        energy: at(&|p| p.energy),
        sigma1: at(&|p| p.sigma1),
        nu1: at(&|p| p.nu1),
    })
}

/// Trace several branches, fanning out across workers.
pub fn trace_many(jobs: &[(Domain, f64, Termination)], opts: &TraceOptions) -> Vec<Result<Branch>> {
    crate::par::map_collect(jobs, |(domain, p, term)| {
        trace_branch(domain, *p, *term, opts)
    })
}
