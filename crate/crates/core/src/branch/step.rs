//! Single continuation steps: natural parameter (predictor along the
//! tangent, Newton corrector at fixed lambda) and pseudo-arclength
//! (lambda joins the unknowns; the corrector pins the phi_1 component of
//! the update).

use super::{make_point, BranchPoint, TraceOptions};
use crate::domain::Backend;
use crate::error::{Error, Result};
use crate::solver::{self, pow_p, StateOps};

/// Predictor-corrector step in lambda. The predictor moves along
/// (dalpha_dlambda, eta); the corrector is the coupled Newton solve at
/// lambda + dlambda.
pub fn natural_step(point: &BranchPoint, dlambda: f64, opts: &TraceOptions) -> Result<BranchPoint> {
    let sol = &point.solution;
    let domain = &sol.domain;
    let alpha_pred = sol.alpha + dlambda * point.dalpha_dlambda;
    let psi_pred = sol.psi.axpy(dlambda, &point.eta);
    let (next, iters) = solver::newton_solve_stats(
        domain,
        sol.lambda + dlambda,
        sol.p,
        (alpha_pred.clamp(1e-12, 1.0), &psi_pred),
    )?;
    let mut bp = make_point(next, point.s, false, opts, Some(&point.spectrum))?;
    bp.corrector_iterations = iters;
    bp.s = point.s + super::state_distance(point, &bp);
    Ok(bp)
}

/// Pseudo-arclength step: near a fold the predictor direction is
/// (0, -lambda <phi_1>, phi_1); elsewhere it is the normalized natural
/// tangent (1, dalpha, eta). The corrector solves the bordered system
/// {state equations, <[phi_1], psi_new - psi_pred> = 0} with lambda as an
/// unknown.
pub fn arclength_step(point: &BranchPoint, ds: f64, opts: &TraceOptions) -> Result<BranchPoint> {
    let sol = &point.solution;
    let domain = &sol.domain;
    if matches!(domain.backend(), Backend::Square(_)) {
        return Err(Error::Unsupported(
            "pseudo-arclength continuation is implemented on the radial backends",
        ));
    }
    let ops = StateOps::new(domain);
    let n = ops.len();
    let q = ops.quad().to_vec();
    let psi = sol.psi_state();
    let w_base = ops.from_field(&sol.weight);
    let phi1 = ops.from_field(&point.spectrum.phis[0]);
    let mean_phi1 = point.spectrum.means[0];

    let near_fold =
        !point.dalpha_dlambda.is_finite() || point.sigma1.abs() < 1e-10 * (1.0 + sol.tau);
    let fold_mode = near_fold || point.fold_flag;
    if fold_mode && mean_phi1.abs() < 1e-4 {
        return Err(Error::TransversalityLoss(mean_phi1.abs()));
    }

    // predictor direction in (lambda, alpha, psi)
    let (mut dl, mut da, mut dpsi): (f64, f64, Vec<f64>) = if fold_mode {
        (0.0, -sol.lambda * mean_phi1, phi1.clone())
    } else {
        let eta = ops.from_field(&point.eta);
        (1.0, point.dalpha_dlambda, eta)
    };
    let mut norm2 = dl * dl + da * da;
    for i in 0..n {
        norm2 += q[i] * dpsi[i] * dpsi[i];
    }
    let norm = norm2.sqrt();
    dl /= norm;
    da /= norm;
    dpsi.iter_mut().for_each(|v| *v /= norm);
    // orient: increase lambda where possible, otherwise decrease alpha
    let flip = if dl.abs() > 1e-12 { dl < 0.0 } else { da > 0.0 };
    if flip {
        dl = -dl;
        da = -da;
        dpsi.iter_mut().for_each(|v| *v = -*v);
    }

    let mut lambda = sol.lambda + ds * dl;
    let mut alpha = sol.alpha + ds * da;
    let mut psi_cur: Vec<f64> = psi.iter().zip(&dpsi).map(|(a, b)| a + ds * b).collect();
    let psi_pred = psi_cur.clone();

    // frozen orthogonality functional: l(v) = (1/m) sum q w [phi1] v
    let lvec: Vec<f64> = (0..n)
        .map(|i| {
            if ops.is_interior(i) {
                q[i] * w_base[i] * (phi1[i] - mean_phi1) / sol.m
            } else {
                0.0
            }
        })
        .collect();

    let p = sol.p;
    let nint: usize = (0..n).filter(|&i| ops.is_interior(i)).count();
    let interior: Vec<usize> = (0..n).filter(|&i| ops.is_interior(i)).collect();
    let bound = solver::a_priori_bound(domain);

    for _newton in 0..40 {
        // residuals
        let mut base_min = f64::INFINITY;
        let mut rho = vec![0.0; n];
        let mut wv = vec![0.0; n];
        for i in 0..n {
            let b = alpha + lambda * psi_cur[i];
            base_min = base_min.min(b);
            rho[i] = pow_p(b, p);
            wv[i] = pow_p(b, p - 1.0);
        }
        if !(base_min > 0.0) {
            return Err(Error::CorrectorFailed(format!(
                "positivity lost in corrector (min base {base_min:.3e})"
            )));
        }
        let lap = ops.laplacian(&psi_cur);
        let mut res_pde = 0.0f64;
        let mut rho_max = 0.0f64;
        for &i in &interior {
            res_pde = res_pde.max((lap[i] - rho[i]).abs());
            rho_max = rho_max.max(rho[i]);
        }
        let mass_res = ops.integrate(&rho) - 1.0;
        let ortho_res: f64 = (0..n).map(|i| lvec[i] * (psi_cur[i] - psi_pred[i])).sum();
        if res_pde <= 1e-9 * rho_max.max(1.0) && mass_res.abs() <= 1e-12 && ortho_res.abs() <= 1e-12
        {
            let solution = crate::solver::assemble_solution(domain, lambda, p, alpha, &psi_cur)?;
            let fold_here = fold_mode;
            let mut bp = make_point(solution, point.s, fold_here, opts, Some(&point.spectrum))?;
            bp.s = point.s + super::state_distance(point, &bp);
            return Ok(bp);
        }

        // bordered Newton system on (dpsi, dalpha, dlambda)
        let tau = p * lambda;
        let dim = nint + 2;
        let mut a = nalgebra::DMatrix::zeros(dim, dim);
        let mut rhs = nalgebra::DVector::zeros(dim);
        // PDE rows, quadrature-scaled
        let (diag, off) = radial_operator(domain, &ops)?;
        for (r, &i) in interior.iter().enumerate() {
            a[(r, r)] = diag[r] - tau * q[i] * wv[i];
            if r + 1 < nint {
                a[(r, r + 1)] = off[r];
                a[(r + 1, r)] = off[r];
            }
            a[(r, nint)] = -p * q[i] * wv[i];
            a[(r, nint + 1)] = -p * q[i] * wv[i] * psi_cur[i];
            rhs[r] = -q[i] * (lap[i] - rho[i]);
        }
        // mass row: d(int rho) = sum q p w (lambda dpsi + dalpha + psi dlambda)
        for (c, &i) in interior.iter().enumerate() {
            a[(nint, c)] = p * q[i] * wv[i] * lambda;
        }
        let mut mass_alpha = 0.0;
        let mut mass_lambda = 0.0;
        for i in 0..n {
            mass_alpha += p * q[i] * wv[i];
            mass_lambda += p * q[i] * wv[i] * psi_cur[i];
        }
        a[(nint, nint)] = mass_alpha;
        a[(nint, nint + 1)] = mass_lambda;
        rhs[nint] = -mass_res;
        // orthogonality row
        for (c, &i) in interior.iter().enumerate() {
            a[(nint + 1, c)] = lvec[i];
        }
        rhs[nint + 1] = -ortho_res;

        let delta = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::CorrectorFailed("singular bordered system".into()))?;
        let mut step = 1.0f64;
        for _ in 0..40 {
            let l2 = lambda + step * delta[nint + 1];
            let a2 = alpha + step * delta[nint];
            let ok = interior.iter().enumerate().all(|(r, &i)| {
                let v = psi_cur[i] + step * delta[r];
                a2 + l2 * v > 0.5 * a2.max(0.0) && v.abs() < bound
            }) && a2 > 0.0;
            if ok {
                break;
            }
            step *= 0.5;
        }
        lambda += step * delta[nint + 1];
        alpha += step * delta[nint];
        for (r, &i) in interior.iter().enumerate() {
            psi_cur[i] += step * delta[r];
        }
    }
    Err(Error::CorrectorFailed(
        "bordered corrector did not converge".into(),
    ))
}

/// Quadrature-scaled symmetric tridiagonal -Laplace operator of the radial
/// backends, on interior nodes.
fn radial_operator(domain: &crate::domain::Domain, ops: &StateOps) -> Result<(Vec<f64>, Vec<f64>)> {
    let _ = ops;
    match domain.backend() {
        Backend::Disk(g) => Ok(g.mode0_matrix()),
        Backend::Ball(g) => Ok(g.operator_matrix()),
        Backend::Square(_) => Err(Error::Unsupported(
            "pseudo-arclength continuation is implemented on the radial backends",
        )),
    }
}
