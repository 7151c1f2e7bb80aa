//! Coupled Newton solver for (alpha, psi). Each step eliminates the scalar
//! increment through the mass row and solves the reduced non-local system
//! for the field increment.

use super::{a_priori_bound, assemble_solution, pow_p, Solution, StateOps};
use crate::domain::{Domain, Field};
use crate::error::{Error, Result};

const MAX_NEWTON: usize = 60;
const MAX_HALVINGS: usize = 30;

pub(crate) struct NewtonOutcome {
    pub alpha: f64,
    pub psi: Vec<f64>,
    pub iterations: usize,
}

pub(crate) fn newton_state(
    ops: &StateOps,
    lambda: f64,
    p: f64,
    alpha0: f64,
    psi0: &[f64],
    bound: f64,
) -> Result<NewtonOutcome> {
    let n = ops.len();
    let tau = p * lambda;
    let mut alpha = alpha0;
    let mut psi = psi0.to_vec();
    let mut base = vec![0.0; n];
    let mut rho = vec![0.0; n];
    let mut w = vec![0.0; n];

    let residual = |alpha: f64,
                    psi: &[f64],
                    base: &mut [f64],
                    rho: &mut [f64],
                    w: &mut [f64]|
     -> Result<(Vec<f64>, f64, f64, f64)> {
        let mut min_base = f64::INFINITY;
        for i in 0..n {
            base[i] = alpha + lambda * psi[i];
            min_base = min_base.min(base[i]);
        }
        if !(min_base > 0.0) {
            return Err(Error::PositivityLoss(min_base));
        }
        let mut rho_max = 0.0f64;
        for i in 0..n {
            rho[i] = pow_p(base[i], p);
            w[i] = pow_p(base[i], p - 1.0);
            rho_max = rho_max.max(rho[i]);
        }
        let lap = ops.laplacian(psi);
        let mut f = vec![0.0; n];
        let mut res = 0.0f64;
        for i in 0..n {
            if ops.is_interior(i) {
                f[i] = lap[i] - rho[i];
                res = res.max(f[i].abs());
            }
        }
        let t = 1.0 - ops.integrate(rho);
        Ok((f, res, t, rho_max))
    };

    let (mut f, mut res, mut t, mut rho_max) = residual(alpha, &psi, &mut base, &mut rho, &mut w)?;
    for it in 0..MAX_NEWTON {
        if res <= 1e-9 * rho_max.max(1.0) && t.abs() <= 1e-12 {
            return Ok(NewtonOutcome {
                alpha,
                psi,
                iterations: it,
            });
        }
        let mw = ops.integrate(&w);
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            if ops.is_interior(i) {
                rhs[i] = -f[i] + t * w[i] / mw;
            }
        }
        let dpsi = ops.linearized_solve(&w, tau, &rhs, Some(mw))?;
        let qw: f64 = ops
            .quad()
            .iter()
            .zip(w.iter().zip(&dpsi))
            .map(|(q, (wi, di))| q * wi * di)
            .sum();
        let dalpha = t / (p * mw) - lambda * qw / mw;

        let score = |r: f64, tm: f64| r / rho_max.max(1.0) + tm.abs();
        let old_score = score(res, t);
        let mut step = 1.0f64;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let alpha_new = alpha + step * dalpha;
            let psi_new: Vec<f64> = psi.iter().zip(&dpsi).map(|(a, b)| a + step * b).collect();
            if alpha_new <= 0.0 && lambda > 0.0 {
                step *= 0.5;
                continue;
            }
            // stay inside the admissible set: alpha + lambda psi >= alpha/2
            let min_new = psi_new
                .iter()
                .fold(f64::INFINITY, |m, v| m.min(alpha_new + lambda * v));
            if !(min_new > 0.5 * alpha_new.max(0.0)) || !min_new.is_finite() {
                step *= 0.5;
                continue;
            }
            if ops.max_abs(&psi_new) > bound {
                return Err(Error::DivergenceGuard {
                    max: ops.max_abs(&psi_new),
                    bound,
                });
            }
            match residual(alpha_new, &psi_new, &mut base, &mut rho, &mut w) {
                Ok((f_new, res_new, t_new, rho_max_new)) => {
                    if score(res_new, t_new) < old_score || step < 1e-8 {
                        alpha = alpha_new;
                        psi = psi_new;
                        f = f_new;
                        res = res_new;
                        t = t_new;
                        rho_max = rho_max_new;
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                Err(_) => step *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::NewtonStalled(it + 1));
        }
    }
    if res <= 1e-9 * rho_max.max(1.0) && t.abs() <= 1e-12 {
        return Ok(NewtonOutcome {
            alpha,
            psi,
            iterations: MAX_NEWTON,
        });
    }
    Err(Error::NewtonStalled(MAX_NEWTON))
}

/// Newton solve of the coupled system from an admissible initial iterate.
/// Converges quadratically away from vanishing constrained eigenvalues;
/// a singular reduced solve signals proximity to a fold.
pub fn newton_solve(
    domain: &Domain,
    lambda: f64,
    p: f64,
    initial: (f64, &Field),
) -> Result<Solution> {
    newton_solve_stats(domain, lambda, p, initial).map(|(sol, _)| sol)
}

/// As `newton_solve`, also reporting the iteration count (used by the
/// continuation step-size controller).
pub fn newton_solve_stats(
    domain: &Domain,
    lambda: f64,
    p: f64,
    initial: (f64, &Field),
) -> Result<(Solution, usize)> {
    let ops = StateOps::new(domain);
    let psi0 = ops.from_field(initial.1);
    let bound = a_priori_bound(domain);
    let out = newton_state(&ops, lambda, p, initial.0, &psi0, bound)?;
    let sol = assemble_solution(domain, lambda, p, out.alpha, &out.psi)?;
    Ok((sol, out.iterations))
}

/// Newton solve of the inner problem -Laplace u = lambda (alpha + u)^p at
/// fixed alpha (no mass constraint). Used as an independent cross-check of
/// the Picard fixed point; returns u.
pub fn newton_fixed_alpha(domain: &Domain, lambda: f64, alpha: f64, p: f64) -> Result<Field> {
    let ops = StateOps::new(domain);
    let n = ops.len();
    let bound = a_priori_bound(domain);
    let mut u = vec![0.0; n];
    for _ in 0..MAX_NEWTON {
        let mut min_base = f64::INFINITY;
        let mut rho = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            let b = alpha + u[i];
            min_base = min_base.min(b);
            rho[i] = lambda * pow_p(b, p);
            w[i] = pow_p(b, p - 1.0);
        }
        if !(min_base > 0.0) {
            return Err(Error::PositivityLoss(min_base));
        }
        let lap = ops.laplacian(&u);
        let mut rhs = vec![0.0; n];
        let mut res = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            if ops.is_interior(i) {
                rhs[i] = rho[i] - lap[i];
                res = res.max(rhs[i].abs());
            }
            scale = scale.max(rho[i].abs());
        }
        if res <= 1e-12 * scale.max(1.0) {
            return Ok(ops.to_field(&u));
        }
        let du = ops.linearized_solve(&w, lambda * p, &rhs, None)?;
        let mut step = 1.0f64;
        loop {
            let ok = u
                .iter()
                .zip(&du)
                .all(|(ui, di)| alpha + ui + step * di > 0.0);
            if ok || step < 1e-9 {
                break;
            }
            step *= 0.5;
        }
        for i in 0..n {
            u[i] += step * du[i];
        }
        if ops.max_abs(&u) > bound {
            return Err(Error::DivergenceGuard {
                max: ops.max_abs(&u),
                bound,
            });
        }
    }
    Err(Error::NewtonStalled(MAX_NEWTON))
}
