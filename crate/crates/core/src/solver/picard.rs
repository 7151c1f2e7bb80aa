//! Small-lambda path: Picard contraction for the inner state at fixed alpha
//! and a scalar root-find on alpha for the unit-mass constraint.

use super::{assemble_solution, pow_p, Solution, StateOps};
use crate::domain::{Domain, Field};
use crate::error::{Error, Result};

const CONTRACTION_LIMIT: f64 = 0.9;

fn picard_u(
    ops: &StateOps,
    lambda: f64,
    alpha: f64,
    p: f64,
    tol: f64,
    warm: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = ops.len();
    let mut u = warm.map(|w| w.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    if lambda == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut prev_diff = f64::INFINITY;
    let mut slow = 0usize;
    let mut rho = vec![0.0; n];
    for _ in 0..20_000 {
        for i in 0..n {
            rho[i] = pow_p(alpha + u[i], p);
        }
        let mut next = ops.green(&rho)?;
        let mut diff = 0.0f64;
        for i in 0..n {
            next[i] *= lambda;
            diff = diff.max((next[i] - u[i]).abs());
        }
        u = next;
        if diff <= tol {
            return Ok(u);
        }
        let factor = diff / prev_diff;
        if factor > CONTRACTION_LIMIT {
            slow += 1;
            if slow >= 3 {
                return Err(Error::NonContraction { lambda, factor });
            }
        } else {
            slow = 0;
        }
        prev_diff = diff;
    }
    Err(Error::NonContraction {
        lambda,
        factor: 1.0,
    })
}

/// Fixed point u = lambda G[(alpha + u)^p] by Picard iteration. Fails with
/// `NonContraction` when successive differences stop shrinking, which is the
/// signal to switch to the Newton solver.
pub fn picard_inner_solve(
    domain: &Domain,
    lambda: f64,
    alpha: f64,
    p: f64,
    tol: f64,
) -> Result<Field> {
    if lambda < 0.0 || !(0.0..=1.0).contains(&alpha) || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "picard_inner_solve: lambda={lambda}, alpha={alpha}, p={p}"
        )));
    }
    let ops = StateOps::new(domain);
    let u = picard_u(&ops, lambda, alpha, p, tol, None)?;
    Ok(ops.to_field(&u))
}

/// g(alpha) - 1 where g(alpha) = int (alpha + u_lambda[alpha])^p.
pub fn mass_deficit(domain: &Domain, lambda: f64, p: f64, alpha: f64) -> Result<f64> {
    let ops = StateOps::new(domain);
    let u = picard_u(&ops, lambda, alpha, p, 1e-13, None)?;
    Ok(mass_of(&ops, alpha, p, &u) - 1.0)
}

fn mass_of(ops: &StateOps, alpha: f64, p: f64, u: &[f64]) -> f64 {
    let rho: Vec<f64> = u.iter().map(|&ui| pow_p(alpha + ui, p)).collect();
    ops.integrate(&rho)
}

/// Contraction-regime solve of the full constrained problem: bisection on
/// alpha (the mass map is strictly increasing) followed by a secant polish.
pub fn solve_small_lambda(domain: &Domain, lambda: f64, p: f64) -> Result<Solution> {
    let ops = StateOps::new(domain);
    if lambda == 0.0 {
        let psi = ops.green(&vec![1.0; ops.len()])?;
        return assemble_solution(domain, 0.0, p, 1.0, &psi);
    }
    let mut warm: Option<Vec<f64>> = None;
    let eval = |alpha: f64, warm: &mut Option<Vec<f64>>| -> Result<(f64, Vec<f64>)> {
        let u = picard_u(&ops, lambda, alpha, p, 1e-13, warm.as_deref())?;
        let f = mass_of(&ops, alpha, p, &u) - 1.0;
        *warm = Some(u.clone());
        Ok((f, u))
    };
    let mut lo = 1e-6;
    let mut hi = 1.0;
    let (f_hi, mut u_best) = eval(hi, &mut warm)?;
    let (f_lo, _) = eval(lo, &mut warm)?;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::RootNotBracketed(lambda));
    }
    let mut alpha = hi;
    let mut f_alpha = f_hi;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let (fm, um) = eval(mid, &mut warm)?;
        if fm >= 0.0 {
            hi = mid;
            alpha = mid;
            f_alpha = fm;
            u_best = um;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    // secant polish on the bracket endpoint
    let mut a0 = lo;
    let (mut f0, _) = eval(a0, &mut warm)?;
    let mut a1 = alpha;
    let mut f1 = f_alpha;
    for _ in 0..12 {
        if (f1 - f0).abs() < 1e-300 {
            break;
        }
        let a2 = (a1 - f1 * (a1 - a0) / (f1 - f0)).clamp(1e-9, 1.0);
        let (f2, u2) = eval(a2, &mut warm)?;
        a0 = a1;
        f0 = f1;
        a1 = a2;
        f1 = f2;
        u_best = u2;
        alpha = a2;
        if f2.abs() < 1e-13 {
            break;
        }
    }
    let psi: Vec<f64> = u_best.iter().map(|ui| ui / lambda).collect();
    assemble_solution(domain, lambda, p, alpha, &psi)
}
