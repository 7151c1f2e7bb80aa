//! Sobolev best constants by the normalized ground-state fixed point, with
//! an independent projected-gradient minimizer as cross-check.

use crate::domain::{Domain, Field};
use crate::error::{Error, Result};
use crate::solver::StateOps;

/// Best constant of the embedding H^1_0 -> L^t and its ground state.
#[derive(Clone, Debug)]
pub struct SobolevResult {
    pub t: f64,
    /// The best constant: inf int |grad w|^2 / (int |w|^t)^(2/t).
    pub lambda: f64,
    /// Ground state with int w^t = 1, positive in the interior.
    pub minimizer: Field,
    pub iterations: usize,
}

fn check_exponent(domain: &Domain, t: f64) -> Result<()> {
    let n = domain.dimension();
    if t < 1.0 {
        return Err(Error::ExponentOutOfRange { t, n });
    }
    if n >= 3 {
        let crit = 2.0 * n as f64 / (n as f64 - 2.0);
        if t >= crit {
            return Err(Error::ExponentOutOfRange { t, n });
        }
    }
    Ok(())
}

fn rayleigh(ops: &StateOps, w: &[f64]) -> f64 {
    let lap = ops.laplacian(w);
    let q = ops.quad();
    let mut e = 0.0;
    for i in 0..w.len() {
        if ops.is_interior(i) {
            e += q[i] * w[i] * lap[i];
        }
    }
    e
}

fn normalize_t(ops: &StateOps, w: &mut [f64], t: f64) -> f64 {
    let q = ops.quad();
    let mut s = 0.0;
    for i in 0..w.len() {
        s += q[i] * w[i].abs().powf(t);
    }
    let z = s.powf(1.0 / t);
    w.iter_mut().for_each(|v| *v /= z);
    z
}

/// Ground-state iteration w <- G[w^{t-1}], renormalized to int w^t = 1 each
/// step; stops when the successive max-norm difference falls below 1e-10.
/// The returned constant is Aitken-extrapolated from the Rayleigh quotients.
pub fn sobolev_constant(domain: &Domain, t: f64) -> Result<SobolevResult> {
    check_exponent(domain, t)?;
    let ops = StateOps::new(domain);
    let n = ops.len();
    let mut w = ops.green(&vec![1.0; n])?;
    normalize_t(&ops, &mut w, t);
    let mut lams: Vec<f64> = Vec::new();
    let mut iterations = 0usize;
    for it in 0..100_000 {
        let src: Vec<f64> = w.iter().map(|v| v.max(0.0).powf(t - 1.0)).collect();
        let mut g = ops.green(&src)?;
        normalize_t(&ops, &mut g, t);
        let diff = w
            .iter()
            .zip(&g)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        w = g;
        lams.push(rayleigh(&ops, &w));
        iterations = it + 1;
        if diff <= 1e-10 {
            break;
        }
        if it + 1 == 100_000 {
            return Err(Error::SobolevStagnation(t));
        }
    }
    let k = lams.len();
    let mut lambda = lams[k - 1];
    if k >= 3 {
        let (l0, l1, l2) = (lams[k - 3], lams[k - 2], lams[k - 1]);
        let denom = (l2 - l1) - (l1 - l0);
        if denom.abs() > 1e-300 {
            let aitken = l2 - (l2 - l1) * (l2 - l1) / denom;
            if aitken.is_finite() && (aitken - lambda).abs() < 0.01 * lambda.abs() {
                lambda = aitken;
            }
        }
    }
    let min_interior = w
        .iter()
        .enumerate()
        .filter(|(i, _)| ops.is_interior(*i))
        .fold(f64::INFINITY, |m, (_, v)| m.min(*v));
    if !(min_interior > 0.0) {
        return Err(Error::SobolevStagnation(t));
    }
    Ok(SobolevResult {
        t,
        lambda,
        minimizer: ops.to_field(&w),
        iterations,
    })
}

/// Independent route to the same constant: projected-gradient descent on
/// the Rayleigh quotient in the H^1_0 metric with a backtracking line
/// search. Used to cross-validate `sobolev_constant`.
pub fn rayleigh_minimize(domain: &Domain, t: f64, max_iter: usize) -> Result<f64> {
    check_exponent(domain, t)?;
    let ops = StateOps::new(domain);
    let n = ops.len();
    let mut w = ops.green(&vec![1.0; n])?;
    // deterministic asymmetric perturbation so the descent has to work
    for (i, v) in w.iter_mut().enumerate() {
        if ops.is_interior(i) {
            *v *= 1.0 + 0.05 * ((i % 7) as f64 - 3.0) / 3.0;
        }
    }
    normalize_t(&ops, &mut w, t);
    let mut r_cur = rayleigh(&ops, &w);
    for _ in 0..max_iter {
        // gradient of the constrained quotient: -Laplace w - R |w|^{t-2} w,
        // preconditioned by the Green operator
        let pw: Vec<f64> = w
            .iter()
            .map(|v| v.signum() * v.abs().powf(t - 1.0) * r_cur)
            .collect();
        let gpw = ops.green(&pw)?;
        let dir: Vec<f64> = (0..n)
            .map(|i| {
                if ops.is_interior(i) {
                    gpw[i] - w[i]
                } else {
                    0.0
                }
            })
            .collect();
        let dmax = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if dmax < 1e-13 {
            break;
        }
        let mut step = 1.0f64;
        let mut improved = false;
        for _ in 0..40 {
            let mut cand: Vec<f64> = w.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            normalize_t(&ops, &mut cand, t);
            let r_new = rayleigh(&ops, &cand);
            if r_new < r_cur - 1e-15 * r_cur.abs() {
                w = cand;
                r_cur = r_new;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(r_cur)
}
