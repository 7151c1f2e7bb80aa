//! Parameter derivatives along the solution branch and the Fourier-mode
//! identity they satisfy.

use crate::domain::Field;
use crate::error::{Error, Result};
use crate::solver::{Solution, StateOps};
use crate::spectral::Spectrum;

/// Tangent of the branch in the natural parameter: eta = d psi / d lambda
/// solves the constrained linearization with right side p w [psi], and
/// d alpha / d lambda = -lambda <eta> - <psi>.
///
/// Fails with a singular system at (or numerically near) a vanishing
/// constrained eigenvalue; the caller must switch parametrization there.
pub fn tangent(sol: &Solution) -> Result<(f64, Field)> {
    let ops = StateOps::new(&sol.domain);
    let psi = sol.psi_state();
    let w = ops.from_field(&sol.weight);
    let n = ops.len();
    let mean_psi = mean_state(&ops, &w, &psi, sol.m);
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        if ops.is_interior(i) {
            rhs[i] = sol.p * w[i] * (psi[i] - mean_psi);
        }
    }
    let eta = ops.linearized_solve(&w, sol.tau, &rhs, Some(sol.m))?;
    let mean_eta = mean_state(&ops, &w, &eta, sol.m);
    let dalpha = -sol.lambda * mean_eta - mean_psi;
    Ok((dalpha, ops.to_field(&eta)))
}

/// Derivative of u = lambda psi: w solves the constrained linearization
/// with right side rho, and d alpha / d lambda = -<w>. The returned scalar
/// is that mean; it must agree with `tangent` since w = psi + lambda eta.
pub fn w_derivative(sol: &Solution) -> Result<(Field, f64)> {
    let ops = StateOps::new(&sol.domain);
    let w = ops.from_field(&sol.weight);
    let rho = ops.from_field(&sol.rho);
    let n = ops.len();
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        if ops.is_interior(i) {
            rhs[i] = rho[i];
        }
    }
    let wl = ops.linearized_solve(&w, sol.tau, &rhs, Some(sol.m))?;
    let mean_w = mean_state(&ops, &w, &wl, sol.m);
    Ok((ops.to_field(&wl), -mean_w))
}

/// Energy slope dE/d lambda = int rho eta, cross-checked against its
/// weighted-mean form m (tau <[eta],[psi]> + p ||[psi]||^2); a relative
/// mismatch beyond 1e-6 flags a solver bug.
pub fn energy_slope(sol: &Solution, eta: &Field) -> Result<f64> {
    let e1 = integral_of_product(sol, &sol.rho, eta);
    let fl_eta = sol.fluctuation(eta);
    let fl_psi = sol.fluctuation(&sol.psi);
    let e2 = sol.m * (sol.tau * sol.inner(&fl_eta, &fl_psi) + sol.p * sol.inner(&fl_psi, &fl_psi));
    let scale = e1.abs().max(e2.abs()).max(1e-300);
    if (e1 - e2).abs() > 1e-6 * scale {
        return Err(Error::InvalidParameter(format!(
            "energy slope mismatch: {e1:.12e} vs {e2:.12e}"
        )));
    }
    Ok(e1)
}

/// Residual of the per-mode slope relation sigma_j beta_j = p xi_j for the
/// leading eigenpairs, with xi_j = m <[phi_j],[psi]>, beta_j = m <[phi_j],[eta]>.
#[derive(Clone, Copy, Debug)]
pub struct FourierSlopeCheck {
    /// max_j |sigma_j beta_j - p xi_j|
    pub residual: f64,
    /// max_j |xi_j| (natural scale of the identity)
    pub scale: f64,
}

pub fn fourier_slope_check(sol: &Solution, spectrum: &Spectrum, eta: &Field) -> FourierSlopeCheck {
    let fl_psi = sol.fluctuation(&sol.psi);
    let fl_eta = sol.fluctuation(eta);
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..spectrum.sigmas.len().min(3) {
        let fl_phi = sol.fluctuation(&spectrum.phis[j]);
        let xi = sol.m * sol.inner(&fl_phi, &fl_psi);
        let beta = sol.m * sol.inner(&fl_phi, &fl_eta);
        residual = residual.max((spectrum.sigmas[j] * beta - sol.p * xi).abs());
        scale = scale.max(xi.abs());
    }
    FourierSlopeCheck { residual, scale }
}

fn mean_state(ops: &StateOps, w: &[f64], f: &[f64], mass: f64) -> f64 {
    let q = ops.quad();
    let mut s = 0.0;
    for i in 0..f.len() {
        s += q[i] * w[i] * f[i];
    }
    s / mass
}

fn integral_of_product(sol: &Solution, a: &Field, b: &Field) -> f64 {
    let q = sol.domain.quad_weights();
    let mut s = 0.0;
    for i in 0..q.len() {
        s += q[i] * a.values()[i] * b.values()[i];
    }
    s
}
