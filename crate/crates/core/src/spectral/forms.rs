//! Spectral identities and the second-variation quadratic form.

use super::Spectrum;
use crate::domain::Field;
use crate::error::{Error, Result};
use crate::solver::Solution;

/// Residual of the eigenpair identity
/// (1/m) <phi_k> = (lambda (p-1) + sigma_k) <psi [phi_k]>.
/// Contract: at most 1e-7 * max(1, |sigma_k|) for converged pairs.
pub fn check_eigen_identity(sol: &Solution, spectrum: &Spectrum, j: usize) -> Result<f64> {
    if j >= spectrum.sigmas.len() {
        return Err(Error::InvalidParameter(format!(
            "eigenpair index {j} out of range (k = {})",
            spectrum.sigmas.len()
        )));
    }
    let sigma = spectrum.sigmas[j];
    let phi = &spectrum.phis[j];
    let mean_phi = spectrum.means[j];
    let fluct = phi.axpy(-mean_phi, &sol.domain.constant(1.0));
    let lhs = mean_phi / sol.m;
    let rhs = (sol.lambda * (sol.p - 1.0) + sigma) * sol.inner(&sol.psi, &fluct);
    Ok((lhs - rhs).abs())
}

/// Second-variation quadratic form of the free energy at a solution:
/// A(phi) = int w [phi]^2 - tau int w [phi] G[w [phi]].
///
/// For an eigenpair, A(phi_k)/m = <[phi_k]^2> sigma_k / (tau + sigma_k),
/// so its sign is the sign of sigma_k.
pub fn second_variation_form(sol: &Solution, phi: &Field) -> Result<f64> {
    let domain = &sol.domain;
    let w = sol.weight.values();
    let mean = sol.mean(phi);
    let n = domain.node_count();
    let fluct: Vec<f64> = phi.values().iter().map(|v| v - mean).collect();
    let s1 = domain.wdot(w, &fluct, &fluct);
    let src: Vec<f64> = (0..n).map(|i| w[i] * fluct[i]).collect();
    let g = domain.green_raw(&src)?;
    let s2 = domain.wdot(w, &fluct, &g);
    Ok(s1 - sol.tau * s2)
}
