//! Energies and variational functionals: the interaction energy in both
//! of its forms, the torsional energy, the dual free energy, the primal
//! functional behind the free boundary formulation, and the disk
//! positivity-threshold closed form.

use crate::domain::{Domain, Field};
use crate::error::{Error, Result};
use crate::solver::{self, Solution};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Energy bookkeeping for a solved state.
#[derive(Clone, Copy, Debug)]
pub struct EnergyReport {
    /// E = (1/2) int rho psi.
    pub e_quadratic: f64,
    /// E = (1/2) int |grad psi|^2.
    pub e_dirichlet: f64,
    /// Free energy J(rho) = p/(p+1) int rho^{1+1/p} - (lambda/2) int rho G[rho].
    pub free_energy: f64,
    /// Primal functional at the free boundary view (p > 1, lambda > 0 only).
    pub primal: Option<f64>,
    /// |e_quadratic - e_dirichlet|.
    pub consistency_gap: f64,
}

pub fn energy(sol: &Solution) -> Result<EnergyReport> {
    let domain = &sol.domain;
    let ones = vec![1.0; domain.node_count()];
    let e_quadratic = 0.5 * domain.wdot(sol.rho.values(), sol.psi.values(), &ones);
    let e_dirichlet = domain.dirichlet_energy(&sol.psi);
    let free_energy = free_energy_of(domain, &sol.rho, sol.lambda, sol.p)?;
    let primal = if sol.p > 1.0 && sol.lambda > 0.0 {
        let fb = solver::to_free_boundary(sol)?;
        Some(primal_functional(&fb, sol.p))
    } else {
        None
    };
    Ok(EnergyReport {
        e_quadratic,
        e_dirichlet,
        free_energy,
        primal,
        consistency_gap: (e_quadratic - e_dirichlet).abs(),
    })
}

/// J(rho) for an arbitrary nonnegative density.
pub fn free_energy_of(domain: &Domain, rho: &Field, lambda: f64, p: f64) -> Result<f64> {
    let g = domain.green(rho)?;
    let q = domain.quad_weights();
    let mut entropy = 0.0;
    let mut interaction = 0.0;
    for i in 0..q.len() {
        let r = rho.values()[i];
        entropy += q[i] * r.max(0.0).powf(1.0 + 1.0 / p);
        interaction += q[i] * r * g.values()[i];
    }
    Ok(p / (p + 1.0) * entropy - 0.5 * lambda * interaction)
}

/// Primal functional Psi_I(v) = (1/2) int |grad v|^2
/// - (1/(p+1)) int (v)_+^{p+1} + I v(boundary).
pub fn primal_functional(fb: &solver::FreeBoundaryView, p: f64) -> f64 {
    let domain = fb.v.domain().clone();
    // v - gamma vanishes on the boundary and shares the gradient of v
    let shifted = fb.v.axpy(-fb.gamma, &domain.constant(1.0));
    let grad = domain.dirichlet_energy(&shifted);
    let q = domain.quad_weights();
    let mut bulk = 0.0;
    for i in 0..q.len() {
        bulk += q[i] * fb.v.values()[i].max(0.0).powf(p + 1.0);
    }
    grad - bulk / (p + 1.0) + fb.current * fb.gamma
}

/// Torsional energy E_0 = (1/2) int G[1]; half the torsional rigidity.
pub fn torsion_energy(domain: &Domain) -> Result<f64> {
    let one = domain.constant(1.0);
    let psi0 = domain.green(&one)?;
    Ok(0.5 * domain.integrate(&psi0))
}

/// Closed form of the disk positivity threshold
/// lambda*(D_2, p) = (8 pi/(p+1))^{(p-1)/(2p)} Lambda(D_2, p+1)^{(p+1)/(2p)}.
pub fn lambda_star_disk(p: f64, lambda_disk_p_plus_1: f64) -> f64 {
    let pi = std::f64::consts::PI;
    (8.0 * pi / (p + 1.0)).powf((p - 1.0) / (2.0 * p))
        * lambda_disk_p_plus_1.powf((p + 1.0) / (2.0 * p))
}

/// Outcome of perturbing the free energy around a solved density along one
/// mean-zero direction.
#[derive(Clone, Copy, Debug)]
pub struct PerturbationProbe {
    /// Normalized first-order change (must vanish at a stationary point).
    pub first_order: f64,
    /// Second-order difference quotient of J.
    pub second_order: f64,
    /// Second variation form A(phi) of the matched direction.
    pub form_value: f64,
}

/// Perturb J around rho_lambda along `count` seeded random mean-zero
/// directions: the first-order change must vanish and the second-order
/// change must carry the sign of the second variation form.
pub fn free_energy_perturbations(
    sol: &Solution,
    count: usize,
    seed: u64,
) -> Result<Vec<PerturbationProbe>> {
    let domain = &sol.domain;
    let n = domain.node_count();
    let q = domain.quad_weights();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j0 = free_energy_of(domain, &sol.rho, sol.lambda, sol.p)?;
    let rho_min = sol
        .rho
        .values()
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(*v));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for i in 0..n {
            if domain.is_boundary(i) {
                f[i] = 0.0;
            }
        }
        // remove the plain mean so the mass constraint is preserved
        let mean: f64 = (0..n).map(|i| q[i] * f[i]).sum();
        let volume: f64 = (0..n)
            .map(|i| if domain.is_boundary(i) { 0.0 } else { q[i] })
            .sum();
        for i in 0..n {
            if !domain.is_boundary(i) {
                f[i] -= mean / volume;
            }
        }
        let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-3 * rho_min / fmax;
        let shift = |e: f64| -> Result<f64> {
            let vals: Vec<f64> = (0..n).map(|i| sol.rho.values()[i] + e * f[i]).collect();
            free_energy_of(domain, &domain.field_from_values(vals)?, sol.lambda, sol.p)
        };
        let jp = shift(eps)?;
        let jm = shift(-eps)?;
        let first = (jp - jm) / (2.0 * eps);
        let second = (jp + jm - 2.0 * j0) / (eps * eps);
        // the matched linearization direction: phi = f / weight
        let phi_vals: Vec<f64> = (0..n).map(|i| f[i] / sol.weight.values()[i]).collect();
        let phi = domain.field_from_values(phi_vals)?;
        let a = crate::spectral::second_variation_form(sol, &phi)?;
        out.push(PerturbationProbe {
            first_order: first / j0.abs().max(1.0),
            second_order: second,
            form_value: a,
        });
    }
    Ok(out)
}

/// Directional derivatives of the primal functional at the free boundary
/// view, along `count` seeded admissible directions (interior shapes plus a
/// boundary-constant component) with the flux constraint restored exactly.
/// Returns the largest normalized derivative.
pub fn primal_stationarity(sol: &Solution, count: usize, seed: u64) -> Result<f64> {
    if sol.p <= 1.0 || sol.lambda <= 0.0 {
        return Err(Error::FreeBoundaryUndefined);
    }
    let fb = solver::to_free_boundary(sol)?;
    let domain = &sol.domain;
    let n = domain.node_count();
    let q = domain.quad_weights();
    let p = sol.p;
    let current = fb.current;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9D1);
    let psi_scale: f64 = fb.v.max_abs();

    // restore int (v)_+^p = I by shifting the boundary constant
    let restore = |vals: &mut Vec<f64>| {
        for _ in 0..60 {
            let mut mass = 0.0;
            let mut dmass = 0.0;
            for i in 0..n {
                let vp = vals[i].max(0.0);
                mass += q[i] * vp.powf(p);
                dmass += q[i] * p * vp.powf(p - 1.0);
            }
            let err = mass - current;
            if err.abs() <= 1e-14 * current {
                break;
            }
            let dc = -err / dmass;
            vals.iter_mut().for_each(|v| *v += dc);
        }
    };
    let psi_of = |vals: Vec<f64>| -> Result<f64> {
        let gamma = vals[boundary_index(domain)];
        let field = domain.field_from_values(vals)?;
        let shifted = field.axpy(-gamma, &domain.constant(1.0));
        let grad = domain.dirichlet_energy(&shifted);
        let mut bulk = 0.0;
        for i in 0..n {
            bulk += q[i] * field.values()[i].max(0.0).powf(p + 1.0);
        }
        Ok(grad - bulk / (p + 1.0) + current * gamma)
    };

    let mut worst = 0.0f64;
    let psi0 = psi_of(fb.v.values().to_vec())?;
    for _ in 0..count {
        let mut dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shift = rng.gen_range(-0.5..0.5);
        for i in 0..n {
            if domain.is_boundary(i) {
                dir[i] = shift;
            } else {
                dir[i] += shift;
            }
        }
        let dmax = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-4 * psi_scale / dmax;
        let perturbed = |sign: f64| -> Result<f64> {
            let mut vals: Vec<f64> = (0..n)
                .map(|i| fb.v.values()[i] + sign * eps * dir[i])
                .collect();
            restore(&mut vals);
            psi_of(vals)
        };
        let dpsi = (perturbed(1.0)? - perturbed(-1.0)?) / (2.0 * eps);
        worst = worst.max(dpsi.abs() / psi0.abs().max(1.0));
    }
    Ok(worst)
}

fn boundary_index(domain: &Domain) -> usize {
    domain
        .boundary_mask()
        .iter()
        .position(|b| *b)
        .expect("domain has boundary nodes")
}
