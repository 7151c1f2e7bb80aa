//! State solvers for the constrained problem
//! -Laplace(psi) = (alpha + lambda psi)^p with unit plasma mass.

mod free_boundary;
mod newton;
mod picard;

pub use free_boundary::{to_free_boundary, FreeBoundaryView};
pub use newton::{newton_fixed_alpha, newton_solve, newton_solve_stats};
pub use picard::{mass_deficit, picard_inner_solve, solve_small_lambda};

use crate::domain::{Backend, Domain, Field};
use crate::error::{Error, Result};

/// A solved pair (alpha_lambda, psi_lambda) with its derived quantities.
#[derive(Clone)]
pub struct Solution {
    pub domain: Domain,
    pub lambda: f64,
    pub p: f64,
    /// Conjugate exponent; +infinity when p = 1.
    pub q: f64,
    pub alpha: f64,
    pub psi: Field,
    /// Plasma density (alpha + lambda psi)^p.
    pub rho: Field,
    /// Linearization weight (alpha + lambda psi)^(p-1); identically 1 for p = 1.
    pub weight: Field,
    /// Total weight mass int weight dx.
    pub m: f64,
    /// tau = p lambda.
    pub tau: f64,
    /// Max-norm of -Laplace(psi) - rho over interior nodes.
    pub residual_norm: f64,
    /// int rho - 1.
    pub mass_error: f64,
}

impl std::fmt::Debug for Solution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Solution(lambda={:.6}, p={}, alpha={:.6}, res={:.1e}, mass_err={:.1e})",
            self.lambda, self.p, self.alpha, self.residual_norm, self.mass_error
        )
    }
}

pub(crate) fn conjugate_exponent(p: f64) -> f64 {
    if p <= 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// x^p on a guaranteed-positive base; integer exponents take the fast path.
#[inline]
pub(crate) fn pow_p(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else if p == 3.0 {
        x * x * x
    } else if p.fract() == 0.0 && p > 0.0 && p < 16.0 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

/// Representation the iterative solvers work in: full grid vectors on the
/// square, radial profiles on the disk and ball (their states are
/// axisymmetric).
pub(crate) struct StateOps<'a> {
    pub domain: &'a Domain,
}

impl<'a> StateOps<'a> {
    pub fn new(domain: &'a Domain) -> Self {
        Self { domain }
    }

    pub fn len(&self) -> usize {
        match self.domain.backend() {
            Backend::Square(g) => g.node_count(),
            Backend::Disk(g) => g.nr + 1,
            Backend::Ball(g) => g.node_count(),
        }
    }

    /// Quadrature weights in state representation (ring totals on the disk).
    pub fn quad(&self) -> &[f64] {
        match self.domain.backend() {
            Backend::Square(_) => self.domain.quad_weights(),
            Backend::Disk(g) => g.radial_cells(),
            Backend::Ball(_) => self.domain.quad_weights(),
        }
    }

    pub fn is_interior(&self, i: usize) -> bool {
        match self.domain.backend() {
            Backend::Square(_) => !self.domain.is_boundary(i),
            Backend::Disk(g) => i < g.nr,
            Backend::Ball(g) => i < g.n,
        }
    }

    pub fn integrate(&self, v: &[f64]) -> f64 {
        crate::domain::dot(self.quad(), v)
    }

    pub fn green(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self.domain.backend() {
            Backend::Square(g) => g.green(v),
            Backend::Disk(g) => Ok(g.green_radial(v)),
            Backend::Ball(g) => Ok(g.green(v)),
        }
    }

    pub fn laplacian(&self, v: &[f64]) -> Vec<f64> {
        match self.domain.backend() {
            Backend::Square(g) => g.laplacian(v),
            Backend::Disk(g) => g.laplacian_radial(v),
            Backend::Ball(g) => g.laplacian(v),
        }
    }

    /// Solve (-Laplace - tau w (. - <.>_w)) x = rhs; `mass` = None drops the
    /// mean projection (plain linearized operator).
    pub fn linearized_solve(
        &self,
        w: &[f64],
        tau: f64,
        rhs: &[f64],
        mass: Option<f64>,
    ) -> Result<Vec<f64>> {
        let m = mass.unwrap_or(f64::INFINITY);
        match self.domain.backend() {
            Backend::Square(g) => g.constrained_solve(w, tau, rhs, m),
            Backend::Disk(g) => g.constrained_solve_radial(w, tau, rhs, m),
            Backend::Ball(g) => g.constrained_solve(w, tau, rhs, m),
        }
    }

    pub fn to_field(&self, v: &[f64]) -> Field {
        match self.domain.backend() {
            Backend::Square(_) | Backend::Ball(_) => self
                .domain
                .field_from_values(v.to_vec())
                .expect("state length matches domain"),
            Backend::Disk(g) => self
                .domain
                .field_from_values(g.from_radial(v))
                .expect("state length matches domain"),
        }
    }

    /// Project a field into state representation (ring average on the disk).
    pub fn from_field(&self, f: &Field) -> Vec<f64> {
        match self.domain.backend() {
            Backend::Square(_) | Backend::Ball(_) => f.values().to_vec(),
            Backend::Disk(g) => g.to_radial(f.values()),
        }
    }

    pub fn max_abs(&self, v: &[f64]) -> f64 {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Divergence guard for the iterative solvers, scaled from the torsion
/// state at build time. States on the unit-mass branch stay O(1); anything
/// past this bound is a runaway iteration, not a solution.
pub fn a_priori_bound(domain: &Domain) -> f64 {
    let psi0 = domain
        .green_raw(&vec![1.0; domain.node_count()])
        .expect("torsion solve");
    let max = psi0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    1.0e4 * max.max(0.01)
}

/// Build a Solution from a solved state, computing the derived fields and
/// checking the defining invariants.
pub(crate) fn assemble_solution(
    domain: &Domain,
    lambda: f64,
    p: f64,
    alpha: f64,
    psi_state: &[f64],
) -> Result<Solution> {
    let ops = StateOps::new(domain);
    let n = ops.len();
    debug_assert_eq!(psi_state.len(), n);
    let mut rho = vec![0.0; n];
    let mut weight = vec![0.0; n];
    let mut min_base = f64::INFINITY;
    for i in 0..n {
        let base = alpha + lambda * psi_state[i];
        min_base = min_base.min(base);
        rho[i] = pow_p(base, p);
        weight[i] = pow_p(base, p - 1.0);
    }
    if !(min_base > 0.0) {
        return Err(Error::PositivityLoss(min_base));
    }
    let lap = ops.laplacian(psi_state);
    let mut residual = 0.0f64;
    let mut rho_max = 0.0f64;
    for i in 0..n {
        if ops.is_interior(i) {
            residual = residual.max((lap[i] - rho[i]).abs());
        }
        rho_max = rho_max.max(rho[i]);
    }
    let mass_error = ops.integrate(&rho) - 1.0;
    let psi = ops.to_field(psi_state);
    let rho_f = ops.to_field(&rho);
    let weight_f = ops.to_field(&weight);
    let m = domain.weight_mass(weight_f.values());
    let psi_min = psi_state
        .iter()
        .enumerate()
        .filter(|(i, _)| ops.is_interior(*i))
        .fold(f64::INFINITY, |mn, (_, v)| mn.min(*v));
    if psi_min < -1e-9 {
        return Err(Error::InvalidParameter(format!(
            "solved state is negative in the interior (min {psi_min:.3e})"
        )));
    }
    // alpha <= 1 with equality only at lambda = 0; the analytic extension
    // to slightly negative lambda (used by derivative probes) exceeds 1
    let alpha_cap = if lambda >= 0.0 { 1.0 + 1e-8 } else { 1.01 };
    if !(-1e-8..=alpha_cap).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 1]"
        )));
    }
    Ok(Solution {
        domain: domain.clone(),
        lambda,
        p,
        q: conjugate_exponent(p),
        alpha,
        psi,
        rho: rho_f,
        weight: weight_f,
        m,
        tau: p * lambda,
        residual_norm: residual,
        mass_error,
    })
}

impl Solution {
    /// Weighted mean <f> with the solution's own weight measure.
    pub fn mean(&self, f: &Field) -> f64 {
        self.domain
            .weighted_mean_raw(self.weight.values(), f.values())
    }

    /// Weighted inner product <f, g> (normalized by the weight mass).
    pub fn inner(&self, f: &Field, g: &Field) -> f64 {
        self.domain
            .wdot(self.weight.values(), f.values(), g.values())
            / self.m
    }

    /// Fluctuation [f] = f - <f>.
    pub fn fluctuation(&self, f: &Field) -> Field {
        let mean = self.mean(f);
        f.axpy(-mean, &self.domain.constant(1.0))
    }

    /// State representation of psi (radial profile on disk/ball).
    pub(crate) fn psi_state(&self) -> Vec<f64> {
        StateOps::new(&self.domain).from_field(&self.psi)
    }
}
