//! Map from the constrained formulation to the prescribed-flux free
//! boundary variables (I, gamma, v).

use super::Solution;
use crate::domain::{Backend, Field};
use crate::error::{Error, Result};

/// Free boundary view of a solution: -Laplace v = (v)_+^p with boundary
/// value gamma and total flux I = lambda^q.
#[derive(Clone, Debug)]
pub struct FreeBoundaryView {
    /// Prescribed boundary flux I.
    pub current: f64,
    /// Constant boundary value of v.
    pub gamma: f64,
    pub v: Field,
    /// Discrete boundary flux -int dv/dnu ds; agrees with `current` up to
    /// discretization error.
    pub flux_check: f64,
}

/// Scale a solution into the free boundary variables. The map is singular
/// for p = 1 and undefined at lambda = 0.
pub fn to_free_boundary(sol: &Solution) -> Result<FreeBoundaryView> {
    if sol.p <= 1.0 || sol.lambda <= 0.0 {
        return Err(Error::FreeBoundaryUndefined);
    }
    let (lambda, p) = (sol.lambda, sol.p);
    let scale = lambda.powf(1.0 / (p - 1.0));
    let current = lambda.powf(sol.q);
    let gamma = scale * sol.alpha;
    let v_vals: Vec<f64> = sol
        .psi
        .values()
        .iter()
        .map(|psi| scale * (sol.alpha + lambda * psi))
        .collect();
    let v = sol.domain.field_from_values(v_vals)?;
    let flux_check = -boundary_flux(&v);
    Ok(FreeBoundaryView {
        current,
        gamma,
        v,
        flux_check,
    })
}

/// int dv/dnu ds over the boundary, by second-order one-sided normal
/// differences.
fn boundary_flux(v: &Field) -> f64 {
    let domain = v.domain();
    let f = v.values();
    match domain.backend() {
        Backend::Square(g) => {
            let n = g.n;
            let h = g.h;
            let node = |ix: usize, iy: usize| iy * n + ix;
            let deriv = |b: f64, i1: f64, i2: f64| (3.0 * b - 4.0 * i1 + i2) / (2.0 * h);
            let mut flux = 0.0;
            for k in 0..n {
                let wt = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                flux += wt * h * deriv(f[node(0, k)], f[node(1, k)], f[node(2, k)]);
                flux += wt * h * deriv(f[node(n - 1, k)], f[node(n - 2, k)], f[node(n - 3, k)]);
                flux += wt * h * deriv(f[node(k, 0)], f[node(k, 1)], f[node(k, 2)]);
                flux += wt * h * deriv(f[node(k, n - 1)], f[node(k, n - 2)], f[node(k, n - 3)]);
            }
            flux
        }
        Backend::Disk(g) => {
            let (nr, nt, h) = (g.nr, g.nt, g.h);
            let ds = g.radius * g.dtheta;
            let mut flux = 0.0;
            for j in 0..nt {
                let b = f[g.node(nr, j)];
                let i1 = f[g.node(nr - 1, j)];
                let i2 = f[g.node(nr - 2, j)];
                flux += ds * (3.0 * b - 4.0 * i1 + i2) / (2.0 * h);
            }
            flux
        }
        Backend::Ball(g) => {
            let n = g.n;
            let h = g.h;
            let nd = g.dim as f64;
            let area = nd * crate::domain::unit_ball_volume(g.dim) * g.radius.powf(nd - 1.0);
            area * (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h)
        }
    }
}
