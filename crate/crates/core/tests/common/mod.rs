//! Shared test oracles: Bessel series, analytic radial solutions, small grids.
#![allow(dead_code)]

use plasma_branch::{Domain, DomainKind, Resolution};

/// First zeros of J0 and J1.
pub const J0_ZERO1: f64 = 2.404825557695773;
pub const J1_ZERO1: f64 = 3.831705970207512;

/// Bessel J0 by its power series (accurate for |x| <= 12).
pub fn bessel_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= -q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Bessel J1 by its power series (accurate for |x| <= 12).
pub fn bessel_j1(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..60 {
        term *= -q / ((k * (k + 1)) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Closed-form inner state for p = 1 at fixed alpha on the disk:
/// u = alpha (J0(sqrt(lambda) r)/J0(sqrt(lambda) R) - 1).
pub fn disk_p1_inner(lambda: f64, alpha: f64, r: f64, radius: f64) -> f64 {
    let s = lambda.sqrt();
    alpha * (bessel_j0(s * r) / bessel_j0(s * radius) - 1.0)
}

/// Closed-form alpha(lambda) for the mass-normalized p = 1 disk solution.
pub fn disk_p1_alpha(lambda: f64, radius: f64) -> f64 {
    let s = lambda.sqrt();
    s * bessel_j0(s * radius) / (2.0 * std::f64::consts::PI * radius * bessel_j1(s * radius))
}

pub fn disk(nr: usize, nt: usize) -> Domain {
    Domain::new(
        DomainKind::UnitDisk,
        Resolution::Disk {
            radial: nr,
            angular: nt,
        },
    )
    .unwrap()
}

pub fn square(n: usize) -> Domain {
    Domain::new(DomainKind::UnitSquare, Resolution::Square { nodes: n }).unwrap()
}

pub fn ball(dim: u32, n: usize) -> Domain {
    Domain::new(DomainKind::RadialBall(dim), Resolution::Radial { nodes: n }).unwrap()
}

/// Independent oracle for the lowest constrained eigenvalue: projected
/// gradient descent on the fluctuation Rayleigh quotient
/// (int |grad phi|^2 - tau int w [phi]^2) / int w [phi]^2,
/// preconditioned by the Green operator, with a backtracking line search.
pub fn rayleigh_sigma1_oracle(sol: &plasma_branch::solver::Solution, iters: usize) -> f64 {
    let domain = sol.domain.clone();
    let n = domain.node_count();
    let w = sol.weight.values().to_vec();
    let q = domain.quad_weights().to_vec();
    let tau = sol.tau;
    let mass = sol.m;
    let quotient = |phi: &[f64]| -> (f64, f64) {
        let f = domain.field_from_values(phi.to_vec()).unwrap();
        let lap = domain.laplacian(&f).unwrap();
        let mut grad2 = 0.0;
        let mut mean = 0.0;
        for i in 0..n {
            grad2 += q[i] * phi[i] * lap.values()[i];
            mean += q[i] * w[i] * phi[i];
        }
        mean /= mass;
        let mut fl2 = 0.0;
        for i in 0..n {
            let d = phi[i] - mean;
            fl2 += q[i] * w[i] * d * d;
        }
        ((grad2 - tau * fl2) / fl2, fl2)
    };
    // start from an asymmetric interior bump
    let mut phi: Vec<f64> = domain
        .positions()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if domain.is_boundary(i) {
                0.0
            } else {
                1.0 + 0.3 * p[0] + 0.17 * p[1] + 0.05 * (7.0 * p[0]).sin()
            }
        })
        .collect();
    let (mut r_cur, _) = quotient(&phi);
    for _ in 0..iters {
        // gradient of the quotient, preconditioned by G
        let f = domain.field_from_values(phi.clone()).unwrap();
        let lap = domain.laplacian(&f).unwrap();
        let mut mean = 0.0;
        for i in 0..n {
            mean += q[i] * w[i] * phi[i];
        }
        mean /= mass;
        let resid: Vec<f64> = (0..n)
            .map(|i| {
                if domain.is_boundary(i) {
                    0.0
                } else {
                    lap.values()[i] - (tau + r_cur) * w[i] * (phi[i] - mean)
                }
            })
            .collect();
        let pre = domain
            .green(&domain.field_from_values(resid).unwrap())
            .unwrap();
        let gmax = pre.max_abs();
        if gmax < 1e-14 {
            break;
        }
        let mut step = 1.0f64;
        let mut improved = false;
        for _ in 0..50 {
            let cand: Vec<f64> = (0..n).map(|i| phi[i] - step * pre.values()[i]).collect();
            let (r_new, fl2) = quotient(&cand);
            if fl2 > 1e-300 && r_new < r_cur - 1e-14 * r_cur.abs() {
                phi = cand;
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
    r_cur
}
