//! Eigenvalue solvers.
//!
//! Everything reduces to subspace iteration on a compact operator built
//! from Green solves: on the weighted mean-zero space the map
//! f -> P G[w f] is self-adjoint in the w-weighted inner product and its
//! largest eigenvalues 1/(tau + sigma_k) give the lowest constrained
//! eigenvalues. The disk splits into independent azimuthal sectors first;
//! modes m >= 1 carry no mean projection.

use super::Spectrum;
use crate::domain::{Backend, Domain, Field};
use crate::error::{Error, Result};
use crate::linalg::{seeded_vector, subspace_iterate, SubspaceOptions};
use crate::solver::Solution;

#[derive(Clone, Copy, Debug)]
pub struct EigOptions {
    /// Azimuthal cutoff on the disk.
    pub max_mode: usize,
    /// Relative residual demanded of each eigenpair.
    pub residual_tol: f64,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            max_mode: 8,
            residual_tol: 1e-8,
        }
    }
}

/// Lowest k constrained eigenpairs of the linearized operator at `sol`.
pub fn constrained_eigs(domain: &Domain, sol: &Solution, k: usize) -> Result<Spectrum> {
    constrained_eigs_opts(domain, sol, k, &EigOptions::default(), None)
}

/// As `constrained_eigs`, with explicit options and an optional warm start
/// from a previously computed spectrum at a nearby state.
pub fn constrained_eigs_opts(
    domain: &Domain,
    sol: &Solution,
    k: usize,
    opts: &EigOptions,
    warm: Option<&Spectrum>,
) -> Result<Spectrum> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let (nu1, _) = standard_eig_nu1_full(domain, sol)?;
    let (mut pairs, azim) = match domain.backend() {
        Backend::Square(_) => (square_pairs(domain, sol, k, opts, warm)?, false),
        Backend::Disk(_) => (disk_pairs(domain, sol, k, opts)?, true),
        Backend::Ball(_) => {
            return Err(Error::Unsupported(
                "constrained spectra are implemented on the square and disk backends",
            ))
        }
    };
    pairs.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
    pairs.truncate(k);
    let mut sigmas = Vec::with_capacity(k);
    let mut phis = Vec::with_capacity(k);
    let mut means = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut modes = Vec::with_capacity(k);
    for pr in pairs {
        sigmas.push(pr.sigma);
        means.push(pr.mean);
        residuals.push(pr.residual);
        phis.push(pr.phi);
        modes.push(pr.mode);
    }
    for (i, r) in residuals.iter().enumerate() {
        if *r > opts.residual_tol {
            return Err(Error::EigsNoConvergence(format!(
                "pair {i} residual {r:.3e} above {:.1e}",
                opts.residual_tol
            )));
        }
    }
    Ok(Spectrum {
        sigmas,
        phis,
        means,
        azimuthal: if azim { Some(modes) } else { None },
        residuals,
        nu1,
        m: sol.m,
    })
}

struct Pair {
    sigma: f64,
    phi: Field,
    mean: f64,
    residual: f64,
    mode: usize,
}

/// Normalize to <[phi]^2> = 1 and fix the sign (<phi> >= 0; when the mean
/// vanishes, the largest-magnitude node is made positive).
fn normalize_pair(domain: &Domain, sol: &Solution, phi: &mut [f64]) -> f64 {
    let w = sol.weight.values();
    let mean0 = domain.wdot(w, phi, &vec![1.0; phi.len()]) / sol.m;
    let fluct: Vec<f64> = phi.iter().map(|v| v - mean0).collect();
    let norm = (domain.wdot(w, &fluct, &fluct) / sol.m).sqrt();
    let scale = 1.0 / norm;
    phi.iter_mut().for_each(|v| *v *= scale);
    let mean = mean0 * scale;
    let flip = if mean.abs() > 1e-10 {
        mean < 0.0
    } else {
        let (mut best, mut val) = (0usize, 0.0f64);
        for (i, v) in phi.iter().enumerate() {
            if v.abs() > val {
                val = v.abs();
                best = i;
            }
        }
        phi[best] < 0.0
    };
    if flip {
        phi.iter_mut().for_each(|v| *v = -*v);
        -mean
    } else {
        mean
    }
}

/// Relative max-norm residual of -Laplace phi = (tau + sigma) w [phi].
fn pair_residual(domain: &Domain, sol: &Solution, sigma: f64, phi: &[f64]) -> f64 {
    let lap = domain.laplacian_raw(phi);
    let w = sol.weight.values();
    let mean = domain.wdot(w, phi, &vec![1.0; phi.len()]) / sol.m;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..phi.len() {
        if !domain.is_boundary(i) {
            let rhs = (sol.tau + sigma) * w[i] * (phi[i] - mean);
            num = num.max((lap[i] - rhs).abs());
            den = den.max(rhs.abs());
        }
    }
    num / den.max(1e-300)
}

fn square_pairs(
    domain: &Domain,
    sol: &Solution,
    k: usize,
    opts: &EigOptions,
    warm: Option<&Spectrum>,
) -> Result<Vec<Pair>> {
    let _ = opts;
    let g = domain.as_square().expect("square backend");
    let n = domain.node_count();
    let w = sol.weight.values().to_vec();
    let q = domain.quad_weights().to_vec();
    let mass = sol.m;
    let tau = sol.tau;
    // interior weight measure; the full mass keeps its boundary cells
    let sw: Vec<f64> = (0..n)
        .map(|i| {
            if domain.is_boundary(i) {
                0.0
            } else {
                q[i] * w[i]
            }
        })
        .collect();
    // K v = G[w (v - <v>)] is self-adjoint in the mass-row inner product
    // <u, v> = sum sw u v - (sum sw u)(sum sw v)/mass, which is positive
    // definite on interior vectors.
    let apply = |v: &[f64]| -> Vec<f64> {
        let mean = crate::domain::dot(&sw, v) / mass;
        let src: Vec<f64> = (0..n)
            .map(|i| {
                if domain.is_boundary(i) {
                    0.0
                } else {
                    w[i] * (v[i] - mean)
                }
            })
            .collect();
        g.green(&src).expect("cached factorization")
    };
    let sdot = |a: &[f64], b: &[f64]| -> f64 {
        let mut sab = 0.0;
        let mut sa = 0.0;
        let mut sb = 0.0;
        for i in 0..n {
            sab += sw[i] * a[i] * b[i];
            sa += sw[i] * a[i];
            sb += sw[i] * b[i];
        }
        sab - sa * sb / mass
    };
    let block_size = (k + 3).min(n / 2);
    let mut block: Vec<Vec<f64>> = Vec::with_capacity(block_size);
    if let Some(spec) = warm {
        for phi in spec.phis.iter().take(block_size) {
            block.push(phi.values().to_vec());
        }
    }
    let mut seed = 0x5eed_0001u64;
    while block.len() < block_size {
        let mut v = seeded_vector(n, seed);
        seed += 1;
        for (i, x) in v.iter_mut().enumerate() {
            if domain.is_boundary(i) {
                *x = 0.0;
            }
        }
        block.push(v);
    }
    let sub_opts = SubspaceOptions {
        max_iter: 1500,
        tol: 1e-13,
        resid_tol: 1e-10,
    };
    let (thetas, vecs) = subspace_iterate(apply, sdot, block, k, &sub_opts)?;
    let mut out = Vec::with_capacity(k);
    for (theta, mut phi) in thetas.iter().zip(vecs) {
        if *theta <= 0.0 {
            return Err(Error::EigsNoConvergence(format!(
                "non-positive theta {theta:.3e}"
            )));
        }
        let sigma = 1.0 / theta - tau;
        let mean = normalize_pair(domain, sol, &mut phi);
        let residual = pair_residual(domain, sol, sigma, &phi);
        out.push(Pair {
            sigma,
            phi: domain.field_from_values(phi)?,
            mean,
            residual,
            mode: 0,
        });
    }
    Ok(out)
}

/// Eigenpairs of one azimuthal sector of the disk: radial profiles phi(r)
/// paired with cos/sin(m theta). Returns up to k lowest pairs of the sector
/// as (sigma, radial profile).
pub fn disk_mode_eigs(
    domain: &Domain,
    sol: &Solution,
    mode: usize,
    k: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let g = domain
        .as_disk()
        .ok_or(Error::Unsupported("disk backend required"))?;
    let tau = sol.tau;
    let w_rad = g.to_radial(sol.weight.values());
    let cells = g.mode_cells(mode);
    let nloc = g.mode_len(mode);
    let k = k.min(nloc.saturating_sub(2)).max(1);
    // weight restricted to the sector's interior radial nodes
    let w_loc: Vec<f64> = (0..nloc)
        .map(|i| if mode == 0 { w_rad[i] } else { w_rad[i + 1] })
        .collect();
    let sw: Vec<f64> = (0..nloc).map(|i| cells[i] * w_loc[i]).collect();
    let mass = sol.m;
    // mode 0 carries the mean projection inside the mass-row inner product;
    // modes m >= 1 have vanishing weighted means identically.
    let apply = |v: &[f64]| -> Vec<f64> {
        let mean = if mode == 0 {
            crate::domain::dot(&sw, v) / mass
        } else {
            0.0
        };
        let src: Vec<f64> = (0..nloc).map(|i| w_loc[i] * (v[i] - mean)).collect();
        g.mode_green(mode, &src)
    };
    let sdot = |a: &[f64], b: &[f64]| -> f64 {
        let mut sab = 0.0;
        let mut sa = 0.0;
        let mut sb = 0.0;
        for i in 0..nloc {
            sab += sw[i] * a[i] * b[i];
            sa += sw[i] * a[i];
            sb += sw[i] * b[i];
        }
        if mode == 0 {
            sab - sa * sb / mass
        } else {
            sab
        }
    };
    let block_size = (k + 3).min(nloc.max(1));
    let mut block = Vec::with_capacity(block_size);
    let mut seed = 0x5eed_1000u64 + mode as u64;
    while block.len() < block_size {
        block.push(seeded_vector(nloc, seed));
        seed += 0x101;
    }
    let sub_opts = SubspaceOptions {
        max_iter: 4000,
        tol: 1e-14,
        resid_tol: 1e-11,
    };
    let (thetas, vecs) = subspace_iterate(apply, sdot, block, k, &sub_opts)?;
    let mut out = Vec::with_capacity(k);
    for (theta, phi) in thetas.iter().zip(vecs) {
        if *theta <= 0.0 {
            continue;
        }
        let sigma = 1.0 / theta - tau;
        out.push((sigma, phi));
    }
    Ok(out)
}

fn disk_pairs(domain: &Domain, sol: &Solution, k: usize, opts: &EigOptions) -> Result<Vec<Pair>> {
    let g = domain.as_disk().expect("disk backend");
    let modes: Vec<usize> = (0..=opts.max_mode.min(g.nt / 2)).collect();
    let per_mode: Vec<Result<Vec<(f64, Vec<f64>)>>> =
        crate::par::map_collect(&modes, |&m| disk_mode_eigs(domain, sol, m, k));
    let mut out = Vec::new();
    for (m, res) in modes.iter().zip(per_mode) {
        let pairs = res?;
        for (sigma, prof) in pairs {
            // expand to the 2-D grid; m >= 1 eigenvalues are double (cos, sin)
            let copies: &[bool] = if *m == 0 || *m == g.nt / 2 {
                &[true]
            } else {
                &[true, false]
            };
            for &use_cos in copies {
                let mut vals = vec![0.0; domain.node_count()];
                if *m == 0 {
                    vals[0] = prof[0];
                    for i in 1..g.nr {
                        for j in 0..g.nt {
                            vals[g.node(i, j)] = prof[i];
                        }
                    }
                } else {
                    for i in 1..g.nr {
                        for j in 0..g.nt {
                            let th = *m as f64 * j as f64 * g.dtheta;
                            let ang = if use_cos { th.cos() } else { th.sin() };
                            vals[g.node(i, j)] = prof[i - 1] * ang;
                        }
                    }
                }
                let mean = normalize_pair(domain, sol, &mut vals);
                let residual = pair_residual(domain, sol, sigma, &vals);
                out.push(Pair {
                    sigma,
                    phi: domain.field_from_values(vals)?,
                    mean,
                    residual,
                    mode: *m,
                });
            }
        }
    }
    Ok(out)
}

/// Smallest eigenvalue nu_1 of the standard weighted problem
/// -Laplace w = (tau + nu) rho^{1/q} w, with its (constant sign)
/// eigenfunction.
pub fn standard_eig_nu1_full(domain: &Domain, sol: &Solution) -> Result<(f64, Field)> {
    let tau = sol.tau;
    match domain.backend() {
        Backend::Square(g) => {
            let n = domain.node_count();
            let w = sol.weight.values();
            let q = domain.quad_weights();
            let sw: Vec<f64> = (0..n).map(|i| q[i] * w[i]).collect();
            let apply = |v: &[f64]| -> Vec<f64> {
                let src: Vec<f64> = (0..n)
                    .map(|i| {
                        if domain.is_boundary(i) {
                            0.0
                        } else {
                            w[i] * v[i]
                        }
                    })
                    .collect();
                g.green(&src).expect("cached factorization")
            };
            let sdot = |a: &[f64], b: &[f64]| -> f64 {
                a.iter().zip(b).zip(&sw).map(|((x, y), s)| x * y * s).sum()
            };
            let mut block = vec![vec![1.0; n], seeded_vector(n, 0xBEEF)];
            for v in &mut block {
                for i in 0..n {
                    if domain.is_boundary(i) {
                        v[i] = 0.0;
                    }
                }
            }
            let (thetas, vecs) =
                subspace_iterate(apply, sdot, block, 1, &SubspaceOptions::default())?;
            let nu = 1.0 / thetas[0] - tau;
            let mut ef = vecs.into_iter().next().unwrap();
            fix_sign(&mut ef);
            Ok((nu, domain.field_from_values(ef)?))
        }
        Backend::Disk(g) => {
            let w_rad = g.to_radial(sol.weight.values());
            let cells = g.mode_cells(0);
            let nloc = g.mode_len(0);
            let sw: Vec<f64> = (0..nloc).map(|i| cells[i] * w_rad[i]).collect();
            let apply = |v: &[f64]| -> Vec<f64> {
                let src: Vec<f64> = (0..nloc).map(|i| w_rad[i] * v[i]).collect();
                g.mode_green(0, &src)
            };
            let sdot = |a: &[f64], b: &[f64]| -> f64 {
                a.iter().zip(b).zip(&sw).map(|((x, y), s)| x * y * s).sum()
            };
            let block = vec![vec![1.0; nloc], seeded_vector(nloc, 0xBEEF)];
            let (thetas, vecs) =
                subspace_iterate(apply, sdot, block, 1, &SubspaceOptions::default())?;
            let nu = 1.0 / thetas[0] - tau;
            let mut prof = vecs.into_iter().next().unwrap();
            fix_sign(&mut prof);
            let mut full = vec![0.0; domain.node_count()];
            full[0] = prof[0];
            for i in 1..g.nr {
                for j in 0..g.nt {
                    full[g.node(i, j)] = prof[i];
                }
            }
            Ok((nu, domain.field_from_values(full)?))
        }
        Backend::Ball(_) => Err(Error::Unsupported(
            "standard weighted eigenvalue is implemented on the square and disk backends",
        )),
    }
}

/// Smallest standard weighted eigenvalue nu_1.
pub fn standard_eig_nu1(domain: &Domain, sol: &Solution) -> Result<f64> {
    standard_eig_nu1_full(domain, sol).map(|(nu, _)| nu)
}

fn fix_sign(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
