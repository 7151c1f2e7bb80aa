//! Unit-area disk backend.
//!
//! Polar grid with a single pole node, exact finite-volume cell areas and a
//! discrete Fourier decomposition in the angle: the Green operator factors
//! into one symmetric tridiagonal solve per azimuthal wavenumber, which the
//! spectral module also reuses for the per-mode eigenproblems.

use crate::error::{Error, Result};
use crate::linalg::TridiagLdl;

pub struct DiskGrid {
    /// Radial intervals; ring `nr` is the boundary circle.
    pub nr: usize,
    /// Angular nodes per ring (even).
    pub nt: usize,
    pub radius: f64,
    pub h: f64,
    pub dtheta: f64,
    /// Radial node positions 0, h, ..., R.
    r: Vec<f64>,
    /// Exact ring cell areas (pole cell, rings, boundary ring), length nr+1.
    radial_cell: Vec<f64>,
    /// Total face circumferences 2 pi r_{i+1/2}, i = 0..nr-1.
    face: Vec<f64>,
    /// LDL^T factors of the quadrature-scaled mode operators, m = 0..=nt/2.
    mode_ldl: Vec<TridiagLdl>,
    cos_tab: Vec<f64>,
    sin_tab: Vec<f64>,
}

impl DiskGrid {
    pub fn new(nr: usize, nt: usize) -> Result<Self> {
        if nt % 2 != 0 {
            return Err(Error::UnsupportedKind(
                "disk angular resolution must be even".into(),
            ));
        }
        let radius = (1.0 / std::f64::consts::PI).sqrt();
        let h = radius / nr as f64;
        let dtheta = 2.0 * std::f64::consts::PI / nt as f64;
        let r: Vec<f64> = (0..=nr).map(|i| i as f64 * h).collect();
        let pi = std::f64::consts::PI;
        let mut radial_cell = vec![0.0; nr + 1];
        radial_cell[0] = pi * (h / 2.0) * (h / 2.0);
        for i in 1..nr {
            let a = r[i] - h / 2.0;
            let b = r[i] + h / 2.0;
            radial_cell[i] = pi * (b * b - a * a);
        }
        radial_cell[nr] = pi * (radius * radius - (radius - h / 2.0) * (radius - h / 2.0));
        let face: Vec<f64> = (0..nr).map(|i| 2.0 * pi * (r[i] + h / 2.0)).collect();

        let mut cos_tab = vec![0.0; (nt / 2 + 1) * nt];
        let mut sin_tab = vec![0.0; (nt / 2 + 1) * nt];
        for m in 0..=nt / 2 {
            for j in 0..nt {
                let th = m as f64 * j as f64 * dtheta;
                cos_tab[m * nt + j] = th.cos();
                sin_tab[m * nt + j] = th.sin();
            }
        }

        let mut grid = Self {
            nr,
            nt,
            radius,
            h,
            dtheta,
            r,
            radial_cell,
            face,
            mode_ldl: Vec::new(),
            cos_tab,
            sin_tab,
        };
        let mut ldl = Vec::with_capacity(nt / 2 + 1);
        for m in 0..=nt / 2 {
            let (diag, off) = grid.mode_matrix(m);
            ldl.push(TridiagLdl::factor(&diag, &off)?);
        }
        grid.mode_ldl = ldl;
        Ok(grid)
    }

    /// Discrete angular symbol of mode m: (2 - 2 cos(m dtheta)) / dtheta^2.
    pub fn mode_symbol(&self, m: usize) -> f64 {
        let x = m as f64 * self.dtheta;
        (2.0 - 2.0 * x.cos()) / (self.dtheta * self.dtheta)
    }

    /// Interior radial node count of mode m (mode 0 includes the pole).
    pub fn mode_len(&self, m: usize) -> usize {
        if m == 0 {
            self.nr
        } else {
            self.nr - 1
        }
    }

    /// Quadrature-scaled symmetric tridiagonal operator of mode m on its
    /// interior radial nodes.
    fn mode_matrix(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        let (nr, h) = (self.nr, self.h);
        let mu = self.mode_symbol(m);
        if m == 0 {
            // radial indices 0..nr-1
            let mut diag = vec![0.0; nr];
            let mut off = vec![0.0; nr - 1];
            diag[0] = self.face[0] / h;
            off[0] = -self.face[0] / h;
            for i in 1..nr {
                diag[i] = (self.face[i - 1] + self.face[i]) / h;
                if i + 1 < nr {
                    off[i] = -self.face[i] / h;
                }
            }
            (diag, off)
        } else {
            // radial indices 1..nr-1; pole value is zero for m >= 1
            let n = nr - 1;
            let mut diag = vec![0.0; n];
            let mut off = vec![0.0; n.saturating_sub(1)];
            for k in 0..n {
                let i = k + 1;
                diag[k] = (self.face[i - 1] + self.face[i]) / h
                    + mu * self.radial_cell[i] / (self.r[i] * self.r[i]);
                if k + 1 < n {
                    off[k] = -self.face[i] / h;
                }
            }
            (diag, off)
        }
    }

    /// Quadrature-scaled symmetric tridiagonal operator of the
    /// axisymmetric sector, on its interior radial nodes.
    pub(crate) fn mode0_matrix(&self) -> (Vec<f64>, Vec<f64>) {
        self.mode_matrix(0)
    }

    /// Solve the mode-m radial Dirichlet problem: returns G_m[rhs] where rhs
    /// lives on the mode's interior radial nodes.
    pub fn mode_green(&self, m: usize, rhs: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = rhs
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let i = if m == 0 { k } else { k + 1 };
                v * self.radial_cell[i]
            })
            .collect();
        self.mode_ldl[m].solve(&scaled)
    }

    /// Cell measure vector restricted to the interior nodes of mode m.
    pub fn mode_cells(&self, m: usize) -> Vec<f64> {
        if m == 0 {
            self.radial_cell[..self.nr].to_vec()
        } else {
            self.radial_cell[1..self.nr].to_vec()
        }
    }

    #[inline]
    pub fn node(&self, ring: usize, j: usize) -> usize {
        debug_assert!(ring >= 1);
        1 + (ring - 1) * self.nt + j
    }

    pub fn node_count(&self) -> usize {
        1 + self.nr * self.nt
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn radial_cells(&self) -> &[f64] {
        &self.radial_cell
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.node_count());
        out.push([0.0, 0.0]);
        for i in 1..=self.nr {
            for j in 0..self.nt {
                let th = j as f64 * self.dtheta;
                out.push([self.r[i] * th.cos(), self.r[i] * th.sin()]);
            }
        }
        out
    }

    pub fn quad(&self) -> Vec<f64> {
        let mut q = vec![0.0; self.node_count()];
        q[0] = self.radial_cell[0];
        for i in 1..=self.nr {
            let per = self.radial_cell[i] / self.nt as f64;
            for j in 0..self.nt {
                q[self.node(i, j)] = per;
            }
        }
        q
    }

    pub fn boundary(&self) -> Vec<bool> {
        let mut b = vec![false; self.node_count()];
        for j in 0..self.nt {
            b[self.node(self.nr, j)] = true;
        }
        b
    }

    /// -Laplace by the conservative polar stencil; pole handled by the mean
    /// over the first ring. Output zero at boundary nodes.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let (nr, nt, h, dth) = (self.nr, self.nt, self.h, self.dtheta);
        let mut out = vec![0.0; self.node_count()];
        let ring_mean: f64 = (0..nt).map(|j| f[self.node(1, j)]).sum::<f64>() / nt as f64;
        out[0] = 4.0 / (h * h) * (f[0] - ring_mean);
        for i in 1..nr {
            let q_cell = self.radial_cell[i] * dth / (2.0 * std::f64::consts::PI);
            let face_in = self.face[i - 1] * dth / (2.0 * std::f64::consts::PI);
            let face_out = self.face[i] * dth / (2.0 * std::f64::consts::PI);
            let ang = h / (self.r[i] * dth);
            for j in 0..nt {
                let k = self.node(i, j);
                let inner = if i == 1 { f[0] } else { f[self.node(i - 1, j)] };
                let outer = f[self.node(i + 1, j)];
                let left = f[self.node(i, (j + nt - 1) % nt)];
                let right = f[self.node(i, (j + 1) % nt)];
                let radial = face_in * (f[k] - inner) / h + face_out * (f[k] - outer) / h;
                let angular = ang * (2.0 * f[k] - left - right);
                out[k] = (radial + angular) / q_cell;
            }
        }
        out
    }

    /// Angular DFT amplitudes of one ring: (a_m, b_m) with
    /// u_j = a_0 + sum_{1<=m<nt/2} (a_m cos + b_m sin)(m theta_j) + a_{nt/2} cos(...).
    fn ring_amplitudes(&self, vals: &[f64], m: usize) -> (f64, f64) {
        let nt = self.nt;
        let mut a = 0.0;
        let mut b = 0.0;
        for j in 0..nt {
            a += vals[j] * self.cos_tab[m * nt + j];
            b += vals[j] * self.sin_tab[m * nt + j];
        }
        let norm = if m == 0 || m == nt / 2 { 1.0 } else { 2.0 };
        (a * norm / nt as f64, b * norm / nt as f64)
    }

    pub fn green(&self, source: &[f64]) -> Result<Vec<f64>> {
        let (nr, nt) = (self.nr, self.nt);
        let mut out = vec![0.0; self.node_count()];
        let mut ring = vec![0.0; nt];
        // per-mode radial rhs profiles (cos and sin parts)
        let half = nt / 2;
        let mut rhs0 = vec![0.0; nr];
        rhs0[0] = source[0];
        let mut rhs_cos: Vec<Vec<f64>> = (0..half).map(|_| vec![0.0; nr - 1]).collect();
        let mut rhs_sin: Vec<Vec<f64>> = (0..half).map(|_| vec![0.0; nr - 1]).collect();
        for i in 1..nr {
            for j in 0..nt {
                ring[j] = source[self.node(i, j)];
            }
            for m in 0..=half {
                let (a, b) = self.ring_amplitudes(&ring, m);
                if m == 0 {
                    rhs0[i] = a;
                } else {
                    rhs_cos[m - 1][i - 1] = a;
                    if m < half {
                        rhs_sin[m - 1][i - 1] = b;
                    }
                }
            }
        }
        // solve and accumulate
        let sol0 = self.mode_green(0, &rhs0);
        out[0] = sol0[0];
        for i in 1..nr {
            for j in 0..nt {
                out[self.node(i, j)] = sol0[i];
            }
        }
        for m in 1..=half {
            let sc = self.mode_green(m, &rhs_cos[m - 1]);
            let ss = if m < half {
                Some(self.mode_green(m, &rhs_sin[m - 1]))
            } else {
                None
            };
            for i in 1..nr {
                let k = i - 1;
                for j in 0..nt {
                    let mut v = sc[k] * self.cos_tab[m * nt + j];
                    if let Some(ss) = &ss {
                        v += ss[k] * self.sin_tab[m * nt + j];
                    }
                    out[self.node(i, j)] += v;
                }
            }
        }
        Ok(out)
    }

    pub fn face_energy(&self, f: &[f64]) -> f64 {
        let (nr, nt, h, dth) = (self.nr, self.nt, self.h, self.dtheta);
        let mut e = 0.0;
        // pole - first ring
        for j in 0..nt {
            let d = f[self.node(1, j)] - f[0];
            e += (dth / 2.0) * d * d;
        }
        // radial faces
        for i in 1..nr {
            let coef = (self.r[i] + h / 2.0) * dth / h;
            for j in 0..nt {
                let d = f[self.node(i + 1, j)] - f[self.node(i, j)];
                e += coef * d * d;
            }
        }
        // angular faces (interior rings; boundary-ring faces use the half cell)
        for i in 1..=nr {
            let coef = if i == nr {
                (h / 2.0) / (self.r[i] * dth)
            } else {
                h / (self.r[i] * dth)
            };
            for j in 0..nt {
                let d = f[self.node(i, (j + 1) % nt)] - f[self.node(i, j)];
                e += coef * d * d;
            }
        }
        e
    }

    // ---- axisymmetric helpers ------------------------------------------------

    pub fn is_radial(&self, f: &[f64], tol: f64) -> bool {
        for i in 1..=self.nr {
            let v0 = f[self.node(i, 0)];
            for j in 1..self.nt {
                if (f[self.node(i, j)] - v0).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Radial profile (length nr+1) of an axisymmetric field, averaging
    /// over each ring.
    pub fn to_radial(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nr + 1];
        out[0] = f[0];
        for i in 1..=self.nr {
            let s: f64 = (0..self.nt).map(|j| f[self.node(i, j)]).sum();
            out[i] = s / self.nt as f64;
        }
        out
    }

    pub fn from_radial(&self, prof: &[f64]) -> Vec<f64> {
        debug_assert_eq!(prof.len(), self.nr + 1);
        let mut out = vec![0.0; self.node_count()];
        out[0] = prof[0];
        for i in 1..=self.nr {
            for j in 0..self.nt {
                out[self.node(i, j)] = prof[i];
            }
        }
        out
    }

    pub fn radial_integrate(&self, prof: &[f64]) -> f64 {
        prof.iter().zip(&self.radial_cell).map(|(f, q)| f * q).sum()
    }

    /// Mode-0 Green solve on a full radial profile (boundary entry ignored,
    /// result has zero boundary value).
    pub fn green_radial(&self, rhs: &[f64]) -> Vec<f64> {
        let interior = &rhs[..self.nr];
        let sol = self.mode_green(0, interior);
        let mut out = vec![0.0; self.nr + 1];
        out[..self.nr].copy_from_slice(&sol);
        out
    }

    /// Radial -Laplace on a full profile (zero at the boundary entry).
    pub fn laplacian_radial(&self, prof: &[f64]) -> Vec<f64> {
        let (nr, h) = (self.nr, self.h);
        let mut out = vec![0.0; nr + 1];
        out[0] = self.face[0] / h * (prof[0] - prof[1]) / self.radial_cell[0];
        for i in 1..nr {
            let radial = self.face[i - 1] * (prof[i] - prof[i - 1]) / h
                + self.face[i] * (prof[i] - prof[i + 1]) / h;
            out[i] = radial / self.radial_cell[i];
        }
        out
    }

    /// Dense solve of the axisymmetric constrained system
    /// (-Laplace - tau w (. - <.>_w)) x = rhs on radial profiles.
    /// `mass` is the full-domain weight mass int w dx.
    pub fn constrained_solve_radial(
        &self,
        w: &[f64],
        tau: f64,
        rhs: &[f64],
        mass: f64,
    ) -> Result<Vec<f64>> {
        let n = self.nr; // interior radial nodes 0..nr-1
        let (diag, off) = self.mode_matrix(0);
        let mut c = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            c[(i, i)] = diag[i];
            if i + 1 < n {
                c[(i, i + 1)] = off[i];
                c[(i + 1, i)] = off[i];
            }
        }
        let d: Vec<f64> = (0..n).map(|i| self.radial_cell[i] * w[i]).collect();
        for i in 0..n {
            c[(i, i)] -= tau * d[i];
            for j in 0..n {
                c[(i, j)] += tau * d[i] * d[j] / mass;
            }
        }
        let b = nalgebra::DVector::from_iterator(n, (0..n).map(|i| self.radial_cell[i] * rhs[i]));
        let lu = c.lu();
        let x = lu.solve(&b).ok_or(Error::SingularLinearization)?;
        let mut out = vec![0.0; self.nr + 1];
        for i in 0..n {
            out[i] = x[i];
        }
        Ok(out)
    }

    pub fn constrained_solve(
        &self,
        w_full: &[f64],
        tau: f64,
        rhs_full: &[f64],
        mass: f64,
    ) -> Result<Vec<f64>> {
        let scale = rhs_full.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !self.is_radial(rhs_full, 1e-9 * scale.max(1.0)) {
            return Err(Error::Unsupported(
                "constrained solves on the disk are axisymmetric; project the state first",
            ));
        }
        let w = self.to_radial(w_full);
        let rhs = self.to_radial(rhs_full);
        let sol = self.constrained_solve_radial(&w, tau, &rhs, mass)?;
        Ok(self.from_radial(&sol))
    }
}
