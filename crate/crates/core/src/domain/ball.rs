//! Radially symmetric N-ball backend (1-D grid, exact shell volumes).

use crate::error::{Error, Result};
use crate::linalg::TridiagLdl;

/// Volume of the unit ball in dimension n.
pub fn unit_ball_volume(n: u32) -> f64 {
    // |B_1| = pi^{n/2} / Gamma(n/2 + 1), built up by Gamma(x+1) = x Gamma(x)
    let pi = std::f64::consts::PI;
    let mut g = if n % 2 == 0 { 1.0 } else { pi.sqrt() }; // Gamma(1) or Gamma(1/2)
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    let target = n as f64 / 2.0 + 1.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    pi.powf(n as f64 / 2.0) / g
}

pub struct RadialGrid {
    pub dim: u32,
    /// Radial intervals; node `n` is the boundary.
    pub n: usize,
    pub radius: f64,
    pub h: f64,
    r: Vec<f64>,
    /// Exact shell volumes, length n+1.
    cell: Vec<f64>,
    /// Face areas N |B_1| r_{i+1/2}^{N-1}, i = 0..n-1.
    face: Vec<f64>,
    ldl: TridiagLdl,
}

impl RadialGrid {
    pub fn new(dim: u32, n: usize) -> Result<Self> {
        let b1 = unit_ball_volume(dim);
        let radius = (1.0 / b1).powf(1.0 / dim as f64);
        let h = radius / n as f64;
        let r: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let nd = dim as f64;
        let mut cell = vec![0.0; n + 1];
        cell[0] = b1 * (h / 2.0).powf(nd);
        for i in 1..n {
            cell[i] = b1 * ((r[i] + h / 2.0).powf(nd) - (r[i] - h / 2.0).powf(nd));
        }
        cell[n] = b1 * (radius.powf(nd) - (radius - h / 2.0).powf(nd));
        let face: Vec<f64> = (0..n)
            .map(|i| nd * b1 * (r[i] + h / 2.0).powf(nd - 1.0))
            .collect();

        // quadrature-scaled operator on interior nodes 0..n-1 (symmetric)
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        diag[0] = face[0] / h;
        off[0] = -face[0] / h;
        for i in 1..n {
            diag[i] = (face[i - 1] + face[i]) / h;
            if i + 1 < n {
                off[i] = -face[i] / h;
            }
        }
        let ldl = TridiagLdl::factor(&diag, &off)?;
        Ok(Self {
            dim,
            n,
            radius,
            h,
            r,
            cell,
            face,
            ldl,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n + 1
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        self.r.iter().map(|&r| [r, 0.0]).collect()
    }

    pub fn quad(&self) -> Vec<f64> {
        self.cell.clone()
    }

    pub fn boundary(&self) -> Vec<bool> {
        let mut b = vec![false; self.n + 1];
        b[self.n] = true;
        b
    }

    /// Quadrature-scaled symmetric tridiagonal operator on interior nodes.
    pub(crate) fn operator_matrix(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        diag[0] = self.face[0] / self.h;
        off[0] = -self.face[0] / self.h;
        for i in 1..n {
            diag[i] = (self.face[i - 1] + self.face[i]) / self.h;
            if i + 1 < n {
                off[i] = -self.face[i] / self.h;
            }
        }
        (diag, off)
    }

    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let (n, h) = (self.n, self.h);
        let mut out = vec![0.0; n + 1];
        out[0] = self.face[0] / h * (f[0] - f[1]) / self.cell[0];
        for i in 1..n {
            let flux =
                self.face[i - 1] * (f[i] - f[i - 1]) / h + self.face[i] * (f[i] - f[i + 1]) / h;
            out[i] = flux / self.cell[i];
        }
        out
    }

    pub fn green(&self, source: &[f64]) -> Vec<f64> {
        let rhs: Vec<f64> = (0..self.n).map(|i| source[i] * self.cell[i]).collect();
        let x = self.ldl.solve(&rhs);
        let mut out = vec![0.0; self.n + 1];
        out[..self.n].copy_from_slice(&x);
        out
    }

    pub fn face_energy(&self, f: &[f64]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.n {
            let d = f[i + 1] - f[i];
            e += self.face[i] / self.h * d * d;
        }
        e
    }

    pub fn constrained_solve(
        &self,
        w: &[f64],
        tau: f64,
        rhs: &[f64],
        mass: f64,
    ) -> Result<Vec<f64>> {
        let n = self.n;
        let mut c = nalgebra::DMatrix::zeros(n, n);
        c[(0, 0)] = self.face[0] / self.h;
        if n > 1 {
            c[(0, 1)] = -self.face[0] / self.h;
            c[(1, 0)] = -self.face[0] / self.h;
        }
        for i in 1..n {
            c[(i, i)] = (self.face[i - 1] + self.face[i]) / self.h;
            if i + 1 < n {
                c[(i, i + 1)] = -self.face[i] / self.h;
                c[(i + 1, i)] = -self.face[i] / self.h;
            }
        }
        let d: Vec<f64> = (0..n).map(|i| self.cell[i] * w[i]).collect();
        for i in 0..n {
            c[(i, i)] -= tau * d[i];
            for j in 0..n {
                c[(i, j)] += tau * d[i] * d[j] / mass;
            }
        }
        let b = nalgebra::DVector::from_iterator(n, (0..n).map(|i| self.cell[i] * rhs[i]));
        let x = c.lu().solve(&b).ok_or(Error::SingularLinearization)?;
        let mut out = vec![0.0; n + 1];
        for i in 0..n {
            out[i] = x[i];
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        let pi = std::f64::consts::PI;
        assert!((unit_ball_volume(2) - pi).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * pi / 3.0).abs() < 1e-13);
        assert!((unit_ball_volume(4) - pi * pi / 2.0).abs() < 1e-13);
        assert!((unit_ball_volume(5) - 8.0 * pi * pi / 15.0).abs() < 1e-13);
    }

    #[test]
    fn shell_volumes_partition_the_ball() {
        for n in [2u32, 3, 4] {
            let g = RadialGrid::new(n, 64).unwrap();
            let total: f64 = g.quad().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "N={n}: {total}");
        }
    }
}
