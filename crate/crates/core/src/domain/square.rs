//! Unit square backend: five-point stencil, trapezoid quadrature, banded
//! Cholesky of the (quadrature-scaled) stiffness matrix.

use crate::error::{Error, Result};
use crate::linalg::{pcg, BandedCholesky};

pub struct SquareGrid {
    /// Nodes per direction, including boundary.
    pub n: usize,
    pub h: f64,
    ni: usize,
    chol: BandedCholesky,
}

impl SquareGrid {
    pub fn new(n: usize) -> Result<Self> {
        let h = 1.0 / (n - 1) as f64;
        let ni = n - 2;
        let bw = ni;
        let w = bw + 1;
        let mut data = vec![0.0; ni * ni * w];
        for iy in 1..n - 1 {
            for ix in 1..n - 1 {
                let k = (iy - 1) * ni + (ix - 1);
                data[k * w] = 4.0;
                if ix > 1 {
                    data[k * w + 1] = -1.0;
                }
                if iy > 1 {
                    data[k * w + ni] = -1.0;
                }
            }
        }
        let chol = BandedCholesky::factor(ni * ni, bw, data)?;
        Ok(Self { n, h, ni, chol })
    }

    #[inline]
    fn node(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub fn node_count(&self) -> usize {
        self.n * self.n
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.node_count());
        for iy in 0..self.n {
            for ix in 0..self.n {
                out.push([ix as f64 * self.h, iy as f64 * self.h]);
            }
        }
        out
    }

    pub fn quad(&self) -> Vec<f64> {
        let (n, h) = (self.n, self.h);
        let mut q = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let wx = if ix == 0 || ix == n - 1 { 0.5 } else { 1.0 };
                let wy = if iy == 0 || iy == n - 1 { 0.5 } else { 1.0 };
                q[self.node(ix, iy)] = wx * wy * h * h;
            }
        }
        q
    }

    pub fn boundary(&self) -> Vec<bool> {
        let n = self.n;
        let mut b = vec![false; n * n];
        for iy in 0..n {
            for ix in 0..n {
                if ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1 {
                    b[self.node(ix, iy)] = true;
                }
            }
        }
        b
    }

    /// -Laplace by the five-point stencil; zero on boundary rows.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let (n, h) = (self.n, self.h);
        let h2 = h * h;
        let mut out = vec![0.0; n * n];
        for iy in 1..n - 1 {
            for ix in 1..n - 1 {
                let k = self.node(ix, iy);
                out[k] = (4.0 * f[k] - f[k - 1] - f[k + 1] - f[k - n] - f[k + n]) / h2;
            }
        }
        out
    }

    /// Stencil apply on interior-indexed vectors (implicit zero boundary).
    fn apply_interior(&self, x: &[f64]) -> Vec<f64> {
        let (ni, h) = (self.ni, self.h);
        let h2 = h * h;
        let mut out = vec![0.0; ni * ni];
        for iy in 0..ni {
            for ix in 0..ni {
                let k = iy * ni + ix;
                let mut s = 4.0 * x[k];
                if ix > 0 {
                    s -= x[k - 1];
                }
                if ix + 1 < ni {
                    s -= x[k + 1];
                }
                if iy > 0 {
                    s -= x[k - ni];
                }
                if iy + 1 < ni {
                    s -= x[k + ni];
                }
                out[k] = s / h2;
            }
        }
        out
    }

    fn gather(&self, f: &[f64]) -> Vec<f64> {
        let (n, ni) = (self.n, self.ni);
        let mut out = vec![0.0; ni * ni];
        for iy in 1..n - 1 {
            for ix in 1..n - 1 {
                out[(iy - 1) * ni + (ix - 1)] = f[self.node(ix, iy)];
            }
        }
        out
    }

    fn scatter(&self, x: &[f64]) -> Vec<f64> {
        let (n, ni) = (self.n, self.ni);
        let mut out = vec![0.0; n * n];
        for iy in 1..n - 1 {
            for ix in 1..n - 1 {
                out[self.node(ix, iy)] = x[(iy - 1) * ni + (ix - 1)];
            }
        }
        out
    }

    pub fn green(&self, source: &[f64]) -> Result<Vec<f64>> {
        let h2 = self.h * self.h;
        let rhs: Vec<f64> = self.gather(source).iter().map(|v| v * h2).collect();
        let x = self.chol.solve(&rhs);
        // direct factorization: verify the residual once
        let ax = self.apply_interior(&x);
        let mut rmax = 0.0f64;
        let mut bmax = 0.0f64;
        for i in 0..x.len() {
            rmax = rmax.max((ax[i] - rhs[i] / h2).abs());
            bmax = bmax.max((rhs[i] / h2).abs());
        }
        if bmax > 0.0 && rmax > 1e-9 * bmax {
            return Err(Error::LinearSolve(format!(
                "square Green residual {rmax:.3e} vs scale {bmax:.3e}"
            )));
        }
        Ok(self.scatter(&x))
    }

    pub fn face_energy(&self, f: &[f64]) -> f64 {
        let n = self.n;
        let mut e = 0.0;
        for iy in 0..n {
            for ix in 0..n - 1 {
                let d = f[self.node(ix + 1, iy)] - f[self.node(ix, iy)];
                let w = if iy == 0 || iy == n - 1 { 0.5 } else { 1.0 };
                e += w * d * d;
            }
        }
        for iy in 0..n - 1 {
            for ix in 0..n {
                let d = f[self.node(ix, iy + 1)] - f[self.node(ix, iy)];
                let w = if ix == 0 || ix == n - 1 { 0.5 } else { 1.0 };
                e += w * d * d;
            }
        }
        e
    }

    /// CG solve of (-Laplace - tau w P_w) x = rhs with the plain Green
    /// operator as preconditioner. `mass` = int w dx over the whole domain.
    pub fn constrained_solve(
        &self,
        w_full: &[f64],
        tau: f64,
        rhs_full: &[f64],
        mass: f64,
    ) -> Result<Vec<f64>> {
        let h2 = self.h * self.h;
        let w = self.gather(w_full);
        let rhs = self.gather(rhs_full);
        let qw: Vec<f64> = w.iter().map(|v| v * h2).collect();
        let apply = |x: &[f64]| -> Vec<f64> {
            let mut y = self.apply_interior(x);
            let mean = crate::domain::dot(&qw, x) / mass;
            for i in 0..y.len() {
                y[i] -= tau * w[i] * (x[i] - mean);
            }
            y
        };
        let precond = |r: &[f64]| -> Vec<f64> {
            let scaled: Vec<f64> = r.iter().map(|v| v * h2).collect();
            self.chol.solve(&scaled)
        };
        let mut x = precond(&rhs);
        pcg(apply, precond, &rhs, &mut x, 1e-12, 600)?;
        Ok(self.scatter(&x))
    }
}
