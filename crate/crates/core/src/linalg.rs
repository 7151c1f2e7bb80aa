//! Small dense/banded/tridiagonal kernels shared by the grid backends.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix, factored once as LDL^T and reused for solves.
#[derive(Debug, Clone)]
pub struct TridiagLdl {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl TridiagLdl {
    /// Factor the symmetric tridiagonal matrix with diagonal `diag` and
    /// sub/super-diagonal `off`. Requires positive definiteness.
    pub fn factor(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert_eq!(off.len(), n.saturating_sub(1));
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut prev = 0.0f64;
        let mut prev_l = 0.0f64;
        for i in 0..n {
            let mut di = diag[i];
            if i > 0 {
                di -= prev_l * prev_l * prev;
            }
            if di <= 0.0 || !di.is_finite() {
                return Err(Error::LinearSolve(format!(
                    "LDL^T pivot {di:.3e} at row {i}: matrix not positive definite"
                )));
            }
            d[i] = di;
            if i + 1 < n {
                l[i] = off[i] / di;
                prev_l = l[i];
            }
            prev = di;
        }
        Ok(Self { d, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
        x
    }
}

/// Symmetric banded matrix in lower storage, factored by Cholesky.
///
/// Row i keeps entries A[i, i-k] for k = 0..=bw in `data[i*(bw+1) + k]`.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(n: usize, bw: usize, mut data: Vec<f64>) -> Result<Self> {
        assert_eq!(data.len(), n * (bw + 1));
        let w = bw + 1;
        for j in 0..n {
            let mut s = data[j * w];
            let kmin = j.saturating_sub(bw);
            for k in kmin..j {
                let l = data[j * w + (j - k)];
                s -= l * l;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::LinearSolve(format!(
                    "banded Cholesky pivot {s:.3e} at row {j}"
                )));
            }
            let dj = s.sqrt();
            data[j * w] = dj;
            let imax = (j + bw).min(n - 1);
            for i in (j + 1)..=imax {
                let mut s = data[i * w + (i - j)];
                let kmin = i.saturating_sub(bw).max(j.saturating_sub(bw));
                for k in kmin..j {
                    if i - k <= bw && j - k <= bw {
                        s -= data[i * w + (i - k)] * data[j * w + (j - k)];
                    }
                }
                data[i * w + (i - j)] = s / dj;
            }
        }
        Ok(Self { n, bw, data })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut x = b.to_vec();
        // L y = b
        for i in 0..n {
            let kmin = i.saturating_sub(bw);
            let mut s = x[i];
            for k in kmin..i {
                s -= self.data[i * w + (i - k)] * x[k];
            }
            x[i] = s / self.data[i * w];
        }
        // L^T x = y, column sweep
        for i in (0..n).rev() {
            x[i] /= self.data[i * w];
            let xi = x[i];
            let kmin = i.saturating_sub(bw);
            for k in kmin..i {
                x[k] -= self.data[i * w + (i - k)] * xi;
            }
        }
        x
    }
}

/// Preconditioned conjugate gradients for a symmetric positive definite
/// operator given as a closure. Returns the iteration count.
pub fn pcg<A, M>(
    apply: A,
    precond: M,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<usize>
where
    A: Fn(&[f64]) -> Vec<f64>,
    M: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let ax = apply(x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 0..max_iter {
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= rel_tol * bnorm {
            return Ok(it);
        }
        let ap = apply(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::LinearSolve(format!(
                "CG: operator not positive definite (p^T A p = {pap:.3e})"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        z = precond(&r);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rnorm <= rel_tol * bnorm * 10.0 {
        return Ok(max_iter);
    }
    Err(Error::LinearSolve(format!(
        "CG stalled at relative residual {:.3e}",
        rnorm / bnorm
    )))
}

/// Eigenvalues/vectors of a small dense symmetric matrix, descending order.
pub fn sym_eig_desc(h: &nalgebra::DMatrix<f64>) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let se = nalgebra::SymmetricEigen::new(h.clone());
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let k = idx.len();
    let mut vals = Vec::with_capacity(k);
    let mut vecs = nalgebra::DMatrix::zeros(se.eigenvectors.nrows(), k);
    for (col, &i) in idx.iter().enumerate() {
        vals.push(se.eigenvalues[i]);
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Block subspace iteration with Rayleigh-Ritz for a compact self-adjoint
/// operator. `apply` maps a vector to M v; `sdot` is the inner product in
/// which M is self-adjoint. Converges to the `k` largest eigenvalues.
///
/// Returns (theta, vectors) with theta descending.
pub struct SubspaceOptions {
    pub max_iter: usize,
    /// Relative stagnation threshold on the Ritz values.
    pub tol: f64,
    /// Relative residual ||M v - theta v|| / theta demanded of the leading
    /// k Ritz pairs before stopping (measured in the iteration's inner
    /// product); Ritz values converge quadratically, vectors only linearly.
    pub resid_tol: f64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        Self {
            max_iter: 800,
            tol: 1e-13,
            resid_tol: 1e-10,
        }
    }
}

pub fn subspace_iterate<A, S>(
    apply: A,
    sdot: S,
    mut block: Vec<Vec<f64>>,
    k: usize,
    opts: &SubspaceOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)>
where
    A: Fn(&[f64]) -> Vec<f64>,
    S: Fn(&[f64], &[f64]) -> f64,
{
    let m = block.len();
    assert!(m >= k);
    s_orthonormalize(&mut block, &sdot)?;
    let mut theta_prev = vec![f64::INFINITY; k];
    let mut worst_resid = f64::INFINITY;
    for it in 0..opts.max_iter {
        let z: Vec<Vec<f64>> = block.iter().map(|v| apply(v)).collect();
        // Rayleigh-Ritz on the current block: H = V^T S (M V)
        let mut h = nalgebra::DMatrix::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let v = sdot(&block[a], &z[b]);
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        let (theta, u) = sym_eig_desc(&h);
        let n = block[0].len();
        let combine = |src: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for row in 0..m {
                let c = u[(row, col)];
                if c != 0.0 {
                    for (x, s) in out.iter_mut().zip(&src[row]) {
                        *x += c * s;
                    }
                }
            }
            out
        };
        // residuals of the leading Ritz pairs: M(Vu) - theta (Vu)
        worst_resid = 0.0;
        for col in 0..k {
            let mv = combine(&z, col);
            let v = combine(&block, col);
            let mut d = mv;
            for (x, vi) in d.iter_mut().zip(&v) {
                *x -= theta[col] * vi;
            }
            let r = sdot(&d, &d).sqrt() / theta[col].abs().max(1e-300);
            worst_resid = worst_resid.max(r);
        }
        // Rotate the iterated block into the Ritz basis.
        let next: Vec<Vec<f64>> = (0..m).map(|col| combine(&z, col)).collect();
        block = next;
        s_orthonormalize(&mut block, &sdot)?;
        let stagnant = theta[..k]
            .iter()
            .zip(&theta_prev)
            .all(|(t, tp)| (t - tp).abs() <= opts.tol * t.abs().max(1e-300));
        theta_prev.copy_from_slice(&theta[..k]);
        if stagnant && worst_resid <= opts.resid_tol && it > 2 {
            block.truncate(k);
            return Ok((theta_prev, block));
        }
    }
    Err(Error::EigsNoConvergence(format!(
        "subspace iteration: {} iterations, theta={:?}, resid={:.3e}",
        opts.max_iter, theta_prev, worst_resid
    )))
}

fn s_orthonormalize<S>(block: &mut [Vec<f64>], sdot: &S) -> Result<()>
where
    S: Fn(&[f64], &[f64]) -> f64,
{
    for i in 0..block.len() {
        for _sweep in 0..2 {
            for j in 0..i {
                let (head, tail) = block.split_at_mut(i);
                let c = sdot(&head[j], &tail[0]);
                for (x, p) in tail[0].iter_mut().zip(head[j].iter()) {
                    *x -= c * p;
                }
            }
        }
        let nrm = sdot(&block[i], &block[i]).sqrt();
        if nrm <= 1e-300 || !nrm.is_finite() {
            return Err(Error::EigsNoConvergence(
                "orthonormalization produced a null vector".into(),
            ));
        }
        block[i].iter_mut().for_each(|x| *x /= nrm);
    }
    Ok(())
}

/// Deterministic pseudo-random fill in [-1, 1] (splitmix64), used to seed
/// iteration blocks reproducibly.
pub fn seeded_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_add(0x9E3779B97F4A7C15);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        out.push((z as f64 / u64::MAX as f64) * 2.0 - 1.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_solves_spd_system() {
        let diag = vec![2.0, 2.0, 2.0, 2.0];
        let off = vec![-1.0, -1.0, -1.0];
        let ldl = TridiagLdl::factor(&diag, &off).unwrap();
        let b = vec![1.0, 0.0, 0.0, 1.0];
        let x = ldl.solve(&b);
        // residual check
        for i in 0..4 {
            let mut r = diag[i] * x[i];
            if i > 0 {
                r += off[i - 1] * x[i - 1];
            }
            if i + 1 < 4 {
                r += off[i] * x[i + 1];
            }
            assert!((r - b[i]).abs() < 1e-13);
        }
        // indefinite matrix rejected
        assert!(TridiagLdl::factor(&[1.0, -1.0], &[0.0]).is_err());
    }

    #[test]
    fn banded_cholesky_matches_dense() {
        // 1-D Laplacian with bandwidth 1
        let n = 12;
        let mut data = vec![0.0; n * 2];
        for i in 0..n {
            data[i * 2] = 2.0;
            if i > 0 {
                data[i * 2 + 1] = -1.0;
            }
        }
        let ch = BandedCholesky::factor(n, 1, data).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let x = ch.solve(&b);
        for i in 0..n {
            let mut r = 2.0 * x[i];
            if i > 0 {
                r -= x[i - 1];
            }
            if i + 1 < n {
                r -= x[i + 1];
            }
            assert!((r - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn subspace_finds_dominant_pairs() {
        // diagonal operator: eigenvalues 10, 5, 2, 1, ...
        let diag = [10.0, 5.0, 2.0, 1.0, 0.5, 0.25];
        let apply =
            |v: &[f64]| -> Vec<f64> { v.iter().zip(diag.iter()).map(|(x, d)| x * d).collect() };
        let sdot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let block = vec![
            seeded_vector(6, 1),
            seeded_vector(6, 2),
            seeded_vector(6, 3),
            seeded_vector(6, 4),
        ];
        let (theta, vecs) =
            subspace_iterate(apply, sdot, block, 2, &SubspaceOptions::default()).unwrap();
        assert!((theta[0] - 10.0).abs() < 1e-10);
        assert!((theta[1] - 5.0).abs() < 1e-10);
        assert!(vecs[0][0].abs() > 0.999);
    }

    #[test]
    fn pcg_solves_diagonal() {
        let apply = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| 4.0 * x).collect() };
        let precond = |v: &[f64]| -> Vec<f64> { v.to_vec() };
        let b = vec![1.0, 2.0, 3.0];
        let mut x = vec![0.0; 3];
        pcg(apply, precond, &b, &mut x, 1e-14, 50).unwrap();
        assert!((x[1] - 0.5).abs() < 1e-12);
    }
}
