//! Discretized unit-area domains and the calculus the solvers consume.
//!
//! Three backends: the unit square (five-point stencil), the unit disk
//! (polar grid, spectral in the angle, finite volumes in the radius) and
//! radially symmetric N-balls. All are finite-volume discretizations with
//! exact cell measures, so the total quadrature weight is the domain area
//! (= 1) to rounding and the discrete Laplacian is self-adjoint in the
//! quadrature inner product.

mod ball;
mod disk;
mod square;

pub use ball::{unit_ball_volume, RadialGrid};
pub use disk::DiskGrid;
pub use square::SquareGrid;

use crate::error::{Error, Result};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    UnitSquare,
    UnitDisk,
    /// Radially symmetric ball in dimension N >= 2.
    RadialBall(u32),
}

impl DomainKind {
    pub fn dimension(&self) -> u32 {
        match self {
            DomainKind::UnitSquare | DomainKind::UnitDisk => 2,
            DomainKind::RadialBall(n) => *n,
        }
    }

    pub fn name(&self) -> String {
        match self {
            DomainKind::UnitSquare => "square".into(),
            DomainKind::UnitDisk => "disk".into(),
            DomainKind::RadialBall(n) => format!("ball{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// Nodes per direction of the square, including boundary nodes.
    Square { nodes: usize },
    /// Radial intervals and angular nodes of the disk grid.
    Disk { radial: usize, angular: usize },
    /// Radial intervals of the 1-D grid.
    Radial { nodes: usize },
}

pub(crate) enum Backend {
    Square(SquareGrid),
    Disk(DiskGrid),
    Ball(RadialGrid),
}

struct Inner {
    kind: DomainKind,
    resolution: Resolution,
    backend: Backend,
    quad: Vec<f64>,
    boundary: Vec<bool>,
}

/// Immutable discretized domain; cheap to clone and safe to share across
/// threads (all factorizations are precomputed at build time).
#[derive(Clone)]
pub struct Domain {
    inner: Arc<Inner>,
}

/// A real-valued grid function bound to its domain.
#[derive(Clone)]
pub struct Field {
    domain: Domain,
    values: Vec<f64>,
}

impl std::fmt::Debug for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Domain({}, {} nodes)",
            self.kind().name(),
            self.node_count()
        )
    }
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Field({} nodes on {:?})", self.values.len(), self.domain)
    }
}

impl Domain {
    pub fn new(kind: DomainKind, resolution: Resolution) -> Result<Domain> {
        let backend = match (kind, resolution) {
            (DomainKind::UnitSquare, Resolution::Square { nodes }) => {
                if nodes < 16 {
                    return Err(Error::ResolutionTooSmall(nodes));
                }
                Backend::Square(SquareGrid::new(nodes)?)
            }
            (DomainKind::UnitDisk, Resolution::Disk { radial, angular }) => {
                if radial < 16 || angular < 16 {
                    return Err(Error::ResolutionTooSmall(radial.min(angular)));
                }
                Backend::Disk(DiskGrid::new(radial, angular)?)
            }
            (DomainKind::RadialBall(n), Resolution::Radial { nodes }) => {
                if nodes < 16 {
                    return Err(Error::ResolutionTooSmall(nodes));
                }
                if n < 2 {
                    return Err(Error::UnsupportedKind(format!("ball dimension {n}")));
                }
                Backend::Ball(RadialGrid::new(n, nodes)?)
            }
            (k, _) => {
                return Err(Error::UnsupportedKind(format!(
                    "{} with mismatched resolution variant",
                    k.name()
                )))
            }
        };
        let (quad, boundary) = match &backend {
            Backend::Square(g) => (g.quad(), g.boundary()),
            Backend::Disk(g) => (g.quad(), g.boundary()),
            Backend::Ball(g) => (g.quad(), g.boundary()),
        };
        Ok(Domain {
            inner: Arc::new(Inner {
                kind,
                resolution,
                backend,
                quad,
                boundary,
            }),
        })
    }

    pub fn kind(&self) -> DomainKind {
        self.inner.kind
    }

    pub fn resolution(&self) -> Resolution {
        self.inner.resolution
    }

    pub fn dimension(&self) -> u32 {
        self.inner.kind.dimension()
    }

    pub fn node_count(&self) -> usize {
        self.inner.quad.len()
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.inner.quad
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.inner.boundary
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        self.inner.boundary[idx]
    }

    /// Outer radius (disk and ball) or half-diagonal-free side (square = 1).
    pub fn extent(&self) -> f64 {
        match &self.inner.backend {
            Backend::Square(_) => 1.0,
            Backend::Disk(g) => g.radius,
            Backend::Ball(g) => g.radius,
        }
    }

    /// Node positions: (x, y) on 2-D grids, (r, 0) on radial ones.
    pub fn positions(&self) -> Vec<[f64; 2]> {
        match &self.inner.backend {
            Backend::Square(g) => g.positions(),
            Backend::Disk(g) => g.positions(),
            Backend::Ball(g) => g.positions(),
        }
    }

    pub(crate) fn backend(&self) -> &Backend {
        &self.inner.backend
    }

    pub fn as_disk(&self) -> Option<&DiskGrid> {
        match &self.inner.backend {
            Backend::Disk(g) => Some(g),
            _ => None,
        }
    }

    pub(crate) fn as_square(&self) -> Option<&SquareGrid> {
        match &self.inner.backend {
            Backend::Square(g) => Some(g),
            _ => None,
        }
    }

    pub fn same_domain(&self, other: &Domain) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    // ---- field construction -------------------------------------------------

    pub fn zeros(&self) -> Field {
        Field {
            domain: self.clone(),
            values: vec![0.0; self.node_count()],
        }
    }

    pub fn constant(&self, c: f64) -> Field {
        Field {
            domain: self.clone(),
            values: vec![c; self.node_count()],
        }
    }

    pub fn field_from_fn(&self, f: impl Fn(f64, f64) -> f64) -> Field {
        let values = self.positions().iter().map(|p| f(p[0], p[1])).collect();
        Field {
            domain: self.clone(),
            values,
        }
    }

    pub fn field_from_values(&self, values: Vec<f64>) -> Result<Field> {
        if values.len() != self.node_count() {
            return Err(Error::DomainMismatch {
                got: values.len(),
                expected: self.node_count(),
            });
        }
        Ok(Field {
            domain: self.clone(),
            values,
        })
    }

    fn check(&self, f: &Field) -> Result<()> {
        if !self.same_domain(&f.domain) || f.values.len() != self.node_count() {
            return Err(Error::DomainMismatch {
                got: f.values.len(),
                expected: self.node_count(),
            });
        }
        Ok(())
    }

    // ---- calculus ------------------------------------------------------------

    /// Discrete -Laplace of a field that vanishes on the boundary.
    /// Output is zero at boundary nodes.
    pub fn laplacian(&self, f: &Field) -> Result<Field> {
        self.check(f)?;
        let values = self.laplacian_raw(&f.values);
        Ok(Field {
            domain: self.clone(),
            values,
        })
    }

    pub(crate) fn laplacian_raw(&self, f: &[f64]) -> Vec<f64> {
        match &self.inner.backend {
            Backend::Square(g) => g.laplacian(f),
            Backend::Disk(g) => g.laplacian(f),
            Backend::Ball(g) => g.laplacian(f),
        }
    }

    /// Green operator of -Laplace with Dirichlet boundary values: returns
    /// psi with -Laplace psi = source and psi = 0 on the boundary.
    pub fn green(&self, source: &Field) -> Result<Field> {
        self.check(source)?;
        for (i, v) in source.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::LinearSolve(format!("source not finite at node {i}")));
            }
        }
        let values = self.green_raw(&source.values)?;
        Ok(Field {
            domain: self.clone(),
            values,
        })
    }

    pub(crate) fn green_raw(&self, source: &[f64]) -> Result<Vec<f64>> {
        match &self.inner.backend {
            Backend::Square(g) => g.green(source),
            Backend::Disk(g) => g.green(source),
            Backend::Ball(g) => Ok(g.green(source)),
        }
    }

    /// Green solves for several sources at once (fans out across workers).
    pub fn green_batch(&self, sources: &[Field]) -> Result<Vec<Field>> {
        for s in sources {
            self.check(s)?;
        }
        let raw: Vec<Result<Vec<f64>>> =
            crate::par::map_collect(sources, |s| self.green_raw(&s.values));
        raw.into_iter()
            .map(|r| {
                r.map(|values| Field {
                    domain: self.clone(),
                    values,
                })
            })
            .collect()
    }

    /// Quadrature of a field over the domain; exact for constants.
    pub fn integrate(&self, f: &Field) -> f64 {
        debug_assert!(self.same_domain(&f.domain));
        dot(&self.inner.quad, &f.values)
    }

    /// Weighted mean <f> with respect to the measure weight * dx.
    pub fn weighted_mean(&self, weight: &Field, f: &Field) -> Result<f64> {
        self.check(weight)?;
        self.check(f)?;
        self.check_weight(&weight.values)?;
        Ok(self.weighted_mean_raw(&weight.values, &f.values))
    }

    pub(crate) fn weighted_mean_raw(&self, w: &[f64], f: &[f64]) -> f64 {
        let q = &self.inner.quad;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..q.len() {
            num += q[i] * w[i] * f[i];
            den += q[i] * w[i];
        }
        num / den
    }

    /// Fluctuation [f] = f - <f> with respect to the weight measure.
    pub fn weighted_fluctuation(&self, weight: &Field, f: &Field) -> Result<Field> {
        self.check(weight)?;
        self.check(f)?;
        self.check_weight(&weight.values)?;
        let mean = self.weighted_mean_raw(&weight.values, &f.values);
        let values = f.values.iter().map(|v| v - mean).collect();
        Ok(Field {
            domain: self.clone(),
            values,
        })
    }

    fn check_weight(&self, w: &[f64]) -> Result<()> {
        let mut min = f64::INFINITY;
        for (i, &v) in w.iter().enumerate() {
            if !self.inner.boundary[i] {
                min = min.min(v);
            }
        }
        if !(min > 0.0) {
            return Err(Error::NonPositiveWeight(min));
        }
        Ok(())
    }

    /// Total weight mass, int weight dx.
    pub(crate) fn weight_mass(&self, w: &[f64]) -> f64 {
        dot(&self.inner.quad, w)
    }

    /// int weight * f * g dx.
    pub fn wdot(&self, w: &[f64], f: &[f64], g: &[f64]) -> f64 {
        let q = &self.inner.quad;
        let mut s = 0.0;
        for i in 0..q.len() {
            s += q[i] * w[i] * f[i] * g[i];
        }
        s
    }

    /// (1/2) int |grad f|^2 by face-midpoint gradients; f must vanish on
    /// the boundary. Consistent with the discrete Laplacian by summation
    /// by parts.
    pub fn dirichlet_energy(&self, f: &Field) -> f64 {
        debug_assert!(self.same_domain(&f.domain));
        let e = match &self.inner.backend {
            Backend::Square(g) => g.face_energy(&f.values),
            Backend::Disk(g) => g.face_energy(&f.values),
            Backend::Ball(g) => g.face_energy(&f.values),
        };
        0.5 * e
    }

    /// Maximum absolute value over interior nodes.
    pub fn max_abs(&self, f: &Field) -> f64 {
        f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl Field {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// self + c * other
    pub fn axpy(&self, c: f64, other: &Field) -> Field {
        debug_assert!(self.domain.same_domain(&other.domain));
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        Field {
            domain: self.domain.clone(),
            values,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
