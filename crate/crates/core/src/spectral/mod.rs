//! Constrained spectrum of the non-local linearized operator, the standard
//! weighted eigenvalue, and Sobolev best constants.

mod eigs;
mod forms;
mod sobolev;

pub use eigs::{
    constrained_eigs, constrained_eigs_opts, disk_mode_eigs, standard_eig_nu1,
    standard_eig_nu1_full, EigOptions,
};
pub use forms::{check_eigen_identity, second_variation_form};
pub use sobolev::{rayleigh_minimize, sobolev_constant, SobolevResult};

use crate::domain::Field;

/// Lowest constrained eigenpairs of the linearized operator together with
/// the standard weighted eigenvalue.
#[derive(Clone)]
pub struct Spectrum {
    /// Ascending constrained eigenvalues sigma_1 <= ... <= sigma_k.
    pub sigmas: Vec<f64>,
    /// Eigenfunctions, normalized to <[phi]^2> = 1 with <phi> >= 0
    /// (largest-magnitude node positive when the mean vanishes).
    pub phis: Vec<Field>,
    /// Weighted means <phi_j>.
    pub means: Vec<f64>,
    /// Azimuthal wavenumber per pair on the disk backend.
    pub azimuthal: Option<Vec<usize>>,
    /// Max-norm residuals of the defining equation, relative.
    pub residuals: Vec<f64>,
    /// Standard (unprojected) first weighted eigenvalue; always < sigma_1.
    pub nu1: f64,
    /// Weight mass of the underlying solution.
    pub m: f64,
}

impl std::fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Spectrum(sigmas={:?}, nu1={:.6})", self.sigmas, self.nu1)
    }
}
