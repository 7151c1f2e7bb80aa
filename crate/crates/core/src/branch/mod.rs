//! Continuation of the solution branch lambda -> (alpha, psi) from
//! lambda = 0, with natural-parameter stepping at regular points and
//! pseudo-arclength stepping through near-singular ones.

mod slopes;
mod step;
mod trace;

pub use slopes::{energy_slope, fourier_slope_check, tangent, w_derivative, FourierSlopeCheck};
pub use step::{arclength_step, natural_step};
pub use trace::{trace_branch, trace_many};

use crate::domain::{Domain, Field};
use crate::error::Result;
use crate::solver::Solution;
use crate::spectral::{self, EigOptions, Spectrum};

/// One accepted continuation point with its diagnostics.
#[derive(Clone)]
pub struct BranchPoint {
    /// Accumulated arclength parameter.
    pub s: f64,
    pub lambda: f64,
    pub solution: Solution,
    /// Energy E = (1/2) int rho psi.
    pub energy: f64,
    pub sigma1: f64,
    pub nu1: f64,
    pub dalpha_dlambda: f64,
    pub denergy_dlambda: f64,
    /// d psi / d lambda.
    pub eta: Field,
    /// d(lambda psi)/d lambda = psi + lambda eta.
    pub w: Field,
    pub fold_flag: bool,
    /// <phi_1> at this point (the fold transversality quantity).
    pub transversality: f64,
    pub spectrum: Spectrum,
    /// |<w> - (psi + lambda eta mean)| style consistency gap between the two
    /// routes to d alpha/d lambda, relative.
    pub slope_consistency: f64,
    /// max-norm of w - psi - lambda eta.
    pub w_identity_gap: f64,
    /// Newton iterations the corrector needed to produce this point.
    pub corrector_iterations: usize,
}

/// Extrapolated branch end at alpha -> 0 (the positivity threshold).
#[derive(Clone, Copy, Debug)]
pub struct BranchEndpoint {
    pub s: f64,
    pub lambda: f64,
    pub energy: f64,
    pub sigma1: f64,
    pub nu1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    LambdaMax(f64),
    /// Stop when alpha falls to this tolerance and extrapolate the endpoint.
    AlphaTol(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TerminationReason {
    LambdaMaxReached,
    AlphaTol,
    FoldLimit,
    SolverFailure(String),
}

#[derive(Clone)]
pub struct Branch {
    pub domain: Domain,
    pub p: f64,
    pub points: Vec<BranchPoint>,
    /// Present when the trace terminated at the alpha tolerance.
    pub endpoint: Option<BranchEndpoint>,
    pub reason: TerminationReason,
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    /// Eigenpairs carried per point.
    pub k_eigs: usize,
    pub eig: EigOptions,
    /// Arclength regime triggers below this fraction of sigma_1(lambda=0).
    pub sigma_threshold_frac: f64,
    pub max_dlambda: f64,
    pub min_dlambda: f64,
    pub fold_limit: usize,
    pub max_points: usize,
    /// Newton iteration count the step-size controller aims for.
    pub target_corrector_iters: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            k_eigs: 3,
            eig: EigOptions::default(),
            sigma_threshold_frac: 0.05,
            max_dlambda: 0.25,
            min_dlambda: 1e-6,
            fold_limit: 16,
            max_points: 4000,
            target_corrector_iters: 5,
        }
    }
}

impl Branch {
    pub fn last(&self) -> &BranchPoint {
        self.points.last().expect("branch has at least the origin")
    }
}

/// Diagnostics for a standalone solution (arclength 0, no fold context).
pub fn point_from_solution(sol: Solution, opts: &TraceOptions) -> Result<BranchPoint> {
    make_point(sol, 0.0, false, opts, None)
}

/// Assemble a branch point: spectrum (warm-started), tangent, w-derivative,
/// energy slope, and the cross-route consistency diagnostics.
pub(crate) fn make_point(
    sol: Solution,
    s: f64,
    fold_flag: bool,
    opts: &TraceOptions,
    warm: Option<&Spectrum>,
) -> Result<BranchPoint> {
    let domain = sol.domain.clone();
    let spectrum = spectral::constrained_eigs_opts(&domain, &sol, opts.k_eigs, &opts.eig, warm)?;
    let energy = 0.5
        * domain.wdot(
            sol.rho.values(),
            sol.psi.values(),
            &vec![1.0; domain.node_count()],
        );
    let (tangent_result, w_result) = (slopes::tangent(&sol), slopes::w_derivative(&sol));
    let (dalpha, eta, w, denergy, slope_consistency, w_identity_gap) =
        match (tangent_result, w_result) {
            (Ok((da, eta)), Ok((wf, da_w))) => {
                let de = slopes::energy_slope(&sol, &eta)?;
                let cons = (da - da_w).abs() / da.abs().max(da_w.abs()).max(1e-300);
                // w = psi + lambda eta, exactly at the discrete level
                let recon = sol.psi.axpy(sol.lambda, &eta);
                let gap = wf
                    .values()
                    .iter()
                    .zip(recon.values())
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                (da, eta, wf, de, cons, gap)
            }
            // at a genuine fold the linearization is singular; record the
            // point without natural-parameter slopes
            _ if fold_flag => (
                f64::NAN,
                domain.zeros(),
                domain.zeros(),
                f64::NAN,
                f64::NAN,
                f64::NAN,
            ),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
    let lambda = sol.lambda;
    let nu1 = spectrum.nu1;
    let sigma1 = spectrum.sigmas[0];
    let transversality = spectrum.means[0];
    Ok(BranchPoint {
        s,
        lambda,
        solution: sol,
        energy,
        sigma1,
        nu1,
        dalpha_dlambda: dalpha,
        denergy_dlambda: denergy,
        eta,
        w,
        fold_flag,
        transversality,
        spectrum,
        slope_consistency,
        w_identity_gap,
        corrector_iterations: 0,
    })
}

/// Distance between consecutive states used for the arclength bookkeeping:
/// sqrt(dlambda^2 + dalpha^2 + ||dpsi||_{L^2}^2).
pub(crate) fn state_distance(a: &BranchPoint, b: &BranchPoint) -> f64 {
    let domain = &a.solution.domain;
    let q = domain.quad_weights();
    let mut dpsi2 = 0.0;
    for i in 0..q.len() {
        let d = a.solution.psi.values()[i] - b.solution.psi.values()[i];
        dpsi2 += q[i] * d * d;
    }
    let dl = a.lambda - b.lambda;
    let da = a.solution.alpha - b.solution.alpha;
    (dl * dl + da * da + dpsi2).sqrt()
}
