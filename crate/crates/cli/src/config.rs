//! Run configuration: JSON file merged with command line flags
//! (flags take precedence).

use anyhow::{bail, Context};
use plasma_branch::{Domain, DomainKind, Resolution};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve,
    Branch,
    Spectrum,
    Sobolev,
    Verify,
}

/// On-disk configuration; every field is optional so a file can carry just
/// the overrides it cares about. The JSON schema is documented in the
/// repository README.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub domain: Option<String>,
    /// "128" for the square/ball, "512x64" for the disk.
    pub res: Option<String>,
    pub p: Option<f64>,
    pub mode: Option<Mode>,
    pub lambda: Option<f64>,
    pub lambda_max: Option<f64>,
    pub alpha_tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Disk azimuthal cutoff.
    pub modes: Option<usize>,
    /// Eigenpairs for spectrum mode.
    pub k: Option<usize>,
    /// Emit a gnuplot script next to branch CSV output.
    pub plot: Option<bool>,
    // verify-mode grid overrides
    pub disk_radial: Option<usize>,
    pub disk_angular: Option<usize>,
    pub square_nodes: Option<usize>,
    pub ball_nodes: Option<usize>,
    pub samples: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub domain: DomainKind,
    pub resolution: Resolution,
    pub p: f64,
    pub mode: Mode,
    pub lambda: Option<f64>,
    pub lambda_max: Option<f64>,
    pub alpha_tol: f64,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub modes: usize,
    pub k: usize,
    pub plot: bool,
    pub file: ConfigFile,
}

pub fn parse_domain(name: &str) -> anyhow::Result<DomainKind> {
    match name {
        "square" => Ok(DomainKind::UnitSquare),
        "disk" => Ok(DomainKind::UnitDisk),
        other => {
            if let Some(n) = other.strip_prefix("ball") {
                let dim: u32 = n
                    .parse()
                    .with_context(|| format!("field 'domain': bad ball dimension in {other:?}"))?;
                Ok(DomainKind::RadialBall(dim))
            } else {
                bail!("field 'domain': unknown kind {other:?} (square | disk | ballN)")
            }
        }
    }
}

pub fn parse_resolution(kind: DomainKind, spec: Option<&str>) -> anyhow::Result<Resolution> {
    match kind {
        DomainKind::UnitSquare => {
            let nodes = match spec {
                Some(s) => s.parse().with_context(|| format!("field 'res': {s:?}"))?,
                None => 128,
            };
            Ok(Resolution::Square { nodes })
        }
        DomainKind::UnitDisk => {
            let (radial, angular) = match spec {
                Some(s) => {
                    let mut it = s.split('x');
                    let r = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .with_context(|| format!("field 'res': want RADIALxANGULAR, got {s:?}"))?;
                    let a = match it.next() {
                        Some(v) => v
                            .parse()
                            .with_context(|| format!("field 'res': bad angular part in {s:?}"))?,
                        None => 64,
                    };
                    (r, a)
                }
                None => (512, 64),
            };
            Ok(Resolution::Disk { radial, angular })
        }
        DomainKind::RadialBall(_) => {
            let nodes = match spec {
                Some(s) => s.parse().with_context(|| format!("field 'res': {s:?}"))?,
                None => 2048,
            };
            Ok(Resolution::Radial { nodes })
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.p < 1.0 {
            bail!("field 'p': must be >= 1, got {}", self.p);
        }
        if let DomainKind::RadialBall(n) = self.domain {
            if n >= 3 {
                let critical = n as f64 / (n as f64 - 2.0);
                if self.p >= critical && self.mode != Mode::Sobolev {
                    bail!(
                        "field 'p': ball{} restricts p < {:.4}, got {}",
                        n,
                        critical,
                        self.p
                    );
                }
            }
        }
        if let Some(l) = self.lambda {
            if l < 0.0 {
                bail!("field 'lambda': must be >= 0, got {l}");
            }
        }
        if self.alpha_tol <= 0.0 {
            bail!("field 'alpha_tol': must be > 0, got {}", self.alpha_tol);
        }
        Ok(())
    }

    pub fn build_domain(&self) -> anyhow::Result<Domain> {
        Domain::new(self.domain, self.resolution).map_err(|e| anyhow::anyhow!("field 'res': {e}"))
    }
}
