use std::fmt;
use std::str::FromStr;

use super::{
    deform_ddm, deform_eddm, deform_lbs, precompute_omega, DeformError, Deformation, DeltaMushRest, OmegaTable,
    SkinWeights, DEFAULT_PRUNE_EPS,
};
use crate::mesh::{cotangent_weights, Precision, SmoothingConfig, SmoothingWeights, TriMesh};
use crate::rig::SkinningMatrices;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Eddm,
    Ddm,
    Lbs,
    DeltaMush,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Eddm, Mode::Ddm, Mode::Lbs, Mode::DeltaMush];
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eddm" => Ok(Mode::Eddm),
            "ddm" => Ok(Mode::Ddm),
            "lbs" => Ok(Mode::Lbs),
            "dm" => Ok(Mode::DeltaMush),
            other => Err(format!("unknown mode {other:?} (expected eddm, ddm, lbs or dm)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Eddm => "eddm",
            Mode::Ddm => "ddm",
            Mode::Lbs => "lbs",
            Mode::DeltaMush => "dm",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformConfig {
    pub smoothing: SmoothingConfig,
    pub prune_eps: f64,
    pub precision: Precision,
}

impl Default for DeformConfig {
    fn default() -> Self {
        DeformConfig { smoothing: SmoothingConfig::default(), prune_eps: DEFAULT_PRUNE_EPS, precision: Precision::Double }
    }
}

/// Everything the four deformers need for one rest mesh, built once.
#[derive(Clone, Debug)]
pub struct Deformer {
    mesh: TriMesh,
    weights: SkinWeights,
    smoothing: SmoothingWeights,
    omega: OmegaTable,
    delta_mush: DeltaMushRest,
}

impl Deformer {
    pub fn new(mesh: TriMesh, weights: SkinWeights, cfg: &DeformConfig) -> Result<Self, DeformError> {
        let smoothing = cotangent_weights(&mesh, cfg.precision);
        let omega = precompute_omega(&mesh, &weights, &smoothing, &cfg.smoothing, cfg.prune_eps)?;
        let delta_mush = DeltaMushRest::new(&mesh, &smoothing, &cfg.smoothing)?;
        Ok(Deformer { mesh, weights, smoothing, omega, delta_mush })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn weights(&self) -> &SkinWeights {
        &self.weights
    }

    pub fn smoothing_weights(&self) -> &SmoothingWeights {
        &self.smoothing
    }

    pub fn omega(&self) -> &OmegaTable {
        &self.omega
    }

    pub fn deform(&self, mode: Mode, m: &SkinningMatrices) -> Result<Deformation, DeformError> {
        match mode {
            Mode::Eddm => deform_eddm(&self.mesh, &self.omega, m),
            Mode::Ddm => deform_ddm(&self.mesh, &self.omega, m),
            Mode::Lbs => deform_lbs(&self.mesh, &self.weights, m),
            Mode::DeltaMush => self.delta_mush.deform(&self.weights, m, &self.mesh),
        }
    }
}
