//! Ω precompute and the four deformers: enhanced DDM, DDM, LBS and Delta Mush.

mod cache;
mod ddm;
mod delta_mush;
mod lbs;
mod omega;
mod pipeline;
mod weights;

pub use ddm::{blend, deform_ddm, deform_eddm, BlendBlock, BlendResult, JointDeformOps, JointOp};
pub use delta_mush::{deform_delta_mush, DeltaMushRest};
pub use lbs::deform_lbs;
pub use omega::{precompute_omega, Omega, OmegaEntry, OmegaTable, DEFAULT_PRUNE_EPS};
pub use pipeline::{DeformConfig, Deformer, Mode};
pub use weights::SkinWeights;

use thiserror::Error;

use crate::mesh::MeshError;
use crate::numerics::{NumericsError, Vec3};
use crate::rig::RigError;

#[derive(Debug, Error)]
pub enum DeformError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Rig(#[from] RigError),
    #[error("expected {expected} vertices, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("vertex {vertex} references joint {joint} but only {available} joints are posed")]
    MissingJoint { vertex: usize, joint: usize, available: usize },
    #[error("skinning matrix of joint {joint} cannot be factored: {source}")]
    SingularJoint { joint: usize, source: NumericsError },
    #[error("pruning removed every influence of vertex {vertex}")]
    EmptyInfluence { vertex: usize },
    #[error("vertex {vertex}: {message}")]
    InvalidWeights { vertex: usize, message: String },
    #[error("pruning threshold {0} is outside [0, 1)")]
    InvalidPruneEps(f64),
    #[error("vertex {vertex} has no usable tangent frame")]
    DegenerateFrame { vertex: usize },
    #[error("vertex {vertex} deformed to a non-finite position")]
    NonFinite { vertex: usize },
    #[error("omega cache: {0}")]
    Cache(String),
    #[error("weights file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Deformed positions plus the vertices that needed the rank-deficient
/// fallback.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    pub positions: Vec<Vec3>,
    pub fallbacks: Vec<usize>,
}

impl Deformation {
    fn exact(positions: Vec<Vec3>) -> Self {
        Deformation { positions, fallbacks: Vec::new() }
    }
}
