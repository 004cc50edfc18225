//! Skinning deformation with Enhanced Direct Delta Mush.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: 3×3 kernels (symmetric eigen-solver, polar rotation, affine factorization).
//! - [`mesh`]: triangle meshes, OBJ I/O, cotangent smoothing weights and the smoothing operator.
//! - [`rig`]: joint hierarchies, poses and skinning matrices.
//! - [`deform`]: Ω precompute and the deformers (enhanced DDM, DDM, LBS, Delta Mush).

pub mod numerics;
pub mod mesh;
pub mod rig;
pub mod deform;
