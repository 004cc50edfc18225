//! Direct Delta Mush runtime, plain and with per-joint scale/shear displacements.

use rayon::prelude::*;

use super::{DeformError, Deformation, OmegaEntry, OmegaTable};
use crate::mesh::TriMesh;
use crate::numerics::{factor_affine, polar_rotation, AffineTransform, Mat3, NumericsError, Vec3};
use crate::rig::SkinningMatrices;

/// `M_j = M_rj ∘ M_sj`: `rigid` is a proper rotation plus translation,
/// `stretch` the symmetric linear part of `M_sj`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointOp {
    pub rigid: AffineTransform,
    pub stretch: Mat3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointDeformOps(pub Vec<JointOp>);

impl JointDeformOps {
    pub fn from_skinning(m: &SkinningMatrices) -> Result<Self, DeformError> {
        m.0.iter()
            .enumerate()
            .map(|(joint, t)| {
                let f = factor_affine(t).map_err(|source| DeformError::SingularJoint { joint, source })?;
                Ok(JointOp { rigid: f.rigid, stretch: f.scale_shear.linear })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(JointDeformOps)
    }

    pub fn identity(joints: usize) -> Self {
        JointDeformOps(vec![JointOp { rigid: AffineTransform::IDENTITY, stretch: Mat3::IDENTITY }; joints])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Blocks of the blended 4×4 `[[Q, q], [pᵀ, 1]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BlendBlock {
    pub q_mat: Mat3,
    pub q: Vec3,
    pub p: Vec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlendResult(pub Vec<BlendBlock>);

/// Sums `[L, t; 0, 1]·Ω` over a row in ascending joint order, where `term`
/// supplies `(L, t)` per joint.
fn accumulate(
    row: &[OmegaEntry],
    mut term: impl FnMut(usize) -> Result<(Mat3, Vec3), DeformError>,
) -> Result<BlendBlock, DeformError> {
    let mut out = BlendBlock { q_mat: Mat3::ZERO, q: Vec3::ZERO, p: Vec3::ZERO };
    for e in row {
        let (l, t) = term(e.joint)?;
        let b = e.omega.b();
        out.q_mat += l * e.omega.a_mat3() + Mat3::outer(t, b);
        out.q += l * b + t * e.omega.c();
        out.p += b;
    }
    Ok(out)
}

fn lookup<T: Copy>(items: &[T], vertex: usize, joint: usize) -> Result<T, DeformError> {
    items
        .get(joint)
        .copied()
        .ok_or(DeformError::MissingJoint { vertex, joint, available: items.len() })
}

fn check_sizes(rest: &TriMesh, omega: &OmegaTable) -> Result<(), DeformError> {
    if omega.vertex_count() != rest.vertex_count() {
        return Err(DeformError::LengthMismatch { expected: rest.vertex_count(), actual: omega.vertex_count() });
    }
    Ok(())
}

/// `Σ_j M_rj·D_ij·Ω_ij`, with `D_ij` the translation by `d_ij = S_j·u_i − u_i`.
pub fn blend(omega: &OmegaTable, ops: &JointDeformOps, rest: &TriMesh) -> Result<BlendResult, DeformError> {
    check_sizes(rest, omega)?;
    let u = rest.positions();
    (0..rest.vertex_count())
        .into_par_iter()
        .map(|i| {
            accumulate(omega.row(i), |j| {
                let op = lookup(&ops.0, i, j)?;
                let d = op.stretch * u[i] - u[i];
                let r = op.rigid.linear;
                Ok((r, r * d + op.rigid.translation))
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(BlendResult)
}

/// `v = R·u + q − R·p` with `R` the rotation nearest to `Q − q·pᵀ`.
/// `fallback` supplies `R` when that matrix is rank-deficient.
fn assemble(
    vertex: usize,
    u: Vec3,
    block: &BlendBlock,
    fallback: impl FnOnce() -> Result<Mat3, DeformError>,
) -> Result<(Vec3, bool), DeformError> {
    let m = block.q_mat - Mat3::outer(block.q, block.p);
    let (r, degenerate) = match polar_rotation(&m) {
        Ok(r) => (r, false),
        Err(NumericsError::DegenerateInput { .. }) => (fallback()?, true),
        Err(NumericsError::NonFinite) => return Err(DeformError::NonFinite { vertex }),
    };
    let v = r * u + block.q - r * block.p;
    if !v.is_finite() {
        return Err(DeformError::NonFinite { vertex });
    }
    Ok((v, degenerate))
}

fn collect(results: Vec<(Vec3, bool)>) -> Deformation {
    let fallbacks = results.iter().enumerate().filter(|(_, r)| r.1).map(|(i, _)| i).collect();
    Deformation { positions: results.into_iter().map(|r| r.0).collect(), fallbacks }
}

/// Enhanced DDM: joint scale/shear enters as per-vertex translations, so the
/// blended matrix stays rotation-like and the polar step can recover it.
///
/// Vertices whose `Q − q·pᵀ` is rank-deficient take the rotation of the
/// joint with the largest smoothed weight and are listed in `fallbacks`.
pub fn deform_eddm(rest: &TriMesh, omega: &OmegaTable, m: &SkinningMatrices) -> Result<Deformation, DeformError> {
    let ops = JointDeformOps::from_skinning(m)?;
    let blocks = blend(omega, &ops, rest)?;
    let u = rest.positions();
    let results = blocks
        .0
        .par_iter()
        .enumerate()
        .map(|(i, block)| {
            assemble(i, u[i], block, || Ok(ops.0[omega.dominant_joint(i)].rigid.linear))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(collect(results))
}

/// Classic DDM: blends the full `M_j·Ω_ij`, which loses the part of any
/// scale acting on `u_i − ũ_i`.
pub fn deform_ddm(rest: &TriMesh, omega: &OmegaTable, m: &SkinningMatrices) -> Result<Deformation, DeformError> {
    check_sizes(rest, omega)?;
    let u = rest.positions();
    let results = (0..rest.vertex_count())
        .into_par_iter()
        .map(|i| {
            let block = accumulate(omega.row(i), |j| {
                let mj = lookup(&m.0, i, j)?;
                Ok((mj.linear, mj.translation))
            })?;
            assemble(i, u[i], &block, || {
                let joint = omega.dominant_joint(i);
                polar_rotation(&m.0[joint].linear).map_err(|source| DeformError::SingularJoint { joint, source })
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(collect(results))
}
