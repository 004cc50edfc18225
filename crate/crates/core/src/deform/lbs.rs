use rayon::prelude::*;

use super::{DeformError, Deformation, SkinWeights};
use crate::mesh::TriMesh;
use crate::numerics::Vec3;
use crate::rig::SkinningMatrices;

/// Linear blend skinning, `v_i = Σ_j w_ij·M_j·u_i`.
pub fn deform_lbs(rest: &TriMesh, weights: &SkinWeights, m: &SkinningMatrices) -> Result<Deformation, DeformError> {
    lbs_positions(rest.positions(), weights, m).map(Deformation::exact)
}

pub(crate) fn lbs_positions(
    u: &[Vec3],
    weights: &SkinWeights,
    m: &SkinningMatrices,
) -> Result<Vec<Vec3>, DeformError> {
    if weights.vertex_count() != u.len() {
        return Err(DeformError::LengthMismatch { expected: u.len(), actual: weights.vertex_count() });
    }
    (0..u.len())
        .into_par_iter()
        .map(|i| {
            let mut v = Vec3::ZERO;
            for &(joint, w) in weights.row(i) {
                let mj = m.get(joint).ok_or(DeformError::MissingJoint { vertex: i, joint, available: m.len() })?;
                v += mj.transform_point(u[i]) * w;
            }
            Ok(v)
        })
        .collect()
}
