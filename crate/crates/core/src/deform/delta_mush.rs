//! Iterative Delta Mush: rest-pose detail stored as deltas in per-vertex
//! frames of the smoothed mesh, reapplied after smoothing the skinned mesh.

use rayon::prelude::*;

use super::lbs::lbs_positions;
use super::{DeformError, Deformation, SkinWeights};
use crate::mesh::{smooth_positions, SmoothingConfig, SmoothingWeights, TriMesh};
use crate::numerics::{Mat3, Vec3};
use crate::rig::SkinningMatrices;

/// Rejection threshold for an edge whose normal-plane projection is this
/// small relative to its length.
const PARALLEL_TOL: f64 = 1e-8;

/// Rest-pose state: smoothing operator, adjacency and frame-local deltas.
#[derive(Clone, Debug)]
pub struct DeltaMushRest {
    w: SmoothingWeights,
    cfg: SmoothingConfig,
    triangles: Vec<[usize; 3]>,
    incident: Vec<Vec<usize>>,
    rings: Vec<Vec<usize>>,
    deltas: Vec<Vec3>,
}

impl DeltaMushRest {
    pub fn new(rest: &TriMesh, w: &SmoothingWeights, cfg: &SmoothingConfig) -> Result<Self, DeformError> {
        let mut incident = vec![Vec::new(); rest.vertex_count()];
        for (t, tri) in rest.triangles().iter().enumerate() {
            for &v in tri {
                incident[v].push(t);
            }
        }
        let mut state = DeltaMushRest {
            w: w.clone(),
            cfg: *cfg,
            triangles: rest.triangles().to_vec(),
            incident,
            rings: rest.one_rings(),
            deltas: Vec::new(),
        };
        let u = rest.positions();
        let smoothed = smooth_positions(u, w, cfg)?;
        let frames = state.frames(&smoothed)?;
        state.deltas = frames.iter().zip(u.iter().zip(&smoothed)).map(|(f, (&ui, &si))| f.transpose() * (ui - si)).collect();
        Ok(state)
    }

    pub fn deltas(&self) -> &[Vec3] {
        &self.deltas
    }

    /// Columns: area-weighted normal, the first one-ring edge (by index) not
    /// parallel to it projected onto the normal plane, and their cross product.
    pub fn frame(&self, i: usize, x: &[Vec3]) -> Result<Mat3, DeformError> {
        let degenerate = DeformError::DegenerateFrame { vertex: i };
        let area_normal = self.incident[i].iter().fold(Vec3::ZERO, |acc, &t| {
            let [a, b, c] = self.triangles[t];
            acc + (x[b] - x[a]).cross(x[c] - x[a])
        });
        let n = area_normal.try_normalize().ok_or(degenerate)?;
        let tangent = self.rings[i]
            .iter()
            .find_map(|&k| {
                let e = x[k] - x[i];
                let along = e - n * n.dot(e);
                (along.norm() > PARALLEL_TOL * e.norm()).then(|| along.try_normalize()).flatten()
            })
            .ok_or(DeformError::DegenerateFrame { vertex: i })?;
        Ok(Mat3::from_cols(n, tangent, n.cross(tangent)))
    }

    fn frames(&self, x: &[Vec3]) -> Result<Vec<Mat3>, DeformError> {
        (0..x.len()).into_par_iter().map(|i| self.frame(i, x)).collect()
    }

    pub fn deform(&self, weights: &SkinWeights, m: &SkinningMatrices, rest: &TriMesh) -> Result<Deformation, DeformError> {
        if rest.vertex_count() != self.deltas.len() {
            return Err(DeformError::LengthMismatch { expected: self.deltas.len(), actual: rest.vertex_count() });
        }
        let skinned = lbs_positions(rest.positions(), weights, m)?;
        let smoothed = smooth_positions(&skinned, &self.w, &self.cfg)?;
        let frames = self.frames(&smoothed)?;
        let positions = smoothed.iter().zip(frames.iter().zip(&self.deltas)).map(|(&s, (f, &d))| s + *f * d).collect();
        Ok(Deformation::exact(positions))
    }
}

pub fn deform_delta_mush(
    rest: &TriMesh,
    w: &SmoothingWeights,
    cfg: &SmoothingConfig,
    weights: &SkinWeights,
    m: &SkinningMatrices,
) -> Result<Deformation, DeformError> {
    DeltaMushRest::new(rest, w, cfg)?.deform(weights, m, rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cotangent_weights, Precision};
    use crate::numerics::{AffineTransform, Quat};

    fn octahedron() -> TriMesh {
        let p = vec![Vec3::X, -Vec3::X, Vec3::Y, -Vec3::Y, Vec3::Z * 1.5, -Vec3::Z];
        let t = vec![[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
        TriMesh::new(p, t).unwrap()
    }

    #[test]
    fn frames_are_orthonormal_and_rotate_with_the_mesh() {
        let mesh = octahedron();
        let w = cotangent_weights(&mesh, Precision::Double);
        let state = DeltaMushRest::new(&mesh, &w, &SmoothingConfig::default()).unwrap();
        let g = Quat::from_axis_angle(Vec3::new(0.3, 1.0, -0.2), 1.1).to_mat3();
        let moved: Vec<Vec3> = mesh.positions().iter().map(|&p| g * p).collect();
        for i in 0..mesh.vertex_count() {
            let f = state.frame(i, mesh.positions()).unwrap();
            assert!((f.transpose() * f).max_abs_diff(&Mat3::IDENTITY) < 1e-14);
            assert!((f.determinant() - 1.0).abs() < 1e-14);
            assert!(f.col(0).dot(mesh.positions()[i]) > 0.0);
            assert!(state.frame(i, &moved).unwrap().max_abs_diff(&(g * f)) < 1e-14);
        }
    }

    #[test]
    fn bind_pose_and_rigid_motion() {
        let mesh = octahedron();
        let w = cotangent_weights(&mesh, Precision::Double);
        let cfg = SmoothingConfig::new(0.5, 5).unwrap();
        let weights = SkinWeights::rigid(6, 0);
        let rest = deform_delta_mush(&mesh, &w, &cfg, &weights, &SkinningMatrices::identity(1)).unwrap();
        for (a, b) in rest.positions.iter().zip(mesh.positions()) {
            assert!((*a - *b).max_abs() < 1e-14);
        }
        let g = AffineTransform::new(Quat::from_axis_angle(Vec3::Y, 2.0).to_mat3(), Vec3::new(1.0, 2.0, 3.0));
        let out = deform_delta_mush(&mesh, &w, &cfg, &weights, &SkinningMatrices(vec![g])).unwrap();
        for (a, &b) in out.positions.iter().zip(mesh.positions()) {
            assert!((*a - g.transform_point(b)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn collapsed_neighbourhood_has_no_frame() {
        let mesh = octahedron();
        let w = cotangent_weights(&mesh, Precision::Double);
        let state = DeltaMushRest::new(&mesh, &w, &SmoothingConfig::default()).unwrap();
        let flat = vec![Vec3::ZERO; 6];
        assert!(matches!(state.frame(0, &flat), Err(DeformError::DegenerateFrame { vertex: 0 })));
    }
}
