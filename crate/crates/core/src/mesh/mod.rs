//! Indexed triangle meshes and the Laplacian smoothing machinery built on them.

mod cotan;
mod obj;
mod smooth;

pub use cotan::{cotangent_weights, Precision, SmoothingWeights};
pub use obj::{load_obj, parse_obj, save_obj};
pub use smooth::{smooth, smooth_positions, SmoothingConfig};

use thiserror::Error;

use crate::numerics::Vec3;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh has no vertices or no faces")]
    EmptyMesh,
    #[error("triangle {triangle} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange { triangle: usize, index: usize, count: usize },
    #[error("triangle {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("vertex {0} is not referenced by any triangle")]
    IsolatedVertex(usize),
    #[error("vertex {0} has a non-finite position")]
    NonFinitePosition(usize),
    #[error("expected {expected} per-vertex values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid smoothing configuration: {0}")]
    InvalidConfig(String),
}

/// Triangle mesh with rest positions.
///
/// Every index is in range, no triangle repeats a vertex and every vertex is
/// used by at least one triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    positions: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(positions: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if positions.is_empty() || triangles.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(MeshError::NonFinitePosition(i));
        }
        let count = positions.len();
        let mut used = vec![false; count];
        for (t, tri) in triangles.iter().enumerate() {
            for &index in tri {
                if index >= count {
                    return Err(MeshError::IndexOutOfRange { triangle: t, index, count });
                }
                used[index] = true;
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::RepeatedVertex(t));
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(MeshError::IsolatedVertex(i));
        }
        Ok(TriMesh { positions, triangles })
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    /// Same topology with new positions.
    pub fn with_positions(&self, positions: Vec<Vec3>) -> Result<TriMesh, MeshError> {
        if positions.len() != self.positions.len() {
            return Err(MeshError::LengthMismatch {
                expected: self.positions.len(),
                actual: positions.len(),
            });
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(MeshError::NonFinitePosition(i));
        }
        Ok(TriMesh { positions, triangles: self.triangles.clone() })
    }

    /// Sorted, deduplicated one-ring neighbours of every vertex.
    pub fn one_rings(&self) -> Vec<Vec<usize>> {
        let mut rings = vec![Vec::new(); self.positions.len()];
        for &[a, b, c] in &self.triangles {
            rings[a].extend([b, c]);
            rings[b].extend([a, c]);
            rings[c].extend([a, b]);
        }
        for ring in &mut rings {
            ring.sort_unstable();
            ring.dedup();
        }
        rings
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for p in &self.positions {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        (lo, hi)
    }

    /// Length of the bounding-box diagonal.
    pub fn extent(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (hi - lo).norm()
    }
}
