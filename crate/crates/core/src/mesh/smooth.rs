use rayon::prelude::*;

use super::{MeshError, SmoothingWeights};
use crate::numerics::Vec3;

/// Explicit smoothing `x ← (1−κ)·x + κ·W·x`, repeated `iterations` times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingConfig {
    kappa: f64,
    iterations: u32,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig { kappa: 0.5, iterations: 16 }
    }
}

impl SmoothingConfig {
    pub fn new(kappa: f64, iterations: u32) -> Result<Self, MeshError> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(MeshError::InvalidConfig(format!("step {kappa} is outside (0, 1]")));
        }
        Ok(SmoothingConfig { kappa, iterations })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }
}

/// Smooths a per-vertex payload of width `N`.
///
/// Rows are evaluated in parallel but each row sums its neighbours in a fixed
/// order, so the result does not depend on the thread count.
pub fn smooth<const N: usize>(
    values: &[[f64; N]],
    w: &SmoothingWeights,
    cfg: &SmoothingConfig,
) -> Result<Vec<[f64; N]>, MeshError> {
    if values.len() != w.vertex_count() {
        return Err(MeshError::LengthMismatch { expected: w.vertex_count(), actual: values.len() });
    }
    let mut current = values.to_vec();
    if cfg.iterations == 0 {
        return Ok(current);
    }
    let keep = 1.0 - cfg.kappa;
    let mut next = vec![[0.0; N]; values.len()];
    for _ in 0..cfg.iterations {
        next.par_iter_mut().enumerate().for_each(|(i, out)| {
            let mut avg = [0.0; N];
            for (j, wij) in w.row(i) {
                let xj = &current[j];
                for k in 0..N {
                    avg[k] += wij * xj[k];
                }
            }
            let xi = &current[i];
            for k in 0..N {
                out[k] = keep * xi[k] + cfg.kappa * avg[k];
            }
        });
        std::mem::swap(&mut current, &mut next);
    }
    Ok(current)
}

pub fn smooth_positions(
    positions: &[Vec3],
    w: &SmoothingWeights,
    cfg: &SmoothingConfig,
) -> Result<Vec<Vec3>, MeshError> {
    let raw: Vec<[f64; 3]> = positions.iter().map(|p| p.to_array()).collect();
    Ok(smooth(&raw, w, cfg)?.into_iter().map(Vec3::from_array).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cotangent_weights, Precision, TriMesh};

    fn tetrahedron() -> TriMesh {
        let positions = vec![
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ];
        TriMesh::new(positions, vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]).unwrap()
    }

    #[test]
    fn zero_iterations_is_identity() {
        let mesh = tetrahedron();
        let w = cotangent_weights(&mesh, Precision::Double);
        let cfg = SmoothingConfig::new(0.7, 0).unwrap();
        let out = smooth_positions(mesh.positions(), &w, &cfg).unwrap();
        assert_eq!(out, mesh.positions());
    }

    #[test]
    fn constants_are_fixed_points() {
        let mesh = tetrahedron();
        let w = cotangent_weights(&mesh, Precision::Double);
        let field = vec![[2.5, -1.0]; 4];
        let out = smooth(&field, &w, &SmoothingConfig::new(0.3, 9).unwrap()).unwrap();
        for v in out {
            assert!((v[0] - 2.5).abs() < 1e-14 && (v[1] + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn full_step_moves_to_neighbour_average() {
        // Regular tetrahedron: all weights are 1/3, so one κ=1 step sends each
        // vertex to the centroid of the other three.
        let mesh = tetrahedron();
        let w = cotangent_weights(&mesh, Precision::Double);
        let out = smooth_positions(mesh.positions(), &w, &SmoothingConfig::new(1.0, 1).unwrap()).unwrap();
        let p = mesh.positions();
        let expected = (p[1] + p[2] + p[3]) * (1.0 / 3.0);
        assert!((out[0] - expected).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SmoothingConfig::new(0.0, 3).is_err());
        assert!(SmoothingConfig::new(1.5, 3).is_err());
        assert!(SmoothingConfig::new(f64::NAN, 3).is_err());
        let w = cotangent_weights(&tetrahedron(), Precision::Double);
        let short = vec![[0.0; 3]; 2];
        assert!(matches!(
            smooth(&short, &w, &SmoothingConfig::default()),
            Err(MeshError::LengthMismatch { expected: 4, actual: 2 })
        ));
    }
}
