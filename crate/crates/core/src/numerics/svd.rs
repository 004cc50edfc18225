//! One-sided Jacobi SVD for 3×3 matrices.
//!
//! Slow but accurate; used as the reference route for nearest-rotation
//! extraction and shares no code with the closed-form eigen path.

use super::linalg::{Mat3, Vec3};

const MAX_SWEEPS: usize = 60;

/// `m = u · diag(sigma) · vᵀ` with `sigma` sorted descending and `u`, `v` orthogonal.
#[derive(Clone, Copy, Debug)]
pub struct Svd3 {
    pub u: Mat3,
    pub sigma: [f64; 3],
    pub v: Mat3,
}

impl Svd3 {
    pub fn reconstruct(&self) -> Mat3 {
        self.u * Mat3::from_diagonal(Vec3::from_array(self.sigma)) * self.v.transpose()
    }
}

pub fn svd3(m: &Mat3) -> Svd3 {
    let mut cols = [m.col(0), m.col(1), m.col(2)];
    let mut vcols = [Vec3::X, Vec3::Y, Vec3::Z];

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let alpha = cols[p].norm_squared();
            let beta = cols[q].norm_squared();
            let gamma = cols[p].dot(cols[q]);
            if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            let (ap, aq) = (cols[p], cols[q]);
            cols[p] = ap * c - aq * s;
            cols[q] = ap * s + aq * c;
            let (vp, vq) = (vcols[p], vcols[q]);
            vcols[p] = vp * c - vq * s;
            vcols[q] = vp * s + vq * c;
        }
        if !rotated {
            break;
        }
    }

    let mut order = [0usize, 1, 2];
    let norms = cols.map(|c| c.norm());
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let sigma = order.map(|k| norms[k]);
    let v = Mat3::from_cols(vcols[order[0]], vcols[order[1]], vcols[order[2]]);

    // Left vectors; rank-deficient directions are completed orthonormally.
    let floor = sigma[0] * f64::EPSILON * 8.0;
    let mut u_cols = [Vec3::ZERO; 3];
    for (slot, &k) in order.iter().enumerate() {
        u_cols[slot] = if norms[k] > floor {
            cols[k] * (1.0 / norms[k])
        } else {
            Vec3::ZERO
        };
    }
    if u_cols[0] == Vec3::ZERO {
        u_cols[0] = Vec3::X;
    }
    if u_cols[1] == Vec3::ZERO {
        u_cols[1] = super::eigen::orthonormal_complement(u_cols[0]).0;
    }
    if u_cols[2] == Vec3::ZERO {
        u_cols[2] = u_cols[0].cross(u_cols[1]);
    }

    Svd3 {
        u: Mat3::from_cols(u_cols[0], u_cols[1], u_cols[2]),
        sigma,
        v,
    }
}

/// Nearest proper rotation `U·diag(1, 1, det(UVᵀ))·Vᵀ` computed from a full SVD.
pub fn svd_rotation_oracle(m: &Mat3) -> Mat3 {
    let svd = svd3(m);
    let d = (svd.u * svd.v.transpose()).determinant().signum();
    svd.u * Mat3::from_diagonal(Vec3::new(1.0, 1.0, d)) * svd.v.transpose()
}
