//! Closed-form eigen-decomposition of symmetric 3×3 matrices.
//!
//! Eigenvalues come from the trigonometric solution of the characteristic
//! cubic. The eigenvector of the best-separated eigenvalue is taken as the
//! null vector of `A − λI` (largest cross product of its rows); the remaining
//! pair is resolved by an exact 2×2 rotation in the orthogonal complement.
//! Final eigenvalues are Rayleigh quotients of the computed vectors.

use super::linalg::{Mat3, SymMat3, Vec3};

/// Relative spread below which all three eigenvalues are treated as equal.
pub const REPEATED_EIGENVALUE_TOL: f64 = 1e-12;

/// Eigenvalues sorted descending with matching unit eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenTriple {
    pub values: [f64; 3],
    pub vectors: [Vec3; 3],
}

impl EigenTriple {
    /// `Σ f(λ_k) e_k e_kᵀ`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Mat3 {
        let mut out = Mat3::ZERO;
        for (&lambda, &e) in self.values.iter().zip(&self.vectors) {
            out += Mat3::outer(e, e).scale(f(lambda));
        }
        out
    }

    pub fn reconstruct(&self) -> Mat3 {
        self.reconstruct_with(|l| l)
    }
}

pub fn eig_sym3(s: &SymMat3) -> EigenTriple {
    let identity_basis = [Vec3::X, Vec3::Y, Vec3::Z];
    let (scale, a, q, p) = match reduce(s) {
        Ok(r) => r,
        Err(lambda) => return EigenTriple { values: [lambda; 3], vectors: identity_basis },
    };
    let [l1, l2, l3] = cubic_roots(&a, q, p);
    if l1 - l3 < REPEATED_EIGENVALUE_TOL * l1.abs().max(l3.abs()) {
        return EigenTriple { values: [q * scale; 3], vectors: identity_basis };
    }

    let am = a.to_mat3();
    let isolated = if l1 - l2 >= l2 - l3 { l1 } else { l3 };
    let e_iso = null_vector(&am, isolated);

    // Exact Jacobi rotation of the 2×2 restriction to the complement plane.
    let (u, v) = orthonormal_complement(e_iso);
    let (au, av) = (am * u, am * v);
    let (guu, guv, gvv) = (u.dot(au), u.dot(av), v.dot(av));
    let (w1, w2) = if guv == 0.0 {
        (u, v)
    } else {
        let tau = (gvv - guu) / (2.0 * guv);
        let t = -1.0f64.copysign(tau) / (tau.abs() + (1.0 + tau * tau).sqrt());
        let cs = 1.0 / (1.0 + t * t).sqrt();
        let sn = cs * t;
        (u * cs + v * sn, v * cs - u * sn)
    };

    let rayleigh = |e: Vec3| e.dot(am * e);
    let mut pairs = [
        (rayleigh(e_iso), e_iso),
        (rayleigh(w1), w1),
        (rayleigh(w2), w2),
    ];
    for (i, j) in [(0, 1), (1, 2), (0, 1)] {
        if pairs[i].0 < pairs[j].0 {
            pairs.swap(i, j);
        }
    }

    EigenTriple {
        values: [pairs[0].0 * scale, pairs[1].0 * scale, pairs[2].0 * scale],
        vectors: [pairs[0].1, pairs[1].1, pairs[2].1],
    }
}

/// Trigonometric roots of the characteristic cubic of a unit-scaled `a` with
/// `q = tr(a)/3` and `p² = tr((a − qI)²)/6 > 0`, sorted descending.
fn cubic_roots(a: &SymMat3, q: f64, p: f64) -> [f64; 3] {
    // B = (A - qI) / p has eigenvalues 2cos(φ + 2πk/3) with det(B) = 2cos(3φ).
    let b = SymMat3::new((a.xx - q) / p, a.xy / p, a.xz / p, (a.yy - q) / p, a.yz / p, (a.zz - q) / p);
    let half_det = 0.5 * b.to_mat3().determinant();
    let phi = half_det.clamp(-1.0, 1.0).acos() / 3.0;
    let (sin, cos) = phi.sin_cos();
    let l1 = q + 2.0 * p * cos;
    // cos(φ + 2π/3) = −cos φ / 2 − (√3/2) sin φ
    let l3 = q - p * (cos + 3f64.sqrt() * sin);
    [l1, 3.0 * q - l1 - l3, l3]
}

/// Eigenvalues only, sorted descending.
pub fn eigenvalues_sym3(s: &SymMat3) -> [f64; 3] {
    match reduce(s) {
        Ok((scale, a, q, p)) => refine_pair(&a, cubic_roots(&a, q, p)).map(|l| l * scale),
        Err(lambda) => [lambda; 3],
    }
}

/// Keeps the isolated root and recomputes the other two from the trace and
/// determinant, which holds the small ones to relative rather than absolute
/// accuracy.
fn refine_pair(a: &SymMat3, [l1, l2, l3]: [f64; 3]) -> [f64; 3] {
    let det = a.to_mat3().determinant();
    if l1 - l2 < l2 - l3 {
        return if l1 * l2 == 0.0 { [l1, l2, l3] } else { [l1, l2, (det / (l1 * l2)).min(l2)] };
    }
    let (sum, prod) = (a.trace() - l1, if l1 == 0.0 { l2 * l3 } else { det / l1 });
    let big = 0.5 * (sum + (sum * sum - 4.0 * prod).max(0.0).sqrt().copysign(sum));
    let small = if big == 0.0 { 0.0 } else { prod / big };
    [l1, big.max(small).min(l1), big.min(small)]
}

/// Unit-scaled copy `a` of `s` (keeps the cubic away from overflow) with its
/// `q` and `p`, or the common eigenvalue when `s` is a multiple of I.
fn reduce(s: &SymMat3) -> Result<(f64, SymMat3, f64, f64), f64> {
    let scale = s.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return Err(s.trace() / 3.0);
    }
    let inv_scale = 1.0 / scale;
    let a = SymMat3::new(
        s.xx * inv_scale,
        s.xy * inv_scale,
        s.xz * inv_scale,
        s.yy * inv_scale,
        s.yz * inv_scale,
        s.zz * inv_scale,
    );
    let q = a.trace() / 3.0;
    let off = a.xy * a.xy + a.xz * a.xz + a.yz * a.yz;
    let (dx, dy, dz) = (a.xx - q, a.yy - q, a.zz - q);
    let p = ((dx * dx + dy * dy + dz * dz + 2.0 * off) / 6.0).sqrt();
    if p == 0.0 {
        return Err(q * scale);
    }
    Ok((scale, a, q, p))
}

/// Unit null vector of `a − λI` for a simple eigenvalue λ.
fn null_vector(a: &Mat3, lambda: f64) -> Vec3 {
    let shifted = *a - Mat3::IDENTITY.scale(lambda);
    let (r0, r1, r2) = (shifted.row(0), shifted.row(1), shifted.row(2));
    let candidates = [r0.cross(r1), r0.cross(r2), r1.cross(r2)];
    let best = candidates
        .iter()
        .copied()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .unwrap_or(Vec3::X);
    best.try_normalize().unwrap_or_else(|| {
        // Rank ≤ 1: any vector orthogonal to the dominant row will do.
        let dominant = [r0, r1, r2]
            .into_iter()
            .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
            .unwrap_or(Vec3::X);
        orthonormal_complement(dominant.try_normalize().unwrap_or(Vec3::Z)).0
    })
}

/// Two unit vectors completing `n` (unit) to an orthonormal basis.
pub(crate) fn orthonormal_complement(n: Vec3) -> (Vec3, Vec3) {
    let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vec3::X
    } else if n.y.abs() <= n.z.abs() {
        Vec3::Y
    } else {
        Vec3::Z
    };
    let u = (axis - n * n.dot(axis)).try_normalize().unwrap_or(Vec3::X);
    let v = n.cross(u);
    (u, v)
}
