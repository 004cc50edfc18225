//! Nearest proper rotation via the polar decomposition `M = R·S`.
//!
//! `R = M·(MᵀM)^(-1/2)`. The inverse square root is a quadratic polynomial
//! in `S = MᵀM` whose coefficients depend only on the square roots `σ` of the
//! eigenvalues of `S`, so no eigenvectors are needed:
//!
//! ```text
//! U   = (−S² + (I1² − I2)·S + I1·I3·I) / (I1·I2 − I3)      U = S^½
//! U⁻¹ = (S − I1·U + I2·I) / I3
//! ```
//!
//! with `I1 = Σσ`, `I2 = σ1σ2 + σ2σ3 + σ3σ1`, `I3 = σ1σ2σ3`. When
//! `det(M) < 0`, `σ3` is negated so that `R` is a rotation rather than a
//! reflection; this equals `U·diag(1, 1, -1)·Vᵀ` from the SVD. The negated
//! form divides by `(σ2 − σ3)(σ1 − σ3)`, so a near-repeated smallest pair goes
//! through the eigenvectors instead.
//!
//! Forming `MᵀM` squares the condition number, so the smallest eigenvalue
//! carries a relative error of order `ε·(σ1/σ3)²`. One Newton–Schulz step
//! `R ← R·(3I − RᵀR)/2` removes that orthogonality defect quadratically.

use super::eigen::{eig_sym3, eigenvalues_sym3};
use super::linalg::{Mat3, SymMat3};
use super::NumericsError;

/// Eigenvalue ratio `λ_min / λ_max` at or below which a symmetric input to
/// [`inv_sqrt_sym3`] counts as rank-deficient.
pub const RANK_TOL: f64 = 1e-8;

/// Relative gap `(σ2 − σ3)/σ1` below which the negated form uses eigenvectors.
const NEGATED_GAP_TOL: f64 = 1e-4;

/// `V·diag(λ1^-½, λ2^-½, ±λ3^-½)·Vᵀ`, negating the smallest term when
/// `negate_smallest` is set.
pub fn inv_sqrt_sym3(s: &SymMat3, negate_smallest: bool) -> Result<Mat3, NumericsError> {
    let [l1, l2, l3] = eigenvalues_sym3(s);
    check_rank(l1, l3)?;
    let (s1, s2, mut s3) = (l1.sqrt(), l2.sqrt(), l3.sqrt());
    if negate_smallest {
        if s2 - s3 <= NEGATED_GAP_TOL * s1 {
            return inv_sqrt_eigen(s, true);
        }
        s3 = -s3;
    }
    let i1 = s1 + s2 + s3;
    let i2 = s1 * s2 + s2 * s3 + s3 * s1;
    let i3 = s1 * s2 * s3;
    let sm = s.to_mat3();
    let sq = sm * sm;
    let u = (sm.scale(i1 * i1 - i2) - sq + Mat3::IDENTITY.scale(i1 * i3)).scale(1.0 / (i1 * i2 - i3));
    Ok((sm - u.scale(i1) + Mat3::IDENTITY.scale(i2)).scale(1.0 / i3))
}

fn check_rank(l1: f64, l3: f64) -> Result<(), NumericsError> {
    if !(l3 > RANK_TOL * l1) || !l1.is_finite() {
        return Err(NumericsError::DegenerateInput {
            ratio: if l1 > 0.0 { l3 / l1 } else { 0.0 },
        });
    }
    Ok(())
}

/// Same result assembled from the eigenvectors.
fn inv_sqrt_eigen(s: &SymMat3, negate_smallest: bool) -> Result<Mat3, NumericsError> {
    let eig = eig_sym3(s);
    let [l1, l2, l3] = eig.values;
    check_rank(l1, l3)?;
    let factors = [
        1.0 / l1.sqrt(),
        1.0 / l2.sqrt(),
        if negate_smallest { -1.0 } else { 1.0 } / l3.sqrt(),
    ];
    let mut out = Mat3::ZERO;
    for (f, e) in factors.iter().zip(eig.vectors) {
        out += Mat3::outer(e, e).scale(*f);
    }
    Ok(out)
}

/// Closest rotation (det = +1) to `m` in the Frobenius norm.
pub fn polar_rotation(m: &Mat3) -> Result<Mat3, NumericsError> {
    if !m.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let inv_sqrt = inv_sqrt_sym3(&SymMat3::gram(m), m.determinant() < 0.0)?;
    let r = *m * inv_sqrt;
    let defect = Mat3::IDENTITY.scale(3.0) - r.transpose() * r;
    Ok((r * defect).scale(0.5))
}
