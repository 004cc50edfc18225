use super::linalg::AffineTransform;
use super::polar::polar_rotation;
use super::NumericsError;

/// An affine transform split as `rigid ∘ scale_shear`.
///
/// `rigid` carries the proper rotation and the full translation;
/// `scale_shear` is a symmetric linear map about the origin and keeps any
/// reflection of the input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFactors {
    pub rigid: AffineTransform,
    pub scale_shear: AffineTransform,
}

pub fn factor_affine(m: &AffineTransform) -> Result<AffineFactors, NumericsError> {
    if !m.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let rotation = polar_rotation(&m.linear)?;
    let stretch = rotation.transpose() * m.linear;
    Ok(AffineFactors {
        rigid: AffineTransform::new(rotation, m.translation),
        scale_shear: AffineTransform::from_linear(stretch),
    })
}
