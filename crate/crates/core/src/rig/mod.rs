//! Joint hierarchies, poses and skinning matrices.
//!
//! A joint's local transform is `T ∘ R ∘ Sh ∘ S` (translation, rotation,
//! upper-triangular shear, scale). World transforms compose down the tree:
//!
//! ```text
//! W_j = W_parent ∘ T_j ∘ C_j ∘ R_j ∘ Sh_j ∘ S_j
//! ```
//!
//! where `C_j = diag(1/ps)` undoes the parent's local scale `ps` when the
//! joint is scale-compensating and is the identity otherwise. `C_j` acts
//! about the joint's own origin, so the joint stays attached to the end of a
//! scaled parent segment while not inheriting its scale.

mod json;

use thiserror::Error;

use crate::numerics::{AffineTransform, Mat3, Quat, Vec3};

#[derive(Debug, Error)]
pub enum RigError {
    #[error("pose has {actual} joints but the hierarchy has {expected}")]
    PoseLength { expected: usize, actual: usize },
    #[error("joint {joint} compensates a zero scale on its parent")]
    ZeroScale { joint: usize },
    #[error("bind transform of joint {joint} is not invertible")]
    SingularBind { joint: usize },
    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),
    #[error("invalid transform for joint {joint}: {message}")]
    InvalidTransform { joint: usize, message: String },
    #[error("unknown joint {0:?}")]
    UnknownJoint(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Joint-local transform parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalTransform {
    pub translation: Vec3,
    pub rotation: Quat,
    pub scale: Vec3,
    /// Upper-triangular shear factors `(xy, xz, yz)`.
    pub shear: Vec3,
}

impl Default for LocalTransform {
    fn default() -> Self {
        LocalTransform {
            translation: Vec3::ZERO,
            rotation: Quat::IDENTITY,
            scale: Vec3::ONE,
            shear: Vec3::ZERO,
        }
    }
}

impl LocalTransform {
    pub fn from_translation(t: Vec3) -> Self {
        LocalTransform { translation: t, ..Default::default() }
    }

    pub fn shear_matrix(&self) -> Mat3 {
        let s = self.shear;
        Mat3::from_rows([[1.0, s.x, s.y], [0.0, 1.0, s.z], [0.0, 0.0, 1.0]])
    }

    /// `R ∘ Sh ∘ S`
    pub fn linear(&self) -> Mat3 {
        self.rotation.to_mat3() * self.shear_matrix() * Mat3::from_diagonal(self.scale)
    }

    pub fn to_affine(&self) -> AffineTransform {
        AffineTransform::new(self.linear(), self.translation)
    }

    fn validate(&self, joint: usize) -> Result<(), RigError> {
        let invalid = |message: &str| RigError::InvalidTransform { joint, message: message.into() };
        let finite = self.translation.is_finite()
            && self.scale.is_finite()
            && self.shear.is_finite()
            && self.rotation.norm().is_finite();
        if !finite {
            return Err(invalid("non-finite component"));
        }
        if (self.rotation.norm() - 1.0).abs() > 1e-9 {
            return Err(invalid("rotation quaternion is not normalized"));
        }
        if self.scale.x == 0.0 || self.scale.y == 0.0 || self.scale.z == 0.0 {
            return Err(invalid("zero scale component"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Joint {
    pub name: String,
    pub parent: Option<usize>,
    pub bind_local: LocalTransform,
    pub scale_compensate: bool,
}

/// A forest of joints. Parents may be listed after their children; an
/// evaluation order is derived at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct JointHierarchy {
    joints: Vec<Joint>,
    order: Vec<usize>,
}

impl JointHierarchy {
    pub fn new(joints: Vec<Joint>) -> Result<Self, RigError> {
        let n = joints.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        let mut names = std::collections::HashSet::new();
        for (j, joint) in joints.iter().enumerate() {
            if !names.insert(joint.name.as_str()) {
                return Err(RigError::InvalidHierarchy(format!("duplicate joint name {:?}", joint.name)));
            }
            joint.bind_local.validate(j)?;
            match joint.parent {
                Some(p) if p >= n => {
                    return Err(RigError::InvalidHierarchy(format!("joint {j} has parent {p} out of range")))
                }
                Some(p) if p == j => {
                    return Err(RigError::InvalidHierarchy(format!("joint {j} is its own parent")))
                }
                Some(p) => children[p].push(j),
                None => roots.push(j),
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<usize> = roots.into_iter().rev().collect();
        while let Some(j) = stack.pop() {
            order.push(j);
            stack.extend(children[j].iter().rev());
        }
        if order.len() != n {
            return Err(RigError::InvalidHierarchy("parent links contain a cycle".into()));
        }
        Ok(JointHierarchy { joints, order })
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn len(&self) -> usize {
        self.joints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }

    /// Parent-before-child evaluation order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j.name == name)
    }

    pub fn bind_pose(&self) -> Pose {
        Pose { locals: self.joints.iter().map(|j| j.bind_local).collect() }
    }
}

/// Local transforms for every joint of a hierarchy.
#[derive(Clone, Debug, PartialEq)]
pub struct Pose {
    locals: Vec<LocalTransform>,
}

impl Pose {
    pub fn new(locals: Vec<LocalTransform>) -> Result<Self, RigError> {
        for (j, l) in locals.iter().enumerate() {
            l.validate(j)?;
        }
        Ok(Pose { locals })
    }

    pub fn locals(&self) -> &[LocalTransform] {
        &self.locals
    }

    pub fn len(&self) -> usize {
        self.locals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locals.is_empty()
    }

    pub fn set(&mut self, joint: usize, local: LocalTransform) -> Result<(), RigError> {
        local.validate(joint)?;
        self.locals[joint] = local;
        Ok(())
    }

    /// Applies the rigid transform `x ↦ rotation·x + translation` in front of
    /// every root joint, moving the whole skeleton.
    pub fn prepend_rigid(&mut self, h: &JointHierarchy, rotation: Quat, translation: Vec3) {
        for (j, joint) in h.joints().iter().enumerate() {
            if joint.parent.is_none() {
                let l = &mut self.locals[j];
                l.translation = rotation.rotate(l.translation) + translation;
                l.rotation = (rotation * l.rotation).try_normalize().unwrap_or(Quat::IDENTITY);
            }
        }
    }
}

/// Per-joint skinning transforms `M_j = W_j(pose) ∘ W_j(bind)⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkinningMatrices(pub Vec<AffineTransform>);

impl SkinningMatrices {
    pub fn identity(joints: usize) -> Self {
        SkinningMatrices(vec![AffineTransform::IDENTITY; joints])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, joint: usize) -> Option<&AffineTransform> {
        self.0.get(joint)
    }

    /// `g ∘ M_j` for every joint.
    pub fn premultiplied(&self, g: &AffineTransform) -> Self {
        SkinningMatrices(self.0.iter().map(|m| *g * *m).collect())
    }
}

pub fn world_transforms(h: &JointHierarchy, pose: &Pose) -> Result<Vec<AffineTransform>, RigError> {
    if pose.len() != h.len() {
        return Err(RigError::PoseLength { expected: h.len(), actual: pose.len() });
    }
    let mut world = vec![AffineTransform::IDENTITY; h.len()];
    for &j in h.order() {
        let joint = &h.joints[j];
        let local = &pose.locals[j];
        world[j] = match joint.parent {
            None => local.to_affine(),
            Some(p) => {
                let linear = if joint.scale_compensate {
                    let ps = pose.locals[p].scale;
                    if ps.x == 0.0 || ps.y == 0.0 || ps.z == 0.0 {
                        return Err(RigError::ZeroScale { joint: j });
                    }
                    let undo = Mat3::from_diagonal(Vec3::new(1.0 / ps.x, 1.0 / ps.y, 1.0 / ps.z));
                    undo * local.linear()
                } else {
                    local.linear()
                };
                world[p] * AffineTransform::new(linear, local.translation)
            }
        };
    }
    Ok(world)
}

pub fn skinning_matrices(h: &JointHierarchy, pose: &Pose) -> Result<SkinningMatrices, RigError> {
    let bind = world_transforms(h, &h.bind_pose())?;
    let posed = world_transforms(h, pose)?;
    let mut out = Vec::with_capacity(h.len());
    for (j, (b, p)) in bind.iter().zip(&posed).enumerate() {
        let inv = b.inverse().ok_or(RigError::SingularBind { joint: j })?;
        // Bitwise-equal world transforms give an exact identity rather than W·W⁻¹ roundoff.
        out.push(if b == p { AffineTransform::IDENTITY } else { *p * inv });
    }
    Ok(SkinningMatrices(out))
}
