//! JSON rig and pose files.
//!
//! Rig: `{"joints": [{"name", "parent" (index or -1), "bind_local": {"t", "r", "s", "shear"?}, "scale_compensate"}]}`
//! Pose: `{"pose": [{"joint": name, "t", "r", "s", "shear"?}]}`; quaternions are `[x, y, z, w]`.

use serde::{Deserialize, Serialize};

use super::{Joint, JointHierarchy, LocalTransform, Pose, RigError};
use crate::numerics::{Quat, Vec3};

#[derive(Serialize, Deserialize)]
struct RigFile {
    joints: Vec<JointRecord>,
}

#[derive(Serialize, Deserialize)]
struct JointRecord {
    name: String,
    parent: i64,
    bind_local: TransformRecord,
    #[serde(default)]
    scale_compensate: bool,
}

#[derive(Serialize, Deserialize, Default)]
struct TransformRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shear: Option<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
struct PoseFile {
    pose: Vec<PoseRecord>,
}

#[derive(Serialize, Deserialize)]
struct PoseRecord {
    joint: String,
    #[serde(flatten)]
    transform: TransformRecord,
}

impl TransformRecord {
    /// Fields present in the record override `base`.
    fn apply(&self, base: LocalTransform, joint: usize) -> Result<LocalTransform, RigError> {
        let mut out = base;
        if let Some(t) = self.t {
            out.translation = Vec3::from_array(t);
        }
        if let Some([x, y, z, w]) = self.r {
            let q = Quat::new(x, y, z, w);
            out.rotation = if (q.norm() - 1.0).abs() <= 1e-12 {
                q
            } else {
                q.try_normalize().ok_or(RigError::InvalidTransform {
                    joint,
                    message: "zero-length rotation quaternion".into(),
                })?
            };
        }
        if let Some(s) = self.s {
            out.scale = Vec3::from_array(s);
        }
        if let Some(sh) = self.shear {
            out.shear = Vec3::from_array(sh);
        }
        Ok(out)
    }

    fn from_local(l: &LocalTransform) -> Self {
        let q = l.rotation;
        TransformRecord {
            t: Some(l.translation.to_array()),
            r: Some([q.x, q.y, q.z, q.w]),
            s: Some(l.scale.to_array()),
            shear: (l.shear != Vec3::ZERO).then(|| l.shear.to_array()),
        }
    }
}

impl JointHierarchy {
    pub fn from_json(text: &str) -> Result<Self, RigError> {
        let file: RigFile = serde_json::from_str(text)?;
        let joints = file
            .joints
            .into_iter()
            .enumerate()
            .map(|(j, rec)| {
                let parent = match rec.parent {
                    -1 => None,
                    p if p >= 0 => Some(p as usize),
                    p => return Err(RigError::InvalidHierarchy(format!("joint {j} has parent index {p}"))),
                };
                Ok(Joint {
                    name: rec.name,
                    parent,
                    bind_local: rec.bind_local.apply(LocalTransform::default(), j)?,
                    scale_compensate: rec.scale_compensate,
                })
            })
            .collect::<Result<Vec<_>, RigError>>()?;
        JointHierarchy::new(joints)
    }

    pub fn to_json(&self) -> String {
        let file = RigFile {
            joints: self
                .joints
                .iter()
                .map(|j| JointRecord {
                    name: j.name.clone(),
                    parent: j.parent.map_or(-1, |p| p as i64),
                    bind_local: TransformRecord::from_local(&j.bind_local),
                    scale_compensate: j.scale_compensate,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("rig serialization cannot fail")
    }
}

impl Pose {
    /// Parses a pose file against `h`; joints absent from the file keep their
    /// bind-local values, as do components absent from an entry.
    pub fn from_json(text: &str, h: &JointHierarchy) -> Result<Self, RigError> {
        let file: PoseFile = serde_json::from_str(text)?;
        let mut pose = h.bind_pose();
        for rec in file.pose {
            let j = h.index_of(&rec.joint).ok_or_else(|| RigError::UnknownJoint(rec.joint.clone()))?;
            let local = rec.transform.apply(pose.locals[j], j)?;
            pose.set(j, local)?;
        }
        Ok(pose)
    }

    pub fn to_json(&self, h: &JointHierarchy) -> String {
        let file = PoseFile {
            pose: h
                .joints()
                .iter()
                .zip(&self.locals)
                .map(|(j, l)| PoseRecord {
                    joint: j.name.clone(),
                    transform: TransformRecord::from_local(l),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("pose serialization cannot fail")
    }
}
