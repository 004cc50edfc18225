//! Generated fixtures: a capped tube for the two-joint and single-joint
//! scale scenarios, and a sliver-heavy spindle for the precision experiment.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use eddm::deform::SkinWeights;
use eddm::mesh::{save_obj, TriMesh};
use eddm::numerics::{Quat, Vec3};
use eddm::rig::{Joint, JointHierarchy, LocalTransform, Pose};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioName {
    Fig1,
    Fig2,
    Stress,
}

impl FromStr for ScenarioName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig1" => Ok(ScenarioName::Fig1),
            "fig2" => Ok(ScenarioName::Fig2),
            "stress" => Ok(ScenarioName::Stress),
            other => Err(format!("unknown scenario {other:?} (expected fig1, fig2 or stress)")),
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioName::Fig1 => "fig1",
            ScenarioName::Fig2 => "fig2",
            ScenarioName::Stress => "stress",
        })
    }
}

/// Tube along +Y from `y = 0` to `y = length`, closed by two fan caps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeParams {
    pub radial_segments: usize,
    pub height_segments: usize,
    pub radius: f64,
    pub length: f64,
}

impl Default for TubeParams {
    fn default() -> Self {
        TubeParams { radial_segments: 24, height_segments: 48, radius: 1.0, length: 6.0 }
    }
}

impl TubeParams {
    pub fn mesh(&self) -> TriMesh {
        let (seg, rings) = (self.radial_segments, self.height_segments + 1);
        let mut p = Vec::with_capacity(seg * rings + 2);
        for r in 0..rings {
            let y = self.length * r as f64 / self.height_segments as f64;
            for s in 0..seg {
                let theta = TAU * s as f64 / seg as f64;
                p.push(Vec3::new(self.radius * theta.cos(), y, self.radius * theta.sin()));
            }
        }
        let bottom = p.len();
        p.push(Vec3::ZERO);
        p.push(Vec3::new(0.0, self.length, 0.0));
        let mut t = Vec::with_capacity(2 * seg * rings);
        for r in 0..rings - 1 {
            for s in 0..seg {
                let a = r * seg + s;
                let b = r * seg + (s + 1) % seg;
                t.push([a, a + seg, b + seg]);
                t.push([a, b + seg, b]);
            }
        }
        let top_ring = (rings - 1) * seg;
        for s in 0..seg {
            let n = (s + 1) % seg;
            t.push([bottom, s, n]);
            t.push([bottom + 1, top_ring + n, top_ring + s]);
        }
        TriMesh::new(p, t).expect("tube topology is valid")
    }
}

/// A generated fixture. `extra_poses` are written next to `pose.json` under
/// their own names.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: ScenarioName,
    pub tube: Option<TubeParams>,
    pub mesh: TriMesh,
    pub rig: JointHierarchy,
    pub weights: SkinWeights,
    pub pose: Pose,
    pub extra_poses: Vec<(String, Pose)>,
}

pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

fn joint(name: &str, parent: Option<usize>, t: Vec3, scale_compensate: bool) -> Joint {
    Joint { name: name.into(), parent, bind_local: LocalTransform::from_translation(t), scale_compensate }
}

/// Weights ramping from joint 0 to joint 1 with a smoothstep over `y ∈ [y0, y1]`.
fn ramp_weights(mesh: &TriMesh, y0: f64, y1: f64) -> SkinWeights {
    let rows = mesh
        .positions()
        .iter()
        .map(|p| {
            let s = smoothstep((p.y - y0) / (y1 - y0));
            vec![(0, 1.0 - s), (1, s)]
        })
        .collect();
    SkinWeights::new(rows).expect("ramp weights are valid")
}

fn with_local(pose: &mut Pose, joint: usize, f: impl FnOnce(&mut LocalTransform)) {
    let mut local = pose.locals()[joint];
    f(&mut local);
    pose.set(joint, local).expect("joint index is in range");
}

/// Two-joint chain at the tube's third points; the upper joint compensates
/// its parent's scale. Pose: joint 1 stretched ×2 along Y, joint 2 scaled
/// uniformly by 0.5. `pose_rigid` bends the same chain without any scale.
pub fn fig1(tube: TubeParams) -> Scenario {
    let mesh = tube.mesh();
    let third = tube.length / 3.0;
    let rig = JointHierarchy::new(vec![
        joint("joint1", None, Vec3::new(0.0, third, 0.0), false),
        joint("joint2", Some(0), Vec3::new(0.0, third, 0.0), true),
    ])
    .expect("fig1 rig is valid");
    let weights = ramp_weights(&mesh, third, 2.0 * third);

    let mut pose = rig.bind_pose();
    with_local(&mut pose, 0, |l| l.scale = Vec3::new(1.0, 2.0, 1.0));
    with_local(&mut pose, 1, |l| l.scale = Vec3::new(0.5, 0.5, 0.5));

    let mut rigid = rig.bind_pose();
    with_local(&mut rigid, 0, |l| l.rotation = Quat::from_axis_angle(Vec3::X, 0.3));
    with_local(&mut rigid, 1, |l| l.rotation = Quat::from_axis_angle(Vec3::Z, 0.8));

    Scenario {
        name: ScenarioName::Fig1,
        tube: Some(tube),
        mesh,
        rig,
        weights,
        pose,
        extra_poses: vec![("pose_rigid".into(), rigid)],
    }
}

/// Single joint at the tube's centre, stretched ×3 along Y.
pub fn fig2(tube: TubeParams) -> Scenario {
    let mesh = tube.mesh();
    let rig = JointHierarchy::new(vec![joint("joint1", None, Vec3::new(0.0, tube.length / 2.0, 0.0), false)])
        .expect("fig2 rig is valid");
    let weights = SkinWeights::rigid(mesh.vertex_count(), 0);
    let mut pose = rig.bind_pose();
    with_local(&mut pose, 0, |l| l.scale = Vec3::new(1.0, 3.0, 1.0));
    Scenario { name: ScenarioName::Fig2, tube: Some(tube), mesh, rig, weights, pose, extra_poses: Vec::new() }
}

/// Closed spindle of `rings` rings with `segments` vertices each between two
/// poles. Pole fans have apex angles of `360°/segments`.
pub fn spindle(segments: usize, rings: usize, radius: f64, half_height: f64) -> TriMesh {
    let mut p = Vec::with_capacity(segments * rings + 2);
    for r in 0..rings {
        let f = (r + 1) as f64 / (rings + 1) as f64;
        let y = half_height * (2.0 * f - 1.0);
        let ring_radius = radius * (std::f64::consts::PI * f).sin();
        for s in 0..segments {
            let theta = TAU * s as f64 / segments as f64;
            p.push(Vec3::new(ring_radius * theta.cos(), y, ring_radius * theta.sin()));
        }
    }
    let south = p.len();
    p.push(Vec3::new(0.0, -half_height, 0.0));
    p.push(Vec3::new(0.0, half_height, 0.0));
    let mut t = Vec::new();
    for r in 0..rings - 1 {
        for s in 0..segments {
            let a = r * segments + s;
            let b = r * segments + (s + 1) % segments;
            t.push([a, a + segments, b + segments]);
            t.push([a, b + segments, b]);
        }
    }
    let top = (rings - 1) * segments;
    for s in 0..segments {
        let n = (s + 1) % segments;
        t.push([south, s, n]);
        t.push([south + 1, top + n, top + s]);
    }
    TriMesh::new(p, t).expect("spindle topology is valid")
}

/// High-valence spindle (720 segments, 3 rings) with a two-joint ramp and
/// a non-rigid pose.
pub fn stress() -> Scenario {
    let mesh = spindle(720, 3, 1.0, 2.0);
    let rig = JointHierarchy::new(vec![
        joint("lower", None, Vec3::new(0.0, -1.0, 0.0), false),
        joint("upper", Some(0), Vec3::new(0.0, 2.0, 0.0), false),
    ])
    .expect("stress rig is valid");
    let weights = ramp_weights(&mesh, -1.5, 1.5);
    let mut pose = rig.bind_pose();
    with_local(&mut pose, 0, |l| l.scale = Vec3::new(1.2, 1.5, 0.8));
    with_local(&mut pose, 1, |l| {
        l.rotation = Quat::from_axis_angle(Vec3::Z, 0.6);
        l.scale = Vec3::new(0.7, 0.7, 0.7);
        l.shear = Vec3::new(0.2, 0.0, 0.0);
    });
    Scenario { name: ScenarioName::Stress, tube: None, mesh, rig, weights, pose, extra_poses: Vec::new() }
}

pub fn generate(name: ScenarioName) -> Scenario {
    match name {
        ScenarioName::Fig1 => fig1(TubeParams::default()),
        ScenarioName::Fig2 => fig2(TubeParams::default()),
        ScenarioName::Stress => stress(),
    }
}

/// Smallest corner angle over all triangles, in degrees.
pub fn min_angle_degrees(mesh: &TriMesh) -> f64 {
    let p = mesh.positions();
    mesh.triangles()
        .iter()
        .flat_map(|tri| {
            (0..3).map(move |k| {
                let (o, a, b) = (p[tri[k]], p[tri[(k + 1) % 3]], p[tri[(k + 2) % 3]]);
                let (e1, e2) = (a - o, b - o);
                e1.cross(e2).norm().atan2(e1.dot(e2)).to_degrees()
            })
        })
        .fold(f64::INFINITY, f64::min)
}

impl Scenario {
    /// Writes `mesh.obj`, `rig.json`, `weights.json`, `pose.json` and any extra poses.
    pub fn write(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut files = vec![
            ("mesh.obj".to_string(), save_obj(&self.mesh, None)?),
            ("rig.json".to_string(), self.rig.to_json()),
            ("weights.json".to_string(), self.weights.to_json()),
            ("pose.json".to_string(), self.pose.to_json(&self.rig)),
        ];
        for (name, pose) in &self.extra_poses {
            files.push((format!("{name}.json"), pose.to_json(&self.rig)));
        }
        let mut written = Vec::new();
        for (name, text) in files {
            let path = dir.join(name);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}
