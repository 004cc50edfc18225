//! Command implementations behind the `eddm` binary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use eddm::deform::{
    deform_ddm, deform_delta_mush, deform_eddm, deform_lbs, precompute_omega, Deformation, Mode, OmegaTable,
    SkinWeights,
};
use eddm::mesh::{cotangent_weights, load_obj, save_obj, Precision, SmoothingConfig, TriMesh};
use eddm::rig::{skinning_matrices, JointHierarchy, Pose};

use crate::bench::{bench_polar, BenchReport};
use crate::report::CompareReport;
use crate::scenario::{generate, ScenarioName};

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    ThresholdExceeded,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ThresholdExceeded => 3,
        }
    }
}

/// Exit code for any load, validation or write failure.
pub const INPUT_ERROR: i32 = 2;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_mesh(path: &Path) -> Result<TriMesh> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    load_obj(&bytes).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_weights(path: &Path) -> Result<SkinWeights> {
    SkinWeights::from_json(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_omega(path: &Path) -> Result<OmegaTable> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    OmegaTable::from_bytes(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

#[derive(Clone, Debug)]
pub struct PrecomputeArgs {
    pub mesh: PathBuf,
    pub weights: PathBuf,
    pub kappa: f64,
    pub iterations: u32,
    pub prune: f64,
    pub precision: Precision,
    pub out: PathBuf,
}

pub fn precompute(args: &PrecomputeArgs) -> Result<Status> {
    let mesh = load_mesh(&args.mesh)?;
    let weights = load_weights(&args.weights)?;
    let cfg = SmoothingConfig::new(args.kappa, args.iterations)?;
    let w = cotangent_weights(&mesh, args.precision);
    let table = precompute_omega(&mesh, &weights, &w, &cfg, args.prune)?;
    write(&args.out, table.to_bytes()?)?;
    println!("vertices: {}", table.vertex_count());
    println!("influences: {}", table.entry_count());
    println!("laplacian_max_row_sum_error: {:e}", w.max_row_sum_error());
    println!("laplacian_degenerate_rows: {}", w.degenerate_rows().len());
    println!("omega_max_row_sum_error: {:e}", table.max_row_sum_error());
    Ok(Status::Ok)
}

/// Ω comes from `omega` when given, otherwise it is computed from `weights`
/// with the smoothing flags.
#[derive(Clone, Debug)]
pub struct DeformArgs {
    pub mesh: PathBuf,
    pub omega: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub rig: PathBuf,
    pub pose: PathBuf,
    pub mode: Mode,
    pub kappa: f64,
    pub iterations: u32,
    pub prune: f64,
    pub precision: Precision,
    pub out: PathBuf,
}

pub fn deform(args: &DeformArgs) -> Result<Status> {
    let mesh = load_mesh(&args.mesh)?;
    let rig = JointHierarchy::from_json(&read_text(&args.rig)?)
        .with_context(|| format!("parsing {}", args.rig.display()))?;
    let pose = Pose::from_json(&read_text(&args.pose)?, &rig)
        .with_context(|| format!("parsing {}", args.pose.display()))?;
    let m = skinning_matrices(&rig, &pose)?;
    let cfg = SmoothingConfig::new(args.kappa, args.iterations)?;
    let weights = args.weights.as_deref().map(load_weights).transpose()?;

    let needs_weights = || -> Result<&SkinWeights> {
        weights.as_ref().with_context(|| format!("--mode {} needs --weights", args.mode))
    };
    let omega = || -> Result<OmegaTable> {
        match (&args.omega, &weights) {
            (Some(path), _) => load_omega(path),
            (None, Some(weights)) => {
                let w = cotangent_weights(&mesh, args.precision);
                Ok(precompute_omega(&mesh, weights, &w, &cfg, args.prune)?)
            }
            (None, None) => bail!("--mode {} needs --omega or --weights", args.mode),
        }
    };
    let out: Deformation = match args.mode {
        Mode::Eddm => deform_eddm(&mesh, &omega()?, &m)?,
        Mode::Ddm => deform_ddm(&mesh, &omega()?, &m)?,
        Mode::Lbs => deform_lbs(&mesh, needs_weights()?, &m)?,
        Mode::DeltaMush => {
            let w = cotangent_weights(&mesh, args.precision);
            deform_delta_mush(&mesh, &w, &cfg, needs_weights()?, &m)?
        }
    };
    if !out.fallbacks.is_empty() {
        eprintln!("warning: {} vertices used the dominant-joint rotation fallback", out.fallbacks.len());
    }
    write(&args.out, save_obj(&mesh, Some(&out.positions))?)?;
    Ok(Status::Ok)
}

pub fn compare(a: &Path, b: &Path, report: &Path, threshold: f64) -> Result<Status> {
    let (a, b) = (load_mesh(a)?, load_mesh(b)?);
    let r = CompareReport::new(a.positions(), b.positions(), threshold)?;
    let file = fs::File::create(report).with_context(|| format!("writing {}", report.display()))?;
    r.write_csv(std::io::BufWriter::new(file))?;
    for (name, value) in r.summary() {
        println!("{name}: {value}");
    }
    Ok(if r.exceeds_threshold() { Status::ThresholdExceeded } else { Status::Ok })
}

pub fn scenario(name: ScenarioName, outdir: &Path) -> Result<Status> {
    for path in generate(name).write(outdir)? {
        println!("{}", path.display());
    }
    Ok(Status::Ok)
}

pub fn bench(samples: usize, seed: u64, out: Option<&Path>) -> Result<BenchReport> {
    let report = bench_polar(samples, seed)?;
    match out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
            report.write_csv(file)?;
        }
        None => report.write_csv(std::io::stdout().lock())?,
    }
    Ok(report)
}
