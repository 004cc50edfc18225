//! Closed-form polar rotation against the Jacobi-SVD oracle on a shared
//! stream of random matrices.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use anyhow::{ensure, Result};
use eddm::numerics::{polar_rotation, svd3, svd_rotation_oracle, Mat3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Matrices with `σ3/σ1` at or below this are redrawn.
pub const MIN_SINGULAR_RATIO: f64 = 1e-4;

/// Seeded matrices with entries `U[−2, 2]` and `σ3/σ1 > MIN_SINGULAR_RATIO`.
pub fn random_matrices(samples: usize, seed: u64) -> Vec<Mat3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let m = Mat3::from_rows(std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-2.0..2.0))));
        let s = svd3(&m).sigma;
        if s[2] > MIN_SINGULAR_RATIO * s[0] {
            out.push(m);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchReport {
    pub samples: usize,
    pub polar_ns: f64,
    pub svd_ns: f64,
    pub max_discrepancy: f64,
}

impl BenchReport {
    pub fn speedup(&self) -> f64 {
        self.svd_ns / self.polar_ns
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "value", "unit"])?;
        w.write_record(["polar_rotation", &self.polar_ns.to_string(), "ns/op"])?;
        w.write_record(["svd_rotation_oracle", &self.svd_ns.to_string(), "ns/op"])?;
        w.write_record(["max_discrepancy", &self.max_discrepancy.to_string(), "abs"])?;
        w.flush()?;
        Ok(())
    }
}

fn time_per_op(matrices: &[Mat3], f: impl Fn(&Mat3) -> Mat3) -> f64 {
    let start = Instant::now();
    for m in matrices {
        black_box(f(black_box(m)));
    }
    start.elapsed().as_nanos() as f64 / matrices.len() as f64
}

/// Times both kernels over the same stream; discrepancies come from a separate untimed pass.
pub fn bench_polar(samples: usize, seed: u64) -> Result<BenchReport> {
    ensure!(samples >= 1, "need at least one sample");
    let matrices = random_matrices(samples, seed);
    let polar = |m: &Mat3| polar_rotation(m).expect("well-conditioned sample");
    let polar_ns = time_per_op(&matrices, polar);
    let svd_ns = time_per_op(&matrices, svd_rotation_oracle);
    let max_discrepancy =
        matrices.iter().map(|m| polar(m).max_abs_diff(&svd_rotation_oracle(m))).fold(0.0, f64::max);
    Ok(BenchReport { samples, polar_ns, svd_ns, max_discrepancy })
}
