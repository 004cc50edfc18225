//! Per-vertex comparison of two position sets.

use std::io::Write;

use anyhow::{bail, Result};
use eddm::numerics::Vec3;

pub const CSV_HEADER: [&str; 5] = ["vertex", "dx", "dy", "dz", "distance"];

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub deltas: Vec<Vec3>,
    pub distances: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    pub rms: f64,
    pub threshold: f64,
    /// Percentage of vertices farther apart than `threshold`.
    pub pct_over_threshold: f64,
}

impl CompareReport {
    pub fn new(a: &[Vec3], b: &[Vec3], threshold: f64) -> Result<Self> {
        if a.len() != b.len() {
            bail!("vertex count mismatch: {} vs {}", a.len(), b.len());
        }
        if a.is_empty() {
            bail!("no vertices to compare");
        }
        let deltas: Vec<Vec3> = a.iter().zip(b).map(|(p, q)| *q - *p).collect();
        let distances: Vec<f64> = deltas.iter().map(|d| d.norm()).collect();
        let n = distances.len() as f64;
        let max = distances.iter().copied().fold(0.0, f64::max);
        let mean = distances.iter().sum::<f64>() / n;
        let rms = (distances.iter().map(|d| d * d).sum::<f64>() / n).sqrt();
        let over = distances.iter().filter(|&&d| d > threshold).count();
        Ok(CompareReport { deltas, distances, max, mean, rms, threshold, pct_over_threshold: 100.0 * over as f64 / n })
    }

    pub fn exceeds_threshold(&self) -> bool {
        self.max > self.threshold
    }

    /// `(name, value)` rows appended after the per-vertex rows.
    pub fn summary(&self) -> [(&'static str, f64); 4] {
        [("max", self.max), ("mean", self.mean), ("rms", self.rms), ("pct_over_threshold", self.pct_over_threshold)]
    }

    /// Per-vertex rows, then one row per summary statistic with its name in
    /// the `vertex` column and its value in `distance`. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for (i, (d, dist)) in self.deltas.iter().zip(&self.distances).enumerate() {
            w.write_record([i.to_string(), d.x.to_string(), d.y.to_string(), d.z.to_string(), dist.to_string()])?;
        }
        for (name, value) in self.summary() {
            w.write_record([name, "", "", "", &value.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads the summary rows back from a report written by [`CompareReport::write_csv`].
pub fn read_summary<R: std::io::Read>(input: R) -> Result<Vec<(String, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        bail!("unexpected header");
    }
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        if record[0].parse::<usize>().is_err() {
            out.push((record[0].to_string(), record[4].parse()?));
        }
    }
    Ok(out)
}
