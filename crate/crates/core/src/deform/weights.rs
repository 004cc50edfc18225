use serde::{Deserialize, Serialize};

use super::DeformError;

/// Per-vertex sparse skin weights, sorted by joint index and normalized to
/// sum to one. Zero weights are dropped on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SkinWeights {
    rows: Vec<Vec<(usize, f64)>>,
}

#[derive(Serialize, Deserialize)]
struct WeightsFile {
    weights: Vec<Vec<(usize, f64)>>,
}

impl SkinWeights {
    pub fn new(rows: Vec<Vec<(usize, f64)>>) -> Result<Self, DeformError> {
        let mut out = Vec::with_capacity(rows.len());
        for (vertex, mut row) in rows.into_iter().enumerate() {
            let bad = |message: String| DeformError::InvalidWeights { vertex, message };
            if let Some(&(j, w)) = row.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
                return Err(bad(format!("joint {j} has weight {w}")));
            }
            row.retain(|&(_, w)| w > 0.0);
            row.sort_by_key(|&(j, _)| j);
            if let Some(pair) = row.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(bad(format!("joint {} listed twice", pair[0].0)));
            }
            let sum: f64 = row.iter().map(|&(_, w)| w).sum();
            if !(sum > 0.0) {
                return Err(bad("no positive weight".into()));
            }
            row.iter_mut().for_each(|(_, w)| *w /= sum);
            out.push(row);
        }
        Ok(SkinWeights { rows: out })
    }

    /// Every vertex fully bound to `joint`.
    pub fn rigid(vertex_count: usize, joint: usize) -> Self {
        SkinWeights { rows: vec![vec![(joint, 1.0)]; vertex_count] }
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    /// One more than the largest joint index referenced.
    pub fn joint_count(&self) -> usize {
        self.rows.iter().flatten().map(|&(j, _)| j + 1).max().unwrap_or(0)
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn weight(&self, i: usize, joint: usize) -> f64 {
        self.rows[i].iter().find(|&&(j, _)| j == joint).map_or(0.0, |&(_, w)| w)
    }

    /// Dense column for `joint`.
    pub fn column(&self, joint: usize) -> Vec<f64> {
        (0..self.rows.len()).map(|i| self.weight(i, joint)).collect()
    }

    pub fn from_json(text: &str) -> Result<Self, DeformError> {
        let file: WeightsFile = serde_json::from_str(text)?;
        SkinWeights::new(file.weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&WeightsFile { weights: self.rows.clone() }).expect("weights serialize")
    }
}
