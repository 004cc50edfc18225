use rayon::prelude::*;

use super::{DeformError, SkinWeights};
use crate::mesh::{smooth, SmoothingConfig, SmoothingWeights, TriMesh};
use crate::numerics::{Mat3, SymMat3, Vec3};

pub const DEFAULT_PRUNE_EPS: f64 = 1e-4;

/// Symmetric 4×4 `[[A, b], [bᵀ, c]]` stored as its upper triangle, row-major:
/// `[a00, a01, a02, a03, a11, a12, a13, a22, a23, a33]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Omega(pub [f64; 10]);

impl Omega {
    /// `w·[u uᵀ, u; uᵀ, 1]`
    pub fn weighted_outer(u: Vec3, w: f64) -> Self {
        Omega([
            w * u.x * u.x,
            w * u.x * u.y,
            w * u.x * u.z,
            w * u.x,
            w * u.y * u.y,
            w * u.y * u.z,
            w * u.y,
            w * u.z * u.z,
            w * u.z,
            w,
        ])
    }

    /// Upper-left 3×3 block.
    pub fn a(&self) -> SymMat3 {
        let c = &self.0;
        SymMat3::new(c[0], c[1], c[2], c[4], c[5], c[7])
    }

    pub fn a_mat3(&self) -> Mat3 {
        self.a().to_mat3()
    }

    /// Upper-right column.
    pub fn b(&self) -> Vec3 {
        Vec3::new(self.0[3], self.0[6], self.0[8])
    }

    /// Bottom-right corner, the smoothed weight.
    pub fn c(&self) -> f64 {
        self.0[9]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        const INDEX: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 4, 5, 6], [2, 5, 7, 8], [3, 6, 8, 9]];
        self.0[INDEX[r][c]]
    }

    pub fn scaled(&self, s: f64) -> Omega {
        Omega(self.0.map(|v| v * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaEntry {
    pub joint: usize,
    pub omega: Omega,
}

/// Per-vertex sparse Ω lists in CSR layout, ascending joint order.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaTable {
    offsets: Vec<usize>,
    entries: Vec<OmegaEntry>,
    config: SmoothingConfig,
    prune_eps: f64,
}

impl OmegaTable {
    /// Checks the table invariants: ascending unique joints, finite
    /// coefficients, at least one entry and `Σ_j c_ij = 1 ± 1e-9` per vertex.
    pub fn from_rows(
        rows: Vec<Vec<OmegaEntry>>,
        config: SmoothingConfig,
        prune_eps: f64,
    ) -> Result<Self, DeformError> {
        check_prune_eps(prune_eps)?;
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut entries = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for (vertex, row) in rows.into_iter().enumerate() {
            let bad = |message: String| DeformError::InvalidWeights { vertex, message };
            if row.is_empty() {
                return Err(DeformError::EmptyInfluence { vertex });
            }
            if row.windows(2).any(|p| p[0].joint >= p[1].joint) {
                return Err(bad("Ω joints are not strictly ascending".into()));
            }
            if row.iter().any(|e| !e.omega.is_finite()) {
                return Err(bad("non-finite Ω coefficient".into()));
            }
            let sum: f64 = row.iter().map(|e| e.omega.c()).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(bad(format!("Ω weights sum to {sum}")));
            }
            entries.extend(row);
            offsets.push(entries.len());
        }
        Ok(OmegaTable { offsets, entries, config, prune_eps })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn row(&self, i: usize) -> &[OmegaEntry] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[OmegaEntry]> + '_ {
        (0..self.vertex_count()).map(|i| self.row(i))
    }

    pub fn config(&self) -> &SmoothingConfig {
        &self.config
    }

    pub fn prune_eps(&self) -> f64 {
        self.prune_eps
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn joint_count(&self) -> usize {
        self.entries.iter().map(|e| e.joint + 1).max().unwrap_or(0)
    }

    /// `max_i |Σ_j (Ω_ij)₄₄ − 1|`
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows()
            .map(|row| (row.iter().map(|e| e.omega.c()).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Joint with the largest `(Ω_ij)₄₄` at vertex `i`; ties go to the lower index.
    pub fn dominant_joint(&self, i: usize) -> usize {
        let row = self.row(i);
        let mut best = row[0];
        for e in &row[1..] {
            if e.omega.c() > best.omega.c() {
                best = *e;
            }
        }
        best.joint
    }
}

pub(crate) fn check_prune_eps(eps: f64) -> Result<(), DeformError> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(DeformError::InvalidPruneEps(eps))
    }
}

/// `Ω_ij = Σ_k B_ik w_kj P_k` with `B = ((1−κ)I + κW)^p`, evaluated by
/// smoothing the field `w_kj·P_k` once per joint.
///
/// Entries with `(Ω_ij)₄₄ < prune_eps` are dropped. When a vertex loses an
/// entry this way, its remaining entries are rescaled so the corners sum to
/// one; otherwise the row is left as computed.
pub fn precompute_omega(
    mesh: &TriMesh,
    weights: &SkinWeights,
    w: &SmoothingWeights,
    cfg: &SmoothingConfig,
    prune_eps: f64,
) -> Result<OmegaTable, DeformError> {
    check_prune_eps(prune_eps)?;
    let n = mesh.vertex_count();
    for count in [weights.vertex_count(), w.vertex_count()] {
        if count != n {
            return Err(DeformError::LengthMismatch { expected: n, actual: count });
        }
    }
    let joints: Vec<usize> = {
        let mut used: Vec<usize> = weights.rows().iter().flatten().map(|&(j, _)| j).collect();
        used.sort_unstable();
        used.dedup();
        used
    };
    let positions = mesh.positions();
    let columns = joints
        .par_iter()
        .map(|&j| {
            let field: Vec<[f64; 10]> = (0..n)
                .map(|k| Omega::weighted_outer(positions[k], weights.weight(k, j)).0)
                .collect();
            smooth(&field, w, cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            let mut pruned = false;
            for (col, &j) in columns.iter().zip(&joints) {
                let omega = Omega(col[i]);
                if omega.c() <= 0.0 {
                    continue;
                }
                if omega.c() < prune_eps {
                    pruned = true;
                    continue;
                }
                row.push(OmegaEntry { joint: j, omega });
            }
            if row.is_empty() {
                return Err(DeformError::EmptyInfluence { vertex: i });
            }
            if pruned {
                let total: f64 = row.iter().map(|e| e.omega.c()).sum();
                row.iter_mut().for_each(|e| e.omega = e.omega.scaled(1.0 / total));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    OmegaTable::from_rows(rows, *cfg, prune_eps)
}
