//! Row-normalized cotangent Laplacian weights.

use std::fmt;
use std::str::FromStr;

use num_traits::Float;

use super::TriMesh;
use crate::numerics::Vec3;

/// Arithmetic used while building the weights.
///
/// `Single` rounds every intermediate to `f32`; it exists to reproduce the
/// degeneracies that single-precision weights cause and is never the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Double,
    Single,
}

impl FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "double" => Ok(Precision::Double),
            "single" => Ok(Precision::Single),
            other => Err(format!("unknown precision {other:?} (expected double or single)")),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Double => "double",
            Precision::Single => "single",
        })
    }
}

/// Sparse row-stochastic smoothing matrix `W` in CSR layout, one row per
/// vertex, columns restricted to the vertex's one-ring.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingWeights {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    unnormalized: Vec<f64>,
    precision: Precision,
    degenerate_rows: Vec<usize>,
}

impl SmoothingWeights {
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Rows whose cotangent sum vanished and fell back to uniform weights.
    pub fn degenerate_rows(&self) -> &[usize] {
        &self.degenerate_rows
    }

    /// `(neighbor, weight)` pairs of row `i` in ascending neighbor order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }

    /// Clamped edge weights of row `i` before normalization.
    pub fn unnormalized_row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[range.clone()].iter().copied().zip(self.unnormalized[range].iter().copied())
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).map(|(_, w)| w).sum()
    }

    /// `max_i |Σ_j W_ij − 1|`
    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.vertex_count())
            .map(|i| (self.row_sum(i) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Cotangent weights: each triangle adds `cot(θ)/2` to the edge opposite its
/// corner angle θ. Accumulated edge weights are clamped at zero, then every
/// row is normalized to sum to one. Triangles with area below
/// `1e-12·(longest edge)²` contribute nothing.
pub fn cotangent_weights(mesh: &TriMesh, precision: Precision) -> SmoothingWeights {
    let rings = mesh.one_rings();
    let mut offsets = Vec::with_capacity(rings.len() + 1);
    offsets.push(0);
    for ring in &rings {
        offsets.push(offsets.last().copied().unwrap_or(0) + ring.len());
    }
    let neighbors: Vec<usize> = rings.iter().flatten().copied().collect();

    let (weights, unnormalized, degenerate_rows) = match precision {
        Precision::Double => build::<f64>(mesh, &offsets, &neighbors),
        Precision::Single => build::<f32>(mesh, &offsets, &neighbors),
    };
    SmoothingWeights { offsets, neighbors, weights, unnormalized, precision, degenerate_rows }
}

type Built = (Vec<f64>, Vec<f64>, Vec<usize>);

fn build<T: Float>(mesh: &TriMesh, offsets: &[usize], neighbors: &[usize]) -> Built {
    let cast = |v: f64| T::from(v).unwrap_or_else(T::zero);
    let to_t = |p: Vec3| [cast(p.x), cast(p.y), cast(p.z)];
    let half = cast(0.5);
    let area_tol = cast(1e-12);
    let row_tol = cast(1e-12);

    let slot = |i: usize, j: usize| -> usize {
        let row = &neighbors[offsets[i]..offsets[i + 1]];
        offsets[i] + row.binary_search(&j).expect("edge endpoints are one-ring neighbours")
    };

    let mut acc = vec![T::zero(); neighbors.len()];
    let positions = mesh.positions();
    for &[a, b, c] in mesh.triangles() {
        let (pa, pb, pc) = (to_t(positions[a]), to_t(positions[b]), to_t(positions[c]));
        let ab = sub(pb, pa);
        let ac = sub(pc, pa);
        let bc = sub(pc, pb);
        let twice_area = norm(cross(ab, ac));
        let longest = dot(ab, ab).max(dot(ac, ac)).max(dot(bc, bc));
        if !(twice_area * half >= area_tol * longest) || twice_area == T::zero() {
            continue;
        }
        // cot of the angle at a corner = (e1·e2) / |e1 × e2|, and |e1 × e2| = 2·area.
        let cot_a = dot(ab, ac) / twice_area;
        let cot_b = -dot(ab, bc) / twice_area;
        let cot_c = dot(ac, bc) / twice_area;
        for (i, j, cot) in [(b, c, cot_a), (a, c, cot_b), (a, b, cot_c)] {
            let w = cot * half;
            let s = slot(i, j);
            acc[s] = acc[s] + w;
            let s = slot(j, i);
            acc[s] = acc[s] + w;
        }
    }

    let mut weights = vec![0.0; neighbors.len()];
    let mut unnormalized = vec![0.0; neighbors.len()];
    let mut degenerate = Vec::new();
    for i in 0..offsets.len() - 1 {
        let range = offsets[i]..offsets[i + 1];
        let row = &mut acc[range.clone()];
        row.iter_mut().for_each(|w| *w = w.max(T::zero()));
        for (dst, src) in unnormalized[range.clone()].iter_mut().zip(row.iter()) {
            *dst = src.to_f64().unwrap_or(0.0);
        }
        let sum = row.iter().fold(T::zero(), |s, &w| s + w);
        if sum < row_tol {
            degenerate.push(i);
            let uniform = T::one() / cast(row.len() as f64);
            row.iter_mut().for_each(|w| *w = uniform);
        } else {
            row.iter_mut().for_each(|w| *w = *w / sum);
        }
        for (dst, src) in weights[range].iter_mut().zip(row.iter()) {
            *dst = src.to_f64().unwrap_or(0.0);
        }
    }
    (weights, unnormalized, degenerate)
}

fn sub<T: Float>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot<T: Float>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<T: Float>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm<T: Float>(a: [T; 3]) -> T {
    dot(a, a).sqrt()
}
