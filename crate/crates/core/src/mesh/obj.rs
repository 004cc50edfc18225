//! Minimal ASCII Wavefront OBJ reader/writer (positions and faces only).

use std::fmt::Write as _;

use super::{MeshError, TriMesh};
use crate::numerics::Vec3;

pub fn load_obj(bytes: &[u8]) -> Result<TriMesh, MeshError> {
    let text = std::str::from_utf8(bytes).map_err(|e| MeshError::Parse {
        line: 0,
        message: format!("not valid UTF-8/ASCII: {e}"),
    })?;
    parse_obj(text)
}

/// Reads `v` and `f` records. Polygons are fan-triangulated from their first
/// corner; texture/normal indices and all other records are ignored.
pub fn parse_obj(text: &str) -> Result<TriMesh, MeshError> {
    let mut positions = Vec::new();
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| MeshError::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>().map_err(|e| err(format!("bad coordinate {t:?}: {e}"))))
                    .collect::<Result<_, _>>()?;
                if coords.len() < 3 || coords.len() > 4 {
                    return Err(err(format!("vertex needs 3 coordinates, got {}", coords.len())));
                }
                positions.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let corners: Vec<i64> = tokens
                    .map(|t| {
                        let idx = t.split('/').next().unwrap_or("");
                        idx.parse::<i64>().map_err(|e| err(format!("bad face index {t:?}: {e}")))
                    })
                    .collect::<Result<_, _>>()?;
                if corners.len() < 3 {
                    return Err(err(format!("face needs at least 3 corners, got {}", corners.len())));
                }
                faces.push((line_no, corners));
            }
            _ => {}
        }
    }

    let count = positions.len();
    let mut triangles = Vec::new();
    for (line, corners) in faces {
        let resolve = |i: i64| -> Result<usize, MeshError> {
            // 1-based; negative values count back from the end of the vertex list.
            let resolved = if i > 0 { i - 1 } else { count as i64 + i };
            if i == 0 || resolved < 0 || resolved >= count as i64 {
                return Err(MeshError::Parse {
                    line,
                    message: format!("vertex index {i} out of range (1..={count})"),
                });
            }
            Ok(resolved as usize)
        };
        let idx: Vec<usize> = corners.into_iter().map(resolve).collect::<Result<_, _>>()?;
        for k in 1..idx.len() - 1 {
            triangles.push([idx[0], idx[k], idx[k + 1]]);
        }
    }
    TriMesh::new(positions, triangles)
}

/// Writes the mesh, optionally with replacement positions. Coordinates use
/// 17 significant digits so that reading the file back is lossless.
pub fn save_obj(mesh: &TriMesh, positions: Option<&[Vec3]>) -> Result<String, MeshError> {
    let positions = match positions {
        Some(p) if p.len() != mesh.vertex_count() => {
            return Err(MeshError::LengthMismatch {
                expected: mesh.vertex_count(),
                actual: p.len(),
            })
        }
        Some(p) => p,
        None => mesh.positions(),
    };
    let mut out = String::with_capacity(48 * positions.len() + 24 * mesh.triangles().len());
    for p in positions {
        let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    Ok(out)
}
