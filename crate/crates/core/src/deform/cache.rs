//! Little-endian binary Ω cache.
//!
//! ```text
//! "EDDM" | version u32 = 1 | vertex count u64
//! per vertex:    influence count u16
//!   per entry:   joint u32 | 10 × f64 (upper triangle, row-major)
//! trailer:       κ f64 | iterations u32 | prune_eps f64
//! ```

use super::omega::{check_prune_eps, Omega, OmegaEntry, OmegaTable};
use super::DeformError;
use crate::mesh::SmoothingConfig;

const MAGIC: &[u8; 4] = b"EDDM";
const VERSION: u32 = 1;

impl OmegaTable {
    pub fn to_bytes(&self) -> Result<Vec<u8>, DeformError> {
        let mut out = Vec::with_capacity(16 + self.vertex_count() * 2 + self.entry_count() * 84 + 20);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.vertex_count() as u64).to_le_bytes());
        for (i, row) in self.rows().enumerate() {
            let count = u16::try_from(row.len())
                .map_err(|_| DeformError::Cache(format!("vertex {i} has {} influences", row.len())))?;
            out.extend_from_slice(&count.to_le_bytes());
            for e in row {
                let joint = u32::try_from(e.joint)
                    .map_err(|_| DeformError::Cache(format!("joint index {} too large", e.joint)))?;
                out.extend_from_slice(&joint.to_le_bytes());
                for c in e.omega.0 {
                    out.extend_from_slice(&c.to_le_bytes());
                }
            }
        }
        out.extend_from_slice(&self.config().kappa().to_le_bytes());
        out.extend_from_slice(&self.config().iterations().to_le_bytes());
        out.extend_from_slice(&self.prune_eps().to_le_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DeformError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(DeformError::Cache("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(DeformError::Cache(format!("unsupported version {version}")));
        }
        let n = usize::try_from(r.u64()?).map_err(|_| DeformError::Cache("vertex count overflow".into()))?;
        let mut rows = Vec::with_capacity(n.min(bytes.len() / 2));
        for _ in 0..n {
            let count = r.u16()? as usize;
            let mut row = Vec::with_capacity(count);
            for _ in 0..count {
                let joint = r.u32()? as usize;
                let mut c = [0.0; 10];
                for v in &mut c {
                    *v = r.f64()?;
                }
                row.push(OmegaEntry { joint, omega: Omega(c) });
            }
            rows.push(row);
        }
        let kappa = r.f64()?;
        let iterations = r.u32()?;
        let prune_eps = r.f64()?;
        if r.pos != bytes.len() {
            return Err(DeformError::Cache(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        check_prune_eps(prune_eps)?;
        let config = SmoothingConfig::new(kappa, iterations)?;
        OmegaTable::from_rows(rows, config, prune_eps)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], DeformError> {
        let end = self.pos + len;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| DeformError::Cache(format!("truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(slice)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], DeformError> {
        Ok(self.take(N)?.try_into().expect("slice length"))
    }

    fn u16(&mut self) -> Result<u16, DeformError> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32, DeformError> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64, DeformError> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64, DeformError> {
        Ok(f64::from_le_bytes(self.array()?))
    }
}
