//! Binary field snapshots.
//!
//! Layout (little-endian): magic `NLSF`, `u32` version, `u32` d, `u32` N,
//! `f64` L, then `N^d` interleaved `(re, im)` `f64` pairs in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::ComplexField;
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NLSF";
pub const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(field: &ComplexField, mut w: W) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * field.samples().len());
    for z in field.samples() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<ComplexField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::BadSnapshot("wrong magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::BadSnapshot(format!("unsupported version {version}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    let mut l = [0u8; 8];
    r.read_exact(&mut l)?;
    let grid = Grid::new(dim, n, f64::from_le_bytes(l))
        .map_err(|e| Error::BadSnapshot(format!("bad header: {e}")))?;
    let mut payload = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut payload)
        .map_err(|_| Error::BadSnapshot("truncated payload".into()))?;
    let data = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    ComplexField::new(grid, data)
}

pub fn save(field: &ComplexField, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<ComplexField> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
