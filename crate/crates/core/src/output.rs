//! Digests and a self-describing binary matrix format.

use std::io::{Read, Write};

use faer::Mat;

use crate::error::{Error, Result};

pub const MATRIX_MAGIC: &[u8; 8] = b"GWMAT1\0\0";

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Short stable identifier for operator and function descriptions.
pub fn digest(text: &str) -> String {
    format!("{:016x}", fnv1a64(text.as_bytes()))
}

/// Magic, `u64` rows, `u64` cols, then row-major `f64`, all little endian.
pub fn write_matrix<W: Write>(w: &mut W, m: &Mat<f64>) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("write failed: {e}"));
    w.write_all(MATRIX_MAGIC).map_err(io)?;
    w.write_all(&(m.nrows() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&(m.ncols() as u64).to_le_bytes()).map_err(io)?;
    let mut buf = Vec::with_capacity(8 * m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            buf.extend_from_slice(&m[(i, j)].to_le_bytes());
        }
    }
    w.write_all(&buf).map_err(io)
}

pub fn read_matrix<R: Read>(r: &mut R) -> Result<Mat<f64>> {
    let parse = |msg: String| Error::Parse(msg);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|e| parse(format!("missing header: {e}")))?;
    if &magic != MATRIX_MAGIC {
        return Err(parse("not a matrix dump".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(|e| parse(format!("missing row count: {e}")))?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word).map_err(|e| parse(format!("missing column count: {e}")))?;
    let cols = u64::from_le_bytes(word) as usize;
    let len = rows.checked_mul(cols).and_then(|n| n.checked_mul(8)).ok_or_else(|| parse("matrix too large".into()))?;
    let mut data = vec![0u8; len];
    r.read_exact(&mut data).map_err(|e| parse(format!("truncated data: {e}")))?;
    Ok(Mat::from_fn(rows, cols, |i, j| {
        let k = 8 * (i * cols + j);
        f64::from_le_bytes(data[k..k + 8].try_into().unwrap())
    }))
}
