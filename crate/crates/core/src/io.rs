//! Matrix dumps.
//!
//! Text: CSV with header `row,col,re,im`, one line per entry in row-major
//! order, numbers with 17 significant digits (exact round trip).
//!
//! Binary: the 8 bytes `PHOPMAT1`, then `rows` and `cols` as little-endian
//! `u64`, then row-major `(re, im)` pairs as little-endian `f64`.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;

use crate::error::{PhaseError, Result};
use crate::fock::CMatrix;
use crate::phase_states::fmt_f64;

pub const BINARY_MAGIC: &[u8; 8] = b"PHOPMAT1";
const CSV_HEADER: &str = "row,col,re,im";

pub fn write_matrix_csv<W: Write>(m: &CMatrix, mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            writeln!(w, "{r},{c},{},{}", fmt_f64(z.re), fmt_f64(z.im))?;
        }
    }
    Ok(())
}

/// Reads a full dump written by [`write_matrix_csv`]. Every entry must be
/// present exactly once.
pub fn read_matrix_csv<R: BufRead>(r: R) -> Result<CMatrix> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != CSV_HEADER {
        return Err(PhaseError::Parse(format!("matrix CSV must start with '{CSV_HEADER}'")));
    }
    let mut entries = Vec::new();
    let (mut rows, mut cols) = (0, 0);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || PhaseError::Parse(format!("matrix CSV line {}: '{line}'", i + 2));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad());
        }
        let r: usize = fields[0].trim().parse().map_err(|_| bad())?;
        let c: usize = fields[1].trim().parse().map_err(|_| bad())?;
        let re: f64 = fields[2].trim().parse().map_err(|_| bad())?;
        let im: f64 = fields[3].trim().parse().map_err(|_| bad())?;
        rows = rows.max(r + 1);
        cols = cols.max(c + 1);
        entries.push((r, c, Complex64::new(re, im)));
    }
    if entries.len() != rows * cols {
        return Err(PhaseError::Parse(format!(
            "matrix CSV has {} entries for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    let mut m = CMatrix::zeros(rows, cols);
    let mut seen = vec![false; rows * cols];
    for (r, c, z) in entries {
        if std::mem::replace(&mut seen[r * cols + c], true) {
            return Err(PhaseError::Parse(format!("matrix CSV repeats entry ({r}, {c})")));
        }
        m[(r, c)] = z;
    }
    Ok(m)
}

pub fn write_matrix_binary<W: Write>(m: &CMatrix, mut w: W) -> Result<()> {
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix_binary<R: Read>(mut r: R) -> Result<CMatrix> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(PhaseError::Parse("missing PHOPMAT1 header".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let mut m = CMatrix::zeros(rows, cols);
    for row in 0..rows {
        for col in 0..cols {
            r.read_exact(&mut word)?;
            let re = f64::from_le_bytes(word);
            r.read_exact(&mut word)?;
            let im = f64::from_le_bytes(word);
            m[(row, col)] = Complex64::new(re, im);
        }
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(PhaseError::Parse(format!("{} trailing bytes after matrix data", rest.len())));
    }
    Ok(m)
}
