//! Binary sample container and CSV interchange.
//!
//! Container layout, all little-endian:
//!
//! | field    | type            |
//! |----------|-----------------|
//! | magic    | `b"SCTB"`       |
//! | version  | `u16` (= 1)     |
//! | dtype    | `u8` (1 = complex f64, re/im interleaved) |
//! | dims     | `u8`            |
//! | sizes    | `u64` x dims    |
//! | spacing  | `f64` x dims    |
//! | payload  | `f64` x 2 x prod(sizes) |

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::signal::Signal;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SCTB";
pub const VERSION: u16 = 1;
pub const DTYPE_COMPLEX_F64: u8 = 1;

pub fn write_container<W: Write>(mut w: W, grid: &Grid, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::SizeMismatch { expected: grid.len(), got: values.len() });
    }
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[DTYPE_COMPLEX_F64, grid.dims() as u8])?;
    for &n in grid.sizes() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for &dx in grid.spacing() {
        w.write_all(&dx.to_le_bytes())?;
    }
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_exact<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| Error::Format(format!("truncated container: {e}")))?;
    Ok(buf)
}

pub fn read_container<R: Read>(mut r: R) -> Result<(Grid, Vec<Complex64>)> {
    if &read_exact::<4, _>(&mut r)? != MAGIC {
        return Err(Error::Format("bad magic, expected SCTB".into()));
    }
    let version = u16::from_le_bytes(read_exact(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported container version {version}")));
    }
    let [dtype, dims] = read_exact::<2, _>(&mut r)?;
    if dtype != DTYPE_COMPLEX_F64 {
        return Err(Error::Format(format!("unsupported dtype tag {dtype}")));
    }
    let mut sizes = Vec::with_capacity(dims as usize);
    for _ in 0..dims {
        let n = u64::from_le_bytes(read_exact(&mut r)?);
        sizes.push(usize::try_from(n).map_err(|_| Error::Format(format!("axis size {n} too large")))?);
    }
    let mut spacing = Vec::with_capacity(dims as usize);
    for _ in 0..dims {
        spacing.push(f64::from_le_bytes(read_exact(&mut r)?));
    }
    let grid = Grid::new(sizes, spacing)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(read_exact(&mut r)?);
        let im = f64::from_le_bytes(read_exact(&mut r)?);
        values.push(Complex64::new(re, im));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    Ok((grid, values))
}

pub fn save_container(path: &Path, grid: &Grid, values: &[Complex64]) -> Result<()> {
    let tmp = path.with_extension("sctb.partial");
    write_container(BufWriter::new(File::create(&tmp)?), grid, values)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_container(path: &Path) -> Result<(Grid, Vec<Complex64>)> {
    read_container(BufReader::new(File::open(path)?))
}

pub fn save_signal(path: &Path, signal: &Signal) -> Result<()> {
    save_container(path, signal.grid(), signal.values())
}

pub fn load_signal(path: &Path) -> Result<Signal> {
    let (grid, values) = load_container(path)?;
    Signal::new(grid, values)
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    index: usize,
    re: f64,
    im: f64,
}

/// Writes a 1-d signal as `index,re,im` rows.
pub fn write_csv<W: Write>(w: W, signal: &Signal) -> Result<()> {
    if signal.grid().dims() != 1 {
        return Err(Error::InvalidParameter("CSV export supports 1-d signals only".into()));
    }
    let mut out = csv::Writer::from_writer(w);
    for (index, v) in signal.values().iter().enumerate() {
        out.serialize(CsvRow { index, re: v.re, im: v.im })?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `index,re,im` rows into a 1-d signal with the given spacing. Rows
/// must cover indices `0..N` exactly once, in any order.
pub fn read_csv<R: Read>(r: R, spacing: f64) -> Result<Signal> {
    let mut rows: Vec<CsvRow> = Vec::new();
    for row in csv::Reader::from_reader(r).deserialize() {
        rows.push(row?);
    }
    rows.sort_by_key(|row| row.index);
    if rows.iter().enumerate().any(|(i, row)| row.index != i) {
        return Err(Error::Format("CSV indices must be 0..N without gaps or repeats".into()));
    }
    let grid = Grid::line(rows.len(), spacing)?;
    Signal::new(grid, rows.into_iter().map(|row| Complex64::new(row.re, row.im)).collect())
}
