//! Binary grid-data format for states.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! bytes 0..8   magic "GPEGRID1" (the trailing digit is the version)
//! byte  8      dimension (1..3)
//! byte  9      boundary kind: 0 = Dirichlet, 1 = periodic
//! byte  10     field kind:    0 = real,      1 = complex
//! byte  11     reserved (0)
//! per dim      u64 interval count N_i
//! per dim      f64 a_i, f64 b_i
//! data         row-major f64 values over the unknowns
//!              (re/im interleaved for complex states)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{BoundaryKind, Domain, Grid};

const MAGIC: &[u8; 8] = b"GPEGRID1";

/// Payload of a grid-data file.
#[derive(Debug, Clone)]
pub enum FieldData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl FieldData {
    /// Number of stored values.
    pub fn len(&self) -> usize {
        match self {
            FieldData::Real(v) => v.len(),
            FieldData::Complex(v) => v.len(),
        }
    }

    /// True when no values are stored.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Writes a grid function or state in the grid-data format.
pub fn write_state<T: Field>(path: &Path, grid: &Grid, values: &[T]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::Format(format!(
            "value count {} does not match the grid's {} unknowns",
            values.len(),
            grid.len()
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[
        grid.dim() as u8,
        match grid.domain().bc() {
            BoundaryKind::Dirichlet => 0,
            BoundaryKind::Periodic => 1,
        },
        u8::from(T::IS_COMPLEX),
        0,
    ])?;
    for d in 0..grid.dim() {
        w.write_all(&(grid.intervals(d) as u64).to_le_bytes())?;
    }
    for d in 0..grid.dim() {
        let (a, b) = grid.domain().bounds(d);
        w.write_all(&a.to_le_bytes())?;
        w.write_all(&b.to_le_bytes())?;
    }
    for v in values {
        let z = v.to_complex();
        w.write_all(&z.re.to_le_bytes())?;
        if T::IS_COMPLEX {
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a grid-data file back into its grid and values.
pub fn read_state(path: &Path) -> Result<(Grid, FieldData)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("file too short for the magic header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(MAGIC)
        )));
    }
    let mut head = [0u8; 4];
    r.read_exact(&mut head)?;
    let dim = head[0] as usize;
    if !(1..=3).contains(&dim) {
        return Err(Error::Format(format!("unsupported dimension {dim}")));
    }
    let bc = match head[1] {
        0 => BoundaryKind::Dirichlet,
        1 => BoundaryKind::Periodic,
        other => return Err(Error::Format(format!("unknown boundary kind {other}"))),
    };
    let complex = match head[2] {
        0 => false,
        1 => true,
        other => return Err(Error::Format(format!("unknown field kind {other}"))),
    };
    let mut intervals = vec![0usize; dim];
    for n in &mut intervals {
        *n = read_u64(&mut r)? as usize;
    }
    let mut bounds = vec![(0.0, 0.0); dim];
    for b in &mut bounds {
        b.0 = read_f64(&mut r)?;
        b.1 = read_f64(&mut r)?;
    }
    let grid = Grid::build(Domain::new(&bounds, bc)?, &intervals)?;
    let count = grid.len();
    let data = if complex {
        let mut v = Vec::with_capacity(count);
        for _ in 0..count {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            v.push(Complex64::new(re, im));
        }
        FieldData::Complex(v)
    } else {
        let mut v = Vec::with_capacity(count);
        for _ in 0..count {
            v.push(read_f64(&mut r)?);
        }
        FieldData::Real(v)
    };
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after the state data".into()));
    }
    Ok((grid, data))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|_| Error::Format("truncated header".into()))?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|_| Error::Format("truncated data section".into()))?;
    Ok(f64::from_le_bytes(b))
}
