//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 8    | magic `BSQSNAP1`                          |
//! | 8      | 8    | `N` as `u64`                              |
//! | 16     | 8    | `L` as `f64`                              |
//! | 24     | 8    | number of `f64` values that follow, `u64` |
//! | 32     | 8·n  | physical values, `f64`                    |
//!
//! Values are in C order with `x` fastest (`i + N(j + Nk)`); a vector field
//! stores its three components one after another, so the count is `N³` for a
//! scalar and `3N³` for a vector.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::field::{SpectralScalar, SpectralVector};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"BSQSNAP1";
pub const HEADER_LEN: usize = 32;

/// Decoded snapshot: grid parameters and raw physical values.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub l: f64,
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.l.to_le_bytes())?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; HEADER_LEN];
        r.read_exact(&mut head)?;
        if &head[..8] != MAGIC {
            return Err(Error::Format("bad snapshot magic".into()));
        }
        let word = |o: usize| -> [u8; 8] { head[o..o + 8].try_into().unwrap() };
        let n = u64::from_le_bytes(word(8)) as usize;
        let l = f64::from_le_bytes(word(16));
        let count = u64::from_le_bytes(word(24)) as usize;
        let cube = n.checked_pow(3).ok_or_else(|| Error::Format("grid size overflows".into()))?;
        if cube == 0 || count % cube != 0 {
            return Err(Error::Format(format!("value count {count} is not a multiple of N³ = {cube}")));
        }
        let mut bytes = vec![0u8; count * 8];
        r.read_exact(&mut bytes)?;
        let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self { n, l, values })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }

    pub fn from_scalar(f: &SpectralScalar) -> Self {
        Self { n: f.grid().n(), l: f.grid().l(), values: f.to_physical() }
    }

    pub fn from_vector(v: &SpectralVector) -> Self {
        let [a, b, c] = v.to_physical();
        let mut values = a;
        values.extend(b);
        values.extend(c);
        Self { n: v.grid().n(), l: v.grid().l(), values }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.l)
    }

    pub fn to_scalar(&self) -> Result<SpectralScalar> {
        SpectralScalar::from_physical(&self.grid()?, &self.values)
    }

    pub fn to_vector(&self) -> Result<SpectralVector> {
        let g = self.grid()?;
        let m = g.len();
        if self.values.len() != 3 * m {
            return Err(Error::Format("snapshot does not hold a vector field".into()));
        }
        SpectralVector::from_physical(&g, [&self.values[..m], &self.values[m..2 * m], &self.values[2 * m..]])
    }
}
