//! File formats: sampled fields as a little-endian binary container or CSV,
//! spectral data and reports as JSON, and plain CSV tables.
//!
//! Binary layout: the magic `NLSIST1\0`, then `x_min`, `x_max` (f64) and
//! `n_points` (u64), then `n_points` interleaved `re, im` pairs (f64).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ComplexField1D, Eigenpair, RealGrid, SpectralData};
use crate::C64;

pub const MAGIC: &[u8; 8] = b"NLSIST1\0";
const HEADER_LEN: usize = 32;

fn parse_err(offset: usize, msg: impl Into<String>) -> Error {
    Error::Parse { offset: offset as u64, msg: msg.into() }
}

pub fn encode_binary(f: &ComplexField1D) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&g.x_min().to_le_bytes());
    out.extend_from_slice(&g.x_max().to_le_bytes());
    out.extend_from_slice(&(g.len() as u64).to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn f64_at(bytes: &[u8], offset: usize) -> f64 {
    f64::from_le_bytes(bytes[offset..offset + 8].try_into().expect("8 bytes"))
}

pub fn decode_binary(bytes: &[u8]) -> Result<ComplexField1D> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(parse_err(0, "missing NLSIST1 magic"));
    }
    if bytes.len() < HEADER_LEN {
        return Err(parse_err(bytes.len(), "truncated grid header"));
    }
    let (x_min, x_max) = (f64_at(bytes, 8), f64_at(bytes, 16));
    let n = u64::from_le_bytes(bytes[24..32].try_into().expect("8 bytes"));
    let grid = RealGrid::new(x_min, x_max, n as usize).map_err(|e| parse_err(8, e.to_string()))?;
    let expected = (n as u128) * 16 + HEADER_LEN as u128;
    if bytes.len() as u128 != expected {
        let at = (bytes.len() as u128).min(expected) as usize;
        return Err(parse_err(at, format!("header announces {n} samples ({expected} bytes), file has {} bytes", bytes.len())));
    }
    let mut values = Vec::with_capacity(n as usize);
    for k in 0..n as usize {
        let at = HEADER_LEN + 16 * k;
        let v = C64::new(f64_at(bytes, at), f64_at(bytes, at + 8));
        if !v.is_finite() {
            return Err(parse_err(at, format!("non-finite sample {k}")));
        }
        values.push(v);
    }
    ComplexField1D::new(grid, values)
}

/// CSV with an `x,re,im` header, 17 significant digits per number.
pub fn encode_csv(f: &ComplexField1D) -> String {
    let mut out = String::from("x,re,im\n");
    for (i, v) in f.values().iter().enumerate() {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", f.grid().node(i), v.re, v.im));
    }
    out
}

pub fn decode_csv(text: &str) -> Result<ComplexField1D> {
    let mut xs = Vec::new();
    let mut values = Vec::new();
    let mut offset = 0;
    for (k, line) in text.split_inclusive('\n').enumerate() {
        let start = offset;
        offset += line.len();
        let row = line.trim();
        if row.is_empty() || (k == 0 && row.starts_with(|c: char| c.is_ascii_alphabetic())) {
            continue;
        }
        let cols: Vec<&str> = row.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(parse_err(start, format!("expected 3 columns, found {}", cols.len())));
        }
        let mut nums = [0.0f64; 3];
        for (slot, col) in nums.iter_mut().zip(&cols) {
            *slot = col.parse().map_err(|_| parse_err(start, format!("not a number: {col:?}")))?;
            if !slot.is_finite() {
                return Err(parse_err(start, format!("non-finite entry {col:?}")));
            }
        }
        xs.push((nums[0], start));
        values.push(C64::new(nums[1], nums[2]));
    }
    let (Some(&(first, _)), Some(&(last, _))) = (xs.first(), xs.last()) else {
        return Err(parse_err(0, "no samples"));
    };
    let grid = RealGrid::new(first, last, xs.len()).map_err(|e| parse_err(0, e.to_string()))?;
    let h = grid.spacing();
    for (i, &(x, at)) in xs.iter().enumerate() {
        if (x - grid.node(i)).abs() > 1e-9 * h {
            return Err(parse_err(at, format!("x = {x} breaks the uniform spacing {h}")));
        }
    }
    ComplexField1D::new(grid, values)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Write a field; `.csv` paths get CSV, anything else the binary container.
pub fn save_field(path: &Path, f: &ComplexField1D) -> Result<()> {
    if is_csv(path) {
        fs::write(path, encode_csv(f))?;
    } else {
        fs::write(path, encode_binary(f))?;
    }
    Ok(())
}

pub fn load_field(path: &Path) -> Result<ComplexField1D> {
    if is_csv(path) {
        decode_csv(&fs::read_to_string(path)?)
    } else {
        decode_binary(&fs::read(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct EigenRecord {
    z_re: f64,
    z_im: f64,
    c_re: f64,
    c_im: f64,
}

#[derive(Serialize, Deserialize)]
struct SpectralFile {
    z_grid: RealGrid,
    r_re: Vec<f64>,
    r_im: Vec<f64>,
    discrete: Vec<EigenRecord>,
}

pub fn spectral_to_json(data: &SpectralData) -> Result<String> {
    let file = SpectralFile {
        z_grid: *data.z_grid(),
        r_re: data.r_values().iter().map(|v| v.re).collect(),
        r_im: data.r_values().iter().map(|v| v.im).collect(),
        discrete: data.discrete().iter().map(|e| EigenRecord { z_re: e.z.re, z_im: e.z.im, c_re: e.c.re, c_im: e.c.im }).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn spectral_from_json(text: &str) -> Result<SpectralData> {
    let file: SpectralFile = serde_json::from_str(text)?;
    if file.r_re.len() != file.r_im.len() {
        return Err(Error::InvalidGrid(format!("{} real parts but {} imaginary parts", file.r_re.len(), file.r_im.len())));
    }
    let r = file.r_re.iter().zip(&file.r_im).map(|(&a, &b)| C64::new(a, b)).collect();
    let discrete = file.discrete.iter().map(|e| Eigenpair { z: C64::new(e.z_re, e.z_im), c: C64::new(e.c_re, e.c_im) }).collect();
    SpectralData::new(file.z_grid, r, discrete)
}

pub fn save_spectral(path: &Path, data: &SpectralData) -> Result<()> {
    fs::write(path, spectral_to_json(data)?)?;
    Ok(())
}

pub fn load_spectral(path: &Path) -> Result<SpectralData> {
    spectral_from_json(&fs::read_to_string(path)?)
}

/// A CSV table with one column per header.
pub fn save_table(path: &Path, headers: &[&str], columns: &[Vec<f64>]) -> Result<()> {
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    if headers.len() != columns.len() || columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Domain("table columns must match the headers and have equal length".into()));
    }
    let mut out = fs::File::create(path)?;
    writeln!(out, "{}", headers.join(","))?;
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| format!("{:.16e}", c[i])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
