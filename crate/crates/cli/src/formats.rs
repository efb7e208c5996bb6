//! Binary grid functions and CSV plot data.

use std::fmt::Write as _;
use std::path::Path;

use hardy_stein::{Grid, GridFunction};
use num_complex::Complex64;

use crate::error::CliError;

/// `d`, `N` as little-endian u64, `L` as f64, then `(re, im)` pairs in
/// row-major order.
pub fn encode_grid_function(f: &GridFunction) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(24 + 16 * g.len());
    out.extend_from_slice(&(g.dim() as u64).to_le_bytes());
    out.extend_from_slice(&(g.points_per_axis() as u64).to_le_bytes());
    out.extend_from_slice(&g.half_width().to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode_grid_function(bytes: &[u8]) -> Result<GridFunction, String> {
    if bytes.len() < 24 {
        return Err("shorter than the 24-byte header".into());
    }
    let word = |i: usize| <[u8; 8]>::try_from(&bytes[8 * i..8 * i + 8]).unwrap();
    let dim = u64::from_le_bytes(word(0)) as usize;
    let n = u64::from_le_bytes(word(1)) as usize;
    let l = f64::from_le_bytes(word(2));
    let grid = Grid::new(dim, n, l).map_err(|e| e.to_string())?;
    let body = &bytes[24..];
    if body.len() != 16 * grid.len() {
        return Err(format!("expected {} value bytes, found {}", 16 * grid.len(), body.len()));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    GridFunction::from_complex(&grid, values).map_err(|e| e.to_string())
}

pub fn read_grid_function(path: &Path) -> Result<GridFunction, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    decode_grid_function(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// CSV with a `#` line describing the columns, then the header.
pub struct Csv {
    w: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new(comment: &str, header: &[&str]) -> Self {
        let mut w = csv::Writer::from_writer(format!("# {comment}\n").into_bytes());
        w.write_record(header).expect("in-memory write");
        Csv { w }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.w.write_record(cells).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.w.into_inner().expect("in-memory flush")
    }
}

/// Shortest round-trip form; non-finite values spelled out.
pub fn num(x: f64) -> String {
    let mut s = String::new();
    if x.is_finite() {
        write!(s, "{x:e}").unwrap();
    } else {
        write!(s, "{x}").unwrap();
    }
    s
}
