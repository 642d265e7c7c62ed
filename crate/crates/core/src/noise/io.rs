//! Ensemble serialization.
//!
//! CSV: header `t,component,value`, one row per sample. Binary
//! (little-endian): magic `RFOU`, `u32` version, `u64` points, `u64`
//! components, the `f64` times, then the `f64` values component by component.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::spectral::io::{read_f64, read_u32, read_u64};
use crate::time_grid::TimeGrid;

const MAGIC: &[u8; 4] = b"RFOU";
const VERSION: u32 = 1;

/// Component-major samples on a grid (`w` of a [`super::FouEnsemble`] or
/// the values of an [`super::FbmPath`]).
pub fn write_samples_csv<W: Write>(grid: &TimeGrid, rows: &[Vec<f64>], mut out: W) -> Result<()> {
    writeln!(out, "t,component,value")?;
    for (i, row) in rows.iter().enumerate() {
        for (t, v) in grid.times().iter().zip(row) {
            writeln!(out, "{t:e},{i},{v:e}")?;
        }
    }
    Ok(())
}

pub fn read_samples_csv<R: BufRead>(input: R) -> Result<(TimeGrid, Vec<Vec<f64>>)> {
    let mut times: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in input.lines().enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let bad = || Error::Parse(format!("line {}: expected t,component,value", n + 1));
        if cols.len() != 3 {
            return Err(bad());
        }
        let t: f64 = cols[0].trim().parse().map_err(|_| bad())?;
        let i: usize = cols[1].trim().parse().map_err(|_| bad())?;
        let v: f64 = cols[2].trim().parse().map_err(|_| bad())?;
        if i == rows.len() {
            rows.push(Vec::new());
        } else if i + 1 != rows.len() {
            return Err(Error::Parse(format!("line {}: components must appear in order", n + 1)));
        }
        if i == 0 {
            times.push(t);
        }
        rows[i].push(v);
    }
    if rows.iter().any(|r| r.len() != times.len()) {
        return Err(Error::Parse("components have different lengths".into()));
    }
    Ok((TimeGrid::new(times)?, rows))
}

pub fn write_samples_binary<W: Write>(grid: &TimeGrid, rows: &[Vec<f64>], mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(grid.len() as u64).to_le_bytes())?;
    out.write_all(&(rows.len() as u64).to_le_bytes())?;
    for t in grid.times() {
        out.write_all(&t.to_le_bytes())?;
    }
    for row in rows {
        for v in row {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_samples_binary<R: Read>(mut input: R) -> Result<(TimeGrid, Vec<Vec<f64>>)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not an ensemble dump (bad magic)".into()));
    }
    if read_u32(&mut input)? != VERSION {
        return Err(Error::Parse("unsupported ensemble dump version".into()));
    }
    let n = read_u64(&mut input)? as usize;
    let m = read_u64(&mut input)? as usize;
    let times = (0..n).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>()?;
    let rows = (0..m)
        .map(|_| (0..n).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok((TimeGrid::new(times)?, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let g = TimeGrid::uniform(0.0, 1.0, 5);
        let rows = vec![vec![0.0, 1.5, -2.0, 3.25, 1e-9, 7.0], vec![1.0; 6]];
        let mut csv = Vec::new();
        write_samples_csv(&g, &rows, &mut csv).unwrap();
        let (g2, r2) = read_samples_csv(&csv[..]).unwrap();
        assert!(g2.same_as(&g));
        assert_eq!(r2, rows);
        let mut bin = Vec::new();
        write_samples_binary(&g, &rows, &mut bin).unwrap();
        let (g3, r3) = read_samples_binary(&bin[..]).unwrap();
        assert_eq!(g3.times(), g.times());
        assert_eq!(r3, rows);
    }
}
