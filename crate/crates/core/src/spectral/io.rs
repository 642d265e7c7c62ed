//! Field serialization.
//!
//! CSV: one row `k_1,..,k_d,component,re,im` per stored nonzero amplitude,
//! preceded by a `# dim=.. n=.. dealias=..` line.
//!
//! Binary (little-endian): magic `RFFD`, `u32` version, `u32` dimension,
//! `u32` modes per axis, `f64` dealias fraction, then `d·N^d` pairs of
//! `f64` (re, im) in the component-major flat layout of [`FourierField`].

use std::io::{BufRead, Read, Write};

use rustfft::num_complex::Complex64;

use super::{FourierField, TorusGrid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"RFFD";
const VERSION: u32 = 1;

pub fn write_field_csv<W: Write>(f: &FourierField, mut out: W) -> Result<()> {
    let g = f.grid();
    writeln!(out, "# dim={} n={} dealias={}", g.dim(), g.modes_per_axis(), g.dealias_fraction())?;
    let axes: Vec<String> = (1..=g.dim()).map(|a| format!("k{a}")).collect();
    writeln!(out, "{},component,re,im", axes.join(","))?;
    let p = g.points();
    for c in 0..g.dim() {
        for flat in 0..p {
            let a = f.coeffs()[c * p + flat];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let k = g.wavevector(flat);
            let ks: Vec<String> = k[..g.dim()].iter().map(|x| x.to_string()).collect();
            writeln!(out, "{},{c},{:e},{:e}", ks.join(","), a.re, a.im)?;
        }
    }
    Ok(())
}

pub fn read_field_csv<R: BufRead>(input: R) -> Result<FourierField> {
    let mut lines = input.lines();
    let head = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))??;
    let mut dim = None;
    let mut n = None;
    let mut frac = None;
    for tok in head.trim_start_matches('#').split_whitespace() {
        match tok.split_once('=') {
            Some(("dim", v)) => dim = v.parse::<usize>().ok(),
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            Some(("dealias", v)) => frac = v.parse::<f64>().ok(),
            _ => {}
        }
    }
    let (Some(dim), Some(n), Some(frac)) = (dim, n, frac) else {
        return Err(Error::Parse(format!("bad field header: {head}")));
    };
    let grid = TorusGrid::new(dim, n, frac)?;
    let mut f = FourierField::zeros(&grid);
    let p = grid.points();
    for (lineno, line) in lines.enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != dim + 3 {
            return Err(Error::Parse(format!("line {}: expected {} columns", lineno + 2, dim + 3)));
        }
        let bad = |_| Error::Parse(format!("line {}: malformed number", lineno + 2));
        let k: Vec<i64> = cols[..dim].iter().map(|s| s.trim().parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(|e| bad(e.to_string()))?;
        let c: usize = cols[dim].trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
        let re: f64 = cols[dim + 1].trim().parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
        let im: f64 = cols[dim + 2].trim().parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
        let flat = grid
            .flat_index(&k)
            .ok_or_else(|| Error::Parse(format!("line {}: wavevector {k:?} off grid", lineno + 2)))?;
        if c >= dim {
            return Err(Error::Parse(format!("line {}: component {c} out of range", lineno + 2)));
        }
        f.coeffs_mut()[c * p + flat] = Complex64::new(re, im);
    }
    Ok(f)
}

pub fn write_field_binary<W: Write>(f: &FourierField, mut out: W) -> Result<()> {
    let g = f.grid();
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(g.dim() as u32).to_le_bytes())?;
    out.write_all(&(g.modes_per_axis() as u32).to_le_bytes())?;
    out.write_all(&g.dealias_fraction().to_le_bytes())?;
    for a in f.coeffs() {
        out.write_all(&a.re.to_le_bytes())?;
        out.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field_binary<R: Read>(mut input: R) -> Result<FourierField> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not a field dump (bad magic)".into()));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported field dump version {version}")));
    }
    let dim = read_u32(&mut input)? as usize;
    let n = read_u32(&mut input)? as usize;
    let frac = read_f64(&mut input)?;
    let grid = TorusGrid::new(dim, n, frac)?;
    let len = dim * grid.points();
    let mut coeffs = Vec::with_capacity(len);
    for _ in 0..len {
        let re = read_f64(&mut input)?;
        let im = read_f64(&mut input)?;
        coeffs.push(Complex64::new(re, im));
    }
    FourierField::from_coeffs(&grid, coeffs)
}

pub(crate) fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub(crate) fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn csv_and_binary_round_trip() {
        let g = TorusGrid::new(2, 16, 2.0 / 3.0).unwrap();
        let f = FourierField::random_band_limited(&g, &mut stream_rng(9, 0), 1.0);
        let mut buf = Vec::new();
        write_field_csv(&f, &mut buf).unwrap();
        assert_eq!(read_field_csv(&buf[..]).unwrap(), f);
        let mut bin = Vec::new();
        write_field_binary(&f, &mut bin).unwrap();
        assert_eq!(read_field_binary(&bin[..]).unwrap(), f);
        assert!(read_field_binary(&bin[..10]).is_err());
    }
}
