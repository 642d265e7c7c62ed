//! Lift and covariance serialization.
//!
//! Level-2 lifts (little-endian): magic `RL2A`, `u32` version, `u64` points
//! `n`, `u64` components `m`, `n` times, `n·m` path values (point-major),
//! then `(n−1)·m²` adjacent areas (row-major blocks). Covariance tables are
//! CSV rows `u,v,u',v',value` over grid pairs `u < v`, `u' < v'`.

use std::io::{Read, Write};

use super::{CovarianceTable, DiscretePath, Level2Area};
use crate::error::{Error, Result};
use crate::spectral::io::{read_f64, read_u32, read_u64};
use crate::time_grid::TimeGrid;

const MAGIC: &[u8; 4] = b"RL2A";
const VERSION: u32 = 1;

pub fn write_lift_binary<W: Write>(l: &Level2Area, mut out: W) -> Result<()> {
    let n = l.len();
    let m = l.dim();
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(n as u64).to_le_bytes())?;
    out.write_all(&(m as u64).to_le_bytes())?;
    for t in l.grid().times() {
        out.write_all(&t.to_le_bytes())?;
    }
    for v in l.base().data() {
        out.write_all(&v.to_le_bytes())?;
    }
    for k in 0..n.saturating_sub(1) {
        for v in l.adjacent(k) {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_lift_binary<R: Read>(mut input: R) -> Result<Level2Area> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not a lift dump (bad magic)".into()));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported lift dump version {version}")));
    }
    let n = read_u64(&mut input)? as usize;
    let m = read_u64(&mut input)? as usize;
    let mut read = |k: usize| (0..k).map(|_| read_f64(&mut input)).collect::<Result<Vec<f64>>>();
    let times = read(n)?;
    let data = read(n * m)?;
    let adjacent = read(n.saturating_sub(1) * m * m)?;
    let base = DiscretePath::new(TimeGrid::new(times)?, m, data)?;
    Level2Area::from_adjacent(base, adjacent)
}

pub fn write_covariance_csv<W: Write>(r: &CovarianceTable, mut out: W) -> Result<()> {
    writeln!(out, "u,v,u',v',value")?;
    let t = r.grid().times();
    let n = t.len();
    for u in 0..n {
        for v in u + 1..n {
            for up in 0..n {
                for vp in up + 1..n {
                    writeln!(out, "{:e},{:e},{:e},{:e},{:e}", t[u], t[v], t[up], t[vp], r.get(u, v, up, vp))?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rough::lift_piecewise_linear;

    #[test]
    fn lift_round_trip() {
        let g = TimeGrid::uniform(0.0, 1.0, 6);
        let pts: Vec<Vec<f64>> = g.times().iter().map(|t| vec![t.sin(), t * t]).collect();
        let l = lift_piecewise_linear(&DiscretePath::from_points(g, &pts).unwrap());
        let mut buf = Vec::new();
        write_lift_binary(&l, &mut buf).unwrap();
        assert_eq!(read_lift_binary(&buf[..]).unwrap(), l);
    }

    #[test]
    fn covariance_rows() {
        let g = TimeGrid::uniform(0.0, 1.0, 2);
        let mut buf = Vec::new();
        write_covariance_csv(&CovarianceTable::brownian(&g), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 9);
    }
}
