use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{median, read_rows_file};
use crate::error::{domain, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ReportLine {
    pub source: String,
    pub metric: String,
    pub eps: f64,
    pub count: usize,
    pub median: f64,
    pub mean: f64,
}

/// Per `(file, metric, ε)` medians and means of every record CSV in `dir`.
pub fn aggregate(dir: &Path) -> Result<Vec<ReportLine>> {
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(domain(format!("no record CSV files in {}", dir.display())));
    }
    let mut out = Vec::new();
    for f in files {
        let (_, rows) = read_rows_file(&f)?;
        let mut groups: BTreeMap<(String, u64), Vec<f64>> = BTreeMap::new();
        for r in rows {
            groups.entry((r.metric, r.eps.to_bits())).or_default().push(r.value);
        }
        let source = f.file_stem().unwrap().to_string_lossy().to_string();
        for ((metric, bits), v) in groups {
            out.push(ReportLine {
                source: source.clone(),
                metric,
                eps: f64::from_bits(bits),
                count: v.len(),
                median: median(&v),
                mean: v.iter().sum::<f64>() / v.len() as f64,
            });
        }
    }
    Ok(out)
}

/// Fixed-width text table, one line per group.
pub fn format_report(lines: &[ReportLine]) -> String {
    let mut s = format!("{:<8} {:<20} {:>12} {:>6} {:>14} {:>14}\n", "source", "metric", "eps", "n", "median", "mean");
    for l in lines {
        let _ = writeln!(
            s,
            "{:<8} {:<20} {:>12.6e} {:>6} {:>14.6e} {:>14.6e}",
            l.source, l.metric, l.eps, l.count, l.median, l.mean
        );
    }
    s
}
