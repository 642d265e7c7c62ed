use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::error::{Error, Result};

/// One measured number, traceable to its configuration and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub eps: f64,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
}

/// Output of a pipeline: the raw rows plus a JSON summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub kind: String,
    pub config_hash: String,
    pub config: std::collections::BTreeMap<String, String>,
    pub software_version: String,
    pub rows: Vec<Row>,
    pub summary: serde_json::Value,
    pub pass: bool,
}

impl ExperimentRecord {
    pub fn new(kind: &str, cfg: &ExperimentConfig) -> Self {
        Self {
            kind: kind.to_string(),
            config_hash: cfg.hash(),
            config: cfg.to_map(),
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            rows: Vec::new(),
            summary: serde_json::Value::Null,
            pass: false,
        }
    }

    pub fn push(&mut self, eps: f64, seed: u64, metric: &str, value: f64) {
        self.rows.push(Row { eps, seed, metric: metric.to_string(), value });
    }

    /// Values of `metric` at `eps`, ordered by seed.
    pub fn values(&self, eps: f64, metric: &str) -> Vec<f64> {
        let mut v: Vec<(u64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.metric == metric && r.eps == eps)
            .map(|r| (r.seed, r.value))
            .collect();
        v.sort_by_key(|p| p.0);
        v.into_iter().map(|p| p.1).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "config_hash,eps,seed,metric,value")?;
        for r in &self.rows {
            writeln!(out, "{},{:e},{},{},{:e}", self.config_hash, r.eps, r.seed, r.metric, r.value)?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            kind: &'a str,
            config_hash: &'a str,
            config: &'a std::collections::BTreeMap<String, String>,
            software_version: &'a str,
            pass: bool,
            summary: &'a serde_json::Value,
        }
        Ok(serde_json::to_string_pretty(&Summary {
            kind: &self.kind,
            config_hash: &self.config_hash,
            config: &self.config,
            software_version: &self.software_version,
            pass: self.pass,
            summary: &self.summary,
        })?)
    }

    /// Writes `<kind>.csv` and/or `<kind>.json` into `dir`.
    pub fn write(&self, dir: &Path, formats: &[String]) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        if formats.iter().any(|f| f == "csv") {
            let p = dir.join(format!("{}.csv", self.kind));
            let mut w = BufWriter::new(File::create(&p)?);
            self.write_csv(&mut w)?;
            w.flush()?;
            paths.push(p);
        }
        if formats.iter().any(|f| f == "json") {
            let p = dir.join(format!("{}.json", self.kind));
            fs::write(&p, self.summary_json()? + "\n")?;
            paths.push(p);
        }
        Ok(paths)
    }
}

/// Reads rows written by [`ExperimentRecord::write_csv`].
pub fn read_rows<R: BufRead>(input: R) -> Result<(String, Vec<Row>)> {
    let mut hash = String::new();
    let mut rows = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if k == 0 {
            if line.trim() != "config_hash,eps,seed,metric,value" {
                return Err(Error::Parse("record CSV must start with its header".into()));
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Parse(format!("line {}: expected 5 fields", k + 1)));
        }
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", k + 1));
        hash = f[0].to_string();
        rows.push(Row {
            eps: f[1].parse().map_err(|_| bad("eps"))?,
            seed: f[2].parse().map_err(|_| bad("seed"))?,
            metric: f[3].to_string(),
            value: f[4].parse().map_err(|_| bad("value"))?,
        });
    }
    Ok((hash, rows))
}

pub fn read_rows_file(path: &Path) -> Result<(String, Vec<Row>)> {
    read_rows(BufReader::new(File::open(path)?))
}

/// Median of a non-empty slice (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
