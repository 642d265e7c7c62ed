use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::noise::{CouplingConfig, NoiseSpectrum};
use crate::solver::{Scheme, SolverConfig};
use crate::spectral::TorusGrid;

pub const CONFIG_VERSION: u32 = 1;

/// Experiment configuration, read from flat `key = value` text.
///
/// Keys (defaults in brackets):
///
/// | key | meaning |
/// |---|---|
/// | `version` | schema version, must be `1` |
/// | `hurst` | Hurst index `H` [0.4] |
/// | `components` | retained noise components `m` [16] |
/// | `lambda_decay` | `λ_i = i^{-q}` [3] |
/// | `alpha` | rough exponent, `1/3 < α < H` [0.34] |
/// | `delta` | variation slack for the solution distances [0.02] |
/// | `eps` | comma-separated, strictly decreasing ε list [2⁻²..2⁻⁶] |
/// | `seed` | first seed [1] |
/// | `replicas` | number of consecutive seeds [16] |
/// | `batch` | seeds per pooled batch [8] |
/// | `horizon` | `T` [1] |
/// | `unit_step` | fine noise step in units of `ε_min` [1/32] |
/// | `burn_in_factor` | burn-in `T₀ = factor/c_min` in fast time [10] |
/// | `memory_cap` | max fine noise samples [2²⁶] |
/// | `nu` | viscosity [0.1] |
/// | `dim`, `n`, `dealias` | spatial grid [2, 32, 2/3] |
/// | `dt` | ε-system step [2⁻¹²] |
/// | `davie_dt` | limit-equation step [2⁻¹¹] |
/// | `nonlinear` | include `−Π(u·∇u)` [true] |
/// | `obs_points` | observation grid for the lift gaps [9] |
/// | `cert_points` | certification grid bound [65] |
/// | `monotone_slack` | relative slack in monotonicity checks [0.05] |
/// | `out` | output directory [out] |
/// | `formats` | `csv`, `json` or both [csv,json] |
/// | `threads` | worker threads, 0 for the default [0] |
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub version: u32,
    pub hurst: f64,
    pub components: usize,
    pub lambda_decay: f64,
    pub alpha: f64,
    pub delta: f64,
    pub eps: Vec<f64>,
    pub seed: u64,
    pub replicas: usize,
    pub batch: usize,
    pub horizon: f64,
    pub unit_step: f64,
    pub burn_in_factor: f64,
    pub memory_cap: usize,
    pub nu: f64,
    pub dim: usize,
    pub n: usize,
    pub dealias: f64,
    pub dt: f64,
    pub davie_dt: f64,
    pub nonlinear: bool,
    pub obs_points: usize,
    pub cert_points: usize,
    pub monotone_slack: f64,
    pub out: String,
    pub formats: Vec<String>,
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            hurst: 0.4,
            components: 16,
            lambda_decay: 3.0,
            alpha: 0.34,
            delta: 0.02,
            eps: (2..=6).map(|k| 2f64.powi(-k)).collect(),
            seed: 1,
            replicas: 16,
            batch: 8,
            horizon: 1.0,
            unit_step: 1.0 / 32.0,
            burn_in_factor: 10.0,
            memory_cap: 1 << 26,
            nu: 0.1,
            dim: 2,
            n: 32,
            dealias: 2.0 / 3.0,
            dt: 1.0 / 4096.0,
            davie_dt: 1.0 / 2048.0,
            nonlinear: true,
            obs_points: 9,
            cert_points: 65,
            monotone_slack: 0.05,
            out: "out".into(),
            formats: vec!["csv".into(), "json".into()],
            threads: 0,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("key `{key}`: cannot parse `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| parse_num(key, x.trim())).collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut version_seen = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, v) = (key.trim(), value.trim());
            match key {
                "version" => {
                    cfg.version = parse_num(key, v)?;
                    version_seen = true;
                }
                "hurst" => cfg.hurst = parse_num(key, v)?,
                "components" => cfg.components = parse_num(key, v)?,
                "lambda_decay" => cfg.lambda_decay = parse_num(key, v)?,
                "alpha" => cfg.alpha = parse_num(key, v)?,
                "delta" => cfg.delta = parse_num(key, v)?,
                "eps" => cfg.eps = parse_list(key, v)?,
                "seed" => cfg.seed = parse_num(key, v)?,
                "replicas" => cfg.replicas = parse_num(key, v)?,
                "batch" => cfg.batch = parse_num(key, v)?,
                "horizon" | "T" => cfg.horizon = parse_num(key, v)?,
                "unit_step" => cfg.unit_step = parse_num(key, v)?,
                "burn_in_factor" => cfg.burn_in_factor = parse_num(key, v)?,
                "memory_cap" => cfg.memory_cap = parse_num(key, v)?,
                "nu" => cfg.nu = parse_num(key, v)?,
                "dim" => cfg.dim = parse_num(key, v)?,
                "n" => cfg.n = parse_num(key, v)?,
                "dealias" => cfg.dealias = parse_num(key, v)?,
                "dt" => cfg.dt = parse_num(key, v)?,
                "davie_dt" => cfg.davie_dt = parse_num(key, v)?,
                "nonlinear" => cfg.nonlinear = parse_num(key, v)?,
                "obs_points" => cfg.obs_points = parse_num(key, v)?,
                "cert_points" => cfg.cert_points = parse_num(key, v)?,
                "monotone_slack" => cfg.monotone_slack = parse_num(key, v)?,
                "out" => cfg.out = v.to_string(),
                "formats" => cfg.formats = v.split(',').map(|s| s.trim().to_string()).collect(),
                "threads" => cfg.threads = parse_num(key, v)?,
                _ => return Err(config_err(format!("line {}: unknown key `{key}`", lineno + 1))),
            }
        }
        if !version_seen {
            return Err(config_err("config file must declare `version`"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(config_err(format!("unsupported config version {}", self.version)));
        }
        if !(self.alpha > 1.0 / 3.0 && self.alpha < self.hurst) {
            return Err(config_err(format!(
                "alpha must satisfy 1/3 < alpha < H = {}, got {}",
                self.hurst, self.alpha
            )));
        }
        if !(self.delta > 0.0 && self.alpha - self.delta > 1.0 / 4.0) {
            return Err(config_err("delta must be positive with alpha - delta > 1/4"));
        }
        if self.eps.is_empty() || self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(config_err("eps list must be non-empty and strictly decreasing"));
        }
        if self.eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(config_err("eps entries must lie in (0, 1]"));
        }
        if self.replicas == 0 || self.batch == 0 {
            return Err(config_err("replicas and batch must be positive"));
        }
        if self.obs_points < 3 || self.cert_points < 3 {
            return Err(config_err("observation and certification grids need at least 3 points"));
        }
        let ratio = self.davie_dt / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
            return Err(config_err("davie_dt must be a whole multiple of dt"));
        }
        if self.formats.iter().any(|f| f != "csv" && f != "json") {
            return Err(config_err("formats must be drawn from csv, json"));
        }
        if !(self.monotone_slack >= 0.0) {
            return Err(config_err("monotone_slack must be non-negative"));
        }
        self.spectrum()?;
        self.grid()?;
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.replicas as u64).map(|k| self.seed + k).collect()
    }

    pub fn spectrum(&self) -> Result<NoiseSpectrum> {
        NoiseSpectrum::power_law(self.hurst, self.components, self.lambda_decay)
            .map_err(|e| config_err(format!("noise spectrum: {e}")))
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dim, self.n, self.dealias).map_err(|e| config_err(format!("spatial grid: {e}")))
    }

    pub fn coupling(&self) -> CouplingConfig {
        CouplingConfig {
            eps: self.eps.clone(),
            horizon: self.horizon,
            unit_step: self.unit_step,
            burn_in_factor: self.burn_in_factor,
            memory_cap: self.memory_cap,
        }
    }

    pub fn solver(&self, scheme: Scheme) -> Result<SolverConfig> {
        let mut s = SolverConfig::default_for(scheme);
        s.nu = self.nu;
        s.grid = self.grid()?;
        s.horizon = self.horizon;
        s.nonlinear = self.nonlinear;
        s.dt = match scheme {
            Scheme::EpsilonSystemRk2 => self.dt,
            Scheme::LimitDavie => self.davie_dt,
        };
        Ok(s)
    }

    /// Canonical `key = value` form; every field, sorted by key.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("version", self.version.to_string());
        put("hurst", format!("{:e}", self.hurst));
        put("components", self.components.to_string());
        put("lambda_decay", format!("{:e}", self.lambda_decay));
        put("alpha", format!("{:e}", self.alpha));
        put("delta", format!("{:e}", self.delta));
        put("eps", list(&self.eps));
        put("seed", self.seed.to_string());
        put("replicas", self.replicas.to_string());
        put("batch", self.batch.to_string());
        put("horizon", format!("{:e}", self.horizon));
        put("unit_step", format!("{:e}", self.unit_step));
        put("burn_in_factor", format!("{:e}", self.burn_in_factor));
        put("memory_cap", self.memory_cap.to_string());
        put("nu", format!("{:e}", self.nu));
        put("dim", self.dim.to_string());
        put("n", self.n.to_string());
        put("dealias", format!("{:e}", self.dealias));
        put("dt", format!("{:e}", self.dt));
        put("davie_dt", format!("{:e}", self.davie_dt));
        put("nonlinear", self.nonlinear.to_string());
        put("obs_points", self.obs_points.to_string());
        put("cert_points", self.cert_points.to_string());
        put("monotone_slack", format!("{:e}", self.monotone_slack));
        put("out", self.out.clone());
        put("formats", self.formats.join(","));
        put("threads", self.threads.to_string());
        m
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_map() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Hex SHA-256 of the canonical text, excluding output-only keys.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.to_map() {
            if matches!(k.as_str(), "out" | "formats" | "threads") {
                continue;
            }
            h.update(format!("{k} = {v}\n").as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
