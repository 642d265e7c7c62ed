use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::driver::{mode_operators, DriverPair};
use super::remainder::{drift_prefix, remainder_compute, residual_on, Drift};
use crate::error::{domain, structural, Result};
use crate::rough::{check_stride, p_variation, partition_variation, rough_integral, DiscretePath, TwoParamProcess};
use crate::spectral::{transport_sparse, FourierField, SobolevLevel};
use crate::time_grid::TimeGrid;

/// Certification parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub alpha: f64,
    pub nu: f64,
    pub nonlinear: bool,
    /// Upper bound on the number of certification grid points.
    pub cert_points: usize,
    /// Weak-formulation tolerance; `None` uses `10·dt²` with `dt` the
    /// trajectory step.
    pub weak_tolerance: Option<f64>,
    pub cap_u: f64,
    pub cap_remainder: f64,
    pub cap_residual: f64,
    /// Number of equal windows covering `[0, T]` for the residual check.
    pub windows: usize,
    /// Grid points used for the sewing diagnostics of the rough integral.
    pub sewing_points: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            alpha: 0.34,
            nu: 0.1,
            nonlinear: true,
            cert_points: 65,
            weak_tolerance: None,
            cap_u: 10.0,
            cap_remainder: 10.0,
            cap_residual: 10.0,
            windows: 2,
            sewing_points: 257,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CertificateNorms {
    /// `‖u‖_{1/α-var;H^{-1}}`.
    pub u_variation: f64,
    /// `‖R^u‖_{1/(2α)-var;H^{-2}}`.
    pub remainder_variation: f64,
    /// `‖u♮‖_{1/(3α)-var;H^{-3}}` on `[0, T]`.
    pub residual_variation: f64,
    /// Largest residual variation over the covering windows.
    pub residual_window_max: f64,
    /// `(Σ_k V_k^p)^{1/p}` over the covering windows, `p = 1/(3α)`: the
    /// bound on `[0, T]` implied by the windows if no variation hid in the
    /// straddling intervals.
    pub residual_covering: f64,
    /// Residual variation on `[0, T]` divided by `residual_covering`.
    pub covering_ratio: f64,
    /// Longest run of certification intervals, starting anywhere, on which the
    /// residual variation stays below its cap (as a fraction of `T`).
    pub largest_window: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CertificateDefects {
    /// `max |⟨u_{s,t},φ⟩ − ∫_s^t⟨F(u),φ⟩ − ∫_s^t y dZ|` over test fields and
    /// certification pairs.
    pub weak_form: f64,
    pub weak_tolerance: f64,
    /// Relative gap in `δR^u = A¹u`.
    pub remainder_chen: f64,
    /// Certification interval `[s, t]` carrying the largest weak defect.
    pub worst_interval: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of [`certify_solution`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionCertificate {
    pub alpha: f64,
    pub norms: CertificateNorms,
    pub defects: CertificateDefects,
    pub verdict: Verdict,
    /// Reasons for a failing verdict.
    pub failures: Vec<String>,
    pub config_hash: String,
    pub seed: u64,
}

impl SolutionCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Sparse support of a band-limited field.
struct Sparse {
    idx: Vec<usize>,
    field: FourierField,
}

impl Sparse {
    fn new(field: FourierField) -> Self {
        Self { idx: field.support(), field }
    }

    /// `⟨u, self⟩` over the support only.
    fn dot(&self, u: &FourierField) -> f64 {
        let p = u.grid().points();
        let (a, b) = (u.coeffs(), self.field.coeffs());
        let mut acc = 0.0;
        for c in 0..u.grid().dim() {
            for &k in &self.idx {
                let (x, y) = (a[c * p + k], b[c * p + k]);
                acc += x.re * y.re + x.im * y.im;
            }
        }
        acc
    }
}

/// Defect path `D_k = ⟨u_{0,t_k},φ⟩ − ∫_0^{t_k}⟨F(u),φ⟩ − ∫_0^{t_k} y dZ`
/// for one test field; the weak formulation on `[s, t]` fails by
/// `|D_t − D_s|`.
#[allow(clippy::too_many_arguments)]
fn weak_defect(
    grid: &TimeGrid,
    states: &[FourierField],
    drift: &[FourierField],
    d: &DriverPair,
    phi: &FourierField,
    alpha: f64,
    check_points: usize,
) -> Result<Vec<f64>> {
    let basis = d.basis();
    let m = basis.len();
    let lift = d.lift().restrict(grid)?;
    let tphi: Vec<FourierField> = mode_operators(basis, phi)?;
    // y'^{ij} = ⟨u, T_i T_j φ⟩
    let ttphi: Vec<Sparse> = (0..m * m)
        .map(|k| transport_sparse(basis.field(k / m), &tphi[k % m]).map(Sparse::new))
        .collect::<Result<_>>()?;
    let tphi: Vec<Sparse> = tphi.into_iter().map(Sparse::new).collect();
    let phi_s = Sparse::new(phi.clone());
    let n = states.len();
    let mut y = Vec::with_capacity(n * m);
    let mut yp = Vec::with_capacity(n * m * m);
    let mut pairing = Vec::with_capacity(n);
    let mut force = Vec::with_capacity(n);
    for (u, f) in states.iter().zip(drift) {
        y.extend(tphi.iter().map(|s| -s.dot(u)));
        yp.extend(ttphi.iter().map(|s| s.dot(u)));
        pairing.push(phi_s.dot(u));
        force.push(phi_s.dot(f));
    }
    let y = DiscretePath::new(grid.clone(), m, y)?;
    let yp = DiscretePath::new(grid.clone(), m * m, yp)?;
    let integral = rough_integral(&y, &yp, &lift, alpha, check_points)?;
    let t = grid.times();
    let mut mu = vec![0.0; n];
    for k in 1..n {
        mu[k] = mu[k - 1] + 0.5 * (t[k] - t[k - 1]) * (force[k] + force[k - 1]);
    }
    Ok((0..n).map(|k| pairing[k] - pairing[0] - mu[k] - integral.path[k]).collect())
}

/// Certifies a fine trajectory as a rough-path solution driven by `d`.
///
/// The trajectory grid must be a sub-grid of the driver grid. Variation
/// norms are evaluated on a certification grid of at most
/// `opts.cert_points` trajectory points; drift integrals and the rough
/// integral use every trajectory point.
pub fn certify_solution(
    grid: &TimeGrid,
    states: &[FourierField],
    d: &DriverPair,
    phis: &[FourierField],
    opts: &CertifyOptions,
) -> Result<SolutionCertificate> {
    let alpha = opts.alpha;
    if !(alpha > 1.0 / 3.0 && alpha < 0.5) {
        return Err(domain(format!("roughness exponent {alpha} outside (1/3, 1/2)")));
    }
    if states.len() != grid.len() || states.len() < 3 {
        return Err(structural("trajectory needs at least three states on its grid"));
    }
    if phis.is_empty() {
        return Err(domain("certification needs at least one test field"));
    }
    if opts.windows == 0 {
        return Err(domain("window count must be positive"));
    }
    let dt = grid.require_uniform()?;
    let stride = check_stride(grid.len(), opts.cert_points.max(3) + 1);
    let cert_grid = grid.stride(stride)?;
    let drift = Drift { nu: opts.nu, nonlinear: opts.nonlinear };
    let (prefix, f) = drift_prefix(grid, states, drift, stride)?;
    let picked: Vec<FourierField> = states.iter().step_by(stride).cloned().collect();

    let u_proc = TwoParamProcess::from_fields(&cert_grid, &picked, SobolevLevel(-1.0))?;
    let rem = remainder_compute(&cert_grid, &picked, d)?;
    let res = residual_on(&cert_grid, &picked, &prefix, d)?;
    let p_res = 1.0 / (3.0 * alpha);
    let mut norms = CertificateNorms {
        u_variation: p_variation(&u_proc, 1.0 / alpha)?,
        remainder_variation: p_variation(&rem.process, 1.0 / (2.0 * alpha))?,
        residual_variation: partition_variation(&res, p_res)?,
        ..Default::default()
    };
    let nc = cert_grid.len();
    let cuts: Vec<usize> = (0..=opts.windows).map(|w| w * (nc - 1) / opts.windows).collect();
    let mut cover = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let v = partition_variation(&res.window(w[0], w[1])?, p_res)?;
            norms.residual_window_max = norms.residual_window_max.max(v);
            cover += v.powf(p_res);
        }
    }
    norms.residual_covering = cover.powf(1.0 / p_res);
    norms.covering_ratio = if norms.residual_covering > 0.0 {
        norms.residual_variation / norms.residual_covering
    } else {
        1.0
    };
    norms.largest_window = largest_window(&res, p_res, opts.cap_residual)? / (cert_grid.end() - cert_grid.start());

    let check_points = opts.sewing_points.max(3);
    let paths: Vec<Vec<f64>> = phis
        .par_iter()
        .map(|phi| weak_defect(grid, states, &f, d, phi, alpha, check_points))
        .collect::<Result<_>>()?;
    let cert: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    let mut weak: f64 = 0.0;
    let mut worst = (0.0, 0);
    for path in &paths {
        for (a, &i) in cert.iter().enumerate() {
            for &j in &cert[a + 1..] {
                weak = weak.max((path[j] - path[i]).abs());
            }
            if a + 1 < cert.len() {
                let e = (path[cert[a + 1]] - path[i]).abs();
                if e > worst.0 {
                    worst = (e, a);
                }
            }
        }
    }
    let worst_interval = (cert_grid.at(worst.1), cert_grid.at(worst.1 + 1));
    let tol = opts.weak_tolerance.unwrap_or(10.0 * dt * dt);
    let defects = CertificateDefects { weak_form: weak, weak_tolerance: tol, remainder_chen: rem.delta_defect, worst_interval };

    let mut failures = Vec::new();
    let checks = [
        ("u 1/α-variation", norms.u_variation, opts.cap_u),
        ("remainder 1/(2α)-variation", norms.remainder_variation, opts.cap_remainder),
        ("residual 1/(3α)-variation", norms.residual_variation, opts.cap_residual),
    ];
    for (name, v, cap) in checks {
        if !v.is_finite() || v > cap {
            failures.push(format!("{name} {v:.3e} exceeds cap {cap:.3e}"));
        }
    }
    if !(weak <= tol) {
        failures.push(format!(
            "weak formulation defect {weak:.3e} exceeds {tol:.3e} on [{:.6}, {:.6}]",
            worst_interval.0, worst_interval.1
        ));
    }
    let verdict = if failures.is_empty() { Verdict::Pass } else { Verdict::Fail };
    info!("certificate verdict {verdict:?} ({} failures)", failures.len());
    Ok(SolutionCertificate {
        alpha,
        norms,
        defects,
        verdict,
        failures,
        config_hash: String::new(),
        seed: 0,
    })
}

/// Longest time span of consecutive grid intervals on which the
/// `p`-variation of `a` stays within `cap`.
fn largest_window(a: &TwoParamProcess, p: f64, cap: f64) -> Result<f64> {
    let t = a.grid().times();
    let n = a.len();
    let mut best: f64 = 0.0;
    let mut end = 0;
    for start in 0..n - 1 {
        end = end.max(start + 1);
        while end + 1 < n && partition_variation(&a.window(start, end + 1)?, p)? <= cap {
            end += 1;
        }
        if partition_variation(&a.window(start, end)?, p)? <= cap {
            best = best.max(t[end] - t[start]);
        }
    }
    Ok(best)
}
