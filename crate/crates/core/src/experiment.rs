//! Experiment configuration and the forward → noise → DtN → reconstruction
//! pipeline.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::degeneracy::{DegeneracyPolicy, ModeDiagnostic};
use crate::dtn::neumann_from_dirichlet;
use crate::error::{Error, Result};
use crate::forward::{
    dirichlet_data, MeasurementGrid, NearFieldData, Point, QuadratureConfig, DEFAULT_ANGLES, DEFAULT_CENTER,
    DEFAULT_RADIUS,
};
use crate::noise::{add_noise, NoiseConfig};
use crate::quadrature::integrate_adaptive;
use crate::recon_dl::{boundary_pairing_dl, dl_coefficients, dl_reconstruct, DEFAULT_DL_TRUNCATION};
use crate::recon_ft::{boundary_pairing_plane_wave, ft_coefficients, ft_reconstruct, DEFAULT_FT_TRUNCATION};
use crate::sources::{dl_exponent, SourceSpec, TransverseProfile};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_EVAL_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dl,
    Ft,
}

impl Method {
    pub fn default_truncation(self) -> usize {
        match self {
            Method::Dl => DEFAULT_DL_TRUNCATION,
            Method::Ft => DEFAULT_FT_TRUNCATION,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dl => "dl",
            Method::Ft => "ft",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dl" => Ok(Method::Dl),
            "ft" => Ok(Method::Ft),
            other => Err(Error::Config(format!("unknown method '{other}', expected dl or ft"))),
        }
    }
}

/// Measurement circle and the default wavenumber list `k_j = j k_max / k_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub center: Point,
    pub radius: f64,
    pub angles: usize,
    pub k_max: f64,
    pub k_count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { center: DEFAULT_CENTER, radius: DEFAULT_RADIUS, angles: DEFAULT_ANGLES, k_max: 4.0, k_count: 40 }
    }
}

impl GridConfig {
    pub fn wavenumbers(&self) -> Vec<f64> {
        MeasurementGrid::uniform_wavenumbers(self.k_max, self.k_count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub deltas: Vec<f64>,
    /// Truncation per noise level; empty means the experiment truncation.
    #[serde(default)]
    pub truncations: Vec<usize>,
    pub seed_count: usize,
    #[serde(default)]
    pub first_seed: u64,
}

impl SweepConfig {
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.seed_count as u64).map(|i| self.first_seed + i).collect()
    }
}

/// Thresholds used by [`crate::validate::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationTolerances {
    pub quadrature: f64,
    pub dtn_point_source: f64,
    pub dtn_kernel_gradient: f64,
    pub greens_identity: f64,
}

impl Default for ValidationTolerances {
    fn default() -> Self {
        ValidationTolerances { quadrature: 1e-6, dtn_point_source: 1e-10, dtn_kernel_gradient: 1e-6, greens_identity: 1e-6 }
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_eval_points() -> usize {
    DEFAULT_EVAL_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub method: Method,
    pub source: SourceSpec,
    #[serde(default)]
    pub g: TransverseProfile,
    #[serde(default)]
    pub grid: GridConfig,
    /// Explicit wavenumbers; when set the grid list is not used.
    #[serde(default)]
    pub k_values: Vec<f64>,
    /// One-based indices into the grid list; empty selects all.
    #[serde(default)]
    pub k_indices: Vec<usize>,
    /// Added to every selected wavenumber.
    #[serde(default)]
    pub k_shift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default = "NoiseConfig::none")]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dtn_order: Option<usize>,
    #[serde(default)]
    pub degeneracy: DegeneracyPolicy,
    #[serde(default = "default_eval_points")]
    pub eval_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub tolerances: ValidationTolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// A selected wavenumber: its one-based grid index (if drawn from the grid
/// list) and the value actually used, shift included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedK {
    pub index: Option<usize>,
    pub k: f64,
}

impl ExperimentConfig {
    pub fn new(method: Method, source: SourceSpec) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            description: None,
            method,
            source,
            g: TransverseProfile::default(),
            grid: GridConfig::default(),
            k_values: Vec::new(),
            k_indices: Vec::new(),
            k_shift: 0.0,
            truncation: None,
            noise: NoiseConfig::none(),
            quadrature: QuadratureConfig::default(),
            dtn_order: None,
            degeneracy: DegeneracyPolicy::default(),
            eval_points: DEFAULT_EVAL_POINTS,
            sweep: None,
            tolerances: ValidationTolerances::default(),
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn with_k_values(mut self, ks: &[f64]) -> Self {
        self.k_values = ks.to_vec();
        self
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or_else(|| self.method.default_truncation())
    }

    pub fn selected_wavenumbers(&self) -> Result<Vec<SelectedK>> {
        let base: Vec<SelectedK> = if !self.k_values.is_empty() {
            self.k_values.iter().map(|&k| SelectedK { index: None, k }).collect()
        } else {
            let all = self.grid.wavenumbers();
            if self.k_indices.is_empty() {
                all.iter().enumerate().map(|(i, &k)| SelectedK { index: Some(i + 1), k }).collect()
            } else {
                self.k_indices
                    .iter()
                    .map(|&j| {
                        if j == 0 || j > all.len() {
                            Err(Error::Config(format!("wavenumber index {j} outside 1..={}", all.len())))
                        } else {
                            Ok(SelectedK { index: Some(j), k: all[j - 1] })
                        }
                    })
                    .collect::<Result<_>>()?
            }
        };
        let shifted: Vec<SelectedK> =
            base.into_iter().map(|s| SelectedK { k: s.k + self.k_shift, ..s }).collect();
        if let Some(bad) = shifted.iter().find(|s| !(s.k.is_finite() && s.k > 0.0)) {
            return Err(Error::Config(format!("selected wavenumber {} is not positive", bad.k)));
        }
        Ok(shifted)
    }

    /// Measurement grid carrying the selected wavenumbers.
    pub fn measurement_grid(&self) -> Result<MeasurementGrid> {
        let ks = self.selected_wavenumbers()?.iter().map(|s| s.k).collect();
        MeasurementGrid::new(self.grid.center, self.grid.radius, self.grid.angles, ks)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        self.source.validate()?;
        self.g.validate()?;
        self.quadrature.validate()?;
        self.noise.validate()?;
        if !(self.grid.k_max.is_finite() && self.grid.k_max > 0.0) || self.grid.k_count == 0 {
            return Err(Error::Config("grid needs k_max > 0 and k_count >= 1".into()));
        }
        if !self.k_shift.is_finite() {
            return Err(Error::Config("k_shift must be finite".into()));
        }
        if self.method == Method::Dl && self.truncation == Some(0) {
            return Err(Error::Config("DL truncation must be at least 1".into()));
        }
        if self.eval_points < 2 {
            return Err(Error::Config("need at least 2 evaluation points".into()));
        }
        let tol = self.degeneracy.tolerance;
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::Config(format!("degeneracy tolerance must be non-negative, got {tol}")));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.deltas.is_empty() || sweep.seed_count == 0 {
                return Err(Error::Config("sweep needs at least one noise level and one seed".into()));
            }
            if !sweep.truncations.is_empty() && sweep.truncations.len() != sweep.deltas.len() {
                return Err(Error::Config("sweep truncations must match the noise levels one to one".into()));
            }
            for &d in &sweep.deltas {
                NoiseConfig::new(d, 0).validate()?;
            }
        }
        let grid = self.measurement_grid()?;
        grid.clearance(&self.source, &self.g)?;
        Ok(())
    }

    /// Uniform evaluation points on `[0, pi]`, endpoints included.
    pub fn eval_grid(&self) -> Vec<f64> {
        let n = self.eval_points;
        (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Degenerate,
    Failed,
}

/// Sampled exact and reconstructed source; written to CSV, not to JSON.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampledProfile {
    pub x1: Vec<f64>,
    pub exact: Vec<f64>,
    pub recon: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub method: Method,
    pub k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_index: Option<usize>,
    pub truncation: usize,
    pub delta: f64,
    pub seed: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_l2_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate_modes: Vec<i64>,
    #[serde(default)]
    pub diagnostics: Vec<ModeDiagnostic>,
    #[serde(skip)]
    pub profile: SampledProfile,
}

impl ReconstructionResult {
    pub fn error(&self) -> Option<f64> {
        self.relative_l2_error
    }
}

/// `||exact - recon||_2 / ||exact||_2` with trapezoid weights on `x1`. The
/// imaginary part of `recon` counts towards the error.
pub fn relative_l2_error(x1: &[f64], exact: &[f64], recon: &[Complex64]) -> Result<f64> {
    if x1.len() != exact.len() || x1.len() != recon.len() || x1.len() < 2 {
        return Err(Error::Config("error metric needs matching grids of at least two points".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x1.len() {
        let left = if i > 0 { x1[i] - x1[i - 1] } else { 0.0 };
        let right = if i + 1 < x1.len() { x1[i + 1] - x1[i] } else { 0.0 };
        let w = 0.5 * (left + right);
        num += w * (recon[i] - exact[i]).norm_sqr();
        den += w * exact[i] * exact[i];
    }
    if den == 0.0 || !den.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok((num / den).sqrt())
}

/// Output of [`run_experiment`]: the data actually reconstructed from and
/// one record per selected wavenumber.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub data: NearFieldData,
    pub results: Vec<ReconstructionResult>,
}

/// Reconstructs from `data` (Neumann populated) at position `j`.
pub fn reconstruct_at(
    cfg: &ExperimentConfig,
    data: &NearFieldData,
    j: usize,
    selected: SelectedK,
    truncation: usize,
    noise: &NoiseConfig,
) -> ReconstructionResult {
    let k = data.grid.wavenumbers[j];
    let mut result = ReconstructionResult {
        method: cfg.method,
        k,
        k_index: selected.index,
        truncation,
        delta: noise.delta,
        seed: noise.seed,
        status: Status::Ok,
        relative_l2_error: None,
        message: None,
        degenerate_modes: Vec::new(),
        diagnostics: Vec::new(),
        profile: SampledProfile::default(),
    };
    let x1 = cfg.eval_grid();
    let recon = match cfg.method {
        Method::Dl => dl_coefficients(data, j, truncation, &cfg.g, &cfg.degeneracy).map(|c| {
            let values = dl_reconstruct(&c, &x1);
            (values, c.degenerate_modes(), c.diagnostics)
        }),
        Method::Ft => ft_coefficients(data, j, truncation, &cfg.g, &cfg.degeneracy).map(|c| {
            let values = ft_reconstruct(&c, &x1);
            (values, c.degenerate_modes(), c.diagnostics)
        }),
    };
    let (values, degenerate, diagnostics) = match recon {
        Ok(r) => r,
        Err(Error::Degenerate { modes, .. }) => {
            result.status = Status::Degenerate;
            result.message = Some(format!("all modes degenerate at k = {k}"));
            result.degenerate_modes = modes;
            return result;
        }
        Err(e) => {
            result.status = Status::Failed;
            result.message = Some(e.to_string());
            return result;
        }
    };
    result.degenerate_modes = degenerate;
    result.diagnostics = diagnostics;
    let exact = cfg.source.eval_many(&x1, k);
    if values.iter().any(|v| !v.is_finite()) {
        result.status = Status::Failed;
        result.message = Some("reconstruction produced non-finite values".into());
        return result;
    }
    match relative_l2_error(&x1, &exact, &values) {
        Ok(e) if e.is_finite() => result.relative_l2_error = Some(e),
        Ok(_) => {
            result.status = Status::Failed;
            result.message = Some("error metric is not finite".into());
        }
        Err(e) => {
            result.status = Status::Failed;
            result.message = Some(e.to_string());
        }
    }
    if !result.degenerate_modes.is_empty() && result.message.is_none() {
        result.message = Some(format!("degenerate modes {:?} zeroed", result.degenerate_modes));
    }
    result.profile = SampledProfile { x1, exact, recon: values };
    result
}

/// Noise-free Dirichlet data at the selected wavenumbers.
pub fn synthesize(cfg: &ExperimentConfig) -> Result<NearFieldData> {
    cfg.validate()?;
    let grid = cfg.measurement_grid()?;
    dirichlet_data(&cfg.source, &cfg.g, &grid, &cfg.quadrature)
}

fn prepare(clean: &NearFieldData, cfg: &ExperimentConfig, noise: &NoiseConfig) -> Result<NearFieldData> {
    let noisy = add_noise(clean, noise)?;
    neumann_from_dirichlet(&noisy, cfg.dtn_order)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clean = synthesize(cfg)?;
    run_on_data(cfg, &clean)
}

/// Runs the noise → DtN → reconstruction part on precomputed clean data.
pub fn run_on_data(cfg: &ExperimentConfig, clean: &NearFieldData) -> Result<ExperimentOutcome> {
    let selected = cfg.selected_wavenumbers()?;
    let data = prepare(clean, cfg, &cfg.noise)?;
    let truncation = cfg.truncation();
    let results = (0..selected.len())
        .into_par_iter()
        .map(|j| reconstruct_at(cfg, &data, j, selected[j], truncation, &cfg.noise))
        .collect();
    Ok(ExperimentOutcome { data, results })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub seed: u64,
    pub truncation: usize,
    pub k: f64,
    pub status: Status,
    pub relative_l2_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMean {
    pub delta: f64,
    pub truncation: usize,
    pub k: f64,
    /// Mean over successful seeds; absent when every seed failed.
    pub mean_error: Option<f64>,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub method: Method,
    pub rows: Vec<SweepRow>,
    pub means: Vec<SweepMean>,
}

/// Error for every (noise level, seed, wavenumber) cell and per-level means.
/// Cells run in parallel; rows are ordered by level, then seed, then wavenumber.
pub fn sweep_noise(cfg: &ExperimentConfig, deltas: &[f64], truncations: &[usize], seeds: &[u64]) -> Result<SweepTable> {
    let clean = synthesize(cfg)?;
    sweep_on_data(cfg, &clean, deltas, truncations, seeds)
}

pub fn sweep_on_data(
    cfg: &ExperimentConfig,
    clean: &NearFieldData,
    deltas: &[f64],
    truncations: &[usize],
    seeds: &[u64],
) -> Result<SweepTable> {
    if deltas.is_empty() || seeds.is_empty() {
        return Err(Error::Config("sweep needs at least one noise level and one seed".into()));
    }
    if !truncations.is_empty() && truncations.len() != deltas.len() {
        return Err(Error::Config("sweep truncations must match the noise levels one to one".into()));
    }
    let selected = cfg.selected_wavenumbers()?;
    let cells: Vec<(usize, u64)> = (0..deltas.len()).flat_map(|d| seeds.iter().map(move |&s| (d, s))).collect();
    let rows: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(d, seed)| {
            let noise = NoiseConfig { delta: deltas[d], seed, complex: cfg.noise.complex };
            let truncation = truncations.get(d).copied().unwrap_or_else(|| cfg.truncation());
            let data = prepare(clean, cfg, &noise)?;
            Ok((0..selected.len())
                .map(|j| {
                    let r = reconstruct_at(cfg, &data, j, selected[j], truncation, &noise);
                    SweepRow {
                        delta: noise.delta,
                        seed,
                        truncation,
                        k: r.k,
                        status: r.status,
                        relative_l2_error: r.relative_l2_error,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = rows.into_iter().flatten().collect();
    let mut means = Vec::new();
    for (d, &delta) in deltas.iter().enumerate() {
        let truncation = truncations.get(d).copied().unwrap_or_else(|| cfg.truncation());
        for (j, s) in selected.iter().enumerate() {
            let errors: Vec<f64> = rows
                .iter()
                .skip(d * seeds.len() * selected.len())
                .take(seeds.len() * selected.len())
                .skip(j)
                .step_by(selected.len())
                .filter_map(|r| r.relative_l2_error)
                .collect();
            let successes = errors.len();
            means.push(SweepMean {
                delta,
                truncation,
                k: s.k,
                mean_error: (successes > 0).then(|| errors.iter().sum::<f64>() / successes as f64),
                successes,
                failures: seeds.len() - successes,
            });
        }
    }
    Ok(SweepTable { method: cfg.method, rows, means })
}

/// Test functions accepted by [`greens_identity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `e^{-i (xi1 x1 + xi2 x2)}` with `xi1^2 + xi2^2 = k^2`.
    PlaneWave { xi1: f64, xi2: Complex64 },
    /// `sin(n x1) e^{sqrt(n^2 - k^2) x2}`.
    DlMode { n: u32 },
}

const GREEN_FLOOR: f64 = 1e-12;
/// Fraction of the cancellation-free size below which the domain integral
/// is treated as zero when normalising the residual.
const GREEN_RELATIVE_FLOOR: f64 = 1e-3;

/// `|boundary pairing - int f g psi| / max(|int f g psi|, floor)` at
/// wavenumber position `j`. The domain integral is evaluated independently
/// by adaptive Gauss–Kronrod quadrature in each variable. The floor is
/// `1e-3 int |f psi_1| int |g psi_2|` (at least `1e-12`), so a pairing that
/// vanishes by symmetry is measured against the size of its integrand.
pub fn greens_identity_check(
    data: &NearFieldData,
    j: usize,
    source: &SourceSpec,
    g: &TransverseProfile,
    test: TestFunction,
) -> Result<f64> {
    let k = *data
        .grid
        .wavenumbers
        .get(j)
        .ok_or_else(|| Error::Config(format!("wavenumber index {j} out of range")))?;
    let (a, b) = (source.support, g.support());
    let (tol_abs, tol_rel) = (1e-15, 1e-13);
    // value of int f psi_1 * int g psi_2 and of int |f psi_1| * int |g psi_2|
    let separable = |fp: &dyn Fn(f64) -> Complex64, gp: &dyn Fn(f64) -> Complex64| {
        let fx = integrate_adaptive(fp, a.lo(), a.hi(), tol_abs, tol_rel);
        let gx = integrate_adaptive(gp, b.lo(), b.hi(), tol_abs, tol_rel);
        let fa = integrate_adaptive(|x| Complex64::new(fp(x).norm(), 0.0), a.lo(), a.hi(), tol_abs, tol_rel).re;
        let ga = integrate_adaptive(|y| Complex64::new(gp(y).norm(), 0.0), b.lo(), b.hi(), tol_abs, tol_rel).re;
        (fx * gx, fa * ga)
    };
    let (boundary, domain) = match test {
        TestFunction::PlaneWave { xi1, xi2 } => {
            let miss = (xi2 * xi2 + xi1 * xi1 - k * k).norm();
            if miss > 1e-10 * (xi1 * xi1 + k * k) {
                return Err(Error::Config(format!("plane wave ({xi1}, {xi2}) does not satisfy |xi| = k = {k}")));
            }
            let boundary = boundary_pairing_plane_wave(data, j, xi1, xi2)?;
            let f_part = |x: f64| Complex64::from_polar(source.eval(x, k), -xi1 * x);
            let g_part = |y: f64| (-Complex64::i() * xi2 * y).exp() * g.eval(y);
            (boundary, separable(&f_part, &g_part))
        }
        TestFunction::DlMode { n } => {
            let boundary = boundary_pairing_dl(data, n, j)?;
            let s = dl_exponent(n, k);
            let f_part = |x: f64| Complex64::new(source.eval(x, k) * (n as f64 * x).sin(), 0.0);
            let g_part = |y: f64| (s * y).exp() * g.eval(y);
            (boundary, separable(&f_part, &g_part))
        }
    };
    let (value, size) = domain;
    let floor = (GREEN_RELATIVE_FLOOR * size).max(GREEN_FLOOR);
    Ok((boundary - value).norm() / value.norm().max(floor))
}
