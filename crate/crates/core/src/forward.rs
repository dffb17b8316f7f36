//! Synthetic near-field data: the radiated field of `f(x1, k) g(x2)` sampled
//! on a measurement circle.
//!
//! The data solve `Delta u + k^2 u = f g` with the radiation condition, i.e.
//! `u = -int Phi(x - y; k) f(y1, k) g(y2) dy` where
//! `Phi(z; k) = (i/4) H_0^{(1)}(k|z|)` is the outgoing fundamental solution
//! of `-(Delta + k^2)`. The volume integral runs over the support rectangle
//! only, with a tensor Gauss–Legendre rule.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_on;
use crate::sources::{SourceSpec, TransverseProfile};
use crate::specfun::{hankel1, hankel1_zero, hankel1_zero_one, MAX_ARG};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
}

impl Point {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Point { x1, x2 }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

/// Circle of measurement points plus the wavenumbers at which data are taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementGrid {
    pub center: Point,
    pub radius: f64,
    /// Number of equispaced angles `theta_m = 2 pi m / M`, `m = 1..=M`.
    pub angles: usize,
    pub wavenumbers: Vec<f64>,
}

pub const DEFAULT_CENTER: Point = Point::new(FRAC_PI_2, 0.0);
pub const DEFAULT_RADIUS: f64 = FRAC_PI_2;
pub const DEFAULT_ANGLES: usize = 100;

impl MeasurementGrid {
    pub fn new(center: Point, radius: f64, angles: usize, wavenumbers: Vec<f64>) -> Result<Self> {
        if !(center.x1.is_finite() && center.x2.is_finite()) {
            return Err(Error::Config("measurement center must be finite".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config(format!("radius must be positive, got {radius}")));
        }
        if angles < 4 {
            return Err(Error::Config(format!("need at least 4 measurement angles, got {angles}")));
        }
        if wavenumbers.is_empty() {
            return Err(Error::Config("at least one wavenumber is required".into()));
        }
        if let Some(k) = wavenumbers.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(Error::Config(format!("wavenumbers must be positive, got {k}")));
        }
        Ok(MeasurementGrid { center, radius, angles, wavenumbers })
    }

    /// Default circle with the given wavenumbers.
    pub fn standard(wavenumbers: Vec<f64>) -> Result<Self> {
        Self::new(DEFAULT_CENTER, DEFAULT_RADIUS, DEFAULT_ANGLES, wavenumbers)
    }

    /// `k_j = j K / J` for `j = 1..=J`.
    pub fn uniform_wavenumbers(k_max: f64, count: usize) -> Vec<f64> {
        (1..=count).map(|j| j as f64 * k_max / count as f64).collect()
    }

    pub fn theta(&self, m: usize) -> f64 {
        2.0 * PI * (m + 1) as f64 / self.angles as f64
    }

    /// Boundary point for the zero-based angle index `m`.
    pub fn point(&self, m: usize) -> Point {
        let t = self.theta(m);
        Point::new(self.center.x1 + self.radius * t.cos(), self.center.x2 + self.radius * t.sin())
    }

    /// Outward unit normal at angle index `m`.
    pub fn normal(&self, m: usize) -> (f64, f64) {
        let t = self.theta(m);
        (t.cos(), t.sin())
    }

    /// Arc-length weight of the trapezoid rule on the circle.
    pub fn arc_weight(&self) -> f64 {
        2.0 * PI * self.radius / self.angles as f64
    }

    /// Distance from the support rectangle to the circle; errors unless the
    /// rectangle lies strictly inside the disc.
    pub fn clearance(&self, source: &SourceSpec, g: &TransverseProfile) -> Result<f64> {
        let (a, b) = (source.support, g.support());
        let far = [(a.lo(), b.lo()), (a.lo(), b.hi()), (a.hi(), b.lo()), (a.hi(), b.hi())]
            .iter()
            .map(|&(x1, x2)| self.center.distance(&Point::new(x1, x2)))
            .fold(0.0, f64::max);
        let clearance = self.radius - far;
        if clearance <= 0.0 {
            return Err(Error::Geometry(format!(
                "support rectangle reaches distance {far:.6} from the center, not inside radius {:.6}",
                self.radius
            )));
        }
        Ok(clearance)
    }
}

/// Tensor Gauss–Legendre node counts over the support rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub panels_x1: usize,
    pub panels_x2: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { panels_x1: 192, panels_x2: 96 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.panels_x1 < 8 || self.panels_x2 < 8 {
            return Err(Error::Config(format!(
                "quadrature needs at least 8 nodes per dimension, got {} x {}",
                self.panels_x1, self.panels_x2
            )));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        QuadratureConfig { panels_x1: 2 * self.panels_x1, panels_x2: 2 * self.panels_x2 }
    }
}

/// Boundary traces, stored per wavenumber: `dirichlet[j][m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearFieldData {
    pub grid: MeasurementGrid,
    pub dirichlet: Vec<Vec<Complex64>>,
    pub neumann: Option<Vec<Vec<Complex64>>>,
    /// Truncation order used when the Neumann traces were derived.
    pub dtn_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl NearFieldData {
    pub fn from_dirichlet(grid: MeasurementGrid, dirichlet: Vec<Vec<Complex64>>) -> Result<Self> {
        let data = NearFieldData { grid, dirichlet, neumann: None, dtn_order: None, notes: Vec::new() };
        data.check_shape()?;
        Ok(data)
    }

    pub fn check_shape(&self) -> Result<()> {
        let ok = |traces: &Vec<Vec<Complex64>>| {
            traces.len() == self.grid.wavenumbers.len()
                && traces.iter().all(|t| t.len() == self.grid.angles && t.iter().all(|v| v.is_finite()))
        };
        if !ok(&self.dirichlet) || !self.neumann.as_ref().is_none_or(ok) {
            return Err(Error::Config(format!(
                "near-field data must be {} x {} finite values",
                self.grid.wavenumbers.len(),
                self.grid.angles
            )));
        }
        Ok(())
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        self.grid.wavenumbers[j]
    }

    pub fn neumann_trace(&self, j: usize) -> Result<&[Complex64]> {
        self.neumann.as_ref().map(|n| n[j].as_slice()).ok_or(Error::MissingNeumann)
    }

    /// Entrywise linear combination `a * self + b * other` of the Dirichlet traces.
    pub fn combine(&self, a: Complex64, other: &NearFieldData, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Config("cannot combine data on different grids".into()));
        }
        let dirichlet = self
            .dirichlet
            .iter()
            .zip(&other.dirichlet)
            .map(|(u, v)| u.iter().zip(v).map(|(p, q)| a * p + b * q).collect())
            .collect();
        NearFieldData::from_dirichlet(self.grid.clone(), dirichlet)
    }
}

/// `(i/4) H_0^{(1)}(k |x - y|)`.
pub fn fundamental_solution(x: Point, y: Point, k: f64) -> Result<Complex64> {
    let r = x.distance(&y);
    if r == 0.0 {
        return Err(Error::Singular);
    }
    Ok(Complex64::new(0.0, 0.25) * hankel1(0, k * r)?)
}

struct VolumeRule {
    nodes: Vec<Point>,
    /// `w_q * g(y_q2)` with zero-weight nodes removed.
    weights: Vec<f64>,
}

impl VolumeRule {
    fn new(source: &SourceSpec, g: &TransverseProfile, quad: &QuadratureConfig) -> Self {
        let (a, b) = (source.support, g.support());
        let (x1, w1) = gauss_legendre_on(quad.panels_x1, a.lo(), a.hi());
        let (x2, w2) = gauss_legendre_on(quad.panels_x2, b.lo(), b.hi());
        let g_vals: Vec<f64> = x2.iter().map(|&t| g.eval(t)).collect();
        let mut nodes = Vec::with_capacity(x1.len() * x2.len());
        let mut weights = Vec::with_capacity(x1.len() * x2.len());
        for (p, wp) in x1.iter().zip(&w1) {
            for ((q, wq), gq) in x2.iter().zip(&w2).zip(&g_vals) {
                if *gq != 0.0 {
                    nodes.push(Point::new(*p, *q));
                    weights.push(wp * wq * gq);
                }
            }
        }
        VolumeRule { nodes, weights }
    }
}

/// Dirichlet traces `u(x_m; k_j)` of the radiated field; Neumann left unset.
pub fn dirichlet_data(
    source: &SourceSpec,
    g: &TransverseProfile,
    grid: &MeasurementGrid,
    quad: &QuadratureConfig,
) -> Result<NearFieldData> {
    source.validate()?;
    g.validate()?;
    quad.validate()?;
    grid.clearance(source, g)?;
    let far = grid.radius + grid.center.distance(&Point::new(source.support.midpoint(), g.support().midpoint()));
    if let Some(k) = grid.wavenumbers.iter().find(|k| **k * 2.0 * far > MAX_ARG) {
        return Err(Error::Config(format!("wavenumber {k} exceeds the supported kernel range")));
    }
    let rule = VolumeRule::new(source, g, quad);
    let boundary: Vec<Point> = (0..grid.angles).map(|m| grid.point(m)).collect();
    let minus_i_quarter = Complex64::new(0.0, -0.25);

    let dirichlet = grid
        .wavenumbers
        .iter()
        .map(|&k| {
            let density: Vec<f64> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(y, w)| w * source.eval(y.x1, k))
                .collect();
            boundary
                .par_iter()
                .map(|x| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (y, c) in rule.nodes.iter().zip(&density) {
                        if *c != 0.0 {
                            acc += hankel1_zero(k * x.distance(y)) * *c;
                        }
                    }
                    acc * minus_i_quarter
                })
                .collect()
        })
        .collect();
    NearFieldData::from_dirichlet(grid.clone(), dirichlet)
}

/// Normal derivative of the radiated field on the circle, computed from the
/// analytic kernel gradient `d/dnu_x Phi = -(i k/4) H_1(k r) (x - y).nu / r`
/// rather than through the DtN map.
pub fn neumann_data_direct(
    source: &SourceSpec,
    g: &TransverseProfile,
    grid: &MeasurementGrid,
    quad: &QuadratureConfig,
) -> Result<Vec<Vec<Complex64>>> {
    source.validate()?;
    g.validate()?;
    quad.validate()?;
    grid.clearance(source, g)?;
    let rule = VolumeRule::new(source, g, quad);
    let boundary: Vec<(Point, (f64, f64))> = (0..grid.angles).map(|m| (grid.point(m), grid.normal(m))).collect();
    Ok(grid
        .wavenumbers
        .iter()
        .map(|&k| {
            let density: Vec<f64> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(y, w)| w * source.eval(y.x1, k))
                .collect();
            boundary
                .par_iter()
                .map(|(x, (nx, ny))| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (y, c) in rule.nodes.iter().zip(&density) {
                        if *c != 0.0 {
                            let r = x.distance(y);
                            let cos = ((x.x1 - y.x1) * nx + (x.x2 - y.x2) * ny) / r;
                            acc += hankel1_zero_one(k * r).1 * (*c * cos);
                        }
                    }
                    // u = -sum c Phi, so du = -(-(i k / 4)) sum c H_1 cos
                    acc * Complex64::new(0.0, 0.25 * k)
                })
                .collect()
        })
        .collect())
}

/// [`dirichlet_data`] plus a convergence check against twice the node count
/// in each dimension; fails when any entry moves by more than `tolerance`
/// relative to the largest trace magnitude at that wavenumber.
pub fn dirichlet_data_checked(
    source: &SourceSpec,
    g: &TransverseProfile,
    grid: &MeasurementGrid,
    quad: &QuadratureConfig,
    tolerance: f64,
) -> Result<(NearFieldData, f64)> {
    let coarse = dirichlet_data(source, g, grid, quad)?;
    let fine = dirichlet_data(source, g, grid, &quad.doubled())?;
    let change = max_relative_change(&coarse.dirichlet, &fine.dirichlet);
    if change > tolerance {
        return Err(Error::QuadratureNotConverged { change, tolerance });
    }
    Ok((coarse, change))
}

pub(crate) fn max_relative_change(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| {
            let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let diff = u.iter().zip(v).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            if scale == 0.0 {
                diff
            } else {
                diff / scale
            }
        })
        .fold(0.0, f64::max)
}
