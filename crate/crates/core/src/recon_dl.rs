//! Reconstruction with Dirichlet-Laplacian test functions
//! `phi_n(x) = sin(n x1) e^{s x2}`, `s = sqrt(n^2 - k^2)`.
//!
//! Green's second identity over the measurement disc gives
//! `M_n = G_n int_0^pi f(x1) sin(n x1) dx1` with `M_n` the boundary pairing
//! and `G_n = int g(x2) e^{s x2} dx2`, so `f_n = M_n / (pi G_n)` and
//! `f ~ 2 sum_n f_n sin(n x1)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degeneracy::{DegeneracyPolicy, ModeDiagnostic};
use crate::error::{Error, Result};
use crate::forward::{NearFieldData, Point};
use crate::sources::{dl_exponent, g_mode_integral_dl, TransverseProfile};

pub const DEFAULT_DL_TRUNCATION: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlCoefficients {
    pub k: f64,
    pub truncation: usize,
    /// `f_n` for `n = 1..=truncation`; degenerate modes are zero.
    pub values: Vec<Complex64>,
    pub diagnostics: Vec<ModeDiagnostic>,
}

impl DlCoefficients {
    pub fn degenerate_modes(&self) -> Vec<i64> {
        self.diagnostics.iter().filter(|d| d.degenerate.is_some()).map(|d| d.n).collect()
    }
}

/// Value and gradient of `sin(n x1) e^{s x2}`.
pub fn dl_test_function(n: u32, k: f64, x: Point) -> (Complex64, [Complex64; 2]) {
    let s = dl_exponent(n, k);
    let nf = n as f64;
    let e = (s * x.x2).exp();
    let (sin, cos) = (nf * x.x1).sin_cos();
    (e * sin, [e * (nf * cos), s * e * sin])
}

/// Trapezoid rule for `oint (du/dnu phi_n - u dphi_n/dnu) ds` on the circle.
pub fn boundary_pairing_dl(data: &NearFieldData, n: u32, j: usize) -> Result<Complex64> {
    let grid = &data.grid;
    let du = data.neumann_trace(j)?;
    let u = &data.dirichlet[j];
    let k = grid.wavenumbers[j];
    let sum: Complex64 = (0..grid.angles)
        .map(|m| {
            let (phi, grad) = dl_test_function(n, k, grid.point(m));
            let (nx, ny) = grid.normal(m);
            du[m] * phi - u[m] * (grad[0] * nx + grad[1] * ny)
        })
        .sum();
    Ok(sum * grid.arc_weight())
}

fn test_magnitude_range(data: &NearFieldData, n: u32, k: f64) -> (f64, f64) {
    (0..data.grid.angles)
        .map(|m| dl_test_function(n, k, data.grid.point(m)).0.norm())
        .fold((f64::INFINITY, 0.0), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Sine coefficients `f_1..f_N` at wavenumber index `j`.
pub fn dl_coefficients(
    data: &NearFieldData,
    j: usize,
    truncation: usize,
    g: &TransverseProfile,
    policy: &DegeneracyPolicy,
) -> Result<DlCoefficients> {
    if truncation == 0 {
        return Err(Error::Config("DL truncation must be at least 1".into()));
    }
    if j >= data.grid.wavenumbers.len() {
        return Err(Error::Config(format!("wavenumber index {j} out of range")));
    }
    data.neumann_trace(j)?;
    let k = data.grid.wavenumbers[j];
    let modes: Vec<(Complex64, ModeDiagnostic)> = (1..=truncation as u32)
        .into_par_iter()
        .map(|n| {
            let s = dl_exponent(n, k);
            let big_g = g_mode_integral_dl(g, n, k);
            let scale = g.exponential_moment_scale(s);
            let degenerate = policy.classify(big_g.norm(), scale, s.norm());
            let value = match degenerate {
                Some(_) => Complex64::new(0.0, 0.0),
                None => boundary_pairing_dl(data, n, j)? / (big_g * std::f64::consts::PI),
            };
            let diag = ModeDiagnostic {
                n: n as i64,
                g_abs: big_g.norm(),
                g_scale: scale,
                degenerate,
                test_magnitude: test_magnitude_range(data, n, k),
            };
            Ok((value, diag))
        })
        .collect::<Result<_>>()?;
    let (values, diagnostics): (Vec<_>, Vec<_>) = modes.into_iter().unzip();
    let coeffs = DlCoefficients { k, truncation, values, diagnostics };
    if coeffs.diagnostics.iter().all(|d| d.degenerate.is_some()) {
        return Err(Error::Degenerate { k, modes: coeffs.degenerate_modes() });
    }
    Ok(coeffs)
}

/// `2 sum_n f_n sin(n x1)` on the given points.
pub fn dl_reconstruct(coeffs: &DlCoefficients, x1: &[f64]) -> Vec<Complex64> {
    x1.iter()
        .map(|&x| {
            coeffs
                .values
                .iter()
                .enumerate()
                .map(|(i, c)| c * (2.0 * ((i + 1) as f64 * x).sin()))
                .sum()
        })
        .collect()
}
