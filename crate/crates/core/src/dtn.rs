//! Dirichlet-to-Neumann map on the measurement circle.
//!
//! A radiating field outside the source has the expansion
//! `u(R, theta) = sum_n u_n H_n(k r) / H_n(k R) e^{i n theta}`, so the outward
//! normal derivative on the circle is
//! `sum_n u_n k H_n'(k R) / H_n(k R) e^{i n theta}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{MeasurementGrid, NearFieldData};
use crate::specfun::{hankel1_log_derivatives, MAX_ORDER};

/// Modes whose coefficient is below this fraction of the largest one are zeroed.
pub const MODE_FLOOR: f64 = 1e-14;

/// Fourier coefficients `u_n`, `n = -n_max..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFourierCoeffs {
    pub n_max: usize,
    pub coeffs: Vec<Complex64>,
}

impl BoundaryFourierCoeffs {
    pub fn get(&self, n: i64) -> Complex64 {
        self.coeffs[(n + self.n_max as i64) as usize]
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n_max = self.n_max as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - n_max, *c))
    }

    /// `sum_n u_n e^{i n theta}`.
    pub fn synthesize(&self, theta: f64) -> Complex64 {
        self.modes().map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * theta)).sum()
    }
}

/// Largest order that neither aliases on `angles` samples nor exceeds the
/// supported Bessel range.
pub fn default_order(angles: usize) -> usize {
    (angles / 2).saturating_sub(1).min(MAX_ORDER as usize - 1)
}

fn check_order(n_max: usize, angles: usize) -> Result<()> {
    if 2 * n_max + 2 > angles {
        return Err(Error::Aliasing { n_max, samples: angles });
    }
    if n_max + 1 > MAX_ORDER as usize {
        return Err(Error::Config(format!("DtN order {n_max} exceeds {}", MAX_ORDER - 1)));
    }
    Ok(())
}

/// Trapezoid-rule coefficients `u_n = (1/M) sum_m u(theta_m) e^{-i n theta_m}`
/// with `theta_m = 2 pi m / M`, `m = 1..=M`.
pub fn fourier_coefficients(trace: &[Complex64], n_max: usize) -> Result<BoundaryFourierCoeffs> {
    let m_len = trace.len();
    check_order(n_max, m_len)?;
    let step = 2.0 * std::f64::consts::PI / m_len as f64;
    let coeffs = (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            let sum: Complex64 = trace
                .iter()
                .enumerate()
                .map(|(i, u)| {
                    // reduce n*(m+1) mod M before scaling keeps the phase exact
                    let idx = (n * (i as i64 + 1)).rem_euclid(m_len as i64);
                    u * Complex64::from_polar(1.0, -step * idx as f64)
                })
                .sum();
            sum / m_len as f64
        })
        .collect();
    Ok(BoundaryFourierCoeffs { n_max, coeffs })
}

/// Neumann trace of one Dirichlet trace at wavenumber `k` on a circle of
/// radius `radius`. Returns the trace plus notes about dropped modes.
pub fn dtn_trace(
    trace: &[Complex64],
    k: f64,
    radius: f64,
    n_max: usize,
) -> Result<(Vec<Complex64>, Vec<String>)> {
    let coeffs = fourier_coefficients(trace, n_max)?;
    let ratios = hankel1_log_derivatives(n_max as u32, k * radius)?;
    let largest = coeffs.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut notes = Vec::new();
    let mut scaled = BoundaryFourierCoeffs { n_max, coeffs: Vec::with_capacity(coeffs.coeffs.len()) };
    for (n, c) in coeffs.modes() {
        let factor = ratios[n.unsigned_abs() as usize] * k;
        let v = if c.norm() < MODE_FLOOR * largest {
            Complex64::new(0.0, 0.0)
        } else if !factor.is_finite() {
            notes.push(format!("k={k}: dropped mode {n}, non-finite DtN factor"));
            Complex64::new(0.0, 0.0)
        } else {
            c * factor
        };
        scaled.coeffs.push(v);
    }
    let m_len = trace.len();
    let step = 2.0 * std::f64::consts::PI / m_len as f64;
    let du = (1..=m_len).map(|m| scaled.synthesize(step * m as f64)).collect();
    Ok((du, notes))
}

/// Fills in the Neumann traces of `data`. `n_max` defaults to
/// [`default_order`] of the angle count.
pub fn neumann_from_dirichlet(data: &NearFieldData, n_max: Option<usize>) -> Result<NearFieldData> {
    let grid: &MeasurementGrid = &data.grid;
    let order = n_max.unwrap_or_else(|| default_order(grid.angles));
    check_order(order, grid.angles)?;
    let mut notes = data.notes.clone();
    let mut neumann = Vec::with_capacity(data.dirichlet.len());
    for (trace, &k) in data.dirichlet.iter().zip(&grid.wavenumbers) {
        let (du, mut n) = dtn_trace(trace, k, grid.radius, order)?;
        notes.append(&mut n);
        neumann.push(du);
    }
    Ok(NearFieldData {
        grid: grid.clone(),
        dirichlet: data.dirichlet.clone(),
        neumann: Some(neumann),
        dtn_order: Some(order),
        notes,
    })
}
