//! Reconstruction with plane-wave test functions `e^{-i (xi1 x1 + xi2 x2)}`,
//! `xi1 = 2n`, `xi2 = sqrt(k^2 - 4 n^2)`.
//!
//! Green's identity gives `M_n = G_n int_0^pi f(x1) e^{-2 i n x1} dx1` with
//! `G_n = int g(x2) e^{-i xi2 x2} dx2`, so `f_n = M_n / (pi G_n)` and
//! `f ~ sum_{|n| <= N} f_n e^{2 i n x1}`. For `2|n| > k` the test function
//! grows like `e^{sqrt(4n^2 - k^2) x2}`, which limits usable truncations.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degeneracy::{DegeneracyPolicy, ModeDiagnostic};
use crate::error::{Error, Result};
use crate::forward::{NearFieldData, Point};
use crate::sources::{ft_xi2, g_mode_integral_ft, TransverseProfile};

pub const DEFAULT_FT_TRUNCATION: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtCoefficients {
    pub k: f64,
    pub truncation: usize,
    /// `f_n` for `n = -truncation..=truncation`; degenerate modes are zero.
    pub values: Vec<Complex64>,
    pub diagnostics: Vec<ModeDiagnostic>,
}

impl FtCoefficients {
    pub fn get(&self, n: i64) -> Complex64 {
        self.values[(n + self.truncation as i64) as usize]
    }

    pub fn degenerate_modes(&self) -> Vec<i64> {
        self.diagnostics.iter().filter(|d| d.degenerate.is_some()).map(|d| d.n).collect()
    }
}

/// `(2n, sqrt(k^2 - 4 n^2))` with the principal root.
pub fn ft_test_wavevector(n: i64, k: f64) -> (f64, Complex64) {
    (2.0 * n as f64, ft_xi2(n, k))
}

fn plane_wave(xi1: f64, xi2: Complex64, x: Point) -> Complex64 {
    (-Complex64::i() * (xi2 * x.x2 + xi1 * x.x1)).exp()
}

/// Trapezoid rule for `oint (du/dnu + i (xi . nu) u) e^{-i xi . x} ds` with
/// the lattice wavevector of mode `n`.
pub fn boundary_pairing_ft(data: &NearFieldData, n: i64, j: usize) -> Result<Complex64> {
    let (xi1, xi2) = ft_test_wavevector(n, data.grid.wavenumbers[j]);
    boundary_pairing_plane_wave(data, j, xi1, xi2)
}

/// Same pairing for an arbitrary wavevector `(xi1, xi2)`.
pub fn boundary_pairing_plane_wave(data: &NearFieldData, j: usize, xi1: f64, xi2: Complex64) -> Result<Complex64> {
    let grid = &data.grid;
    let du = data.neumann_trace(j)?;
    let u = &data.dirichlet[j];
    let sum: Complex64 = (0..grid.angles)
        .map(|m| {
            let (nx, ny) = grid.normal(m);
            let dot = xi2 * ny + xi1 * nx;
            (du[m] + Complex64::i() * dot * u[m]) * plane_wave(xi1, xi2, grid.point(m))
        })
        .sum();
    Ok(sum * grid.arc_weight())
}

fn test_magnitude_range(data: &NearFieldData, n: i64, k: f64) -> (f64, f64) {
    let (xi1, xi2) = ft_test_wavevector(n, k);
    (0..data.grid.angles)
        .map(|m| plane_wave(xi1, xi2, data.grid.point(m)).norm())
        .fold((f64::INFINITY, 0.0), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Fourier coefficients `f_{-N}..f_N` at wavenumber index `j`.
pub fn ft_coefficients(
    data: &NearFieldData,
    j: usize,
    truncation: usize,
    g: &TransverseProfile,
    policy: &DegeneracyPolicy,
) -> Result<FtCoefficients> {
    if j >= data.grid.wavenumbers.len() {
        return Err(Error::Config(format!("wavenumber index {j} out of range")));
    }
    data.neumann_trace(j)?;
    let k = data.grid.wavenumbers[j];
    let n_max = truncation as i64;
    let modes: Vec<(Complex64, ModeDiagnostic)> = (-n_max..=n_max)
        .into_par_iter()
        .map(|n| {
            let xi2 = ft_xi2(n, k);
            let big_g = g_mode_integral_ft(g, n, k);
            let scale = g.exponential_moment_scale(-Complex64::i() * xi2);
            let degenerate = policy.classify(big_g.norm(), scale, xi2.norm());
            let value = match degenerate {
                Some(_) => Complex64::new(0.0, 0.0),
                None => boundary_pairing_ft(data, n, j)? / (big_g * std::f64::consts::PI),
            };
            let diag = ModeDiagnostic {
                n,
                g_abs: big_g.norm(),
                g_scale: scale,
                degenerate,
                test_magnitude: test_magnitude_range(data, n, k),
            };
            Ok((value, diag))
        })
        .collect::<Result<_>>()?;
    let (values, diagnostics): (Vec<_>, Vec<_>) = modes.into_iter().unzip();
    let coeffs = FtCoefficients { k, truncation, values, diagnostics };
    if coeffs.diagnostics.iter().all(|d| d.degenerate.is_some()) {
        return Err(Error::Degenerate { k, modes: coeffs.degenerate_modes() });
    }
    Ok(coeffs)
}

/// `sum_{|n| <= N} f_n e^{2 i n x1}` on the given points.
pub fn ft_reconstruct(coeffs: &FtCoefficients, x1: &[f64]) -> Vec<Complex64> {
    let n_max = coeffs.truncation as i64;
    x1.iter()
        .map(|&x| {
            (-n_max..=n_max)
                .zip(&coeffs.values)
                .map(|(n, c)| c * Complex64::from_polar(1.0, 2.0 * n as f64 * x))
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneracy::DegeneracyReason;
    use crate::forward::MeasurementGrid;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn wavevector_examples() {
        assert_eq!(ft_test_wavevector(0, 3.0), (0.0, Complex64::new(3.0, 0.0)));
        assert_eq!(ft_test_wavevector(1, 2.0), (2.0, Complex64::new(0.0, 0.0)));
        let (xi1, xi2) = ft_test_wavevector(2, 2.0);
        assert_eq!(xi1, 4.0);
        assert!((xi2 - Complex64::new(0.0, 12f64.sqrt())).norm() < 1e-15);
        assert_eq!(ft_test_wavevector(-2, 2.0).1, xi2);
    }

    proptest! {
        #[test]
        fn wavevector_lies_on_the_circle(n in -30i64..30, k in 0.01f64..20.0) {
            let (xi1, xi2) = ft_test_wavevector(n, k);
            let lhs = xi2 * xi2 + xi1 * xi1;
            prop_assert!((lhs - k * k).norm() <= 1e-12 * (xi1 * xi1 + k * k));
            prop_assert!(xi2.re >= 0.0 && xi2.im >= 0.0);
        }

        #[test]
        fn reconstruct_then_reproject(values in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10)) {
            let truncation = (values.len() - 1) / 2;
            let values: Vec<Complex64> =
                values.iter().take(2 * truncation + 1).map(|&(a, b)| Complex64::new(a, b)).collect();
            let coeffs = FtCoefficients { k: 1.0, truncation, values, diagnostics: Vec::new() };
            let cells = 128;
            let x: Vec<f64> = (0..cells).map(|i| i as f64 * PI / cells as f64).collect();
            let f = ft_reconstruct(&coeffs, &x);
            for n in -(truncation as i64)..=truncation as i64 {
                let proj: Complex64 = x
                    .iter()
                    .zip(&f)
                    .map(|(x, v)| v * Complex64::from_polar(1.0, -2.0 * n as f64 * x))
                    .sum::<Complex64>()
                    / cells as f64;
                prop_assert!((proj - coeffs.get(n)).norm() < 1e-10);
            }
        }
    }

    fn zero_data(ks: Vec<f64>) -> NearFieldData {
        let grid = MeasurementGrid::standard(ks).unwrap();
        let z = vec![vec![Complex64::new(0.0, 0.0); grid.angles]; grid.wavenumbers.len()];
        NearFieldData { grid, dirichlet: z.clone(), neumann: Some(z), dtn_order: Some(49), notes: vec![] }
    }

    #[test]
    fn zero_data_gives_zero() {
        let d = zero_data(vec![0.5]);
        assert_eq!(boundary_pairing_ft(&d, -2, 0).unwrap(), Complex64::new(0.0, 0.0));
        let c = ft_coefficients(&d, 0, 12, &TransverseProfile::default(), &DegeneracyPolicy::default()).unwrap();
        assert_eq!(c.values.len(), 25);
        assert!(ft_reconstruct(&c, &[0.0, 1.0, 3.0]).iter().all(|v| v.norm() == 0.0));
        let bare = NearFieldData { neumann: None, ..d };
        assert!(matches!(boundary_pairing_ft(&bare, 0, 0), Err(Error::MissingNeumann)));
    }

    #[test]
    fn degenerate_circle_and_genuine_zeros() {
        let g = TransverseProfile::default();
        // k = 2: xi2 = 0 for n = +-1, where G = pi/2 is regular
        let d = zero_data(vec![2.0, 20f64.sqrt()]);
        let c = ft_coefficients(&d, 0, 3, &g, &DegeneracyPolicy::default()).unwrap();
        assert!(c.degenerate_modes().is_empty());
        let c = ft_coefficients(&d, 0, 3, &g, &DegeneracyPolicy::paper_faithful()).unwrap();
        assert_eq!(c.degenerate_modes(), vec![-1, 1]);
        assert_eq!(c.diagnostics[2].degenerate, Some(DegeneracyReason::BranchPoint));
        // k = sqrt(20): xi2 = 4 at n = +-1 gives G = sin(pi)/2 = 0
        let c = ft_coefficients(&d, 1, 2, &g, &DegeneracyPolicy::default()).unwrap();
        assert_eq!(c.degenerate_modes(), vec![-1, 1]);
        let e = ft_coefficients(&d, 1, 0, &g, &DegeneracyPolicy::paper_faithful());
        assert!(e.is_ok());
    }

    #[test]
    fn evanescent_magnitudes_are_reported() {
        let d = zero_data(vec![0.5]);
        let c = ft_coefficients(&d, 0, 4, &TransverseProfile::default(), &DegeneracyPolicy::default()).unwrap();
        let top = &c.diagnostics[8];
        assert_eq!(top.n, 4);
        let kappa = (64.0f64 - 0.25).sqrt();
        assert!((top.test_magnitude.1 / (kappa * d.grid.radius).exp() - 1.0).abs() < 1e-12);
        let zero = &c.diagnostics[4];
        assert!((zero.test_magnitude.0 - 1.0).abs() < 1e-12 && (zero.test_magnitude.1 - 1.0).abs() < 1e-12);
    }
}
