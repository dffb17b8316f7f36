//! Multiplicative measurement noise `u + delta * zeta * |u|`.
//!
//! `zeta` is uniform on `[-1, 1]` and independent per (angle, wavenumber).
//! Draws come from a ChaCha20 stream selected by the wavenumber index and
//! positioned by the angle index, so each sample depends only on
//! `(seed, m, j)` and not on evaluation order.

use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::dtn::neumann_from_dirichlet;
use crate::error::{Error, Result};
use crate::forward::NearFieldData;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub delta: f64,
    pub seed: u64,
    /// Perturb with `(zeta_re + i zeta_im) / sqrt(2)` instead of a real `zeta`.
    #[serde(default)]
    pub complex: bool,
}

impl NoiseConfig {
    pub fn new(delta: f64, seed: u64) -> Self {
        NoiseConfig { delta, seed, complex: false }
    }

    /// Noise-free configuration.
    pub fn none() -> Self {
        Self::new(0.0, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::Config(format!("noise level must be non-negative, got {}", self.delta)));
        }
        Ok(())
    }
}

fn unit_symmetric(word: u64) -> f64 {
    2.0 * (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64) - 1.0
}

/// The `(zeta_re, zeta_im)` pair for angle index `m` at wavenumber index `j`.
pub fn noise_sample(seed: u64, m: usize, j: usize) -> (f64, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(j as u64);
    rng.set_word_pos(4 * m as u128);
    let re = unit_symmetric(rng.next_u64());
    let im = unit_symmetric(rng.next_u64());
    (re, im)
}

/// Perturbs the Dirichlet traces. Neumann traces present in `data` are
/// recomputed from the noisy Dirichlet data with the same DtN order.
pub fn add_noise(data: &NearFieldData, noise: &NoiseConfig) -> Result<NearFieldData> {
    noise.validate()?;
    if noise.delta == 0.0 {
        return Ok(data.clone());
    }
    let dirichlet = data
        .dirichlet
        .iter()
        .enumerate()
        .map(|(j, trace)| {
            trace
                .iter()
                .enumerate()
                .map(|(m, u)| {
                    let (re, im) = noise_sample(noise.seed, m, j);
                    let zeta = if noise.complex {
                        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                    } else {
                        Complex64::new(re, 0.0)
                    };
                    u + zeta * (noise.delta * u.norm())
                })
                .collect()
        })
        .collect();
    let noisy = NearFieldData { dirichlet, neumann: None, dtn_order: None, ..data.clone() };
    match data.neumann {
        Some(_) => neumann_from_dirichlet(&noisy, data.dtn_order),
        None => Ok(noisy),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::MeasurementGrid;
    use proptest::prelude::*;

    fn data() -> NearFieldData {
        let grid = MeasurementGrid::standard(vec![0.5, 1.0, 1.5]).unwrap();
        let dirichlet = (0..3)
            .map(|j| {
                (0..grid.angles)
                    .map(|m| Complex64::new(1.0 + 0.01 * m as f64, -0.5 * j as f64))
                    .collect()
            })
            .collect();
        NearFieldData::from_dirichlet(grid, dirichlet).unwrap()
    }

    #[test]
    fn zero_delta_is_identity() {
        let d = crate::dtn::neumann_from_dirichlet(&data(), None).unwrap();
        assert_eq!(add_noise(&d, &NoiseConfig::new(0.0, 7)).unwrap(), d);
    }

    #[test]
    fn samples_are_uniform_on_symmetric_interval() {
        let draws: Vec<f64> = (0..10_000).map(|m| noise_sample(3, m, 1).0).collect();
        assert!(draws.iter().all(|z| (-1.0..1.0).contains(z)));
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 3.0 / (3.0f64 * 1e4).sqrt(), "mean {mean}");
        assert!((var - 1.0 / 3.0).abs() < 0.02, "var {var}");
        assert_ne!(noise_sample(3, 0, 0), noise_sample(3, 0, 1));
        assert_ne!(noise_sample(3, 0, 0), noise_sample(4, 0, 0));
        assert_eq!(unit_symmetric(0), -1.0);
    }

    #[test]
    fn neumann_is_recomputed() {
        let d = crate::dtn::neumann_from_dirichlet(&data(), Some(20)).unwrap();
        let noisy = add_noise(&d, &NoiseConfig::new(0.05, 1)).unwrap();
        assert_eq!(noisy.dtn_order, Some(20));
        let expect = crate::dtn::neumann_from_dirichlet(
            &NearFieldData::from_dirichlet(noisy.grid.clone(), noisy.dirichlet.clone()).unwrap(),
            Some(20),
        )
        .unwrap();
        assert_eq!(noisy.neumann, expect.neumann);
        assert!(add_noise(&d, &NoiseConfig::new(-0.1, 1)).is_err());
    }

    proptest! {
        #[test]
        fn perturbation_is_bounded_and_reproducible(delta in 0.0f64..0.5, seed in any::<u64>(), complex in any::<bool>()) {
            let d = data();
            let cfg = NoiseConfig { delta, seed, complex };
            let a = add_noise(&d, &cfg).unwrap();
            let b = add_noise(&d, &cfg).unwrap();
            prop_assert_eq!(&a, &b);
            for (u, v) in d.dirichlet.iter().flatten().zip(a.dirichlet.iter().flatten()) {
                prop_assert!((v - u).norm() <= delta * u.norm() * (1.0 + 1e-12));
            }
        }
    }
}
