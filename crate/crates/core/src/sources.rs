//! Source catalog `f(x1, k)` and transverse profile `g(x2)`, together with
//! the transverse mode integrals used by both reconstruction methods.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

/// Below this `|s|` (resp. `|xi_2|`) the mode integral is taken from its Taylor series.
pub const BRANCH_SERIES_THRESHOLD: f64 = 1e-4;
const CUSTOM_G_ABS_TOL: f64 = 1e-12;

/// Closed interval `[lo, hi]`, serialised as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval(pub f64, pub f64);

impl Interval {
    pub fn lo(&self) -> f64 {
        self.0
    }
    pub fn hi(&self) -> f64 {
        self.1
    }
    pub fn contains(&self, x: f64) -> bool {
        x >= self.0 && x <= self.1
    }
    pub fn length(&self) -> f64 {
        self.1 - self.0
    }
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.0 + self.1)
    }
}

pub fn default_source_support() -> Interval {
    Interval(FRAC_PI_4, 3.0 * FRAC_PI_4)
}

pub fn default_transverse_support() -> Interval {
    Interval(-FRAC_PI_4, FRAC_PI_4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileId {
    F1,
    F2,
    F3,
    F4,
    F5,
    Custom,
}

impl FromStr for ProfileId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(ProfileId::F1),
            "f2" => Ok(ProfileId::F2),
            "f3" => Ok(ProfileId::F3),
            "f4" => Ok(ProfileId::F4),
            "f5" => Ok(ProfileId::F5),
            "custom" => Ok(ProfileId::Custom),
            other => Err(Error::Config(format!("unknown source profile '{other}'"))),
        }
    }
}

impl fmt::Display for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProfileId::F1 => "f1",
            ProfileId::F2 => "f2",
            ProfileId::F3 => "f3",
            ProfileId::F4 => "f4",
            ProfileId::F5 => "f5",
            ProfileId::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// One additive piece of a source profile. `k_scaled` terms use `rate * k`
/// in place of `rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    /// `amplitude * exp(-rate * k * (x - center)^2)`
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        rate: f64,
        #[serde(default = "half_pi")]
        center: f64,
    },
    /// `amplitude * cos(rate * [k] * x)`
    Cos {
        #[serde(default = "one")]
        amplitude: f64,
        rate: f64,
        #[serde(default = "yes")]
        k_scaled: bool,
    },
    /// `amplitude * sin(rate * [k] * x)`
    Sin {
        #[serde(default = "one")]
        amplitude: f64,
        rate: f64,
        #[serde(default = "yes")]
        k_scaled: bool,
    },
    Constant { amplitude: f64 },
}

fn one() -> f64 {
    1.0
}
fn half_pi() -> f64 {
    FRAC_PI_2
}
fn yes() -> bool {
    true
}

impl Term {
    fn eval(&self, x: f64, k: f64) -> f64 {
        let scale = |rate: f64, k_scaled: bool| if k_scaled { rate * k } else { rate };
        match *self {
            Term::Gaussian { amplitude, rate, center } => {
                amplitude * (-rate * k * (x - center).powi(2)).exp()
            }
            Term::Cos { amplitude, rate, k_scaled } => amplitude * (scale(rate, k_scaled) * x).cos(),
            Term::Sin { amplitude, rate, k_scaled } => amplitude * (scale(rate, k_scaled) * x).sin(),
            Term::Constant { amplitude } => amplitude,
        }
    }
}

/// Catalog entry for the `x1` factor of the source.
///
/// Catalog parameters (defaults in brackets):
/// `f1 = exp(-a k (x-pi/2)^2)` [a=20], `f2 = cos(b k x)` [b=4],
/// `f3 = sin(c k x)` [c=8], `f4 = f1 + f3` with parameters `[a, c]` [20, 8],
/// `f5 = cos(d k x)` [d=2/3]. `custom` sums an explicit term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub profile: ProfileId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<Term>,
    #[serde(default = "default_source_support")]
    pub support: Interval,
}

impl SourceSpec {
    pub fn catalog(profile: ProfileId) -> Self {
        SourceSpec {
            profile,
            parameters: Vec::new(),
            terms: Vec::new(),
            support: default_source_support(),
        }
    }

    pub fn with_parameters(mut self, parameters: &[f64]) -> Self {
        self.parameters = parameters.to_vec();
        self
    }

    pub fn custom(terms: Vec<Term>, support: Interval) -> Self {
        SourceSpec {
            profile: ProfileId::Custom,
            parameters: Vec::new(),
            terms,
            support,
        }
    }

    pub fn with_support(mut self, support: Interval) -> Self {
        self.support = support;
        self
    }

    fn param(&self, i: usize, default: f64) -> f64 {
        self.parameters.get(i).copied().unwrap_or(default)
    }

    /// Expands the profile into its term list.
    pub fn terms(&self) -> Vec<Term> {
        let gaussian = |rate| Term::Gaussian { amplitude: 1.0, rate, center: FRAC_PI_2 };
        let cos = |rate| Term::Cos { amplitude: 1.0, rate, k_scaled: true };
        let sin = |rate| Term::Sin { amplitude: 1.0, rate, k_scaled: true };
        match self.profile {
            ProfileId::F1 => vec![gaussian(self.param(0, 20.0))],
            ProfileId::F2 => vec![cos(self.param(0, 4.0))],
            ProfileId::F3 => vec![sin(self.param(0, 8.0))],
            ProfileId::F4 => vec![gaussian(self.param(0, 20.0)), sin(self.param(1, 8.0))],
            ProfileId::F5 => vec![cos(self.param(0, 2.0 / 3.0))],
            ProfileId::Custom => self.terms.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Interval(lo, hi) = self.support;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= PI) {
            return Err(Error::Config(format!(
                "source support [{lo}, {hi}] must satisfy 0 <= lo < hi <= pi"
            )));
        }
        if self.profile == ProfileId::Custom && self.terms.is_empty() {
            return Err(Error::Config("custom source needs at least one term".into()));
        }
        if self.profile != ProfileId::Custom && !self.terms.is_empty() {
            return Err(Error::Config(format!("terms are only allowed for custom sources, not {}", self.profile)));
        }
        let expected = match self.profile {
            ProfileId::F4 => 2,
            ProfileId::Custom => 0,
            _ => 1,
        };
        if self.parameters.len() > expected {
            return Err(Error::Config(format!(
                "profile {} takes at most {expected} parameter(s), got {}",
                self.profile,
                self.parameters.len()
            )));
        }
        if self.parameters.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config("source parameters must be finite".into()));
        }
        Ok(())
    }

    /// `f(x1, k)`; exactly zero outside the support.
    pub fn eval(&self, x1: f64, k: f64) -> f64 {
        if !self.support.contains(x1) {
            return 0.0;
        }
        self.terms().iter().map(|t| t.eval(x1, k)).sum()
    }

    /// Evaluates on a grid, expanding the term list once.
    pub fn eval_many(&self, x1: &[f64], k: f64) -> Vec<f64> {
        let terms = self.terms();
        x1.iter()
            .map(|&x| {
                if self.support.contains(x) {
                    terms.iter().map(|t| t.eval(x, k)).sum()
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Convenience form of [`SourceSpec::eval`].
pub fn eval_f(spec: &SourceSpec, x1: f64, k: f64) -> f64 {
    spec.eval(x1, k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TransverseProfile {
    /// `g = 1` on the closed support, 0 elsewhere.
    Indicator {
        #[serde(default = "default_transverse_support")]
        support: Interval,
    },
    /// Piecewise-linear interpolation of equispaced samples spanning the support.
    CustomSamples { support: Interval, values: Vec<f64> },
}

impl Default for TransverseProfile {
    fn default() -> Self {
        TransverseProfile::Indicator { support: default_transverse_support() }
    }
}

impl TransverseProfile {
    pub fn support(&self) -> Interval {
        match self {
            TransverseProfile::Indicator { support } | TransverseProfile::CustomSamples { support, .. } => {
                *support
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Interval(lo, hi) = self.support();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("transverse support [{lo}, {hi}] is empty")));
        }
        if let TransverseProfile::CustomSamples { values, .. } = self {
            if values.len() < 2 {
                return Err(Error::Config("custom g needs at least two samples".into()));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("custom g samples must be finite".into()));
            }
            if values.iter().all(|v| *v == 0.0) {
                return Err(Error::Config("transverse profile g must not vanish identically".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x2: f64) -> f64 {
        match self {
            TransverseProfile::Indicator { support } => {
                if support.contains(x2) {
                    1.0
                } else {
                    0.0
                }
            }
            TransverseProfile::CustomSamples { support, values } => {
                if !support.contains(x2) {
                    return 0.0;
                }
                let cells = (values.len() - 1) as f64;
                let t = (x2 - support.lo()) / support.length() * cells;
                let i = (t.floor() as usize).min(values.len() - 2);
                let frac = t - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// Sample breakpoints (including the support ends) for piecewise integration.
    fn breakpoints(&self) -> Vec<f64> {
        let s = self.support();
        match self {
            TransverseProfile::Indicator { .. } => vec![s.lo(), s.hi()],
            TransverseProfile::CustomSamples { values, .. } => {
                let cells = values.len() - 1;
                (0..=cells)
                    .map(|i| s.lo() + s.length() * i as f64 / cells as f64)
                    .collect()
            }
        }
    }

    /// `int g(x2) exp(z x2) dx2` for complex `z`.
    pub fn exponential_moment(&self, z: Complex64) -> Complex64 {
        match self {
            TransverseProfile::Indicator { support } => {
                let half = 0.5 * support.length();
                let w = z * half;
                (z * support.midpoint()).exp() * sinhc(w) * (2.0 * half)
            }
            TransverseProfile::CustomSamples { .. } => {
                let pts = self.breakpoints();
                pts.windows(2)
                    .map(|p| {
                        integrate_adaptive(
                            |x| (z * x).exp() * self.eval(x),
                            p[0],
                            p[1],
                            CUSTOM_G_ABS_TOL,
                            0.0,
                        )
                    })
                    .sum()
            }
        }
    }

    /// `int |g(x2)| |exp(z x2)| dx2`, the cancellation-free scale of
    /// [`Self::exponential_moment`].
    pub fn exponential_moment_scale(&self, z: Complex64) -> f64 {
        let rate = z.re;
        match self {
            TransverseProfile::Indicator { support } => {
                let half = 0.5 * support.length();
                let w = Complex64::new(rate * half, 0.0);
                ((rate * support.midpoint()).exp() * sinhc(w).re) * 2.0 * half
            }
            TransverseProfile::CustomSamples { .. } => {
                let pts = self.breakpoints();
                pts.windows(2)
                    .map(|p| {
                        integrate_adaptive(
                            |x| Complex64::new(self.eval(x).abs() * (rate * x).exp(), 0.0),
                            p[0],
                            p[1],
                            CUSTOM_G_ABS_TOL,
                            0.0,
                        )
                        .re
                    })
                    .sum()
            }
        }
    }
}

/// `g(x2)` for the given profile.
pub fn eval_g(profile: &TransverseProfile, x2: f64) -> f64 {
    profile.eval(x2)
}

/// `sinh(w)/w` with the removable singularity filled in.
fn sinhc(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        let w2 = w * w;
        Complex64::new(1.0, 0.0) + w2 / 6.0 + w2 * w2 / 120.0
    } else {
        w.sinh() / w
    }
}

/// Principal complex square root of a real number.
pub fn principal_sqrt(v: f64) -> Complex64 {
    if v >= 0.0 {
        Complex64::new(v.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-v).sqrt())
    }
}

/// Transverse exponent `s = sqrt(n^2 - k^2)` of the Dirichlet–Laplacian test functions.
pub fn dl_exponent(n: u32, k: f64) -> Complex64 {
    let n = n as f64;
    principal_sqrt((n - k) * (n + k))
}

/// Second wave-vector component `xi_2 = sqrt(k^2 - 4 n^2)` of the plane-wave test functions.
pub fn ft_xi2(n: i64, k: f64) -> Complex64 {
    let two_n = 2.0 * n as f64;
    principal_sqrt((k - two_n) * (k + two_n))
}

/// `G_n(k) = int g(x2) exp(s x2) dx2`, `s = sqrt(n^2 - k^2)`.
pub fn g_mode_integral_dl(profile: &TransverseProfile, n: u32, k: f64) -> Complex64 {
    profile.exponential_moment(dl_exponent(n, k))
}

/// `G~_n(k) = int g(x2) exp(-i xi_2 x2) dx2`, `xi_2 = sqrt(k^2 - 4n^2)`.
pub fn g_mode_integral_ft(profile: &TransverseProfile, n: i64, k: f64) -> Complex64 {
    let xi2 = ft_xi2(n, k);
    profile.exponential_moment(Complex64::new(0.0, -1.0) * xi2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_adaptive;
    use proptest::prelude::*;

    fn quad_dl(g: &TransverseProfile, n: u32, k: f64) -> Complex64 {
        let s = dl_exponent(n, k);
        let sup = g.support();
        integrate_adaptive(|x| (s * x).exp() * g.eval(x), sup.lo(), sup.hi(), 1e-14, 1e-14)
    }

    fn quad_ft(g: &TransverseProfile, n: i64, k: f64) -> Complex64 {
        let xi = ft_xi2(n, k);
        let sup = g.support();
        integrate_adaptive(
            |x| (Complex64::new(0.0, -1.0) * xi * x).exp() * g.eval(x),
            sup.lo(),
            sup.hi(),
            1e-14,
            1e-14,
        )
    }

    #[test]
    fn catalog_values() {
        let f1 = SourceSpec::catalog(ProfileId::F1);
        assert_eq!(eval_f(&f1, FRAC_PI_2, 0.5), 1.0);
        assert_eq!(eval_f(&f1, 0.1, 0.5), 0.0);
        let f2 = SourceSpec::catalog(ProfileId::F2);
        assert!(eval_f(&f2, FRAC_PI_4, 0.5).abs() < 1e-15);
        let f4 = SourceSpec::catalog(ProfileId::F4);
        let x = 1.3;
        let expect = (-20.0 * 0.7 * (x - FRAC_PI_2).powi(2)).exp() + (8.0 * 0.7 * x).sin();
        assert!((eval_f(&f4, x, 0.7) - expect).abs() < 1e-15);
        let f5 = SourceSpec::catalog(ProfileId::F5);
        assert!((eval_f(&f5, 2.0, 3.0) - (4.0f64).cos()).abs() < 1e-15);
    }

    #[test]
    fn unknown_profile_is_config_error() {
        assert!(matches!("f9".parse::<ProfileId>(), Err(Error::Config(_))));
        let json = r#"{"profile": "f7"}"#;
        assert!(serde_json::from_str::<SourceSpec>(json).is_err());
        assert_eq!("F3".parse::<ProfileId>().unwrap(), ProfileId::F3);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let bad = SourceSpec::catalog(ProfileId::F1).with_support(Interval(-0.5, 1.0));
        assert!(bad.validate().is_err());
        let bad = SourceSpec::catalog(ProfileId::F1).with_parameters(&[1.0, 2.0]);
        assert!(bad.validate().is_err());
        assert!(SourceSpec::custom(vec![], default_source_support()).validate().is_err());
        assert!(SourceSpec::catalog(ProfileId::F4).with_parameters(&[10.0, 4.0]).validate().is_ok());
        let zero_g = TransverseProfile::CustomSamples { support: default_transverse_support(), values: vec![0.0, 0.0] };
        assert!(zero_g.validate().is_err());
    }

    #[test]
    fn indicator_g() {
        let g = TransverseProfile::default();
        assert_eq!(eval_g(&g, 0.0), 1.0);
        assert_eq!(eval_g(&g, PI / 3.0), 0.0);
        assert_eq!(eval_g(&g, -FRAC_PI_4), 1.0);
    }

    #[test]
    fn dl_mode_integral_examples() {
        let g = TransverseProfile::default();
        // k -> 0+: s = 2, integral of e^{2x} over [-pi/4, pi/4] = sinh(pi/2)
        let v = g_mode_integral_dl(&g, 2, 1e-12);
        assert!((v.re - 2.301298902307295).abs() < 1e-12 && v.im.abs() < 1e-15);
        let v = g_mode_integral_dl(&g, 1, 1.0);
        assert!((v - Complex64::new(FRAC_PI_2, 0.0)).norm() < 1e-15);
        // s = 4i: 2 sin(pi)/4
        assert!(g_mode_integral_dl(&g, 3, 5.0).norm() < 1e-15);
    }

    #[test]
    fn ft_mode_integral_examples() {
        let g = TransverseProfile::default();
        assert!((g_mode_integral_ft(&g, 0, 2.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((g_mode_integral_ft(&g, 1, 2.0) - Complex64::new(FRAC_PI_2, 0.0)).norm() < 1e-15);
        assert!(g_mode_integral_ft(&g, 1, 20f64.sqrt()).norm() < 1e-15);
        assert_eq!(g_mode_integral_ft(&g, -3, 1.1), g_mode_integral_ft(&g, 3, 1.1));
    }

    #[test]
    fn mode_integrals_match_adaptive_quadrature() {
        let profiles = [
            TransverseProfile::default(),
            TransverseProfile::Indicator { support: Interval(-0.3, 0.6) },
            TransverseProfile::CustomSamples {
                support: default_transverse_support(),
                values: vec![0.2, 1.0, 0.7, 1.3, 0.0],
            },
        ];
        for g in &profiles {
            for n in 1..=12u32 {
                for k in [0.1, 0.5, 0.999_99, 1.0, 1.000_01, 2.99, 3.0, 5.0, 7.5] {
                    let got = g_mode_integral_dl(g, n, k);
                    let want = quad_dl(g, n, k);
                    assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0), "dl n={n} k={k}");
                    let m = n as i64 - 6;
                    let got = g_mode_integral_ft(g, m, k);
                    let want = quad_ft(g, m, k);
                    assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0), "ft n={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn mode_scale_bounds_the_integral() {
        let g = TransverseProfile::default();
        for n in 1..20 {
            for k in [0.5, 3.0, 12.0] {
                let s = dl_exponent(n, k);
                assert!(g_mode_integral_dl(&g, n, k).norm() <= g.exponential_moment_scale(s) * (1.0 + 1e-12));
            }
        }
        let s = dl_exponent(3, 5.0);
        assert!((g.exponential_moment_scale(s) - FRAC_PI_2).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn source_vanishes_off_support(x in -1.0f64..4.5, k in 0.01f64..8.0, which in 0usize..5) {
            let id = [ProfileId::F1, ProfileId::F2, ProfileId::F3, ProfileId::F4, ProfileId::F5][which];
            let spec = SourceSpec::catalog(id);
            if !spec.support.contains(x) {
                prop_assert_eq!(spec.eval(x, k), 0.0);
            }
        }

        #[test]
        fn mode_integrals_continuous_across_branch_point(n in 1u32..15, eps in 1e-14f64..1e-11) {
            let g = TransverseProfile::default();
            let k = n as f64;
            let left = g_mode_integral_dl(&g, n, k - eps);
            let right = g_mode_integral_dl(&g, n, k + eps);
            prop_assert!((left - right).norm() < 1e-9);
            let left = g_mode_integral_ft(&g, n as i64, 2.0 * k - eps);
            let right = g_mode_integral_ft(&g, n as i64, 2.0 * k + eps);
            prop_assert!((left - right).norm() < 1e-9);
        }
    }
}
