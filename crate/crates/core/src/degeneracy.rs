//! Detection of modes whose transverse integral vanishes.

use serde::{Deserialize, Serialize};

use crate::sources::BRANCH_SERIES_THRESHOLD;

/// Default relative threshold for [`DegeneracyPolicy::tolerance`].
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// A mode is degenerate when `|G| < tolerance * scale`, where `scale` is
/// `int |g(x2)| |e^{z x2}| dx2`, the size `G` would have without cancellation.
///
/// With `paper_faithful` set, modes whose transverse exponent has modulus
/// below [`BRANCH_SERIES_THRESHOLD`] are also reported as degenerate even
/// though the integral has a finite, nonzero limit there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyPolicy {
    pub tolerance: f64,
    #[serde(default)]
    pub paper_faithful: bool,
}

impl Default for DegeneracyPolicy {
    fn default() -> Self {
        DegeneracyPolicy { tolerance: DEFAULT_DEGENERACY_TOL, paper_faithful: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegeneracyReason {
    /// Cancellation in the transverse integral.
    VanishingIntegral,
    /// Exponent at the branch point, flagged only in paper-faithful mode.
    BranchPoint,
}

impl DegeneracyPolicy {
    pub fn paper_faithful() -> Self {
        DegeneracyPolicy { paper_faithful: true, ..Self::default() }
    }

    // written so that a NaN integral counts as vanishing
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn classify(&self, g_abs: f64, scale: f64, exponent_abs: f64) -> Option<DegeneracyReason> {
        if self.paper_faithful && exponent_abs < BRANCH_SERIES_THRESHOLD {
            Some(DegeneracyReason::BranchPoint)
        } else if !(g_abs >= self.tolerance * scale) || g_abs == 0.0 {
            Some(DegeneracyReason::VanishingIntegral)
        } else {
            None
        }
    }
}

/// Per-mode record kept alongside reconstructed coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDiagnostic {
    pub n: i64,
    /// `|G|` for this mode.
    pub g_abs: f64,
    /// Cancellation-free scale of `G`.
    pub g_scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<DegeneracyReason>,
    /// Smallest and largest modulus of the test function on the circle.
    pub test_magnitude: (f64, f64),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let p = DegeneracyPolicy::default();
        assert_eq!(p.classify(1.0, 1.0, 1.0), None);
        assert_eq!(p.classify(1e-9, 1.0, 1.0), Some(DegeneracyReason::VanishingIntegral));
        assert_eq!(p.classify(0.0, 0.0, 1.0), Some(DegeneracyReason::VanishingIntegral));
        assert_eq!(p.classify(f64::NAN, 1.0, 1.0), Some(DegeneracyReason::VanishingIntegral));
        assert_eq!(p.classify(1.5, 1.6, 0.0), None);
        let f = DegeneracyPolicy::paper_faithful();
        assert_eq!(f.classify(1.5, 1.6, 0.0), Some(DegeneracyReason::BranchPoint));
        assert_eq!(f.classify(1.5, 1.6, 1e-3), None);
    }
}
