use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by the solvers. All tolerances are relative to
/// `max(1, |value|)` of the quantity they guard.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSettings {
    /// Fibers whose closest pair of roots is nearer than this are near-critical.
    pub separation: f64,
    /// Roots of the critical set closer than this are merged.
    pub cluster: f64,
    /// Paths must stay this far from the critical set.
    pub min_clearance: f64,
    /// Relative accuracy requested from quadratures.
    pub quadrature: f64,
    /// Angular offset of the Aberth start circle, drawn from the run seed.
    pub start_angle: f64,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self::from_seed(0)
    }
}

impl NumericSettings {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            separation: 1e-8,
            cluster: 1e-9,
            min_clearance: 1e-6,
            quadrature: 1e-9,
            start_angle: 0.25 + 0.5 * rng.gen::<f64>(),
        }
    }
}
