//! Numerical tolerances and resolutions, threaded explicitly through the API.

use serde::{Deserialize, Serialize};

/// Every knob that influences a numerical decision.
///
/// A profile is loaded from JSON by the CLI (`--tol-profile`); missing fields
/// fall back to [`ToleranceProfile::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceProfile {
    pub unit_norm: f64,
    pub orthonormal: f64,
    /// Margin for hemisphere feasibility.
    pub eps: f64,
    pub closure: f64,
    /// Default number of grid intervals for generated curves.
    pub grid_n: usize,
    /// Number of θ-nodes per band fiber.
    pub band_m: usize,
    pub path_steps: usize,
    pub delta_antipodal: f64,
    pub eps_borderline: f64,
    pub winding_residual: f64,
    pub graft_eps: f64,
    pub newton_max_iter: usize,
    pub newton_tol: f64,
    pub tau_band: f64,
    pub band_k: usize,
    pub retract_max_iter: usize,
    pub n_min: usize,
    pub fibonacci_m: usize,
    /// Largest turning angle of a single sample interval used by geometric searches.
    pub max_turn: f64,
    pub seed: u64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            unit_norm: 1e-12,
            orthonormal: 1e-10,
            eps: 1e-9,
            closure: 1e-7,
            grid_n: 1024,
            band_m: 64,
            path_steps: 65,
            delta_antipodal: 1e-3,
            eps_borderline: 1e-4,
            winding_residual: 0.05,
            graft_eps: 0.05,
            newton_max_iter: 50,
            newton_tol: 1e-12,
            tau_band: 5e-3,
            band_k: 2048,
            retract_max_iter: 60,
            n_min: 16,
            fibonacci_m: 4096,
            max_turn: 0.05,
            seed: 0x5eed_c0de,
        }
    }
}

impl ToleranceProfile {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Spacing of the θ-grid on a band of the given angular length.
    pub fn band_spacing(&self, length: f64) -> f64 {
        length / (self.band_m.max(2) - 1) as f64
    }
}
