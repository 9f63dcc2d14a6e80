//! Shared fixtures for the criterion benches.

use bubblecasimir::MediumConfig;

/// First reference case: `n_in = 2e4`, `n_out = 1`.
pub fn dense_to_vacuum() -> MediumConfig {
    MediumConfig::with_indices(2.0e4, 1.0)
}

/// Evenly spaced points in `(lo, hi)`, endpoints excluded.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
        .collect()
}
