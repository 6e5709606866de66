//! Shared fixtures for the benchmarks.

use bolab_core::random::power_law_field;
use bolab_core::SpectralField;

/// Smooth random field on `max_mode` modes with unit sup-norm scale.
pub fn smooth_field(max_mode: usize, seed: u64) -> SpectralField {
    let f = power_law_field(max_mode, 4.0, 0.0, seed);
    f.scale(1.0 / f.sup_norm(4))
}
