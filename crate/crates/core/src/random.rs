//! Deterministic random fields.
//!
//! Every sample gets its own generator seeded from `(master, index)`, so
//! corpus members can be evaluated in any order or in parallel and still
//! reproduce bit-for-bit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::SpectralField;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for sample `index` of a corpus with master seed `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(master ^ mix(index))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `ĉ(k) = |k|^{-decay} e^{iθ_k}` for `1 <= k <= K` with uniform phases.
///
/// Phases are drawn in order of increasing `k`, so the field at `K` is a
/// prefix of the field at `2K` for the same seed. `mean` sets the average
/// value of the function.
pub fn power_law_field(max_mode: usize, decay: f64, mean: f64, seed: u64) -> SpectralField {
    let mut rng = rng(seed);
    let mut coeffs = Vec::with_capacity(max_mode + 1);
    coeffs.push(Complex64::new(mean * (2.0 * PI).sqrt(), 0.0));
    for k in 1..=max_mode {
        let theta: f64 = rng.random_range(0.0..2.0 * PI);
        coeffs.push(Complex64::from_polar((k as f64).powf(-decay), theta));
    }
    SpectralField::from_coeffs(coeffs).expect("finite power-law coefficients")
}
