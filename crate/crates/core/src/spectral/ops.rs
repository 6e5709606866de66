//! Fourier multipliers, products and norms on [`SpectralField`].

use num_complex::Complex64;

use super::field::SpectralField;
use super::mollifier::MollifierSpec;
use super::transform;
use crate::error::{Error, Result};

/// How a product is returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    /// Full product, bandwidth `K_f + K_g`. No information is lost.
    Exact,
    /// Product projected onto `|k| <= max(K_f, K_g)`, computed on a
    /// zero-padded grid large enough that the projection is alias-free.
    Truncated,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Hilbert transform: multiplier `-i·sgn(k)`, zero mean.
pub fn hilbert(f: &SpectralField) -> SpectralField {
    f.map_modes(|k| {
        if k == 0 {
            real(0.0)
        } else {
            Complex64::new(0.0, -1.0)
        }
    })
}

/// `D^s`, multiplier `|k|^s`. `D^0` is the identity, mean included.
pub fn fractional_derivative(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::param(
            "s",
            format!("order must be finite and non-negative, got {s}"),
        ));
    }
    Ok(d_pow(f, s))
}

pub(crate) fn d_pow(f: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    f.map_modes(|k| real((k as f64).powf(s)))
}

/// `∂ₓ^order`, multiplier `(ik)^order`.
pub fn dx(f: &SpectralField, order: u32) -> SpectralField {
    f.map_modes(|k| Complex64::new(0.0, k as f64).powu(order))
}

/// `⟨D⟩^{-1}`, multiplier `(1+k²)^{-1/2}`.
pub fn bessel_inverse(f: &SpectralField) -> SpectralField {
    bessel_potential(f, -1.0)
}

/// `⟨D⟩^s`, multiplier `(1+k²)^{s/2}`.
pub fn bessel_potential(f: &SpectralField, s: f64) -> SpectralField {
    f.map_modes(|k| real((1.0 + (k * k) as f64).powf(s / 2.0)))
}

/// `J_γ`, multiplier `ρ(γk)`.
pub fn mollify(f: &SpectralField, spec: &MollifierSpec) -> SpectralField {
    f.map_modes(|k| real(spec.rho(spec.gamma() * k as f64)))
}

/// Pointwise product `f·g`.
pub fn multiply(f: &SpectralField, g: &SpectralField, mode: ProductMode) -> SpectralField {
    let total = f.max_mode() + g.max_mode();
    let keep = match mode {
        ProductMode::Exact => total,
        ProductMode::Truncated => f.max_mode().max(g.max_mode()),
    };
    if mode == ProductMode::Exact
        && (2 * f.max_mode() + 1) * (2 * g.max_mode() + 1) <= DIRECT_PRODUCT_LIMIT
    {
        return direct_product(f, g);
    }
    let n = transform::dealiased_size(total, keep);
    let fv = f.to_grid(n);
    let gv = g.to_grid(n);
    let prod: Vec<f64> = fv.iter().zip(&gv).map(|(a, b)| a * b).collect();
    // Grid samples carry the (2π)^{-1/2} factor of each input, so the
    // product of samples is the product function itself.
    SpectralField::from_grid(&prod, keep)
}

/// Below this many coefficient pairs, exact products are summed directly.
/// The direct sum keeps each output coefficient accurate relative to its
/// own magnitude, which transform roundoff does not.
const DIRECT_PRODUCT_LIMIT: usize = 1 << 16;

/// `c_ξ(fg) = (2π)^{-1/2} Σ_η c_{ξ−η}(f) c_η(g)` for `0 <= ξ <= K_f + K_g`.
fn direct_product(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let kf = f.max_mode() as i64;
    let kg = g.max_mode() as i64;
    let norm = (2.0 * std::f64::consts::PI).sqrt().recip();
    let coeffs = (0..=kf + kg)
        .map(|xi| {
            let lo = (xi - kf).max(-kg);
            let hi = (xi + kf).min(kg);
            let sum: Complex64 = (lo..=hi).map(|eta| f.coeff(xi - eta) * g.coeff(eta)).sum();
            let c = sum * norm;
            if xi == 0 {
                Complex64::new(c.re, 0.0)
            } else {
                c
            }
        })
        .collect();
    SpectralField::from_coeffs_unchecked(coeffs)
}

/// `⟨f, g⟩ = ∫ f g dx = Σ_k c_k(f) conj(c_k(g))`.
pub fn inner_l2(f: &SpectralField, g: &SpectralField) -> f64 {
    let k = f.max_mode().min(g.max_mode());
    let a = f.coeffs();
    let b = g.coeffs();
    let tail: f64 = (1..=k).map(|i| (a[i] * b[i].conj()).re).sum();
    (a[0] * b[0].conj()).re + 2.0 * tail
}

/// `∫ f g h dx`, evaluated exactly from the full product `f·g`.
pub fn triple_integral(f: &SpectralField, g: &SpectralField, h: &SpectralField) -> f64 {
    inner_l2(&multiply(f, g, ProductMode::Exact), h)
}

/// Sobolev norm. For `s >= 0` this is `2^{-1/2}(‖f‖² + ‖D^s f‖²)^{1/2}`;
/// for `-1 <= s < 0` the Bessel-potential norm `‖⟨k⟩^s f̂‖`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> Result<f64> {
    if !s.is_finite() || s < -1.0 {
        return Err(Error::param(
            "s",
            format!("Sobolev index must be >= -1, got {s}"),
        ));
    }
    Ok(sobolev_norm_sq_unchecked(f, s).sqrt())
}

pub(crate) fn sobolev_norm_sq_unchecked(f: &SpectralField, s: f64) -> f64 {
    if s >= 0.0 {
        0.5 * (f.norm_sq() + d_pow(f, s).norm_sq())
    } else {
        bessel_potential(f, s).norm_sq()
    }
}

/// `‖f‖_{H^s}` for indices already validated by the caller.
pub(crate) fn hs(f: &SpectralField, s: f64) -> f64 {
    sobolev_norm_sq_unchecked(f, s).sqrt()
}

/// `[A, f] g = A(f g) - f A(g)` with exact products.
pub fn commutator(
    op: impl Fn(&SpectralField) -> SpectralField,
    f: &SpectralField,
    g: &SpectralField,
) -> SpectralField {
    let fg = multiply(f, g, ProductMode::Exact);
    &op(&fg) - &multiply(f, &op(g), ProductMode::Exact)
}
