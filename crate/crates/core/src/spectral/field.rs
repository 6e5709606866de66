use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::transform;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A real-valued function on the torus, stored as Fourier coefficients.
///
/// Only `c_0..=c_K` are kept; `c_{-k} = conj(c_k)` is implied, so Hermitian
/// symmetry holds by construction. The normalization is
/// `c_k = (2π)^{-1/2} ∫ f(x) e^{-ikx} dx`, which makes `‖f‖² = Σ_k |c_k|²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(max_mode: usize) -> Self {
        Self {
            coeffs: vec![ZERO; max_mode + 1],
        }
    }

    /// Build from `c_0..=c_K`. Rejects non-finite entries and a mean with a
    /// non-negligible imaginary part.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::param("coeffs", "at least the zero mode is required"));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite {
                what: "field coefficients".into(),
            });
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if coeffs[0].im.abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::NotReal(format!(
                "zero mode has imaginary part {:e}",
                coeffs[0].im
            )));
        }
        coeffs[0].im = 0.0;
        Ok(Self { coeffs })
    }

    pub(crate) fn from_coeffs_unchecked(mut coeffs: Vec<Complex64>) -> Self {
        coeffs[0].im = 0.0;
        Self { coeffs }
    }

    /// Constant function `value`.
    pub fn constant(max_mode: usize, value: f64) -> Self {
        let mut f = Self::zeros(max_mode);
        f.coeffs[0] = Complex64::new(value * (2.0 * PI).sqrt(), 0.0);
        f
    }

    /// `amp·cos(kx)`.
    pub fn cos_mode(max_mode: usize, k: usize, amp: f64) -> Self {
        Self::trig_mode(max_mode, k, Complex64::new(amp, 0.0))
    }

    /// `amp·sin(kx)`.
    pub fn sin_mode(max_mode: usize, k: usize, amp: f64) -> Self {
        Self::trig_mode(max_mode, k, Complex64::new(0.0, -amp))
    }

    /// `Re(w e^{ikx})` scaled so that `w = amp` gives `amp·cos(kx)`.
    fn trig_mode(max_mode: usize, k: usize, w: Complex64) -> Self {
        assert!(k <= max_mode, "mode {k} exceeds max mode {max_mode}");
        let mut f = Self::zeros(max_mode);
        if k == 0 {
            f.coeffs[0] = Complex64::new(w.re * (2.0 * PI).sqrt(), 0.0);
        } else {
            f.coeffs[k] = w * (PI / 2.0).sqrt();
        }
        f
    }

    /// Band-limited interpolant of `f` sampled on a grid fine enough for `max_mode`.
    pub fn from_fn(max_mode: usize, f: impl Fn(f64) -> f64) -> Self {
        let n = transform::fft_size(2 * max_mode + 2);
        let values: Vec<f64> = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
        Self::from_grid(&values, max_mode)
    }

    pub fn from_grid(values: &[f64], max_mode: usize) -> Self {
        Self::from_coeffs_unchecked(transform::analyze(values, max_mode))
    }

    pub fn max_mode(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients `c_0..=c_K`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at any integer mode; zero outside the band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            Some(c) if k >= 0 => *c,
            Some(c) => c.conj(),
            None => ZERO,
        }
    }

    /// Mean value `(2π)^{-1} ∫ f`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re / (2.0 * PI).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Zero-pad or truncate to `max_mode`.
    pub fn resized(&self, max_mode: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(max_mode + 1, ZERO);
        Self { coeffs }
    }

    /// Samples on `n` equispaced points (`n` even, `n > 2K`).
    pub fn to_grid(&self, n: usize) -> Vec<f64> {
        transform::synthesize(&self.coeffs, n)
    }

    /// Point evaluation by direct summation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.coeffs[0].re;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let phase = Complex64::from_polar(1.0, k as f64 * x);
            acc += 2.0 * (c * phase).re;
        }
        acc / (2.0 * PI).sqrt()
    }

    /// Multiply mode `k >= 0` by `symbol(k)`. The symbol must be real at
    /// `k = 0`; negative modes follow from conjugate symmetry.
    pub fn map_modes(&self, symbol: impl Fn(usize) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * symbol(k))
            .collect();
        Self::from_coeffs_unchecked(coeffs)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `self + a·other`, at the larger bandwidth.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        let k = self.max_mode().max(other.max_mode());
        let mut out = self.resized(k);
        for (o, c) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o += c * a;
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        let tail: f64 = self.coeffs[1..].iter().map(|c| c.norm_sqr()).sum();
        self.coeffs[0].norm_sqr() + 2.0 * tail
    }

    /// `‖f‖_{L²}`.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Sup norm sampled on an `oversample`× refined grid.
    pub fn sup_norm(&self, oversample: usize) -> f64 {
        let n = transform::fft_size(oversample.max(1) * (2 * self.max_mode() + 2));
        self.to_grid(n).into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

impl Mul<&SpectralField> for f64 {
    type Output = SpectralField;
    fn mul(self, rhs: &SpectralField) -> SpectralField {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos_and_sin_modes_evaluate_correctly() {
        let c = SpectralField::cos_mode(4, 2, 1.5);
        let s = SpectralField::sin_mode(4, 3, -0.5);
        for x in [0.0, 0.3, 1.7, 4.0] {
            assert!((c.eval(x) - 1.5 * (2.0 * x).cos()).abs() < 1e-14);
            assert!((s.eval(x) + 0.5 * (3.0 * x).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_has_expected_mean_and_norm() {
        let one = SpectralField::constant(3, 1.0);
        assert!((one.mean() - 1.0).abs() < 1e-15);
        assert!((one.norm_sq() - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_finite_and_complex_mean() {
        assert!(SpectralField::from_coeffs(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(SpectralField::from_coeffs(vec![Complex64::new(1.0, 0.5)]).is_err());
        assert!(SpectralField::from_coeffs(vec![]).is_err());
    }

    #[test]
    fn negative_modes_are_conjugates() {
        let f =
            SpectralField::from_coeffs(vec![Complex64::new(1.0, 0.0), Complex64::new(0.2, 0.7)])
                .unwrap();
        assert_eq!(f.coeff(-1), Complex64::new(0.2, -0.7));
        assert_eq!(f.coeff(5), ZERO);
    }

    #[test]
    fn from_fn_recovers_trig_polynomial() {
        let f = SpectralField::from_fn(6, |x| 0.5 + (2.0 * x).cos() - 0.25 * (5.0 * x).sin());
        let g = &(&SpectralField::constant(6, 0.5) + &SpectralField::cos_mode(6, 2, 1.0))
            + &SpectralField::sin_mode(6, 5, -0.25);
        assert!((&f - &g).norm() < 1e-14);
    }

    #[test]
    fn parseval_matches_trapezoidal_quadrature() {
        let f = SpectralField::from_fn(5, |x| (x.sin() + 0.3 * (4.0 * x).cos()).powi(1) + 0.1);
        let n = 64;
        let q: f64 = f.to_grid(n).iter().map(|v| v * v).sum::<f64>() * 2.0 * PI / n as f64;
        assert!((q - f.norm_sq()).abs() < 1e-12);
    }
}
