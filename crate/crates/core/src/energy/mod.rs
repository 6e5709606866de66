//! Modified energies with cubic correction terms.
//!
//! For `w = f - g`:
//!
//! ```text
//! E_s(f, g; a) = a‖w‖² + ‖D^s w‖² + λ(s) ∫ f (H D^s w)(D^{s-2}∂ₓ w) dx
//! E_s(f; b)    = E_s(f, 0; 1) + b‖f‖^{4s+2}
//! Ẽ(f, g; c)   = c‖w‖²_{H^{-1}} + ‖w‖² − λ(0) ∫ f (⟨D⟩^{-1} w) w dx
//! λ(s)         = −2((c₁ + c₂)s + c₂)/3
//! ```
//!
//! The first argument weights the correction integral; the energies are
//! not symmetric in `(f, g)`.

mod calibration;

pub use calibration::{calibrate, ProbeCorpus, ProbePair, SandwichCheck, SandwichUpper};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    bessel_inverse, d_pow, dx, hilbert, inner_l2, triple_integral, SpectralField,
};

/// Coefficient of the correction term, `λ(s) = −2((c₁+c₂)s + c₂)/3`.
pub fn lambda_coeff(s: f64, c1: f64, c2: f64) -> f64 {
    -2.0 * ((c1 + c2) * s + c2) / 3.0
}

/// Indices, equation coefficients and equivalence constants for the energies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCalibration {
    pub s: f64,
    pub s0: f64,
    pub c1: f64,
    pub c2: f64,
    pub lambda_s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Bound on `‖f‖` under which `a` and `c` were calibrated.
    pub bound: f64,
    /// Upper equivalence constants observed on the calibration corpus.
    pub upper: SandwichUpper,
    pub corpus_seed: u64,
    pub corpus_size: usize,
}

impl EnergyCalibration {
    /// Calibration with hand-picked constants (no corpus behind it).
    #[allow(clippy::too_many_arguments)]
    pub fn with_constants(
        s: f64,
        s0: f64,
        c1: f64,
        c2: f64,
        a: f64,
        b: f64,
        c: f64,
        bound: f64,
    ) -> Result<Self> {
        validate_indices(s, s0)?;
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        if !(bound > 0.0) {
            return Err(Error::param("bound", format!("must be > 0, got {bound}")));
        }
        Ok(Self {
            s,
            s0,
            c1,
            c2,
            lambda_s: lambda_coeff(s, c1, c2),
            a,
            b,
            c,
            bound,
            upper: SandwichUpper::default(),
            corpus_seed: 0,
            corpus_size: 0,
        })
    }

    pub fn lambda0(&self) -> f64 {
        lambda_coeff(0.0, self.c1, self.c2)
    }

    /// Re-check the stored λ(s) against `(c₁, c₂, s)`.
    pub fn is_consistent(&self) -> bool {
        (self.lambda_s - lambda_coeff(self.s, self.c1, self.c2)).abs()
            <= 1e-14 * self.lambda_s.abs().max(1.0)
    }
}

pub(crate) fn validate_indices(s: f64, s0: f64) -> Result<()> {
    if !(s >= 2.0) || !s.is_finite() {
        return Err(Error::param(
            "s",
            format!("energy index must be >= 2, got {s}"),
        ));
    }
    if !(s0 > 2.5) || !s0.is_finite() {
        return Err(Error::param("s0", format!("must exceed 5/2, got {s0}")));
    }
    Ok(())
}

/// Each addend of an evaluated energy, already multiplied by its weight,
/// so `total` is their plain sum. Addends that do not occur are zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `a‖w‖²` (pair), `‖f‖²` (single), `‖w‖²` (tilde).
    pub l2_sq: f64,
    /// `‖D^s w‖²`.
    pub ds_sq: f64,
    /// `c‖w‖²_{H^{-1}}`.
    pub hm1_sq: f64,
    /// `λ(s)∫ f (H D^s w)(D^{s-2}∂ₓ w)` or `−λ(0)∫ f (⟨D⟩^{-1} w) w`.
    pub correction: f64,
    /// `b‖f‖^{4s+2}`.
    pub power_term: f64,
    pub total: f64,
}

impl EnergyReport {
    fn summed(mut self) -> Self {
        self.total = self.l2_sq + self.ds_sq + self.hm1_sq + self.correction + self.power_term;
        self
    }
}

/// `D^{s-2}∂ₓ w`.
fn lower_branch(w: &SpectralField, s: f64) -> SpectralField {
    dx(&d_pow(w, s - 2.0), 1)
}

/// `∫ f (H D^s w)(D^{s-2}∂ₓ w) dx`.
pub fn correction_integral(f: &SpectralField, w: &SpectralField, s: f64) -> f64 {
    triple_integral(f, &hilbert(&d_pow(w, s)), &lower_branch(w, s))
}

/// `∫ f (⟨D⟩^{-1} w) w dx`.
pub fn tilde_correction_integral(f: &SpectralField, w: &SpectralField) -> f64 {
    triple_integral(f, &bessel_inverse(w), w)
}

/// The pairing `∫ ∂ₓu (H D^s ∂ₓ w) D^s w dx` whose growth the correction
/// term is designed to cancel (`w = u` for a single solution).
pub fn derivative_loss_pairing(u: &SpectralField, w: &SpectralField, s: f64) -> f64 {
    triple_integral(&dx(u, 1), &hilbert(&d_pow(&dx(w, 1), s)), &d_pow(w, s))
}

pub fn energy_pair(
    f: &SpectralField,
    g: &SpectralField,
    cal: &EnergyCalibration,
) -> Result<EnergyReport> {
    validate_indices(cal.s, cal.s0)?;
    Ok(pair_with_weight(f, &(f - g), cal.a, cal))
}

fn pair_with_weight(
    f: &SpectralField,
    w: &SpectralField,
    a: f64,
    cal: &EnergyCalibration,
) -> EnergyReport {
    EnergyReport {
        l2_sq: a * w.norm_sq(),
        ds_sq: d_pow(w, cal.s).norm_sq(),
        correction: cal.lambda_s * correction_integral(f, w, cal.s),
        ..Default::default()
    }
    .summed()
}

pub fn energy_single(f: &SpectralField, cal: &EnergyCalibration) -> Result<EnergyReport> {
    validate_indices(cal.s, cal.s0)?;
    let mut r = pair_with_weight(f, f, 1.0, cal);
    r.power_term = cal.b * f.norm_sq().powf(2.0 * cal.s + 1.0);
    Ok(r.summed())
}

pub fn energy_tilde(f: &SpectralField, g: &SpectralField, cal: &EnergyCalibration) -> EnergyReport {
    let w = f - g;
    EnergyReport {
        l2_sq: w.norm_sq(),
        hm1_sq: cal.c * bessel_inverse(&w).norm_sq(),
        correction: -cal.lambda0() * tilde_correction_integral(f, &w),
        ..Default::default()
    }
    .summed()
}

/// Derivative of the corrected pair energy along `(f', g')`.
fn pair_rate_with_weight(
    f: &SpectralField,
    w: &SpectralField,
    df: &SpectralField,
    dw: &SpectralField,
    a: f64,
    cal: &EnergyCalibration,
) -> f64 {
    let s = cal.s;
    let hw = hilbert(&d_pow(w, s));
    let lw = lower_branch(w, s);
    let dcorr = triple_integral(df, &hw, &lw)
        + triple_integral(f, &hilbert(&d_pow(dw, s)), &lw)
        + triple_integral(f, &hw, &lower_branch(dw, s));
    2.0 * a * inner_l2(w, dw) + 2.0 * inner_l2(&d_pow(w, s), &d_pow(dw, s)) + cal.lambda_s * dcorr
}

/// `d/dt E_s(f, g; a)` when `f` and `g` move with velocities `df`, `dg`.
pub fn energy_pair_rate(
    f: &SpectralField,
    g: &SpectralField,
    df: &SpectralField,
    dg: &SpectralField,
    cal: &EnergyCalibration,
) -> f64 {
    pair_rate_with_weight(f, &(f - g), df, &(df - dg), cal.a, cal)
}

/// `d/dt E_s(f; b)` when `f` moves with velocity `df`.
pub fn energy_single_rate(f: &SpectralField, df: &SpectralField, cal: &EnergyCalibration) -> f64 {
    let n2 = f.norm_sq();
    let power = cal.b * (2.0 * cal.s + 1.0) * n2.powf(2.0 * cal.s) * 2.0 * inner_l2(f, df);
    pair_rate_with_weight(f, f, df, df, 1.0, cal) + power
}

/// `d/dt ‖D^s f‖²` along `df`; the rate without any correction.
pub fn uncorrected_rate(f: &SpectralField, df: &SpectralField, s: f64) -> f64 {
    2.0 * inner_l2(&d_pow(f, s), &d_pow(df, s))
}

/// `d/dt Ẽ(f, g; c)` along `(df, dg)`.
pub fn energy_tilde_rate(
    f: &SpectralField,
    g: &SpectralField,
    df: &SpectralField,
    dg: &SpectralField,
    cal: &EnergyCalibration,
) -> f64 {
    let w = f - g;
    let dw = df - dg;
    let bw = bessel_inverse(&w);
    let dcorr = triple_integral(df, &bw, &w)
        + triple_integral(f, &bessel_inverse(&dw), &w)
        + triple_integral(f, &bw, &dw);
    2.0 * cal.c * inner_l2(&bw, &bessel_inverse(&dw)) + 2.0 * inner_l2(&w, &dw)
        - cal.lambda0() * dcorr
}
