//! Empirical calibration of the equivalence constants `a`, `b`, `c`.
//!
//! Each energy is affine in its constant, so every probe yields the exact
//! smallest constant for which its lower bound holds (with a 10% margin).
//! The calibrated value is the smallest power of two above the worst probe.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    correction_integral, lambda_coeff, tilde_correction_integral, validate_indices,
    EnergyCalibration,
};
use crate::error::{Error, Result};
use crate::random::{derive_seed, power_law_field, rng};
use crate::spectral::{bessel_inverse, d_pow, hs, SpectralField};

const MARGIN: f64 = 1.1;
const MAX_EXPONENT: u32 = 40;
const MAX_PROBE_MODE: usize = 16;

/// Upper equivalence constants measured with the calibrated weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SandwichUpper {
    /// `max E_s(f,g;a) / ‖f-g‖²_{H^s}`.
    pub pair: f64,
    /// `max E_s(f;b) / ((1+‖f‖^{4s})‖f‖²_{H^s})`.
    pub single: f64,
    /// `max Ẽ(f,g;c) / ‖f-g‖²`.
    pub tilde: f64,
}

#[derive(Clone, Debug)]
pub struct ProbePair {
    pub f: SpectralField,
    pub g: SpectralField,
}

/// Field pairs with `‖f‖ <= bound` and unconstrained single fields.
#[derive(Clone, Debug)]
pub struct ProbeCorpus {
    pub seed: u64,
    pub bound: f64,
    pub pairs: Vec<ProbePair>,
    pub singles: Vec<SpectralField>,
}

fn constant_with_norm(max_mode: usize, norm: f64) -> SpectralField {
    SpectralField::constant(max_mode, norm / (2.0 * PI).sqrt())
}

impl ProbeCorpus {
    /// `count` random probes of each kind, drawn from `seed`.
    ///
    /// A quarter of the random pairs are constant weights against a single
    /// oscillation, the family on which the correction term is largest
    /// relative to `‖D^s w‖²`; the rest have power-law spectra with smooth
    /// (`s+2`) or critical (`s+0.51`) decay.
    pub fn random(seed: u64, count: usize, s: f64, bound: f64, max_mode: usize) -> Self {
        let pairs = (0..count)
            .into_par_iter()
            .map(|i| random_pair(derive_seed(seed, 2 * i as u64), s, bound, max_mode))
            .collect();
        let singles = (0..count)
            .into_par_iter()
            .map(|i| random_single(derive_seed(seed, 2 * i as u64 + 1), s, max_mode))
            .collect();
        Self {
            seed,
            bound,
            pairs,
            singles,
        }
    }

    /// Random probes plus a deterministic ladder of near-extremizers.
    pub fn calibration(seed: u64, count: usize, s: f64, bound: f64, max_mode: usize) -> Self {
        let mut corpus = Self::random(seed, count, s, bound, max_mode);
        let top = max_mode.min(MAX_PROBE_MODE);
        for sign in [-1.0, 1.0] {
            let f = constant_with_norm(max_mode, sign * bound);
            for n in 1..=top {
                for w in [
                    SpectralField::cos_mode(max_mode, n, 1.0),
                    SpectralField::sin_mode(max_mode, n, 1.0),
                ] {
                    corpus.pairs.push(ProbePair {
                        g: &f - &w,
                        f: f.clone(),
                    });
                }
            }
            for m in [0.1, 0.3, 1.0, 3.0] {
                for eps in [0.1, 0.3, 1.0, 3.0] {
                    for n in [1, 2, 3, 4, 6, 8].into_iter().filter(|&n| n <= top) {
                        let base = SpectralField::constant(max_mode, sign * m);
                        corpus
                            .singles
                            .push(&base + &SpectralField::cos_mode(max_mode, n, eps));
                    }
                }
            }
        }
        corpus
    }

    pub fn len(&self) -> usize {
        self.pairs.len() + self.singles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn random_shape(rng: &mut impl Rng, s: f64, max_mode: usize) -> SpectralField {
    let decay = if rng.random_bool(0.5) {
        s + 2.0
    } else {
        s + 0.51
    };
    let mean = rng.random_range(-1.0..1.0);
    power_law_field(max_mode, decay, mean, rng.random())
}

fn with_norm(f: &SpectralField, norm: f64) -> SpectralField {
    let n = f.norm();
    if n == 0.0 {
        f.clone()
    } else {
        f.scale(norm / n)
    }
}

fn random_pair(seed: u64, s: f64, bound: f64, max_mode: usize) -> ProbePair {
    let mut rng = rng(seed);
    let f_norm = bound * rng.random_range(0.0..=1.0);
    if rng.random_bool(0.25) {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let n = rng.random_range(1..=max_mode.min(MAX_PROBE_MODE));
        let phase: f64 = rng.random_range(0.0..2.0 * PI);
        let w = &SpectralField::cos_mode(max_mode, n, phase.cos())
            + &SpectralField::sin_mode(max_mode, n, phase.sin());
        let f = constant_with_norm(max_mode, sign * f_norm);
        return ProbePair { g: &f - &w, f };
    }
    let f = with_norm(&random_shape(&mut rng, s, max_mode), f_norm);
    let g_norm = bound * rng.random_range(0.0..2.0);
    let g = with_norm(&random_shape(&mut rng, s, max_mode), g_norm);
    ProbePair { f, g }
}

fn random_single(seed: u64, s: f64, max_mode: usize) -> SpectralField {
    let mut rng = rng(seed);
    let amp = 10f64.powf(rng.random_range(-2.0..1.0));
    if rng.random_bool(0.25) {
        let m = rng.random_range(-1.0..1.0) * amp;
        let n = rng.random_range(1..=max_mode.min(8));
        let eps = amp * rng.random_range(0.0..1.0);
        return &SpectralField::constant(max_mode, m) + &SpectralField::cos_mode(max_mode, n, eps);
    }
    with_norm(&random_shape(&mut rng, s, max_mode), amp)
}

/// Lower bounds of the three sandwich inequalities on one probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SandwichCheck {
    pub pair: bool,
    pub single: bool,
    pub tilde: bool,
}

impl SandwichCheck {
    pub fn all(&self) -> bool {
        self.pair && self.single && self.tilde
    }

    /// Check `‖w‖²_{H^s} ≤ E_s(f,g;a)`, `‖f‖²_{H^s} ≤ E_s(f;b)` and
    /// `½‖w‖² ≤ Ẽ(f,g;c)` for `w = f − g`.
    pub fn evaluate(f: &SpectralField, g: &SpectralField, cal: &EnergyCalibration) -> Self {
        let w = f - g;
        let tol = |x: f64| 1e-12 * x.abs().max(f64::MIN_POSITIVE);
        let pair_lower = hs(&w, cal.s).powi(2);
        let pair = super::energy_pair(f, g, cal)
            .map(|r| r.total)
            .unwrap_or(f64::NAN);
        let single_lower = hs(f, cal.s).powi(2);
        let single = super::energy_single(f, cal)
            .map(|r| r.total)
            .unwrap_or(f64::NAN);
        let tilde_lower = 0.5 * w.norm_sq();
        let tilde = super::energy_tilde(f, g, cal).total;
        Self {
            pair: pair >= pair_lower - tol(pair_lower),
            single: single >= single_lower - tol(single_lower),
            tilde: tilde >= tilde_lower - tol(tilde_lower),
        }
    }
}

/// Smallest constant each probe needs for its lower bound (with margin).
struct Requirement {
    value: f64,
    feasible: bool,
}

fn required(lower: f64, rest: f64, weight: f64) -> Requirement {
    let deficit = MARGIN * lower - rest;
    if deficit <= 0.0 {
        Requirement {
            value: 0.0,
            feasible: true,
        }
    } else if weight > 0.0 {
        Requirement {
            value: deficit / weight,
            feasible: true,
        }
    } else {
        Requirement {
            value: f64::INFINITY,
            feasible: false,
        }
    }
}

fn pick(constant: &'static str, reqs: impl ParallelIterator<Item = Requirement>) -> Result<f64> {
    let (worst, feasible) = reqs
        .map(|r| (r.value, r.feasible))
        .reduce(|| (0.0, true), |a, b| (a.0.max(b.0), a.1 && b.1));
    if feasible {
        for j in 0..=MAX_EXPONENT {
            let v = 2f64.powi(j as i32);
            if v >= worst {
                return Ok(v);
            }
        }
    }
    Err(Error::CalibrationFailed {
        constant,
        max_exponent: MAX_EXPONENT,
    })
}

/// Calibrate `a`, `b`, `c` on `corpus` so that the lower bounds of the
/// sandwich inequalities (constants 1, 1, ½) hold with a 10% margin.
pub fn calibrate(
    s: f64,
    s0: f64,
    c1: f64,
    c2: f64,
    corpus: &ProbeCorpus,
) -> Result<EnergyCalibration> {
    validate_indices(s, s0)?;
    if let Some(p) = corpus
        .pairs
        .iter()
        .find(|p| p.f.norm() > corpus.bound * (1.0 + 1e-12))
    {
        return Err(Error::param(
            "probe_corpus",
            format!(
                "probe weight has ‖f‖ = {} above the bound {}",
                p.f.norm(),
                corpus.bound
            ),
        ));
    }
    let lambda_s = lambda_coeff(s, c1, c2);
    let lambda_0 = lambda_coeff(0.0, c1, c2);

    let a = pick(
        "a",
        corpus.pairs.par_iter().map(|p| {
            let w = &p.f - &p.g;
            let ds = d_pow(&w, s).norm_sq();
            let rest = ds + lambda_s * correction_integral(&p.f, &w, s);
            required(hs(&w, s).powi(2), rest, w.norm_sq())
        }),
    )?;
    let b = pick(
        "b",
        corpus.singles.par_iter().map(|f| {
            let n2 = f.norm_sq();
            let rest = n2 + d_pow(f, s).norm_sq() + lambda_s * correction_integral(f, f, s);
            required(hs(f, s).powi(2), rest, n2.powf(2.0 * s + 1.0))
        }),
    )?;
    let c = pick(
        "c",
        corpus.pairs.par_iter().map(|p| {
            let w = &p.f - &p.g;
            let rest = w.norm_sq() - lambda_0 * tilde_correction_integral(&p.f, &w);
            required(0.5 * w.norm_sq(), rest, bessel_inverse(&w).norm_sq())
        }),
    )?;

    let mut cal = EnergyCalibration::with_constants(s, s0, c1, c2, a, b, c, corpus.bound)?;
    cal.upper = measure_upper(&cal, corpus);
    cal.corpus_seed = corpus.seed;
    cal.corpus_size = corpus.len();
    Ok(cal)
}

fn measure_upper(cal: &EnergyCalibration, corpus: &ProbeCorpus) -> SandwichUpper {
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let (pair, tilde) = corpus
        .pairs
        .par_iter()
        .map(|p| {
            let w = &p.f - &p.g;
            let e = super::energy_pair(&p.f, &p.g, cal)
                .map(|r| r.total)
                .unwrap_or(0.0);
            let t = super::energy_tilde(&p.f, &p.g, cal).total;
            (ratio(e, hs(&w, cal.s).powi(2)), ratio(t, w.norm_sq()))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let single = corpus
        .singles
        .par_iter()
        .map(|f| {
            let e = super::energy_single(f, cal).map(|r| r.total).unwrap_or(0.0);
            let den = (1.0 + f.norm().powf(4.0 * cal.s)) * hs(f, cal.s).powi(2);
            ratio(e, den)
        })
        .reduce(|| 0.0, f64::max);
    SandwichUpper {
        pair,
        single,
        tilde,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> f64 {
        3f64.sqrt() / 2.0
    }

    #[test]
    fn identical_pairs_give_grid_minimum() {
        let f = crate::random::power_law_field(8, 3.0, 0.1, 3);
        let corpus = ProbeCorpus {
            seed: 0,
            bound: 2.0 * f.norm(),
            pairs: vec![
                ProbePair {
                    f: f.clone(),
                    g: f.clone()
                };
                3
            ],
            singles: vec![],
        };
        let cal = calibrate(3.0, 2.6, h(), h(), &corpus).unwrap();
        assert_eq!(cal.a, 1.0);
        assert_eq!(cal.c, 1.0);
        assert_eq!(cal.b, 1.0);
    }

    #[test]
    fn single_cosine_needs_only_unit_weight() {
        let k = 6;
        let f = SpectralField::cos_mode(k, 1, 1.0);
        let corpus = ProbeCorpus {
            seed: 0,
            bound: PI.sqrt(),
            pairs: vec![ProbePair {
                f: f.clone(),
                g: SpectralField::zeros(k),
            }],
            singles: vec![f],
        };
        let cal = calibrate(3.0, 2.6, h(), h(), &corpus).unwrap();
        assert_eq!(cal.a, 1.0);
    }

    #[test]
    fn rejects_probe_above_bound() {
        let k = 4;
        let corpus = ProbeCorpus {
            seed: 0,
            bound: 0.5,
            pairs: vec![ProbePair {
                f: SpectralField::cos_mode(k, 1, 1.0),
                g: SpectralField::zeros(k),
            }],
            singles: vec![],
        };
        assert!(calibrate(3.0, 2.6, h(), h(), &corpus).is_err());
    }

    #[test]
    fn constant_weight_family_matches_closed_form() {
        // f ≡ m, w = cos(nx): corr = -m n^{2s-1} π, ‖w‖² = π, ‖D^s w‖² = n^{2s} π.
        let s = 3.0;
        let bound = 1.0;
        let lam = lambda_coeff(s, h(), h());
        let mut need: f64 = 0.0;
        for m in [-1.0, 1.0].map(|sg| sg * bound / (2.0 * PI).sqrt()) {
            for n in 1..=16 {
                let n = n as f64;
                let corr = -m * n.powf(2.0 * s - 1.0) * PI;
                let lower = 0.5 * (PI + n.powf(2.0 * s) * PI);
                need = need.max((MARGIN * lower - n.powf(2.0 * s) * PI - lam * corr) / PI);
            }
        }
        let corpus = ProbeCorpus::calibration(5, 0, s, bound, 16);
        let cal = calibrate(s, 2.6, h(), h(), &corpus).unwrap();
        assert!(
            cal.a >= need && cal.a < 2.0 * need.max(0.5),
            "a = {}, need {need}",
            cal.a
        );
    }

    #[test]
    fn random_corpus_calibration_validates_on_fresh_samples() {
        let s = 3.0;
        let corpus = ProbeCorpus::calibration(11, 200, s, 1.0, 16);
        let cal = calibrate(s, 2.6, h(), h(), &corpus).unwrap();
        assert!(cal.is_consistent());
        let fresh = ProbeCorpus::random(12, 300, s, 1.0, 16);
        for (p, f) in fresh.pairs.iter().zip(&fresh.singles) {
            assert!(SandwichCheck::evaluate(&p.f, &p.g, &cal).pair);
            assert!(SandwichCheck::evaluate(&p.f, &p.g, &cal).tilde);
            assert!(SandwichCheck::evaluate(f, &SpectralField::zeros(16), &cal).single);
        }
    }
}
