use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{mollify, sobolev_norm, MollifierSpec, SpectralField};
use crate::stats::loglog_slope;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonaSmithConfig {
    pub s: f64,
    pub alphas: Vec<f64>,
    /// Mollifier scales, each in `(0, 1)`.
    pub gammas: Vec<f64>,
}

impl BonaSmithConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::param("s", "must be finite"));
        }
        if self.alphas.is_empty() || self.gammas.len() < 2 {
            return Err(Error::param(
                "alphas, gammas",
                "need at least one alpha and two gammas",
            ));
        }
        for &a in &self.alphas {
            if !(a > 0.0) || self.s - a < -1.0 {
                return Err(Error::param(
                    "alphas",
                    format!("need alpha > 0 and s - alpha >= -1, got {a}"),
                ));
            }
        }
        for &g in &self.gammas {
            MollifierSpec::new(g)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonaSmithRow {
    pub gamma: f64,
    pub alpha: f64,
    /// `‖J_γφ − φ‖_{H^{s−α}}`.
    pub difference: f64,
    /// `‖J_γφ‖_{H^{s+α}}`.
    pub growth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub alpha: f64,
    /// Rows with a nonzero difference; slopes are NaN below two.
    pub points: usize,
    /// Slope of `log difference` against `log γ`; about `α` for data in `H^s`.
    pub difference_slope: f64,
    /// Slope of `log growth` against `log γ^{-α}`; at most about 1.
    pub growth_slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonaSmithReport {
    pub config: BonaSmithConfig,
    pub phi_hs: f64,
    pub rows: Vec<BonaSmithRow>,
    pub fits: Vec<RateFit>,
    /// `‖J_γφ‖_{H^r} <= ‖φ‖_{H^r}` for every `γ` and `r ∈ {s−α, s, s+α}`.
    pub monotone: bool,
}

/// Measure the mollifier rates `‖J_γφ − φ‖_{H^{s−α}} ≲ γ^α‖φ‖_{H^s}` and
/// `‖J_γφ‖_{H^{s+α}} ≲ γ^{-α}‖φ‖_{H^s}` on one field.
pub fn run_bona_smith(phi: &SpectralField, cfg: &BonaSmithConfig) -> Result<BonaSmithReport> {
    cfg.validate()?;
    let s = cfg.s;
    let mut rows = Vec::with_capacity(cfg.alphas.len() * cfg.gammas.len());
    let mut monotone = true;
    for &gamma in &cfg.gammas {
        let smooth = mollify(phi, &MollifierSpec::new(gamma)?);
        let diff = &smooth - phi;
        for &alpha in &cfg.alphas {
            for r in [s - alpha, s, s + alpha] {
                monotone &= sobolev_norm(&smooth, r)? <= sobolev_norm(phi, r)?;
            }
            rows.push(BonaSmithRow {
                gamma,
                alpha,
                difference: sobolev_norm(&diff, s - alpha)?,
                growth: sobolev_norm(&smooth, s + alpha)?,
            });
        }
    }
    let fits = cfg
        .alphas
        .iter()
        .map(|&alpha| {
            // γK <= 1 leaves the truncation unchanged, and log 0 has no slope
            let mine: Vec<&BonaSmithRow> = rows
                .iter()
                .filter(|r| r.alpha == alpha && r.difference > 0.0)
                .collect();
            let gammas: Vec<f64> = mine.iter().map(|r| r.gamma).collect();
            let inverse: Vec<f64> = gammas.iter().map(|g| g.powf(-alpha)).collect();
            let diffs: Vec<f64> = mine.iter().map(|r| r.difference).collect();
            let growth: Vec<f64> = mine.iter().map(|r| r.growth).collect();
            let slope = |x: &[f64], y: &[f64]| {
                if x.len() >= 2 {
                    loglog_slope(x, y)
                } else {
                    f64::NAN
                }
            };
            RateFit {
                alpha,
                points: mine.len(),
                difference_slope: slope(&gammas, &diffs),
                growth_slope: slope(&inverse, &growth),
            }
        })
        .collect();
    Ok(BonaSmithReport {
        config: cfg.clone(),
        phi_hs: sobolev_norm(phi, s)?,
        rows,
        fits,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(gammas: Vec<f64>) -> BonaSmithConfig {
        BonaSmithConfig {
            s: 3.0,
            alphas: vec![1.0, 2.0],
            gammas,
        }
    }

    #[test]
    fn band_limited_data_is_left_alone() {
        // ρ = 1 on [-1, 1], so γK <= 1 leaves every mode untouched
        let phi = crate::random::power_law_field(8, 2.0, 0.3, 1);
        let r = run_bona_smith(&phi, &config(vec![0.125, 0.0625])).unwrap();
        assert!(r.rows.iter().all(|row| row.difference == 0.0));
        assert!(r
            .fits
            .iter()
            .all(|f| f.points == 0 && f.difference_slope.is_nan()));
        assert!(r.monotone);
    }

    #[test]
    fn tail_sum_predicts_the_rate() {
        // independent oracle: with |ĉ(k)| = k^{-d} the squared difference is
        // Σ_k (1 − ρ(γk))² k^{2(s−α)−2d}, summed here term by term
        let (s, d, k_max) = (3.0, 3.51, 2048);
        let phi = crate::random::power_law_field(k_max, d, 0.0, 9);
        let gammas: Vec<f64> = (3..=7).map(|j| 0.5f64.powi(j)).collect();
        let r = run_bona_smith(&phi, &config(gammas.clone())).unwrap();
        for row in &r.rows {
            let spec = MollifierSpec::new(row.gamma).unwrap();
            let oracle: f64 = (1..=k_max)
                .map(|k| {
                    let k = k as f64;
                    (1.0 - spec.rho(row.gamma * k)).powi(2)
                        * k.powf(2.0 * (s - row.alpha) - 2.0 * d)
                })
                .sum();
            // ½(‖·‖² + ‖D^r ·‖²) with both ±k counted
            let expect = (oracle + oracle_l2(&spec, d, k_max)).sqrt();
            assert!(
                (row.difference - expect).abs() <= 1e-12 * expect,
                "{row:?} {expect}"
            );
        }
        assert!(r.monotone);
    }

    fn oracle_l2(spec: &MollifierSpec, d: f64, k_max: usize) -> f64 {
        (1..=k_max)
            .map(|k| (1.0 - spec.rho(spec.gamma() * k as f64)).powi(2) * (k as f64).powf(-2.0 * d))
            .sum()
    }

    #[test]
    fn critical_decay_slopes_sit_near_alpha() {
        let phi = crate::random::power_law_field(4096, 3.51, 0.0, 5);
        let gammas: Vec<f64> = (3..=8).map(|j| 0.5f64.powi(j)).collect();
        let r = run_bona_smith(&phi, &config(gammas)).unwrap();
        for fit in &r.fits {
            assert!(
                (fit.difference_slope - fit.alpha).abs() < 0.15 * fit.alpha,
                "{fit:?}"
            );
            assert!(fit.growth_slope < 1.05, "{fit:?}");
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let phi = SpectralField::zeros(4);
        assert!(run_bona_smith(&phi, &config(vec![0.1])).is_err());
        assert!(run_bona_smith(&phi, &config(vec![0.1, 1.0])).is_err());
        let deep = BonaSmithConfig {
            s: 0.5,
            alphas: vec![2.0],
            gammas: vec![0.1, 0.05],
        };
        assert!(run_bona_smith(&phi, &deep).is_err());
    }
}
