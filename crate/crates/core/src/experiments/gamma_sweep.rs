use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{blowup_time, require_forward};
use crate::dynamics::{solve, EquationParams, SolverConfig, Trajectory};
use crate::energy::{energy_tilde, EnergyCalibration};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaPair {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub sup_l2: f64,
    /// `sup_l2 / max(γ_a, γ_b)`; zero when both vanish.
    pub normalized: f64,
    pub sup_etilde: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSweepReport {
    pub gammas: Vec<f64>,
    pub horizon: f64,
    /// Every pair `i < j`.
    pub pairs: Vec<GammaPair>,
    /// Normalized differences of neighbours `(γ_i, γ_{i+1})`.
    pub consecutive: Vec<f64>,
    /// `max / min` of `consecutive`; 1 for fewer than two entries.
    pub spread: f64,
    /// `(γ, time)` for members that crossed the blow-up threshold.
    pub blowups: Vec<(f64, f64)>,
}

fn compare(a: &Trajectory, b: &Trajectory, ga: f64, gb: f64, cal: &EnergyCalibration) -> GammaPair {
    let n = a.len().min(b.len());
    let mut sup_l2: f64 = 0.0;
    let mut sup_etilde: f64 = 0.0;
    for (u, v) in a.snapshots[..n].iter().zip(&b.snapshots[..n]) {
        sup_l2 = sup_l2.max((u - v).norm());
        sup_etilde = sup_etilde.max(energy_tilde(u, v, cal).total);
    }
    let top = ga.max(gb);
    GammaPair {
        gamma_a: ga,
        gamma_b: gb,
        sup_l2,
        normalized: if top > 0.0 { sup_l2 / top } else { 0.0 },
        sup_etilde,
    }
}

/// Solve from the same `φ` for each `γ` (non-increasing) and compare the
/// members pairwise.
pub fn run_gamma_sweep(
    phi: &SpectralField,
    gammas: &[f64],
    cal: &EnergyCalibration,
    p: &EquationParams,
    cfg: &SolverConfig,
) -> Result<GammaSweepReport> {
    require_forward(p)?;
    if gammas.is_empty() {
        return Err(Error::param("gammas", "need at least one value"));
    }
    if gammas.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::param("gammas", "values must be non-increasing"));
    }
    let runs: Vec<Trajectory> = gammas
        .par_iter()
        .map(|&g| solve(phi, &EquationParams { gamma: g, ..*p }, cfg))
        .collect::<Result<_>>()?;
    let index_pairs: Vec<(usize, usize)> = (0..gammas.len())
        .flat_map(|i| (i + 1..gammas.len()).map(move |j| (i, j)))
        .collect();
    let pairs: Vec<GammaPair> = index_pairs
        .par_iter()
        .map(|&(i, j)| compare(&runs[i], &runs[j], gammas[i], gammas[j], cal))
        .collect();
    let consecutive: Vec<f64> = (0..gammas.len().saturating_sub(1))
        .map(|i| {
            let offset: usize = (0..i).map(|r| gammas.len() - 1 - r).sum();
            pairs[offset].normalized
        })
        .collect();
    let spread = if consecutive.len() < 2 {
        1.0
    } else {
        crate::stats::spread(&consecutive)
    };
    Ok(GammaSweepReport {
        gammas: gammas.to_vec(),
        horizon: cfg.horizon,
        pairs,
        consecutive,
        spread,
        blowups: gammas
            .iter()
            .zip(&runs)
            .filter_map(|(&g, r)| blowup_time(r).map(|t| (g, t)))
            .collect(),
    })
}
