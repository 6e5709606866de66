use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{blowup_time, normalized, require_forward, safe_horizon, sup_distance};
use crate::dynamics::{solve, EquationParams, SolverConfig, Trajectory};
use crate::energy::validate_indices;
use crate::error::{Error, Result};
use crate::spectral::{hs, mollify, MollifierSpec, SpectralField};
use crate::stats::loglog_slope;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceConfig {
    pub s: f64,
    pub s0: f64,
    /// Perturbation sizes, non-increasing and non-negative.
    pub deltas: Vec<f64>,
    /// Mollifier scale applied to `φ`.
    pub gamma_u: f64,
    /// Mollifier scale applied to `ψ`.
    pub gamma_v: f64,
    /// Seed of the perturbation direction.
    pub seed: u64,
    /// Existence-time stand-in; measured from the `φ` run when `None`.
    pub safe_horizon: Option<f64>,
}

impl DependenceConfig {
    pub fn validate(&self) -> Result<()> {
        validate_indices(self.s, self.s0)?;
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::param(
                "deltas",
                "need at least one finite delta >= 0",
            ));
        }
        if self.deltas.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param("deltas", "values must be non-increasing"));
        }
        MollifierSpec::new(self.gamma_u)?;
        MollifierSpec::new(self.gamma_v)?;
        if let Some(t) = self.safe_horizon {
            if !(t > 0.0) {
                return Err(Error::param(
                    "safe_horizon",
                    format!("must be positive, got {t}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceRow {
    pub delta: f64,
    /// `sup_{t ≤ T/2} ‖u − v‖_{H^s}`.
    pub sup_difference: f64,
    /// `sup ‖u − u^{γ_u}‖`, `sup ‖u^{γ_u} − v^{γ_v}‖`, `sup ‖v^{γ_v} − v‖`
    /// in `H^s` over `t ≤ T/2`, where `u^γ` starts from `J_γ` of the data.
    pub legs: [f64; 3],
    /// `‖J_{γ_v}ψ − ψ‖_{H^s}`, the initial size of the last leg.
    pub initial_v_leg: f64,
    /// `legs[2] / initial_v_leg`; zero when the initial leg vanishes.
    pub v_leg_ratio: f64,
    pub blowup: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub config: DependenceConfig,
    pub half_horizon: f64,
    /// `‖J_{γ_u}φ − φ‖_{H^s}`, the initial size of the first leg.
    pub initial_u_leg: f64,
    /// `legs[0] / initial_u_leg`, shared by every row.
    pub u_leg_ratio: f64,
    pub rows: Vec<DependenceRow>,
    /// `sup_difference` is non-increasing along the ladder.
    pub monotone: bool,
    /// Log-log slope of `sup_difference` against `δ` over rows with `δ > 0`;
    /// `None` with fewer than two such rows.
    pub slope: Option<f64>,
    /// `1 + 1/s − s₀/s` and `1 + 2/s − s₀/s`, reported for comparison.
    pub exponents: [f64; 2],
    pub blowup: Option<f64>,
}

fn first_blowup(runs: &[&Trajectory]) -> Option<f64> {
    runs.iter().filter_map(|t| blowup_time(t)).reduce(f64::min)
}

/// Perturb `φ` along a fixed random `H^s` direction for each `δ` and follow
/// `‖u − v‖_{H^s}` up to half the safe horizon, together with the three legs
/// of the path through mollified data.
pub fn run_continuous_dependence(
    phi: &SpectralField,
    dep: &DependenceConfig,
    p: &EquationParams,
    cfg: &SolverConfig,
) -> Result<DependenceReport> {
    require_forward(p)?;
    dep.validate()?;
    let (s, s0) = (dep.s, dep.s0);
    let k = cfg.max_mode;
    let phi = phi.resized(k);
    let direction = normalized(
        &crate::random::power_law_field(k, s + 2.0, 0.0, dep.seed),
        s,
    );
    let (j_u, j_v) = (
        MollifierSpec::new(dep.gamma_u)?,
        MollifierSpec::new(dep.gamma_v)?,
    );

    let smooth_phi = mollify(&phi, &j_u);
    let (u, u_smooth) = rayon::join(|| solve(&phi, p, cfg), || solve(&smooth_phi, p, cfg));
    let (u, u_smooth) = (u?, u_smooth?);
    let horizon = dep
        .safe_horizon
        .unwrap_or_else(|| safe_horizon(&u, s0))
        .min(cfg.horizon);
    let half = 0.5 * horizon;
    let initial_u_leg = hs(&(&smooth_phi - &phi), s);
    let leg_u = sup_distance(&u, &u_smooth, s, half);

    let rows: Vec<DependenceRow> = dep
        .deltas
        .par_iter()
        .map(|&delta| {
            let psi = phi.axpy(delta, &direction);
            let smooth_psi = mollify(&psi, &j_v);
            let (v, v_smooth) = rayon::join(|| solve(&psi, p, cfg), || solve(&smooth_psi, p, cfg));
            let (v, v_smooth) = (v?, v_smooth?);
            let initial_v_leg = hs(&(&smooth_psi - &psi), s);
            let legs = [
                leg_u,
                sup_distance(&u_smooth, &v_smooth, s, half),
                sup_distance(&v_smooth, &v, s, half),
            ];
            Ok(DependenceRow {
                delta,
                sup_difference: sup_distance(&u, &v, s, half),
                legs,
                initial_v_leg,
                v_leg_ratio: if initial_v_leg > 0.0 {
                    legs[2] / initial_v_leg
                } else {
                    0.0
                },
                blowup: first_blowup(&[&v, &v_smooth]),
            })
        })
        .collect::<Result<_>>()?;

    let positive: Vec<&DependenceRow> = rows.iter().filter(|r| r.delta > 0.0).collect();
    let slope = (positive.len() >= 2).then(|| {
        let d: Vec<f64> = positive.iter().map(|r| r.delta).collect();
        let y: Vec<f64> = positive.iter().map(|r| r.sup_difference).collect();
        loglog_slope(&d, &y)
    });
    let blowup = rows
        .iter()
        .filter_map(|r| r.blowup)
        .chain(first_blowup(&[&u, &u_smooth]))
        .reduce(f64::min);
    Ok(DependenceReport {
        config: dep.clone(),
        half_horizon: half,
        initial_u_leg,
        u_leg_ratio: if initial_u_leg > 0.0 {
            leg_u / initial_u_leg
        } else {
            0.0
        },
        monotone: rows
            .windows(2)
            .all(|w| w[1].sup_difference <= w[0].sup_difference),
        slope,
        exponents: [1.0 + 1.0 / s - s0 / s, 1.0 + 2.0 / s - s0 / s],
        blowup,
        rows,
    })
}
