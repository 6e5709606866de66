use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::require_forward;
use crate::dynamics::{solve, EquationParams, SolverConfig, TrajectoryStatus};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub params: EquationParams,
    pub config: SolverConfig,
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    /// `max_t |‖u(t)‖ − ‖φ‖| / ‖φ‖`, zero for `φ = 0`.
    pub max_relative_drift: f64,
    pub status: TrajectoryStatus,
}

/// Track `‖u(t)‖`. The norm is conserved when `c₁ = c₂` and `γ = 0`;
/// other parameters are refused unless `allow_non_integrable` is set.
pub fn run_conservation(
    phi: &SpectralField,
    p: &EquationParams,
    cfg: &SolverConfig,
    allow_non_integrable: bool,
) -> Result<ConservationReport> {
    require_forward(p)?;
    if !allow_non_integrable && (p.c1 != p.c2 || p.gamma != 0.0) {
        return Err(Error::param(
            "c1, c2, gamma",
            format!(
                "L² is conserved only for c1 = c2 and gamma = 0 (got {}, {}, {})",
                p.c1, p.c2, p.gamma
            ),
        ));
    }
    let traj = solve(phi, p, cfg)?;
    let l2: Vec<f64> = traj.snapshots.iter().map(|u| u.norm()).collect();
    let n0 = l2[0];
    let max_relative_drift = if n0 > 0.0 {
        l2.iter().map(|n| ((n - n0) / n0).abs()).fold(0.0, f64::max)
    } else {
        l2.iter().copied().fold(0.0, f64::max)
    };
    Ok(ConservationReport {
        params: *p,
        config: *cfg,
        times: traj.times,
        l2,
        max_relative_drift,
        status: traj.status,
    })
}

/// Drift at `dt, dt/2, …` with sample times held fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub dts: Vec<f64>,
    pub drifts: Vec<f64>,
    /// `drifts[i] / drifts[i + 1]`.
    pub ratios: Vec<f64>,
    pub completed: bool,
}

pub fn run_conservation_refinement(
    phi: &SpectralField,
    p: &EquationParams,
    cfg: &SolverConfig,
    levels: usize,
    allow_non_integrable: bool,
) -> Result<RefinementReport> {
    if levels == 0 {
        return Err(Error::param("levels", "need at least one level"));
    }
    let runs: Vec<ConservationReport> = (0..levels)
        .into_par_iter()
        .map(|j| {
            let factor = 1usize << j;
            let c = SolverConfig {
                dt: cfg.dt / factor as f64,
                stride: cfg.stride * factor,
                ..*cfg
            };
            run_conservation(phi, p, &c, allow_non_integrable)
        })
        .collect::<Result<_>>()?;
    let drifts: Vec<f64> = runs.iter().map(|r| r.max_relative_drift).collect();
    Ok(RefinementReport {
        dts: runs.iter().map(|r| r.config.dt).collect(),
        ratios: drifts.windows(2).map(|w| w[0] / w[1]).collect(),
        drifts,
        completed: runs.iter().all(|r| r.status == TrajectoryStatus::Completed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(k: usize, amp: f64) -> SpectralField {
        let f = crate::random::power_law_field(k, 4.0, 0.0, 11);
        f.scale(amp / f.sup_norm(8))
    }

    #[test]
    fn zero_data_has_zero_drift() {
        let cfg = SolverConfig::new(16, 1e-3, 0.1).unwrap();
        let r = run_conservation(
            &SpectralField::zeros(16),
            &EquationParams::default(),
            &cfg,
            false,
        )
        .unwrap();
        assert_eq!(r.max_relative_drift, 0.0);
    }

    #[test]
    fn non_integrable_parameters_need_the_flag() {
        let cfg = SolverConfig::new(16, 1e-3, 0.1).unwrap();
        let p = EquationParams::new(0.5, 1.0, 0.0).unwrap();
        assert!(run_conservation(&data(16, 1.0), &p, &cfg, false).is_err());
        assert!(run_conservation(&data(16, 1.0), &p, &cfg, true).is_ok());
    }

    #[test]
    fn non_integrable_drift_stalls_at_a_floor() {
        let p = EquationParams::new(0.3, 1.2, 0.0).unwrap();
        let cfg = SolverConfig::new(32, 1e-3, 0.2).unwrap().with_stride(10);
        let r = run_conservation_refinement(&data(32, 2.0), &p, &cfg, 3, true).unwrap();
        assert!(r.completed);
        // the drift is a property of the flow, so refining dt leaves it put
        assert!(r.drifts[2] > 1e-4, "{r:?}");
        assert!(r.ratios.iter().all(|&q| (0.8..1.25).contains(&q)), "{r:?}");
    }

    #[test]
    fn integrable_drift_is_stepper_limited() {
        let cfg = SolverConfig::new(32, 2e-3, 0.2).unwrap().with_stride(10);
        let r =
            run_conservation_refinement(&data(32, 3.0), &EquationParams::default(), &cfg, 2, false)
                .unwrap();
        assert!(r.completed && r.ratios[0] >= 8.0, "{r:?}");
    }
}
