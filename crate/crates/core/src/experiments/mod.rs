//! Scenario runners tying the solver, the energies and the mollifier
//! together. Every runner is deterministic given its inputs; sweeps run
//! their members in parallel and merge results in input order.

mod bona_smith;
mod conservation;
mod dependence;
mod difference;
mod gamma_sweep;
mod monitor;

pub use bona_smith::{run_bona_smith, BonaSmithConfig, BonaSmithReport, BonaSmithRow, RateFit};
pub use conservation::{
    run_conservation, run_conservation_refinement, ConservationReport, RefinementReport,
};
pub use dependence::{
    run_continuous_dependence, DependenceConfig, DependenceReport, DependenceRow,
};
pub use difference::{run_difference_energy, BudgetTerms, DifferenceReport};
pub use gamma_sweep::{run_gamma_sweep, GammaPair, GammaSweepReport};
pub use monitor::{run_energy_monitor, MonitorReport};

use serde::{Deserialize, Serialize};

use crate::dynamics::{EquationParams, TimeDirection, Trajectory, TrajectoryStatus};
use crate::energy::{
    derivative_loss_pairing, energy_pair, energy_single, energy_tilde, EnergyCalibration,
};
use crate::error::{Error, Result};
use crate::spectral::{hs, SpectralField};

/// One sampled time of an [`EnergyTrace`].
///
/// For a single run `l2`, `hs` and `pairing` describe `u`; for a pair run
/// they describe the difference `w = u₁ − u₂`, the energies are the pair
/// energies with `u₁` as weight, and `pairing` is `∫∂ₓu₁(HD^s∂ₓw)D^sw`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub l2: f64,
    pub hs: f64,
    pub es_total: f64,
    pub es_correction: f64,
    /// Only present for pair runs.
    pub etilde: Option<f64>,
    pub pairing: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub s: f64,
    pub records: Vec<EnergyRecord>,
}

impl EnergyTrace {
    pub fn single(traj: &Trajectory, cal: &EnergyCalibration) -> Result<Self> {
        let records = traj
            .times
            .iter()
            .zip(&traj.snapshots)
            .map(|(&t, u)| {
                let e = energy_single(u, cal)?;
                Ok(EnergyRecord {
                    t,
                    l2: u.norm(),
                    hs: hs(u, cal.s),
                    es_total: e.total,
                    es_correction: e.correction,
                    etilde: None,
                    pairing: derivative_loss_pairing(u, u, cal.s),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { s: cal.s, records })
    }

    pub fn pair(first: &Trajectory, second: &Trajectory, cal: &EnergyCalibration) -> Result<Self> {
        check_aligned(first, second)?;
        let records = first
            .times
            .iter()
            .zip(first.snapshots.iter().zip(&second.snapshots))
            .map(|(&t, (u1, u2))| {
                let w = u1 - u2;
                let e = energy_pair(u1, u2, cal)?;
                Ok(EnergyRecord {
                    t,
                    l2: w.norm(),
                    hs: hs(&w, cal.s),
                    es_total: e.total,
                    es_correction: e.correction,
                    etilde: Some(energy_tilde(u1, u2, cal).total),
                    pairing: derivative_loss_pairing(u1, &w, cal.s),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { s: cal.s, records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.records.iter().all(|r| {
            [
                r.t,
                r.l2,
                r.hs,
                r.es_total,
                r.es_correction,
                r.pairing,
                r.etilde.unwrap_or(0.0),
            ]
            .iter()
            .all(|v| v.is_finite())
        })
    }
}

/// Two trajectories sampled at the same times.
pub(crate) fn check_aligned(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.times != b.times {
        return Err(Error::param(
            "trajectories",
            "pair runs need identical sample times",
        ));
    }
    Ok(())
}

/// Runners integrate forward in time only.
pub(crate) fn require_forward(p: &EquationParams) -> Result<()> {
    if p.direction != TimeDirection::Forward {
        return Err(Error::param("direction", "experiments run forward in time"));
    }
    Ok(())
}

pub(crate) fn blowup_time(traj: &Trajectory) -> Option<f64> {
    match traj.status {
        TrajectoryStatus::BlowupDetected { time } => Some(time),
        TrajectoryStatus::Completed => None,
    }
}

/// Last sampled time before `‖u(t)‖²_{H^{s₀}}` first exceeds twice its
/// initial value. A stand-in for the existence time of the local theory,
/// which depends on constants that are not available.
pub fn safe_horizon(traj: &Trajectory, s0: f64) -> f64 {
    let Some(first) = traj.snapshots.first() else {
        return 0.0;
    };
    let limit = 2.0 * hs(first, s0).powi(2);
    let mut last = 0.0;
    for (&t, u) in traj.times.iter().zip(&traj.snapshots) {
        let n = hs(u, s0).powi(2);
        if !(n <= limit) {
            break;
        }
        last = t;
    }
    match blowup_time(traj) {
        Some(_) if traj.times.len() > 1 => last.min(traj.times[traj.times.len() - 2]),
        _ => last,
    }
}

/// `max_t ‖a(t) − b(t)‖_{H^r}` over aligned trajectories.
pub(crate) fn sup_distance(a: &Trajectory, b: &Trajectory, r: f64, until: f64) -> f64 {
    a.times
        .iter()
        .zip(a.snapshots.iter().zip(&b.snapshots))
        .filter(|(&t, _)| t <= until * (1.0 + 1e-12))
        .map(|(_, (x, y))| hs(&(x - y), r))
        .fold(0.0, f64::max)
}

/// Normalize `f` to unit `H^r` norm; the zero field stays zero.
pub(crate) fn normalized(f: &SpectralField, r: f64) -> SpectralField {
    let n = hs(f, r);
    if n > 0.0 {
        f.scale(1.0 / n)
    } else {
        f.clone()
    }
}
