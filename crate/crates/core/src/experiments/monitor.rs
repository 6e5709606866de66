use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{require_forward, safe_horizon, EnergyTrace};
use crate::dynamics::{rhs, solve, EquationParams, SolverConfig, TrajectoryStatus};
use crate::energy::{energy_single_rate, uncorrected_rate, validate_indices, EnergyCalibration};
use crate::error::Result;
use crate::spectral::{hs, SpectralField};

/// Relative slack in the pointwise exponential bound, for roundoff only.
const GRONWALL_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub params: EquationParams,
    pub config: SolverConfig,
    pub trace: EnergyTrace,
    /// `dE_s/dt` along the flow at each sample.
    pub rates: Vec<f64>,
    /// `(dE_s/dt) / E_s`, zero where `E_s = 0`.
    pub ratios: Vec<f64>,
    /// `sup |ratio|`, the empirical growth constant.
    pub empirical_constant: f64,
    /// `max_t E_s(u(t)) / (E_s(φ) e^{Ct})` with `C` the empirical constant.
    pub gronwall_worst: f64,
    pub gronwall_holds: bool,
    /// `(d/dt ‖D^s u‖²) / ‖u‖²_{H^s}`, the rate without the correction.
    pub uncorrected_ratios: Vec<f64>,
    pub uncorrected_constant: f64,
    /// Largest gap between centered differences of the trace and the flow
    /// rates, relative to the largest rate. `None` with fewer than 3 samples.
    pub finite_difference_gap: Option<f64>,
    pub safe_horizon: f64,
    pub status: TrajectoryStatus,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Evolve `φ` and monitor the corrected energy `E_s(u(t); b)` against the
/// bare `‖D^s u‖²`. Rates are exact derivatives along the computed flow.
pub fn run_energy_monitor(
    phi: &SpectralField,
    cal: &EnergyCalibration,
    p: &EquationParams,
    cfg: &SolverConfig,
) -> Result<MonitorReport> {
    require_forward(p)?;
    validate_indices(cal.s, cal.s0)?;
    let traj = solve(phi, p, cfg)?;
    let trace = EnergyTrace::single(&traj, cal)?;
    let s = cal.s;
    let per_sample: Vec<(f64, f64)> = traj
        .snapshots
        .par_iter()
        .map(|u| {
            let du = rhs(u, p);
            (
                energy_single_rate(u, &du, cal),
                ratio(uncorrected_rate(u, &du, s), hs(u, s).powi(2)),
            )
        })
        .collect();
    let rates: Vec<f64> = per_sample.iter().map(|r| r.0).collect();
    let uncorrected_ratios: Vec<f64> = per_sample.iter().map(|r| r.1).collect();
    let ratios: Vec<f64> = rates
        .iter()
        .zip(&trace.records)
        .map(|(r, e)| ratio(*r, e.es_total))
        .collect();
    let sup_abs = |v: &[f64]| v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let empirical_constant = sup_abs(&ratios);

    let e0 = trace.records[0].es_total;
    let gronwall_worst = trace
        .records
        .iter()
        .map(|r| ratio(r.es_total, e0 * (empirical_constant * r.t).exp()))
        .fold(0.0, f64::max);

    let finite_difference_gap = (trace.len() >= 3).then(|| {
        let scale = sup_abs(&rates).max(f64::MIN_POSITIVE);
        trace
            .records
            .windows(3)
            .zip(&rates[1..])
            .map(|(w, rate)| {
                let fd = (w[2].es_total - w[0].es_total) / (w[2].t - w[0].t);
                (fd - rate).abs() / scale
            })
            .fold(0.0, f64::max)
    });

    Ok(MonitorReport {
        params: *p,
        config: *cfg,
        empirical_constant,
        gronwall_holds: gronwall_worst <= 1.0 + GRONWALL_SLACK,
        gronwall_worst,
        uncorrected_constant: sup_abs(&uncorrected_ratios),
        uncorrected_ratios,
        finite_difference_gap,
        safe_horizon: safe_horizon(&traj, cal.s0),
        status: traj.status,
        trace,
        rates,
        ratios,
    })
}
