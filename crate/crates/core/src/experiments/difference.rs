use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{blowup_time, require_forward, EnergyTrace};
use crate::dynamics::{rhs, solve, EquationParams, SolverConfig, Trajectory};
use crate::energy::{energy_pair_rate, energy_tilde_rate, validate_indices, EnergyCalibration};
use crate::error::Result;
use crate::spectral::{hs, SpectralField};

/// Relative slack in the pointwise exponential bound, for roundoff only.
const GRONWALL_SLACK: f64 = 1e-10;

/// Right-hand-side terms of the `E_s` difference estimate at one time,
/// with `w = u₁ − u₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetTerms {
    /// `‖w‖²_{H^s}`.
    pub difference: f64,
    /// `‖w‖²_{H^{s₀−1}} ‖u₂‖²_{H^{s+1}}`.
    pub first_loss: f64,
    /// `‖w‖²_{H^{s₀−2}} ‖u₂‖²_{H^{s+2}}`.
    pub second_loss: f64,
}

impl BudgetTerms {
    pub fn total(&self) -> f64 {
        self.difference + self.first_loss + self.second_loss
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceReport {
    pub params: EquationParams,
    pub config: SolverConfig,
    /// Pair trace with `u₁` (from `φ`) as the energy weight.
    pub trace: EnergyTrace,
    pub tilde_rates: Vec<f64>,
    /// `sup |dẼ/dt| / Ẽ` over samples with `Ẽ > 0`.
    pub tilde_constant: f64,
    /// `max_t Ẽ(t) / (Ẽ(0) e^{Ct})` with `C` the tilde constant.
    pub tilde_gronwall_worst: f64,
    pub tilde_gronwall_holds: bool,
    pub pair_rates: Vec<f64>,
    pub budget: Vec<BudgetTerms>,
    /// `sup |dE_s/dt| / budget total` over samples with a nonzero budget.
    pub budget_constant: f64,
    /// First blow-up time among the two runs; the trace stops before it.
    pub blowup: Option<f64>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// The shared prefix of two runs with the same sample times.
fn common_prefix(a: &Trajectory, b: &Trajectory) -> (Trajectory, Trajectory) {
    let n = a.len().min(b.len());
    let cut = |t: &Trajectory| Trajectory {
        times: t.times[..n].to_vec(),
        snapshots: t.snapshots[..n].to_vec(),
        ..t.clone()
    };
    (cut(a), cut(b))
}

/// Evolve `φ` and `ψ` with the same parameters and follow the difference
/// energies `Ẽ(u₁, u₂)` and `E_s(u₁, u₂)` with their rates along the flow.
pub fn run_difference_energy(
    phi: &SpectralField,
    psi: &SpectralField,
    cal: &EnergyCalibration,
    p: &EquationParams,
    cfg: &SolverConfig,
) -> Result<DifferenceReport> {
    require_forward(p)?;
    validate_indices(cal.s, cal.s0)?;
    let (first, second) = rayon::join(|| solve(phi, p, cfg), || solve(psi, p, cfg));
    let (first, second) = (first?, second?);
    let blowup = match (blowup_time(&first), blowup_time(&second)) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let (first, second) = common_prefix(&first, &second);
    let trace = EnergyTrace::pair(&first, &second, cal)?;
    let (s, s0) = (cal.s, cal.s0);

    let per_sample: Vec<(f64, f64, BudgetTerms)> = first
        .snapshots
        .par_iter()
        .zip(&second.snapshots)
        .map(|(u1, u2)| {
            let (d1, d2) = (rhs(u1, p), rhs(u2, p));
            let w = u1 - u2;
            let budget = BudgetTerms {
                difference: hs(&w, s).powi(2),
                first_loss: hs(&w, s0 - 1.0).powi(2) * hs(u2, s + 1.0).powi(2),
                second_loss: hs(&w, s0 - 2.0).powi(2) * hs(u2, s + 2.0).powi(2),
            };
            (
                energy_tilde_rate(u1, u2, &d1, &d2, cal),
                energy_pair_rate(u1, u2, &d1, &d2, cal),
                budget,
            )
        })
        .collect();
    let tilde_rates: Vec<f64> = per_sample.iter().map(|x| x.0).collect();
    let pair_rates: Vec<f64> = per_sample.iter().map(|x| x.1).collect();
    let budget: Vec<BudgetTerms> = per_sample.iter().map(|x| x.2).collect();

    let tilde: Vec<f64> = trace
        .records
        .iter()
        .map(|r| r.etilde.unwrap_or(0.0))
        .collect();
    let tilde_constant = tilde_rates
        .iter()
        .zip(&tilde)
        .map(|(r, e)| ratio(r.abs(), *e))
        .fold(0.0, f64::max);
    let tilde_gronwall_worst = trace
        .records
        .iter()
        .zip(&tilde)
        .map(|(r, e)| ratio(*e, tilde[0] * (tilde_constant * r.t).exp()))
        .fold(0.0, f64::max);
    let budget_constant = pair_rates
        .iter()
        .zip(&budget)
        .map(|(r, b)| ratio(r.abs(), b.total()))
        .fold(0.0, f64::max);

    Ok(DifferenceReport {
        params: *p,
        config: *cfg,
        trace,
        tilde_rates,
        tilde_constant,
        tilde_gronwall_holds: tilde_gronwall_worst <= 1.0 + GRONWALL_SLACK,
        tilde_gronwall_worst,
        pair_rates,
        budget,
        budget_constant,
        blowup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{mollify, MollifierSpec};

    fn cal() -> EnergyCalibration {
        let h = 3f64.sqrt() / 2.0;
        EnergyCalibration::with_constants(3.0, 2.6, h, h, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    fn phi(k: usize) -> SpectralField {
        let f = crate::random::power_law_field(k, 4.0, 0.0, 21);
        f.scale(1.0 / hs(&f, 2.6))
    }

    #[test]
    fn identical_data_give_zero_differences() {
        let cfg = SolverConfig::new(16, 1e-3, 0.02).unwrap().with_stride(5);
        let r = run_difference_energy(&phi(16), &phi(16), &cal(), &EquationParams::default(), &cfg)
            .unwrap();
        assert!(r
            .trace
            .records
            .iter()
            .all(|e| e.l2 == 0.0 && e.etilde == Some(0.0)));
        assert!(r.tilde_rates.iter().chain(&r.pair_rates).all(|&x| x == 0.0));
        assert_eq!(r.tilde_constant, 0.0);
    }

    #[test]
    fn mollified_partner_has_finite_budget_and_gronwall_holds() {
        let k = 64;
        let f = phi(k);
        let g = mollify(&f, &MollifierSpec::new(1.0 / 16.0).unwrap());
        let cfg = SolverConfig::new(k, 1e-4, 0.02).unwrap().with_stride(10);
        let r = run_difference_energy(&f, &g, &cal(), &EquationParams::default(), &cfg).unwrap();
        assert!(r.blowup.is_none());
        assert!(r
            .budget
            .iter()
            .all(|b| b.total().is_finite() && b.total() > 0.0));
        assert!(r.tilde_constant.is_finite() && r.budget_constant.is_finite());
        assert!(r.tilde_gronwall_holds, "{}", r.tilde_gronwall_worst);
    }

    #[test]
    fn swapping_the_data_keeps_difference_norms() {
        let k = 32;
        let f = phi(k);
        let g = f.axpy(0.05, &crate::random::power_law_field(k, 5.0, 0.0, 8));
        let cfg = SolverConfig::new(k, 1e-4, 0.01).unwrap().with_stride(10);
        let p = EquationParams::default();
        let a = run_difference_energy(&f, &g, &cal(), &p, &cfg).unwrap();
        let b = run_difference_energy(&g, &f, &cal(), &p, &cfg).unwrap();
        for (x, y) in a.trace.records.iter().zip(&b.trace.records) {
            assert_eq!((x.l2, x.hs), (y.l2, y.hs));
        }
    }
}
