use serde::{Deserialize, Serialize};

use super::{propagator, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{d_pow, SpectralField};

/// One `(t, γ, φ)` sample for the parabolic smoothing estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothingProbe {
    pub t: f64,
    pub gamma: f64,
    pub phi: SpectralField,
}

/// `sup_{y >= 0} y^α e^{−y^{5/2}} = (2α/(5e))^{2α/5}`, attained at `y^{5/2} = 2α/5`.
pub fn smoothing_envelope(alpha: f64) -> f64 {
    (2.0 * alpha / (5.0 * std::f64::consts::E)).powf(2.0 * alpha / 5.0)
}

/// `sup ‖D^α U_γ(t)φ‖ (γt)^{2α/5} / ‖φ‖` over the probes.
pub fn smoothing_constant(alpha: f64, probes: &[SmoothingProbe]) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param(
            "alpha",
            format!("must be finite and > 0, got {alpha}"),
        ));
    }
    let mut sup = 0.0f64;
    for probe in probes {
        if !(probe.t > 0.0) {
            return Err(Error::param(
                "t",
                format!("probe time must be > 0, got {}", probe.t),
            ));
        }
        let norm = probe.phi.norm();
        if norm == 0.0 {
            continue;
        }
        let p = EquationParams::new(0.0, 0.0, probe.gamma)?;
        let evolved = propagator(&probe.phi, probe.t, &p)?;
        let value =
            d_pow(&evolved, alpha).norm() * (probe.gamma * probe.t).powf(0.4 * alpha) / norm;
        sup = sup.max(value);
    }
    Ok(sup)
}
