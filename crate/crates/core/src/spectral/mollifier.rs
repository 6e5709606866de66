use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the cutoff `ρ`: equal to 1 on `[-1, 1]`, 0 outside `[-2, 2]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpProfile {
    /// `ρ(x) = ψ(2-|x|) / (ψ(2-|x|) + ψ(|x|-1))` on `1 < |x| < 2`,
    /// `ψ(t) = exp(-1/t)` for `t > 0`. C∞ and monotone on the band.
    #[default]
    SmoothStep,
}

/// Parameters of the Bona-Smith mollifier `J_γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    gamma: f64,
    profile: BumpProfile,
}

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

impl MollifierSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        Self::with_profile(gamma, BumpProfile::default())
    }

    pub fn with_profile(gamma: f64, profile: BumpProfile) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::param(
                "gamma",
                format!("mollifier scale must lie in (0,1), got {gamma}"),
            ));
        }
        Ok(Self { gamma, profile })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn profile(&self) -> BumpProfile {
        self.profile
    }

    pub fn rho(&self, x: f64) -> f64 {
        let a = x.abs();
        if a <= 1.0 {
            return 1.0;
        }
        if a >= 2.0 {
            return 0.0;
        }
        match self.profile {
            BumpProfile::SmoothStep => {
                let up = psi(2.0 - a);
                up / (up + psi(a - 1.0))
            }
        }
    }
}
