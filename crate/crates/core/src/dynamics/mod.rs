//! Regularized evolution
//!
//! ```text
//! ∂ₜu = ∂ₓ³u − u²∂ₓu − c₁∂ₓ(uH∂ₓu) − c₂H∂ₓ(u∂ₓu) − γD^{5/2}u
//! ```
//!
//! The linear part is diagonal in Fourier space and handled exactly by the
//! propagator `exp((−ik³ − γ|k|^{5/2})t)`. Backward runs flip the sign of
//! the dissipative term so that they march forward in elapsed time `τ = −t`
//! with a damped linear part; trajectories always store elapsed time.

mod integrator;
mod nonlinear;
mod picard;
mod smoothing;

pub use integrator::Integrator;
pub use picard::{picard_solve, PicardSolution};
pub use smoothing::{smoothing_constant, smoothing_envelope, SmoothingProbe};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{d_pow, dx, SpectralField};
use nonlinear::Nonlinearity;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeDirection {
    #[default]
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationParams {
    pub c1: f64,
    pub c2: f64,
    /// Regularization strength, in `[0, 1)`.
    pub gamma: f64,
    pub direction: TimeDirection,
    /// When false, every nonlinear term is dropped and the flow is linear.
    pub nonlinear: bool,
}

impl Default for EquationParams {
    fn default() -> Self {
        let h = 3f64.sqrt() / 2.0;
        Self {
            c1: h,
            c2: h,
            gamma: 0.0,
            direction: TimeDirection::Forward,
            nonlinear: true,
        }
    }
}

impl EquationParams {
    pub fn new(c1: f64, c2: f64, gamma: f64) -> Result<Self> {
        let p = Self {
            c1,
            c2,
            gamma,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_direction(mut self, direction: TimeDirection) -> Self {
        self.direction = direction;
        self
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2)] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::param(
                "gamma",
                format!("must lie in [0,1), got {}", self.gamma),
            ));
        }
        Ok(())
    }
}

/// Symbol of the linear part of `du/dτ` at mode `k >= 0`.
pub(crate) fn linear_symbol(k: usize, p: &EquationParams) -> Complex64 {
    let kf = k as f64;
    let dispersion = kf * kf * kf;
    let damping = -p.gamma * kf.powf(2.5);
    match p.direction {
        TimeDirection::Forward => Complex64::new(damping, -dispersion),
        TimeDirection::Backward => Complex64::new(damping, dispersion),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stepper {
    /// Integrating-factor RK4 (Lawson). Unstable at high resolution once
    /// the phases `k³·dt` of interacting modes resonate.
    Ifrk4,
    /// Exponential time differencing RK4 (Cox-Matthews).
    #[default]
    Etdrk4,
    /// Picard iteration of the Duhamel formula on the whole horizon.
    Picard,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_mode: usize,
    pub dt: f64,
    pub horizon: f64,
    pub stepper: Stepper,
    /// `H²` norm beyond which a run is declared to have blown up.
    pub blowup_threshold: f64,
    /// Keep every `stride`-th step (the final state is always kept).
    pub stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_mode: 128,
            dt: 1e-4,
            horizon: 1.0,
            stepper: Stepper::Etdrk4,
            blowup_threshold: 1e6,
            stride: 100,
        }
    }
}

impl SolverConfig {
    pub fn new(max_mode: usize, dt: f64, horizon: f64) -> Result<Self> {
        let cfg = Self {
            max_mode,
            dt,
            horizon,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stepper(mut self, stepper: Stepper) -> Self {
        self.stepper = stepper;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_mode < 4 {
            return Err(Error::param(
                "max_mode",
                format!("must be >= 4, got {}", self.max_mode),
            ));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param(
                "dt",
                format!("must be finite and > 0, got {}", self.dt),
            ));
        }
        if !(self.horizon >= self.dt) || !self.horizon.is_finite() {
            return Err(Error::param(
                "horizon",
                format!(
                    "must be finite and >= dt = {}, got {}",
                    self.dt, self.horizon
                ),
            ));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::param("blowup_threshold", "must be > 0"));
        }
        if self.stride == 0 {
            return Err(Error::param("stride", "must be >= 1"));
        }
        Ok(())
    }

    /// Number of steps and the length of the last one, which absorbs any
    /// remainder of `horizon / dt`.
    pub fn step_plan(&self) -> (usize, f64) {
        let ratio = self.horizon / self.dt;
        let rounded = ratio.round();
        if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
            (rounded as usize, self.dt)
        } else {
            let n = ratio.ceil() as usize;
            (n, self.horizon - (n - 1) as f64 * self.dt)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TrajectoryStatus {
    Completed,
    /// The `H²` norm exceeded the threshold (or stopped being finite) at
    /// this elapsed time; a numerical surrogate for the maximal time.
    BlowupDetected {
        time: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub params: EquationParams,
    pub dt: f64,
    /// Elapsed times, strictly increasing from 0.
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &SpectralField {
        self.snapshots
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory holds the initial time")
    }

    pub fn completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }
}

/// `‖u‖_{H²}` straight from coefficients.
pub(crate) fn h2_norm(coeffs: &[Complex64]) -> f64 {
    let tail: f64 = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| (1.0 + (k as f64).powi(4)) * c.norm_sqr())
        .sum();
    (0.5 * (coeffs[0].norm_sqr() + 2.0 * tail)).sqrt()
}

/// Physical `∂ₜu`, with alias-free truncated products.
pub fn rhs(u: &SpectralField, p: &EquationParams) -> SpectralField {
    let march = march_derivative(u, p);
    match p.direction {
        TimeDirection::Forward => march,
        TimeDirection::Backward => -&march,
    }
}

/// `du/dτ` in elapsed time; equals [`rhs`] for forward runs.
pub fn march_derivative(u: &SpectralField, p: &EquationParams) -> SpectralField {
    let mut out = vec![Complex64::new(0.0, 0.0); u.max_mode() + 1];
    Nonlinearity::new(u.max_mode(), p).eval(u.coeffs(), &mut out);
    let nl = SpectralField::from_coeffs_unchecked(out);
    let lin = u.map_modes(|k| linear_symbol(k, p));
    &lin + &nl
}

/// Nonlinear part of the physical `∂ₜu`.
pub fn nonlinear_term(u: &SpectralField, p: &EquationParams) -> SpectralField {
    let q = EquationParams {
        gamma: 0.0,
        direction: TimeDirection::Forward,
        ..*p
    };
    &rhs(u, &q) - &dx(u, 3)
}

/// `γD^{5/2}u`.
pub fn dissipation(u: &SpectralField, gamma: f64) -> SpectralField {
    d_pow(u, 2.5).scale(gamma)
}

/// Exact linear evolution over elapsed time `t`.
pub fn propagator(phi: &SpectralField, t: f64, p: &EquationParams) -> Result<SpectralField> {
    p.validate()?;
    if !t.is_finite() || (t < 0.0 && p.gamma > 0.0) {
        return Err(Error::param(
            "t",
            format!("dissipative propagator needs finite t >= 0, got {t}"),
        ));
    }
    Ok(phi.map_modes(|k| (linear_symbol(k, p) * t).exp()))
}

/// One step of size `dt` with the configured one-step method.
pub fn step(
    u: &SpectralField,
    dt: f64,
    p: &EquationParams,
    stepper: Stepper,
) -> Result<SpectralField> {
    let mut state = u.coeffs().to_vec();
    Integrator::new(u.max_mode(), dt, p, stepper)?.advance(&mut state)?;
    Ok(SpectralField::from_coeffs_unchecked(state))
}

/// March `phi` to the horizon, stopping early at blow-up.
pub fn solve(phi: &SpectralField, p: &EquationParams, cfg: &SolverConfig) -> Result<Trajectory> {
    p.validate()?;
    cfg.validate()?;
    if cfg.stepper == Stepper::Picard {
        return picard_solve(phi, p, cfg).map(|s| s.trajectory);
    }
    let phi = phi.resized(cfg.max_mode);
    let (steps, last_dt) = cfg.step_plan();
    let mut main = Integrator::new(cfg.max_mode, cfg.dt, p, cfg.stepper)?;
    let mut tail = if last_dt != cfg.dt {
        Some(Integrator::new(cfg.max_mode, last_dt, p, cfg.stepper)?)
    } else {
        None
    };
    let mut traj = Trajectory {
        params: *p,
        dt: cfg.dt,
        times: vec![0.0],
        snapshots: vec![phi.clone()],
        status: TrajectoryStatus::Completed,
    };
    let mut state = phi.coeffs().to_vec();
    for i in 1..=steps {
        let (stepper, t) = match (&mut tail, i == steps) {
            (Some(last), true) => (last, cfg.horizon),
            _ => (
                &mut main,
                if i == steps {
                    cfg.horizon
                } else {
                    i as f64 * cfg.dt
                },
            ),
        };
        let finite = stepper.advance(&mut state).is_ok();
        let h2 = h2_norm(&state);
        if !finite || !(h2 <= cfg.blowup_threshold) {
            if finite {
                traj.times.push(t);
                traj.snapshots
                    .push(SpectralField::from_coeffs_unchecked(state.clone()));
            }
            traj.status = TrajectoryStatus::BlowupDetected { time: t };
            break;
        }
        if i % cfg.stride == 0 || i == steps {
            traj.times.push(t);
            traj.snapshots
                .push(SpectralField::from_coeffs_unchecked(state.clone()));
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests;
