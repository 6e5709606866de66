//! Fourth-order exponential integrators around the diagonal linear part.

use num_complex::Complex64;

use super::nonlinear::Nonlinearity;
use super::{linear_symbol, EquationParams, Stepper};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const CONTOUR_POINTS: usize = 32;

/// ETDRK4 weights from contour means, free of cancellation for small `Lh`.
struct EtdWeights {
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl EtdWeights {
    fn new(lh: &[Complex64], dt: f64) -> Self {
        let roots: Vec<Complex64> = (0..CONTOUR_POINTS)
            .map(|j| {
                let theta = std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
                Complex64::from_polar(1.0, 2.0 * theta)
            })
            .collect();
        let mean = |z: Complex64, f: &dyn Fn(Complex64) -> Complex64| {
            roots.iter().map(|r| f(z + r)).sum::<Complex64>() * (dt / CONTOUR_POINTS as f64)
        };
        let mut w = Self {
            q: Vec::with_capacity(lh.len()),
            f1: Vec::with_capacity(lh.len()),
            f2: Vec::with_capacity(lh.len()),
            f3: Vec::with_capacity(lh.len()),
        };
        for &z in lh {
            w.q.push(mean(z, &|r| ((r / 2.0).exp() - 1.0) / r));
            w.f1.push(mean(z, &|r| {
                (-4.0 - r + r.exp() * (4.0 - 3.0 * r + r * r)) / (r * r * r)
            }));
            w.f2.push(mean(z, &|r| (2.0 + r + r.exp() * (r - 2.0)) / (r * r * r)));
            w.f3.push(mean(z, &|r| {
                (-4.0 - 3.0 * r - r * r + r.exp() * (4.0 - r)) / (r * r * r)
            }));
        }
        w
    }
}

/// Fixed-step exponential integrator for one `(K, dt, params)` triple.
pub struct Integrator {
    kind: Stepper,
    dt: f64,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    etd: Option<EtdWeights>,
    nl: Nonlinearity,
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl Integrator {
    /// `kind` must be a one-step method; Picard iteration is not a stepper.
    pub fn new(max_mode: usize, dt: f64, p: &EquationParams, kind: Stepper) -> Result<Self> {
        p.validate()?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param(
                "dt",
                format!("must be finite and > 0, got {dt}"),
            ));
        }
        if kind == Stepper::Picard {
            return Err(Error::param(
                "stepper",
                "Picard iteration has no single-step form",
            ));
        }
        let lh: Vec<Complex64> = (0..=max_mode).map(|k| linear_symbol(k, p) * dt).collect();
        let m = max_mode + 1;
        Ok(Self {
            kind,
            dt,
            full: lh.iter().map(|z| z.exp()).collect(),
            half: lh.iter().map(|z| (z / 2.0).exp()).collect(),
            etd: (kind == Stepper::Etdrk4).then(|| EtdWeights::new(&lh, dt)),
            nl: Nonlinearity::new(max_mode, p),
            k1: vec![ZERO; m],
            k2: vec![ZERO; m],
            k3: vec![ZERO; m],
            k4: vec![ZERO; m],
            a: vec![ZERO; m],
            b: vec![ZERO; m],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance `u` by one step in place.
    pub fn advance(&mut self, u: &mut [Complex64]) -> Result<()> {
        match self.kind {
            Stepper::Etdrk4 => self.etdrk4(u),
            _ => self.ifrk4(u),
        }
        u[0].im = 0.0;
        if u.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite {
                what: format!("solution after a step of size {}", self.dt),
            })
        }
    }

    // stage updates walk several parallel arrays by mode index
    #[allow(clippy::needless_range_loop)]
    fn ifrk4(&mut self, u: &mut [Complex64]) {
        let h = self.dt;
        self.nl.eval(u, &mut self.k1);
        for i in 0..u.len() {
            self.a[i] = self.half[i] * (u[i] + 0.5 * h * self.k1[i]);
        }
        self.nl.eval(&self.a, &mut self.k2);
        for i in 0..u.len() {
            self.a[i] = self.half[i] * u[i] + 0.5 * h * self.k2[i];
        }
        self.nl.eval(&self.a, &mut self.k3);
        for i in 0..u.len() {
            self.a[i] = self.full[i] * u[i] + h * self.half[i] * self.k3[i];
        }
        self.nl.eval(&self.a, &mut self.k4);
        for i in 0..u.len() {
            u[i] = self.full[i] * u[i]
                + h / 6.0
                    * (self.full[i] * self.k1[i]
                        + 2.0 * self.half[i] * (self.k2[i] + self.k3[i])
                        + self.k4[i]);
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn etdrk4(&mut self, u: &mut [Complex64]) {
        let w = self.etd.as_ref().expect("ETDRK4 weights");
        self.nl.eval(u, &mut self.k1);
        for i in 0..u.len() {
            self.a[i] = self.half[i] * u[i] + w.q[i] * self.k1[i];
        }
        self.nl.eval(&self.a, &mut self.k2);
        for i in 0..u.len() {
            self.b[i] = self.half[i] * u[i] + w.q[i] * self.k2[i];
        }
        self.nl.eval(&self.b, &mut self.k3);
        for i in 0..u.len() {
            self.a[i] = self.half[i] * self.a[i] + w.q[i] * (2.0 * self.k3[i] - self.k1[i]);
        }
        self.nl.eval(&self.a, &mut self.k4);
        for i in 0..u.len() {
            u[i] = self.full[i] * u[i]
                + w.f1[i] * self.k1[i]
                + 2.0 * w.f2[i] * (self.k2[i] + self.k3[i])
                + w.f3[i] * self.k4[i];
        }
    }
}
