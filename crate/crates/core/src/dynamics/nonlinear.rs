use num_complex::Complex64;

use super::{EquationParams, TimeDirection};
use crate::spectral::transform::{fft_size, GridTransform};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Evaluates the quadratic and cubic terms on one zero-padded grid.
///
/// With `n >= 4K + 1` grid points the projections of `u³`, `u²` and `u·Du`
/// onto `|k| <= K` are alias-free, so the result is the exact truncation of
/// the continuous nonlinearity. The sign follows the marching direction:
/// the output is the nonlinear part of `du/dτ` in elapsed time `τ`.
pub(crate) struct Nonlinearity {
    max_mode: usize,
    c1: f64,
    c2: f64,
    sign: f64,
    enabled: bool,
    grid: GridTransform,
    u: Vec<f64>,
    du: Vec<f64>,
    prod: Vec<f64>,
    spec: Vec<Complex64>,
    cube: Vec<Complex64>,
    square: Vec<Complex64>,
    mixed: Vec<Complex64>,
}

impl Nonlinearity {
    pub(crate) fn new(max_mode: usize, p: &EquationParams) -> Self {
        let n = fft_size(4 * max_mode + 1);
        let m = max_mode + 1;
        Self {
            max_mode,
            c1: p.c1,
            c2: p.c2,
            sign: match p.direction {
                TimeDirection::Forward => -1.0,
                TimeDirection::Backward => 1.0,
            },
            enabled: p.nonlinear,
            grid: GridTransform::new(n),
            u: vec![0.0; n],
            du: vec![0.0; n],
            prod: vec![0.0; n],
            spec: vec![ZERO; m],
            cube: vec![ZERO; m],
            square: vec![ZERO; m],
            mixed: vec![ZERO; m],
        }
    }

    /// `out = ∓(u²∂ₓu + c₁∂ₓ(uH∂ₓu) + c₂H∂ₓ(u∂ₓu))`, written through
    /// `u²∂ₓu = ∂ₓ(u³)/3` and `u∂ₓu = ∂ₓ(u²)/2` so the mean is untouched.
    pub(crate) fn eval(&mut self, u: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(u.len(), self.max_mode + 1);
        if !self.enabled {
            out.iter_mut().for_each(|c| *c = ZERO);
            return;
        }
        self.grid.synthesize_into(u, &mut self.u);
        for (k, (s, c)) in self.spec.iter_mut().zip(u).enumerate() {
            *s = c * k as f64;
        }
        self.grid.synthesize_into(&self.spec, &mut self.du);

        for (p, &x) in self.prod.iter_mut().zip(&self.u) {
            *p = x * x * x;
        }
        self.grid.analyze_into(&self.prod, &mut self.cube);
        for (p, &x) in self.prod.iter_mut().zip(&self.u) {
            *p = x * x;
        }
        self.grid.analyze_into(&self.prod, &mut self.square);
        for ((p, &x), &d) in self.prod.iter_mut().zip(&self.u).zip(&self.du) {
            *p = x * d;
        }
        self.grid.analyze_into(&self.prod, &mut self.mixed);

        for (k, o) in out.iter_mut().enumerate() {
            let kf = k as f64;
            let ik = Complex64::new(0.0, kf);
            let total = ik
                * (self.cube[k] / 3.0
                    + self.c1 * self.mixed[k]
                    + self.c2 * kf * 0.5 * self.square[k]);
            *o = self.sign * total;
        }
    }
}
