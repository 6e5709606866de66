//! Fixed-point iteration of `u(t) = U(t)φ + ∫₀ᵗ U(t−σ) F(u(σ)) dσ`.
//!
//! The Duhamel integral uses exponential Simpson quadrature: `F` is
//! interpolated quadratically on three consecutive nodes and integrated
//! exactly against `e^{L(t−σ)}`, so stiffness in `L` costs no accuracy.

use num_complex::Complex64;

use super::nonlinear::Nonlinearity;
use super::{h2_norm, linear_symbol, EquationParams, SolverConfig, Trajectory, TrajectoryStatus};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const PICARD_TOLERANCE: f64 = 1e-10;
pub const PICARD_MAX_ITERATIONS: usize = 50;
const GROWTH_STREAK: usize = 3;

#[derive(Clone, Debug)]
pub struct PicardSolution {
    pub trajectory: Trajectory,
    pub iterations: usize,
    /// Sup-in-time `H²` distance between the last two iterates.
    pub distance: f64,
    pub converged: bool,
}

/// `∫₀^w e^{zσ/w}σ^j dσ` for `j = 0, 1, 2` where `z = L·w`.
fn moments(l: Complex64, w: f64) -> [Complex64; 3] {
    let z = l * w;
    if z.norm() < 0.5 {
        let mut out = [ZERO; 3];
        let mut term = Complex64::new(1.0, 0.0);
        for n in 0..24 {
            for (j, o) in out.iter_mut().enumerate() {
                *o += term / (n + j + 1) as f64;
            }
            term = term * z / (n + 1) as f64;
        }
        [out[0] * w, out[1] * w * w, out[2] * w * w * w]
    } else {
        let e = z.exp();
        let m0 = (e - 1.0) / l;
        let m1 = (w * e - m0) / l;
        let m2 = (w * w * e - 2.0 * m1) / l;
        [m0, m1, m2]
    }
}

/// Weights of `∫₀^w e^{Lτ} q(τ) dτ` for the quadratic `q` through the
/// nodes `τ = a, b, c`.
fn lagrange_weights(m: [Complex64; 3], nodes: [f64; 3]) -> [Complex64; 3] {
    let mut out = [ZERO; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (a, b) = (nodes[j], nodes[k]);
        let den = (nodes[i] - a) * (nodes[i] - b);
        // (τ−a)(τ−b) = τ² − (a+b)τ + ab
        out[i] = (m[2] - (a + b) * m[1] + a * b * m[0]) / den;
    }
    out
}

struct ModeWeights {
    step: Complex64,
    double: Complex64,
    /// First interval, nodes `F₀, F₁, F₂`.
    first: [Complex64; 3],
    /// Odd `n`: last interval of width `h`, nodes `F_{n−2}, F_{n−1}, F_n`.
    single: [Complex64; 3],
    /// Even `n`: two intervals, nodes `F_{n−2}, F_{n−1}, F_n`.
    pair: [Complex64; 3],
}

impl ModeWeights {
    fn new(l: Complex64, h: f64) -> Self {
        // τ = t_n − σ, so node F_{n−j} sits at τ = j·h.
        let one = moments(l, h);
        let two = moments(l, 2.0 * h);
        let [w_n, w_n1, w_n2] = lagrange_weights(one, [0.0, h, 2.0 * h]);
        let [p_n, p_n1, p_n2] = lagrange_weights(two, [0.0, h, 2.0 * h]);
        // On [t₀, t₁]: F₁ at τ = 0, F₀ at τ = h, F₂ at τ = −h.
        let [f1, f0, f2] = lagrange_weights(one, [0.0, h, -h]);
        Self {
            step: (l * h).exp(),
            double: (l * 2.0 * h).exp(),
            first: [f0, f1, f2],
            single: [w_n2, w_n1, w_n],
            pair: [p_n2, p_n1, p_n],
        }
    }
}

/// The Duhamel map `Γ(u)(t_n) = U(t_n)φ + ∫₀^{t_n} U(t_n−σ)F(u(σ))dσ` on
/// the node grid `t_n = n·h`.
pub(crate) struct DuhamelMap {
    nodes: usize,
    weights: Vec<ModeWeights>,
    free: Vec<Vec<Complex64>>,
    nl: Nonlinearity,
    forcing: Vec<Vec<Complex64>>,
}

impl DuhamelMap {
    pub(crate) fn new(phi: &SpectralField, p: &EquationParams, h: f64, nodes: usize) -> Self {
        let kmax = phi.max_mode();
        let symbols: Vec<Complex64> = (0..=kmax).map(|k| linear_symbol(k, p)).collect();
        let free = (0..=nodes)
            .map(|n| {
                let t = n as f64 * h;
                phi.coeffs()
                    .iter()
                    .zip(&symbols)
                    .map(|(c, l)| c * (l * t).exp())
                    .collect()
            })
            .collect();
        Self {
            nodes,
            weights: symbols.iter().map(|&l| ModeWeights::new(l, h)).collect(),
            free,
            nl: Nonlinearity::new(kmax, p),
            forcing: vec![vec![ZERO; kmax + 1]; nodes + 1],
        }
    }

    /// `U(t_n)φ` at every node.
    pub(crate) fn free(&self) -> &[Vec<Complex64>] {
        &self.free
    }

    pub(crate) fn apply(&mut self, iterate: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        for (u, f) in iterate.iter().zip(self.forcing.iter_mut()) {
            self.nl.eval(u, f);
        }
        let mut out = self.free.clone();
        let mut integral = vec![ZERO; self.nodes + 1];
        for (k, w) in self.weights.iter().enumerate() {
            let f = |n: usize| self.forcing[n][k];
            integral[1] = w.first[0] * f(0) + w.first[1] * f(1) + w.first[2] * f(2);
            for n in 2..=self.nodes {
                let local =
                    |ws: &[Complex64; 3]| ws[0] * f(n - 2) + ws[1] * f(n - 1) + ws[2] * f(n);
                integral[n] = if n % 2 == 0 {
                    w.double * integral[n - 2] + local(&w.pair)
                } else {
                    w.step * integral[n - 1] + local(&w.single)
                };
            }
            for (o, i) in out.iter_mut().zip(&integral) {
                o[k] += i;
            }
        }
        out
    }
}

/// Picard iteration on the node grid `t_n = n·dt`; iterate 0 is the free
/// evolution `U(t)φ`.
pub fn picard_solve(
    phi: &SpectralField,
    p: &EquationParams,
    cfg: &SolverConfig,
) -> Result<PicardSolution> {
    p.validate()?;
    cfg.validate()?;
    if !(p.gamma > 0.0) {
        return Err(Error::param("gamma", "Duhamel iteration needs gamma > 0"));
    }
    let nodes = (cfg.horizon / cfg.dt).round() as usize;
    if nodes < 2 || (nodes as f64 * cfg.dt - cfg.horizon).abs() > 1e-9 * cfg.horizon {
        return Err(Error::param(
            "horizon",
            format!(
                "must be a multiple of dt spanning at least two steps, got {}",
                cfg.horizon
            ),
        ));
    }
    let h = cfg.dt;
    let mut map = DuhamelMap::new(&phi.resized(cfg.max_mode), p, h, nodes);
    let mut iterate = map.free().to_vec();
    let mut iterations = 0;
    let mut distance = f64::INFINITY;
    let mut streak = 0;
    let mut converged = false;

    while iterations < PICARD_MAX_ITERATIONS {
        iterations += 1;
        let next = map.apply(&iterate);
        let mut sup = 0.0f64;
        for (a, b) in next.iter().zip(&iterate) {
            let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            let d = h2_norm(&diff);
            if !d.is_finite() {
                return Err(Error::NonFinite {
                    what: "Picard iterate".into(),
                });
            }
            sup = sup.max(d);
        }
        iterate = next;
        streak = if sup > distance { streak + 1 } else { 0 };
        distance = sup;
        if distance < PICARD_TOLERANCE {
            converged = true;
            break;
        }
        if streak >= GROWTH_STREAK {
            return Err(Error::NonContraction { streak, distance });
        }
    }

    let mut traj = Trajectory {
        params: *p,
        dt: h,
        times: Vec::new(),
        snapshots: Vec::new(),
        status: TrajectoryStatus::Completed,
    };
    for (n, mut c) in iterate.into_iter().enumerate() {
        if n % cfg.stride == 0 || n == nodes {
            traj.times.push(n as f64 * h);
            c[0].im = 0.0;
            traj.snapshots.push(SpectralField::from_coeffs_unchecked(c));
        }
    }
    Ok(PicardSolution {
        trajectory: traj,
        iterations,
        distance,
        converged,
    })
}
