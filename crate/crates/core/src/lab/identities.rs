//! Exact identities, evaluated with exact-mode products.
//!
//! Each residual comes with a scale: the sum of Hölder bounds
//! `‖a‖·‖b‖_∞·‖c‖` of the triple integrals involved, so `abs / scale` is
//! the cancellation relative to the size of the individual terms.

use serde::{Deserialize, Serialize};

use super::commutators::{remainder_terms, CommutatorForm};
use crate::spectral::{
    dx, hilbert, hs, inner_l2, multiply, triple_integral, ProductMode, SpectralField,
};

const OVERSAMPLE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub abs: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.abs / self.scale
        } else {
            self.abs
        }
    }
}

fn exact(a: &SpectralField, b: &SpectralField) -> SpectralField {
    multiply(a, b, ProductMode::Exact)
}

fn sup(f: &SpectralField) -> f64 {
    f.sup_norm(OVERSAMPLE)
}

/// `‖a‖·‖b‖_∞·‖c‖`.
fn holder(a: &SpectralField, b: &SpectralField, c: &SpectralField) -> f64 {
    a.norm() * sup(b) * c.norm()
}

/// `|⟨H∂ₓ(u∂ₓu), u⟩ + ⟨∂ₓ(uH∂ₓu), u⟩|`.
pub fn check_cancellation(u: &SpectralField) -> f64 {
    let ux = dx(u, 1);
    let first = inner_l2(&hilbert(&dx(&exact(u, &ux), 1)), u);
    let second = inner_l2(&dx(&exact(u, &hilbert(&ux)), 1), u);
    (first + second).abs()
}

/// `(1 + ‖u‖_{H²})³`.
pub fn cancellation_scale(u: &SpectralField) -> f64 {
    (1.0 + hs(u, 2.0)).powi(3)
}

/// `|⟨∂ₓ³f·g,h⟩ + ⟨f·∂ₓ³g,h⟩ + ⟨fg,∂ₓ³h⟩ − 3⟨∂ₓf·∂ₓg,∂ₓh⟩|`.
pub fn check_good1(f: &SpectralField, g: &SpectralField, h: &SpectralField) -> f64 {
    let lhs = triple_integral(&dx(f, 3), g, h)
        + triple_integral(f, &dx(g, 3), h)
        + triple_integral(f, g, &dx(h, 3));
    let rhs = 3.0 * triple_integral(&dx(f, 1), &dx(g, 1), &dx(h, 1));
    (lhs - rhs).abs()
}

pub fn good1_scale(f: &SpectralField, g: &SpectralField, h: &SpectralField) -> f64 {
    holder(&dx(f, 3), g, h)
        + holder(&dx(g, 3), f, h)
        + holder(&dx(h, 3), f, g)
        + 3.0 * holder(&dx(f, 1), &dx(g, 1), &dx(h, 1))
}

/// `⟨f∂ₓg, g⟩ = −½⟨(∂ₓf)g, g⟩`; returns the left side and the residual.
pub fn ibp_identity(f: &SpectralField, g: &SpectralField) -> (f64, Residual) {
    let gx = dx(g, 1);
    let fx = dx(f, 1);
    let lhs = triple_integral(f, &gx, g);
    let rhs = -0.5 * triple_integral(&fx, g, g);
    let scale = holder(&gx, f, g) + 0.5 * holder(g, &fx, g);
    (
        lhs,
        Residual {
            abs: (lhs - rhs).abs(),
            scale,
        },
    )
}

/// `2⟨vH∂ₓ²u + ∂ₓvH∂ₓu, u⟩ = −⟨[H,v]∂ₓ²u, u⟩ − ⟨∂ₓ²vHu, u⟩`; returns
/// `⟨vH∂ₓ²u + ∂ₓvH∂ₓu, u⟩` and the residual.
pub fn reduction_identity(v: &SpectralField, u: &SpectralField) -> (f64, Residual) {
    let uxx = dx(u, 2);
    let h_uxx = hilbert(&uxx);
    let h_ux = hilbert(&dx(u, 1));
    let vx = dx(v, 1);
    let vxx = dx(v, 2);
    let hu = hilbert(u);
    let pairing = triple_integral(v, &h_uxx, u) + triple_integral(&vx, &h_ux, u);
    // ⟨[H,v]∂ₓ²u, u⟩ = ⟨H(v∂ₓ²u), u⟩ − ⟨vH∂ₓ²u, u⟩ and ⟨Ha, b⟩ = −⟨a, Hb⟩
    let commutator = -triple_integral(v, &uxx, &hu) - triple_integral(v, &h_uxx, u);
    let rhs = -commutator - triple_integral(&vxx, &hu, u);
    let scale = 2.0 * (holder(&h_uxx, v, u) + holder(&h_ux, &vx, u))
        + holder(&uxx, v, &hu)
        + holder(&h_uxx, v, u)
        + holder(&hu, &vxx, u);
    (
        pairing,
        Residual {
            abs: (2.0 * pairing - rhs).abs(),
            scale,
        },
    )
}

/// `‖P_s(c, g)‖` for constant `c`, relative to the sizes of its terms.
pub fn ps_constant_residual(c: f64, g: &SpectralField, s: f64) -> Residual {
    let f = SpectralField::constant(g.max_mode(), c);
    let terms = remainder_terms(&f, g, s, false, CommutatorForm::Symbol);
    let k = terms.iter().map(|t| t.max_mode()).max().unwrap_or(0);
    let mut sum = terms[0].resized(k);
    for t in &terms[1..] {
        sum = &sum - &t.resized(k);
    }
    Residual {
        abs: sum.norm(),
        scale: terms.iter().map(|t| t.norm()).sum(),
    }
}

/// `|sgn k − k⟨k⟩^{-1}| <= ⟨k⟩^{-1}`, i.e. `|sgn(k)⟨k⟩ − k| <= 1`, which for
/// `k ≠ 0` is `1 + k² <= (|k| + 1)²`. Checked in integers.
#[allow(clippy::int_plus_one)] // kept in the form of the inequality
pub fn freq_est_holds(k: i64) -> bool {
    if k == 0 {
        return true;
    }
    let a = k.unsigned_abs() as u128;
    1 + a * a <= (a + 1) * (a + 1)
}

/// The per-mode inequality for every `|k| <= k_max`.
pub fn check_freq_est(k_max: u64) -> bool {
    let k_max = k_max as i64;
    (-k_max..=k_max).all(freq_est_holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn field(seed: u64) -> SpectralField {
        crate::random::power_law_field(32, 3.5, 0.3, seed)
    }

    #[test]
    fn cancellation_examples() {
        assert_eq!(check_cancellation(&SpectralField::zeros(8)), 0.0);
        let c = SpectralField::cos_mode(8, 1, 1.0);
        assert!(check_cancellation(&c) < 1e-15);
        let u = field(1);
        assert!(check_cancellation(&u) <= 1e-12 * cancellation_scale(&u));
    }

    #[test]
    fn cancellation_terms_vanish_separately_for_cosine() {
        // H∂ₓ(cos·(−sin)) = H(−cos 2x) = −sin 2x, paired with cos x: 0.
        let c = SpectralField::cos_mode(8, 1, 1.0);
        let first = triple_integral(&c, &dx(&c, 1), &hilbert(&dx(&c, 1)));
        assert!(first.abs() < 1e-15);
    }

    #[test]
    fn good1_examples() {
        let c = SpectralField::cos_mode(8, 1, 1.0);
        assert!(check_good1(&c, &c, &c) < 1e-14);
        // f = cos x, g = sin x, h = cos 2x: fg = ½ sin 2x is orthogonal to
        // cos 2x, and every other term is too, by the quadrature below.
        let f = SpectralField::cos_mode(8, 1, 1.0);
        let g = SpectralField::sin_mode(8, 1, 1.0);
        let h = SpectralField::cos_mode(8, 2, 1.0);
        let n = 4096;
        let quad = |a: &dyn Fn(f64) -> f64| {
            (0..n)
                .map(|i| a(2.0 * PI * i as f64 / n as f64))
                .sum::<f64>()
                * 2.0
                * PI
                / n as f64
        };
        let rhs = 3.0 * quad(&|x: f64| -x.sin() * x.cos() * (-2.0 * (2.0 * x).sin()));
        let lhs_direct = 3.0 * triple_integral(&dx(&f, 1), &dx(&g, 1), &dx(&h, 1));
        assert!((rhs - lhs_direct).abs() < 1e-13);
        assert!(check_good1(&f, &g, &h) < 1e-13);
        let (a, b, c) = (field(2), field(3), field(4));
        assert!(check_good1(&a, &b, &c) <= 1e-12 * good1_scale(&a, &b, &c));
    }

    #[test]
    fn ibp_examples() {
        let g = field(5);
        let (v, r) = ibp_identity(&SpectralField::constant(32, 2.0), &g);
        assert!(v.abs() < 1e-12 * r.scale.max(1.0));
        let c = SpectralField::cos_mode(8, 1, 1.0);
        let (v, r) = ibp_identity(&c, &c);
        assert!(v.abs() < 1e-15 && r.abs < 1e-15);
        let (_, r) = ibp_identity(&field(6), &field(7));
        assert!(r.relative() < 1e-12);
    }

    #[test]
    fn reduction_examples() {
        let u = field(8);
        let (v, r) = reduction_identity(&SpectralField::constant(32, 1.5), &u);
        assert!(v.abs() < 1e-12 * r.scale);
        assert!(r.relative() < 1e-12);
        let (v, r) = reduction_identity(&SpectralField::zeros(8), &SpectralField::zeros(8));
        assert_eq!((v, r.abs), (0.0, 0.0));
        let (_, r) = reduction_identity(&field(9), &field(10));
        assert!(r.relative() < 1e-12, "{}", r.relative());
        // single mode u = cos 2x, v = cos x against quadrature
        let v = SpectralField::cos_mode(8, 1, 1.0);
        let u = SpectralField::cos_mode(8, 2, 1.0);
        let (pairing, _) = reduction_identity(&v, &u);
        let n = 4096;
        // H∂ₓ²cos 2x = −4 sin 2x, H∂ₓ cos 2x = 2 cos 2x
        let quad: f64 = (0..n)
            .map(|i| {
                let x = 2.0 * PI * i as f64 / n as f64;
                (x.cos() * -4.0 * (2.0 * x).sin() - x.sin() * 2.0 * (2.0 * x).cos())
                    * (2.0 * x).cos()
            })
            .sum::<f64>()
            * 2.0
            * PI
            / n as f64;
        assert!((pairing - quad).abs() < 1e-13);
    }

    #[test]
    fn ps_vanishes_for_constant_weight() {
        let r = ps_constant_residual(0.7, &field(11), 3.0);
        assert!(r.relative() < 1e-14);
    }

    #[test]
    fn freq_est_examples() {
        assert!(freq_est_holds(0));
        assert!(freq_est_holds(1));
        let margin = 0.5f64.sqrt() - (1.0 - 0.5f64.sqrt()).abs();
        assert!(margin > 0.0);
        assert!(check_freq_est(1 << 14));
        assert!(freq_est_holds(i64::MIN + 1));
    }
}
