//! Randomized constant estimates for the commutator, interpolation and
//! pairing inequalities. Each check returns the largest `LHS/RHS` seen.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::commutators::{compute_ps, compute_qs, CommutatorForm};
use super::identities::{ibp_identity, reduction_identity};
use super::{estimate, ConstantEstimate, EstimateKind, EstimateParams, LabCorpus};
use crate::error::{Error, Result};
use crate::spectral::{
    bessel_inverse, commutator, d_pow, dx, hilbert, hs, inner_l2, multiply, transform, ProductMode,
    SpectralField,
};

/// Identities asserted along the way must hold to this relative residual.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
const LP_OVERSAMPLE: usize = 8;

fn exact(a: &SpectralField, b: &SpectralField) -> SpectralField {
    multiply(a, b, ProductMode::Exact)
}

fn require(cond: bool, name: &'static str, reason: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::param(name, reason))
    }
}

fn require_s0(s0: f64, floor: f64) -> Result<()> {
    require(
        s0 > floor && s0.is_finite(),
        "s0",
        format!("must exceed {floor}, got {s0}"),
    )
}

fn require_s(s: f64, floor: f64) -> Result<()> {
    require(
        s >= floor && s.is_finite(),
        "s",
        format!("must be >= {floor}, got {s}"),
    )
}

/// `|⟨f∂ₓg, g⟩| <= C‖f‖_{H^{s₀+1}}‖g‖²`, after asserting the integration
/// by parts identity on every sample.
pub fn check_ibp(corpus: &LabCorpus, s0: f64) -> Result<ConstantEstimate> {
    require_s0(s0, 0.5)?;
    let params = EstimateParams {
        s0: Some(s0),
        ..Default::default()
    };
    estimate(EstimateKind::IntegrationByParts, params, corpus, |x| {
        let (lhs, res) = ibp_identity(&x.f, &x.g);
        if res.relative() > IDENTITY_TOLERANCE {
            return Err(Error::IdentityViolated {
                name: "integration-by-parts",
                relative: res.relative(),
            });
        }
        Ok(Some((lhs, hs(&x.f, s0 + 1.0) * x.g.norm_sq())))
    })
}

/// `‖P_s(f,g)‖, ‖Q_s(f,g)‖ <= C(‖f‖_{H^{s₀}}‖g‖_{H^s} + ‖f‖_{H^s}‖g‖_{H^{s₀}})`.
pub fn check_commutator_bounds(corpus: &LabCorpus, s: f64, s0: f64) -> Result<ConstantEstimate> {
    require_s(s, 1.0)?;
    require_s0(s0, 2.5)?;
    let params = EstimateParams {
        s: Some(s),
        s0: Some(s0),
        ..Default::default()
    };
    estimate(EstimateKind::CommutatorRemainder, params, corpus, |x| {
        Ok(Some(commutator_ratio_parts(&x.f, &x.g, s, s0)?))
    })
}

pub(crate) fn commutator_ratio_parts(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
    s0: f64,
) -> Result<(f64, f64)> {
    let p = compute_ps(f, g, s, CommutatorForm::Symbol)?.norm();
    let q = compute_qs(f, g, s, CommutatorForm::Symbol)?.norm();
    let rhs = hs(f, s0) * hs(g, s) + hs(f, s) * hs(g, s0);
    Ok((p.max(q), rhs))
}

/// `‖[H,f]∂ₓᵏg‖ <= C‖f‖_{H^{s₀+k}}‖g‖`.
pub fn check_hilbert_commutator(corpus: &LabCorpus, s0: f64, k: u32) -> Result<ConstantEstimate> {
    require_s0(s0, 0.5)?;
    require(k >= 1, "k", "derivative order must be >= 1".into())?;
    let params = EstimateParams {
        s0: Some(s0),
        order: Some(k),
        ..Default::default()
    };
    estimate(EstimateKind::HilbertCommutator, params, corpus, |x| {
        let lhs = commutator(hilbert, &x.f, &dx(&x.g, k)).norm();
        Ok(Some((lhs, hs(&x.f, s0 + k as f64) * x.g.norm())))
    })
}

/// `Λ_s = D^s` or `Λ_s = D^{s-1}∂ₓ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaKind {
    #[default]
    Ds,
    DsMinusOneDx,
}

impl LambdaKind {
    pub fn apply(self, f: &SpectralField, s: f64) -> SpectralField {
        match self {
            Self::Ds => d_pow(f, s),
            Self::DsMinusOneDx => dx(&d_pow(f, s - 1.0), 1),
        }
    }
}

/// `First`: `‖[Λ_s,f]∂ₓg‖`. `Second`: `‖[⟨D⟩^{-1}Λ₂,f]g‖`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommEst2Variant {
    First,
    Second,
}

impl FromStr for CommEst2Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" | "first" => Ok(Self::First),
            "ii" | "second" => Ok(Self::Second),
            other => Err(Error::param(
                "variant",
                format!("unknown variant `{other}` (expected i or ii)"),
            )),
        }
    }
}

pub fn check_comm_est2(
    corpus: &LabCorpus,
    s: f64,
    s0: f64,
    variant: CommEst2Variant,
    lambda: LambdaKind,
) -> Result<ConstantEstimate> {
    require_s0(s0, 0.5)?;
    match variant {
        CommEst2Variant::First => {
            require_s(s, 1.0)?;
            let params = EstimateParams {
                s: Some(s),
                s0: Some(s0),
                ..Default::default()
            };
            estimate(EstimateKind::LambdaCommutator, params, corpus, |x| {
                let lhs = commutator(|v| lambda.apply(v, s), &x.f, &dx(&x.g, 1)).norm();
                let rhs = hs(&x.f, s0 + 1.0) * hs(&x.g, s) + hs(&x.f, s) * hs(&x.g, s0 + 1.0);
                Ok(Some((lhs, rhs)))
            })
        }
        CommEst2Variant::Second => {
            let params = EstimateParams {
                s0: Some(s0),
                ..Default::default()
            };
            estimate(EstimateKind::BesselCommutator, params, corpus, |x| {
                let lhs = commutator(|v| bessel_inverse(&lambda.apply(v, 2.0)), &x.f, &x.g).norm();
                Ok(Some((lhs, hs(&x.f, s0 + 1.0) * x.g.norm())))
            })
        }
    }
}

/// `|⟨vH∂ₓ²u + ∂ₓvH∂ₓu, u⟩| <= C‖v‖_{H^{s₀+2}}‖u‖²` with `v = f`, `u = g`,
/// after asserting the rewriting identity.
pub fn check_reduction(corpus: &LabCorpus, s0: f64) -> Result<ConstantEstimate> {
    require_s0(s0, 0.5)?;
    let params = EstimateParams {
        s0: Some(s0),
        ..Default::default()
    };
    estimate(EstimateKind::Reduction, params, corpus, |x| {
        let (pairing, res) = reduction_identity(&x.f, &x.g);
        if res.relative() > IDENTITY_TOLERANCE {
            return Err(Error::IdentityViolated {
                name: "reduction",
                relative: res.relative(),
            });
        }
        Ok(Some((pairing, hs(&x.f, s0 + 2.0) * x.g.norm_sq())))
    })
}

/// `‖f‖_{L^p}` from an oversampled grid; `p = ∞` takes the grid maximum.
pub fn lp_norm(f: &SpectralField, p: f64) -> f64 {
    let n = transform::fft_size(LP_OVERSAMPLE * (2 * f.max_mode() + 2));
    let values = f.to_grid(n);
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        let h = 2.0 * std::f64::consts::PI / n as f64;
        (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * h).powf(1.0 / p)
    }
}

fn check_gn_params(l: u32, s: f64, p: f64) -> Result<()> {
    require_s(s, 1.0)?;
    require(
        l as f64 <= s - 1.0,
        "l",
        format!("need l <= s - 1, got l = {l}, s = {s}"),
    )?;
    require(
        (2.0..=f64::INFINITY).contains(&p),
        "p",
        format!("need 2 <= p <= inf, got {p}"),
    )
}

/// `(‖∂ₓˡf‖_p, ‖f‖^{1−α}‖D^sf‖^α [+ ‖f‖ if l = 0])`, `α = (l + 1/2 − 1/p)/s`.
pub fn gn_ratio(f: &SpectralField, l: u32, s: f64, p: f64) -> Result<(f64, f64)> {
    check_gn_params(l, s, p)?;
    let alpha = (l as f64 + 0.5 - 1.0 / p) / s;
    let lhs = lp_norm(&dx(f, l), p);
    let n = f.norm();
    let mut rhs = n.powf(1.0 - alpha) * d_pow(f, s).norm().powf(alpha);
    if l == 0 {
        rhs += n;
    }
    Ok((lhs, rhs))
}

pub fn check_gagliardo_nirenberg(
    corpus: &LabCorpus,
    l: u32,
    s: f64,
    p: f64,
) -> Result<ConstantEstimate> {
    check_gn_params(l, s, p)?;
    let params = EstimateParams {
        s: Some(s),
        order: Some(l),
        exponent: p.is_finite().then_some(p),
        ..Default::default()
    };
    estimate(EstimateKind::GagliardoNirenberg, params, corpus, |x| {
        gn_ratio(&x.f, l, s, p).map(Some)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingPart {
    /// `⟨f₁HD^sf₂, HD^s(f₁∂ₓf₂)⟩`, `s >= 1`.
    First,
    /// `⟨f₁HD^s∂ₓ(f₁H∂ₓf₂), D^{s−2}∂ₓf₂⟩`, `s >= 2`.
    Second,
}

pub(crate) fn pairing_value(
    f1: &SpectralField,
    f2: &SpectralField,
    s: f64,
    part: PairingPart,
) -> f64 {
    match part {
        PairingPart::First => {
            let a = exact(f1, &hilbert(&d_pow(f2, s)));
            let b = hilbert(&d_pow(&exact(f1, &dx(f2, 1)), s));
            inner_l2(&a, &b)
        }
        PairingPart::Second => {
            let inner = exact(f1, &hilbert(&dx(f2, 1)));
            let a = exact(f1, &hilbert(&d_pow(&dx(&inner, 1), s)));
            inner_l2(&a, &dx(&d_pow(f2, s - 2.0), 1))
        }
    }
}

/// `|pairing| <= C(‖f₁‖²_{H^{s₀}}‖f₂‖²_{H^s} + ‖f₁‖_{H^{s₀}}‖f₁‖_{H^s}‖f₂‖_{H^{s₀}}‖f₂‖_{H^s})`.
pub fn check_good2(
    corpus: &LabCorpus,
    s: f64,
    s0: f64,
    part: PairingPart,
) -> Result<ConstantEstimate> {
    require_s0(s0, 2.5)?;
    let kind = match part {
        PairingPart::First => {
            require_s(s, 1.0)?;
            EstimateKind::TriplePairingFirst
        }
        PairingPart::Second => {
            require_s(s, 2.0)?;
            EstimateKind::TriplePairingSecond
        }
    };
    let params = EstimateParams {
        s: Some(s),
        s0: Some(s0),
        ..Default::default()
    };
    estimate(kind, params, corpus, |x| {
        let (f1, f2) = (&x.f, &x.g);
        let lhs = pairing_value(f1, f2, s, part);
        let rhs = hs(f1, s0).powi(2) * hs(f2, s).powi(2)
            + hs(f1, s0) * hs(f1, s) * hs(f2, s0) * hs(f2, s);
        Ok(Some((lhs, rhs)))
    })
}

/// Pieces of the difference estimate for `w = u − v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dl1Terms {
    /// `⟨D^s∂ₓ(uH∂ₓu − vH∂ₓv), D^sw⟩`.
    pub first: f64,
    /// `⟨HD^s∂ₓ(u∂ₓu − v∂ₓv), D^sw⟩`.
    pub second: f64,
    /// `⟨∂ₓu·HD^s∂ₓw, D^sw⟩`, the pairing both terms lose derivatives to.
    pub pairing: f64,
}

impl Dl1Terms {
    pub fn lhs(&self, s: f64) -> f64 {
        (self.first - s * self.pairing).abs() + (self.second - (s + 1.0) * self.pairing).abs()
    }
}

pub fn dl1_terms(u: &SpectralField, v: &SpectralField, s: f64) -> Dl1Terms {
    let w = u - v;
    let dsw = d_pow(&w, s);
    let quad_h = |a: &SpectralField| exact(a, &hilbert(&dx(a, 1)));
    let quad = |a: &SpectralField| exact(a, &dx(a, 1));
    let first = inner_l2(&d_pow(&dx(&(&quad_h(u) - &quad_h(v)), 1), s), &dsw);
    let second = inner_l2(&hilbert(&d_pow(&dx(&(&quad(u) - &quad(v)), 1), s)), &dsw);
    let pairing = inner_l2(&exact(&dx(u, 1), &hilbert(&d_pow(&dx(&w, 1), s))), &dsw);
    Dl1Terms {
        first,
        second,
        pairing,
    }
}

pub(crate) fn dl1_rhs(u: &SpectralField, v: &SpectralField, s: f64, s0: f64) -> f64 {
    let w = u - v;
    hs(&w, s)
        * ((hs(u, s0) + hs(v, s0)) * hs(&w, s)
            + (hs(u, s) + hs(v, s)) * hs(&w, s0)
            + hs(&w, s0 - 2.0) * hs(v, s + 2.0)
            + hs(&w, s0 - 1.0) * hs(v, s + 1.0))
}

/// The difference estimate with `u = f`, `v = g`.
pub fn check_dl1(corpus: &LabCorpus, s: f64, s0: f64) -> Result<ConstantEstimate> {
    require_s(s, 1.0)?;
    require_s0(s0, 2.5)?;
    let params = EstimateParams {
        s: Some(s),
        s0: Some(s0),
        ..Default::default()
    };
    estimate(EstimateKind::DifferencePairing, params, corpus, |x| {
        Ok(Some((
            dl1_terms(&x.f, &x.g, s).lhs(s),
            dl1_rhs(&x.f, &x.g, s, s0),
        )))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::derivative_loss_pairing;

    fn corpus(k: usize) -> LabCorpus {
        LabCorpus::generate(2024, 24, k, 3.0)
    }

    #[test]
    fn estimates_are_finite_on_random_corpus() {
        let c = corpus(16);
        let all = [
            check_ibp(&c, 0.6).unwrap(),
            check_commutator_bounds(&c, 3.0, 2.6).unwrap(),
            check_hilbert_commutator(&c, 0.6, 2).unwrap(),
            check_comm_est2(&c, 3.0, 0.6, CommEst2Variant::First, LambdaKind::Ds).unwrap(),
            check_comm_est2(
                &c,
                3.0,
                0.6,
                CommEst2Variant::Second,
                LambdaKind::DsMinusOneDx,
            )
            .unwrap(),
            check_reduction(&c, 0.6).unwrap(),
            check_gagliardo_nirenberg(&c, 1, 3.0, f64::INFINITY).unwrap(),
            check_good2(&c, 3.0, 2.6, PairingPart::First).unwrap(),
            check_good2(&c, 3.0, 2.6, PairingPart::Second).unwrap(),
            check_dl1(&c, 3.0, 2.6).unwrap(),
        ];
        for e in &all {
            assert!(e.is_valid(20), "{e:?}");
            assert!(e.max_ratio > 0.0);
        }
    }

    #[test]
    fn constant_weights_give_zero_left_sides() {
        let k = 12;
        let c = SpectralField::constant(k, 0.8);
        let g = crate::random::power_law_field(k, 3.0, 0.1, 3);
        assert!(commutator(hilbert, &c, &dx(&g, 3)).norm() < 1e-12 * g.norm() * 1e3);
        for lam in [LambdaKind::Ds, LambdaKind::DsMinusOneDx] {
            assert!(commutator(|v| lam.apply(v, 3.0), &c, &dx(&g, 1)).norm() < 1e-10);
            assert!(commutator(|v| bessel_inverse(&lam.apply(v, 2.0)), &c, &g).norm() < 1e-12);
        }
        assert!(pairing_value(&c, &g, 3.0, PairingPart::First).abs() < 1e-9);
    }

    #[test]
    fn lambda_variants_share_the_symbol_modulus() {
        let f = crate::random::power_law_field(16, 2.0, 0.4, 9);
        let a = LambdaKind::Ds.apply(&f, 2.5);
        let b = LambdaKind::DsMinusOneDx.apply(&f, 2.5);
        assert!((a.norm() - b.norm()).abs() < 1e-12 * a.norm());
        // D^{s-1}∂ₓ = −HD^s on mean-zero fields
        assert!((&b + &hilbert(&a)).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn hilbert_commutator_ratio_is_stable_under_refinement() {
        let a = check_hilbert_commutator(&corpus(16), 0.6, 1).unwrap();
        let b = check_hilbert_commutator(&corpus(32), 0.6, 1).unwrap();
        assert!(crate::stats::relative_change(a.max_ratio, b.max_ratio) < 0.25);
    }

    #[test]
    fn commutator_ratio_stays_bounded_for_high_modes() {
        let f = &SpectralField::constant(64, 0.3) + &SpectralField::cos_mode(64, 1, 1.0);
        let ratios: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| {
                let g = SpectralField::cos_mode(64, n, 1.0);
                let (l, r) = commutator_ratio_parts(&f, &g, 3.0, 2.6).unwrap();
                l / r
            })
            .collect();
        assert!(
            crate::stats::relative_change(ratios[2], ratios[3]) < 0.25,
            "{ratios:?}"
        );
    }

    #[test]
    fn gagliardo_nirenberg_single_mode() {
        for n in [1usize, 3, 7] {
            let f = SpectralField::cos_mode(16, n, 1.0);
            let (lhs, rhs) = gn_ratio(&f, 1, 3.0, f64::INFINITY).unwrap();
            // ‖∂ₓ cos nx‖_∞ = n, ‖f‖ = √π, ‖D³f‖ = n³√π, α = 1/2
            assert!((lhs - n as f64).abs() < 1e-12);
            let expect = std::f64::consts::PI.sqrt() * (n as f64).powf(1.5);
            assert!((rhs - expect).abs() < 1e-12 * expect);
            assert!(lhs <= rhs);
        }
        let c = SpectralField::constant(8, 2.0);
        assert_eq!(gn_ratio(&c, 1, 3.0, 4.0).unwrap().0, 0.0);
        assert!(gn_ratio(&c, 3, 3.0, 4.0).is_err());
        assert!(gn_ratio(&c, 0, 3.0, 1.5).is_err());
        // L² on the grid is Parseval
        let f = crate::random::power_law_field(8, 1.0, 0.3, 4);
        assert!((lp_norm(&f, 2.0) - f.norm()).abs() < 1e-12);
    }

    #[test]
    fn dl1_examples() {
        let u = crate::random::power_law_field(16, 4.0, 0.2, 5);
        assert_eq!(dl1_terms(&u, &u, 3.0).lhs(3.0), 0.0);
        let zero = SpectralField::zeros(16);
        let t = dl1_terms(&u, &zero, 3.0);
        let direct = derivative_loss_pairing(&u, &u, 3.0);
        assert!((t.pairing - direct).abs() < 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn comm_est2_variant_parsing() {
        assert_eq!(
            "i".parse::<CommEst2Variant>().unwrap(),
            CommEst2Variant::First
        );
        assert_eq!(
            "ii".parse::<CommEst2Variant>().unwrap(),
            CommEst2Variant::Second
        );
        assert!("iii".parse::<CommEst2Variant>().is_err());
    }
}
