//! The commutator remainders
//!
//! ```text
//! P_s(f,g) = D^s∂ₓ(f∂ₓg) − (D^s∂ₓf)∂ₓg − f·D^s∂ₓ²g − (s+1)∂ₓf·D^s∂ₓg
//! Q_s(f,g) = HD^s∂ₓ(f∂ₓg) − (HD^s∂ₓf)∂ₓg − f·HD^s∂ₓ²g − (s+1)∂ₓf·HD^s∂ₓg
//! ```
//!
//! whose symbols vanish to second order on the diagonal. The third term can
//! also be taken with `∂ₓf` in place of `f` ([`CommutatorForm::Literal`]);
//! that variant does not vanish for constant `f`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{d_pow, dx, hilbert, multiply, ProductMode, SpectralField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommutatorForm {
    /// Third term `f·D^s∂ₓ²g`.
    #[default]
    Symbol,
    /// Third term `∂ₓf·D^s∂ₓ²g`.
    Literal,
}

fn exact(a: &SpectralField, b: &SpectralField) -> SpectralField {
    multiply(a, b, ProductMode::Exact)
}

fn check_index(s: f64) -> Result<()> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::param(
            "s",
            format!("commutator index must be >= 1, got {s}"),
        ));
    }
    Ok(())
}

/// The four terms, before summation, for `A = D^s` or `A = HD^s`.
pub(crate) fn remainder_terms(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
    with_hilbert: bool,
    form: CommutatorForm,
) -> [SpectralField; 4] {
    let a = |x: &SpectralField| {
        let d = d_pow(x, s);
        if with_hilbert {
            hilbert(&d)
        } else {
            d
        }
    };
    let fx = dx(f, 1);
    let gx = dx(g, 1);
    let third_weight = match form {
        CommutatorForm::Symbol => f,
        CommutatorForm::Literal => &fx,
    };
    [
        a(&dx(&exact(f, &gx), 1)),
        exact(&a(&fx), &gx),
        exact(third_weight, &a(&dx(g, 2))),
        exact(&fx, &a(&gx)).scale(s + 1.0),
    ]
}

fn assemble(terms: [SpectralField; 4]) -> SpectralField {
    let [t0, t1, t2, t3] = terms;
    let k = [&t0, &t1, &t2, &t3]
        .iter()
        .map(|t| t.max_mode())
        .max()
        .unwrap_or(0);
    let mut out = t0.resized(k);
    for t in [t1, t2, t3] {
        out = &out - &t.resized(k);
    }
    out
}

pub fn compute_ps(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
    form: CommutatorForm,
) -> Result<SpectralField> {
    check_index(s)?;
    Ok(assemble(remainder_terms(f, g, s, false, form)))
}

pub fn compute_qs(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
    form: CommutatorForm,
) -> Result<SpectralField> {
    check_index(s)?;
    Ok(assemble(remainder_terms(f, g, s, true, form)))
}

/// Symbol of `P_s` at output frequency `ξ` with `g` at frequency `η`:
/// `−[|ξ|^sξη − |ξ−η|^s(ξ−η)η − |η|^sη² − (s+1)(ξ−η)|η|^sη]`.
pub fn ps_symbol(xi: i64, eta: i64, s: f64) -> Complex64 {
    let (x, e) = (xi as f64, eta as f64);
    let m = x - e;
    let pw = |v: f64| v.abs().powf(s);
    let val = pw(x) * x * e - pw(m) * m * e - pw(e) * e * e - (s + 1.0) * m * pw(e) * e;
    Complex64::new(-val, 0.0)
}

/// Symbol of `Q_s`: each term of [`ps_symbol`] carries `−i·sgn` of the
/// frequency its `HD^s` acts on.
pub fn qs_symbol(xi: i64, eta: i64, s: f64) -> Complex64 {
    let (x, e) = (xi as f64, eta as f64);
    let m = x - e;
    let pw = |v: f64| v.abs().powf(s);
    let val = x.signum() * pw(x) * x * e
        - m.signum() * pw(m) * m * e
        - e.signum() * pw(e) * e * e
        - (s + 1.0) * m * e.signum() * pw(e) * e;
    // −(−i)·val
    Complex64::new(0.0, val)
}
