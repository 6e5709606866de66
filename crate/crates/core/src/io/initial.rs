use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::power_law_field;
use crate::spectral::{sobolev_norm, SpectralField};

/// Excess decay of critical data over `s`: `|ĉ(k)| = k^{-s-0.51}` keeps
/// `φ ∈ H^{s}` while `‖φ‖_{H^{s+1}}` grows without bound in `K`.
pub const CRITICAL_EXCESS: f64 = 0.51;

/// `a cos(kx) + b sin(kx)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub k: usize,
    pub cos: f64,
    pub sin: f64,
}

/// Mode lists read and print as `k:a` or `k:a:b`, comma separated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeList(pub Vec<ModeTerm>);

impl FromStr for ModeList {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let terms = text
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let parts: Vec<&str> = t.split(':').map(str::trim).collect();
                let bad = || format!("mode term `{t}` is not `k:a` or `k:a:b`");
                if !(2..=3).contains(&parts.len()) {
                    return Err(bad());
                }
                let k = parts[0].parse::<usize>().map_err(|_| bad())?;
                let num = |p: &str| {
                    p.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(bad)
                };
                let cos = num(parts[1])?;
                let sin = if parts.len() == 3 {
                    num(parts[2])?
                } else {
                    0.0
                };
                Ok(ModeTerm { k, cos, sin })
            })
            .collect::<Result<Vec<_>, String>>()?;
        if terms.is_empty() {
            return Err("mode list is empty".into());
        }
        Ok(ModeList(terms))
    }
}

impl fmt::Display for ModeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if t.sin == 0.0 {
                write!(f, "{}:{}", t.k, t.cos)?;
            } else {
                write!(f, "{}:{}:{}", t.k, t.cos, t.sin)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialDataKind {
    ModeList(ModeList),
    /// `|ĉ(k)| = k^{-decay}` with random phases; `decay` defaults to `s + 2`.
    RandomSobolev {
        decay: Option<f64>,
    },
    /// `|ĉ(k)| = k^{-s-0.51}` with random phases.
    CriticalDecay,
}

impl InitialDataKind {
    pub fn name(&self) -> &'static str {
        match self {
            InitialDataKind::ModeList(_) => "mode-list",
            InitialDataKind::RandomSobolev { .. } => "random-sobolev",
            InitialDataKind::CriticalDecay => "critical-decay",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub kind: InitialDataKind,
    /// Target `‖φ‖_{H^r}`; the raw field is kept when `None`.
    pub norm: Option<f64>,
    /// `r` above; defaults to `s`.
    pub norm_index: Option<f64>,
    /// Normalize the truncation at this many modes instead of at `K`, so
    /// runs at different `K` share one scale.
    pub reference_mode: Option<usize>,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            kind: InitialDataKind::RandomSobolev { decay: None },
            norm: Some(1.0),
            norm_index: None,
            reference_mode: None,
        }
    }
}

fn modes_field(list: &ModeList, max_mode: usize) -> Result<SpectralField> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); max_mode + 1];
    let root = (2.0 * std::f64::consts::PI).sqrt();
    for t in &list.0 {
        if t.k > max_mode {
            return Err(Error::param(
                "modes",
                format!("mode {} exceeds max_mode {max_mode}", t.k),
            ));
        }
        if t.k == 0 {
            coeffs[0] += Complex64::new(t.cos * root, 0.0);
        } else {
            // a cos + b sin has c_k = √(2π)(a − ib)/2
            coeffs[t.k] += Complex64::new(t.cos, -t.sin) * (root / 2.0);
        }
    }
    SpectralField::from_coeffs(coeffs)
}

/// Build initial data on `max_mode` modes. Deterministic in `seed`.
pub fn make_initial_data(
    spec: &DataSpec,
    s: f64,
    seed: u64,
    max_mode: usize,
) -> Result<SpectralField> {
    let build_at = max_mode.max(spec.reference_mode.unwrap_or(0));
    let raw = match &spec.kind {
        InitialDataKind::ModeList(list) => modes_field(list, max_mode)?.resized(build_at),
        InitialDataKind::RandomSobolev { decay } => {
            power_law_field(build_at, decay.unwrap_or(s + 2.0), 0.0, seed)
        }
        InitialDataKind::CriticalDecay => power_law_field(build_at, s + CRITICAL_EXCESS, 0.0, seed),
    };
    let Some(target) = spec.norm else {
        return Ok(raw.resized(max_mode));
    };
    if !(target >= 0.0) || !target.is_finite() {
        return Err(Error::param(
            "norm",
            format!("must be finite and >= 0, got {target}"),
        ));
    }
    let index = spec.norm_index.unwrap_or(s);
    let reference = raw.resized(spec.reference_mode.unwrap_or(max_mode));
    let current = sobolev_norm(&reference, index)?;
    if current == 0.0 {
        return Err(Error::param("norm", "cannot normalize the zero field"));
    }
    Ok(raw.resized(max_mode).scale(target / current))
}
