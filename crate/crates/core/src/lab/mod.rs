//! Executable identities and randomized constant estimates.
//!
//! Identities are checked to machine precision with exact-mode products.
//! Inequalities of the form `LHS <= C·RHS` are probed by the largest
//! observed ratio `LHS/RHS` over a seeded corpus; a bounded ratio that is
//! stable under corpus and resolution refinement is evidence, not proof.

mod commutators;
mod estimates;
mod identities;
mod report;

pub use commutators::{compute_ps, compute_qs, ps_symbol, qs_symbol, CommutatorForm};
pub use estimates::{
    check_comm_est2, check_commutator_bounds, check_dl1, check_gagliardo_nirenberg, check_good2,
    check_hilbert_commutator, check_ibp, check_reduction, dl1_terms, gn_ratio, CommEst2Variant,
    Dl1Terms, LambdaKind, PairingPart,
};
pub use identities::{
    cancellation_scale, check_cancellation, check_freq_est, check_good1, freq_est_holds,
    good1_scale, ibp_identity, ps_constant_residual, reduction_identity, Residual,
};
pub use report::{
    estimate_suite, identity_sweep, run_lab, IdentityRecord, LabConfig, LabReport,
    LAB_FORMAT_VERSION,
};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::random::{derive_seed, power_law_field, rng};
use crate::spectral::SpectralField;

/// Which inequality a [`ConstantEstimate`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    IntegrationByParts,
    CommutatorRemainder,
    HilbertCommutator,
    LambdaCommutator,
    BesselCommutator,
    Reduction,
    GagliardoNirenberg,
    TriplePairingFirst,
    TriplePairingSecond,
    DifferencePairing,
}

impl EstimateKind {
    pub fn id(self) -> &'static str {
        match self {
            Self::IntegrationByParts => "integration-by-parts",
            Self::CommutatorRemainder => "commutator-remainder",
            Self::HilbertCommutator => "hilbert-commutator",
            Self::LambdaCommutator => "lambda-commutator",
            Self::BesselCommutator => "bessel-commutator",
            Self::Reduction => "reduction",
            Self::GagliardoNirenberg => "gagliardo-nirenberg",
            Self::TriplePairingFirst => "triple-pairing-first",
            Self::TriplePairingSecond => "triple-pairing-second",
            Self::DifferencePairing => "difference-pairing",
        }
    }
}

/// Parameters an estimate was run with; unused ones stay `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateParams {
    pub s: Option<f64>,
    pub s0: Option<f64>,
    /// Derivative order (`k` or `l`).
    pub order: Option<u32>,
    /// Lebesgue exponent; `None` inside means `p = ∞` for Gagliardo-Nirenberg.
    pub exponent: Option<f64>,
}

/// Largest observed `LHS / RHS` over a corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub kind: EstimateKind,
    pub params: EstimateParams,
    /// Samples with a nonzero right-hand side.
    pub samples: usize,
    /// Samples skipped because both sides vanished.
    pub skipped: usize,
    pub max_ratio: f64,
    pub argmax_seed: Option<u64>,
    pub corpus_seed: u64,
    pub max_mode: usize,
}

impl ConstantEstimate {
    pub fn is_finite(&self) -> bool {
        self.max_ratio.is_finite()
    }

    /// Finite, with at least `min_samples` informative samples.
    pub fn is_valid(&self, min_samples: usize) -> bool {
        self.is_finite() && self.samples >= min_samples
    }
}

/// One corpus member: three independent fields drawn from `seed`.
#[derive(Clone, Debug)]
pub struct LabSample {
    pub seed: u64,
    pub f: SpectralField,
    pub g: SpectralField,
    pub h: SpectralField,
}

/// Seeded random fields with `|k|^{-d}` spectra, `d ∈ {s+2, s+0.51}`.
///
/// Sample `i` depends only on `(seed, i)` and the spectra extend by prefix
/// when `max_mode` grows, so doubling either the size or the resolution
/// keeps every existing sample and refines it.
#[derive(Clone, Debug)]
pub struct LabCorpus {
    pub seed: u64,
    pub max_mode: usize,
    pub s: f64,
    pub samples: Vec<LabSample>,
}

fn random_field(rng: &mut impl Rng, s: f64, max_mode: usize) -> SpectralField {
    let decay = if rng.random_bool(0.5) {
        s + 2.0
    } else {
        s + 0.51
    };
    let mean = rng.random_range(-1.0..1.0);
    let amp = 10f64.powf(rng.random_range(-1.0..1.0));
    power_law_field(max_mode, decay, mean, rng.random()).scale(amp)
}

impl LabCorpus {
    pub fn generate(seed: u64, size: usize, max_mode: usize, s: f64) -> Self {
        let samples = (0..size)
            .into_par_iter()
            .map(|i| {
                let sample_seed = derive_seed(seed, i as u64);
                let mut rng = rng(sample_seed);
                LabSample {
                    seed: sample_seed,
                    f: random_field(&mut rng, s, max_mode),
                    g: random_field(&mut rng, s, max_mode),
                    h: random_field(&mut rng, s, max_mode),
                }
            })
            .collect();
        Self {
            seed,
            max_mode,
            s,
            samples,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Evaluate `lhs_rhs` on every sample and keep the largest ratio.
/// `Ok(None)` from the closure marks a sample to skip.
pub(crate) fn estimate(
    kind: EstimateKind,
    params: EstimateParams,
    corpus: &LabCorpus,
    lhs_rhs: impl Fn(&LabSample) -> Result<Option<(f64, f64)>> + Sync,
) -> Result<ConstantEstimate> {
    let evaluated: Vec<Result<Option<f64>>> = corpus
        .samples
        .par_iter()
        .map(|sample| {
            Ok(match lhs_rhs(sample)? {
                Some((lhs, rhs)) if rhs > 0.0 => Some(lhs.abs() / rhs),
                Some((lhs, _)) if lhs.abs() > 0.0 => Some(f64::INFINITY),
                _ => None,
            })
        })
        .collect();
    let mut est = ConstantEstimate {
        kind,
        params,
        samples: 0,
        skipped: 0,
        max_ratio: 0.0,
        argmax_seed: None,
        corpus_seed: corpus.seed,
        max_mode: corpus.max_mode,
    };
    for (sample, ratio) in corpus.samples.iter().zip(evaluated) {
        match ratio? {
            Some(r) => {
                est.samples += 1;
                let better = est.argmax_seed.is_none() || r > est.max_ratio || r.is_nan();
                if better && !est.max_ratio.is_nan() {
                    est.max_ratio = r;
                    est.argmax_seed = Some(sample.seed);
                }
            }
            None => est.skipped += 1,
        }
    }
    Ok(est)
}
