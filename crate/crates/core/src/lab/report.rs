//! The full lab run and its JSON report.

use serde::{Deserialize, Serialize};

use super::estimates::{
    check_comm_est2, check_commutator_bounds, check_dl1, check_gagliardo_nirenberg, check_good2,
    check_hilbert_commutator, check_ibp, check_reduction, CommEst2Variant, LambdaKind, PairingPart,
};
use super::identities::{
    cancellation_scale, check_cancellation, check_freq_est, check_good1, good1_scale, ibp_identity,
    ps_constant_residual, reduction_identity,
};
use super::{ConstantEstimate, LabCorpus};
use crate::error::{Error, Result};

pub const LAB_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    pub seed: u64,
    pub corpus_size: usize,
    pub max_mode: usize,
    pub s: f64,
    pub s0: f64,
    /// Identity sweeps use their own corpus size and resolution.
    pub identity_samples: usize,
    pub identity_max_mode: usize,
    pub freq_k_max: u64,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            seed: 20240601,
            corpus_size: 256,
            max_mode: 32,
            s: 3.0,
            s0: 2.6,
            identity_samples: 100,
            identity_max_mode: 32,
            freq_k_max: 1 << 14,
        }
    }
}

impl LabConfig {
    pub fn validate(&self) -> Result<()> {
        if self.corpus_size == 0 || self.identity_samples == 0 {
            return Err(Error::param("corpus_size", "corpora must be nonempty"));
        }
        if self.max_mode < 4 || self.identity_max_mode < 4 {
            return Err(Error::param("max_mode", "need at least 4 modes"));
        }
        if !(self.s >= 2.0) {
            return Err(Error::param("s", format!("must be >= 2, got {}", self.s)));
        }
        if !(self.s0 > 2.5) {
            return Err(Error::param(
                "s0",
                format!("must exceed 5/2, got {}", self.s0),
            ));
        }
        Ok(())
    }
}

/// Largest relative residual of one identity over a corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub name: String,
    pub max_relative_residual: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub format_version: u32,
    pub seed: u64,
    pub config: LabConfig,
    pub estimates: Vec<ConstantEstimate>,
    pub identities: Vec<IdentityRecord>,
    pub freq_est: bool,
    pub note: String,
}

impl LabReport {
    /// Every identity within `tolerance` and every estimate finite.
    pub fn passes(&self, tolerance: f64) -> bool {
        self.freq_est
            && self
                .identities
                .iter()
                .all(|r| r.max_relative_residual <= tolerance)
            && self.estimates.iter().all(|e| e.is_finite())
    }
}

fn record(
    name: &str,
    corpus: &LabCorpus,
    residual: impl Fn(&super::LabSample) -> f64 + Sync + Send,
) -> IdentityRecord {
    use rayon::prelude::*;
    let max = corpus
        .samples
        .par_iter()
        .map(residual)
        .reduce(|| 0.0, f64::max);
    IdentityRecord {
        name: name.to_owned(),
        max_relative_residual: max,
        samples: corpus.len(),
    }
}

/// Relative residuals of the exact identities over `corpus`.
pub fn identity_sweep(corpus: &LabCorpus) -> Vec<IdentityRecord> {
    vec![
        record("cancellation", corpus, |x| {
            check_cancellation(&x.f) / cancellation_scale(&x.f)
        }),
        record("good1", corpus, |x| {
            let scale = good1_scale(&x.f, &x.g, &x.h);
            if scale > 0.0 {
                check_good1(&x.f, &x.g, &x.h) / scale
            } else {
                0.0
            }
        }),
        record("integration-by-parts", corpus, |x| {
            ibp_identity(&x.f, &x.g).1.relative()
        }),
        record("reduction", corpus, |x| {
            reduction_identity(&x.f, &x.g).1.relative()
        }),
        record("ps-constant", corpus, |x| {
            ps_constant_residual(x.f.mean(), &x.g, corpus.s).relative()
        }),
    ]
}

/// Every constant estimate at `(s, s0)` on `corpus`.
pub fn estimate_suite(corpus: &LabCorpus, s: f64, s0: f64) -> Result<Vec<ConstantEstimate>> {
    let mut out = vec![
        check_ibp(corpus, s0)?,
        check_commutator_bounds(corpus, s, s0)?,
        check_hilbert_commutator(corpus, s0, 1)?,
        check_hilbert_commutator(corpus, s0, 2)?,
    ];
    for variant in [CommEst2Variant::First, CommEst2Variant::Second] {
        for lambda in [LambdaKind::Ds, LambdaKind::DsMinusOneDx] {
            out.push(check_comm_est2(corpus, s, s0, variant, lambda)?);
        }
    }
    out.push(check_reduction(corpus, s0)?);
    out.push(check_gagliardo_nirenberg(corpus, 0, s, f64::INFINITY)?);
    out.push(check_gagliardo_nirenberg(corpus, 1, s, 4.0)?);
    out.push(check_good2(corpus, s, s0, PairingPart::First)?);
    out.push(check_good2(corpus, s, s0, PairingPart::Second)?);
    out.push(check_dl1(corpus, s, s0)?);
    Ok(out)
}

pub fn run_lab(config: &LabConfig) -> Result<LabReport> {
    config.validate()?;
    let identity_corpus = LabCorpus::generate(
        config.seed,
        config.identity_samples,
        config.identity_max_mode,
        config.s,
    );
    let corpus = LabCorpus::generate(config.seed, config.corpus_size, config.max_mode, config.s);
    Ok(LabReport {
        format_version: LAB_FORMAT_VERSION,
        seed: config.seed,
        config: config.clone(),
        estimates: estimate_suite(&corpus, config.s, config.s0)?,
        identities: identity_sweep(&identity_corpus),
        freq_est: check_freq_est(config.freq_k_max),
        note: "max ratios are empirical lower bounds for the constants on this corpus, not proofs"
            .into(),
    })
}
