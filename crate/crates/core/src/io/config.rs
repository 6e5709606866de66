//! Run configuration: TOML sections of `key = value` lines.
//!
//! Every value remembers the line it came from, so unknown keys, type
//! mismatches and constraint violations all point at a line. Command-line
//! overrides enter through the same reader and are reported by key.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Spanned, Value};

use super::initial::{DataSpec, InitialDataKind, ModeList};
use crate::dynamics::{EquationParams, SolverConfig, Stepper, TimeDirection};
use crate::energy::validate_indices;
use crate::error::{Error, Result};
use crate::experiments::{BonaSmithConfig, DependenceConfig};
use crate::lab::LabConfig;
use crate::spectral::MollifierSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Conservation,
    EnergyMonitor,
    GammaSweep,
    BonaSmith,
    DiffEnergy,
    ContDep,
    VerifyLemmas,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Simulate,
        Command::Conservation,
        Command::EnergyMonitor,
        Command::GammaSweep,
        Command::BonaSmith,
        Command::DiffEnergy,
        Command::ContDep,
        Command::VerifyLemmas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Conservation => "conservation",
            Command::EnergyMonitor => "energy-monitor",
            Command::GammaSweep => "gamma-sweep",
            Command::BonaSmith => "bona-smith",
            Command::DiffEnergy => "diff-energy",
            Command::ContDep => "cont-dep",
            Command::VerifyLemmas => "verify-lemmas",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySettings {
    pub s: f64,
    pub s0: f64,
    /// Fixed `(a, b, c)`; calibrated on a probe corpus when `None`.
    pub constants: Option<[f64; 3]>,
    /// Sup-norm bound of the calibration probes.
    pub bound: f64,
    pub probes: usize,
    pub probe_max_mode: usize,
}

impl Default for EnergySettings {
    fn default() -> Self {
        Self {
            s: 3.0,
            s0: 2.6,
            constants: None,
            bound: 1.0,
            probes: 200,
            probe_max_mode: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    /// Regularization strengths for `gamma-sweep`, non-increasing.
    pub sweep_gammas: Vec<f64>,
    /// Mollifier scales for `bona-smith`.
    pub mollifier_gammas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Perturbation ladder for `cont-dep`, non-increasing.
    pub deltas: Vec<f64>,
    pub gamma_u: f64,
    pub gamma_v: f64,
    /// `dt` halvings in the conservation refinement.
    pub levels: usize,
    pub allow_non_integrable: bool,
    /// `diff-energy` pairs `φ` with `J_γφ` for this mollifier scale.
    pub partner_gamma: f64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        let halvings = |from: i32, to: i32| (from..=to).map(|j| 0.5f64.powi(j)).collect();
        Self {
            sweep_gammas: halvings(3, 7),
            mollifier_gammas: halvings(3, 8),
            alphas: vec![1.0, 2.0],
            deltas: vec![1e-1, 1e-2, 1e-3, 1e-4],
            gamma_u: 0.125,
            gamma_v: 0.125,
            levels: 2,
            allow_non_integrable: false,
            partner_gamma: 0.0625,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Taken from the command line when absent from the file.
    pub command: Option<Command>,
    /// At most `i64::MAX`, the largest TOML integer.
    pub seed: u64,
    pub out_dir: Option<String>,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub params: EquationParams,
    pub solver: SolverConfig,
    pub energy: EnergySettings,
    pub data: DataSpec,
    pub experiment: ExperimentSettings,
    pub lab: LabConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lab = LabConfig::default();
        Self {
            command: None,
            seed: lab.seed,
            out_dir: None,
            threads: 0,
            params: EquationParams::default(),
            solver: SolverConfig::default(),
            energy: EnergySettings::default(),
            data: DataSpec::default(),
            experiment: ExperimentSettings::default(),
            lab,
        }
    }
}

impl RunConfig {
    pub fn bona_smith(&self) -> BonaSmithConfig {
        BonaSmithConfig {
            s: self.energy.s,
            alphas: self.experiment.alphas.clone(),
            gammas: self.experiment.mollifier_gammas.clone(),
        }
    }

    pub fn dependence(&self) -> DependenceConfig {
        DependenceConfig {
            s: self.energy.s,
            s0: self.energy.s0,
            deltas: self.experiment.deltas.clone(),
            gamma_u: self.experiment.gamma_u,
            gamma_v: self.experiment.gamma_v,
            seed: crate::random::derive_seed(self.seed, 1),
            safe_horizon: None,
        }
    }

    /// Checks shared by every command. Errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.solver.validate()?;
        if i64::try_from(self.seed).is_err() {
            return Err(Error::param(
                "seed",
                format!("must be at most {}, got {}", i64::MAX, self.seed),
            ));
        }
        let e = &self.energy;
        validate_indices(e.s, e.s0)?;
        if e.s < e.s0 {
            return Err(Error::param(
                "s",
                format!("must be >= s0 = {}, got {}", e.s0, e.s),
            ));
        }
        if let Some(abc) = e.constants {
            if abc.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(Error::param("a", "energy constants must be finite and > 0"));
            }
        }
        if !(e.bound > 0.0) {
            return Err(Error::param("bound", "must be > 0"));
        }
        if e.probes == 0 || e.probe_max_mode < 4 {
            return Err(Error::param(
                "probes",
                "need a nonempty corpus on at least 4 modes",
            ));
        }
        if let Some(r) = self.data.norm_index {
            if !r.is_finite() || r < -1.0 {
                return Err(Error::param(
                    "norm_index",
                    format!("must be >= -1, got {r}"),
                ));
            }
        }
        if let Some(n) = self.data.norm {
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::param(
                    "norm",
                    format!("must be finite and > 0, got {n}"),
                ));
            }
        }
        let x = &self.experiment;
        if x.sweep_gammas.is_empty() || x.sweep_gammas.iter().any(|g| !(0.0..1.0).contains(g)) {
            return Err(Error::param("sweep_gammas", "need values in [0,1)"));
        }
        if x.sweep_gammas.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param(
                "sweep_gammas",
                "values must be non-increasing",
            ));
        }
        MollifierSpec::new(x.partner_gamma).map_err(|e| rename(e, &["gamma"], "partner_gamma"))?;
        MollifierSpec::new(x.gamma_u).map_err(|e| rename(e, &["gamma"], "gamma_u"))?;
        MollifierSpec::new(x.gamma_v).map_err(|e| rename(e, &["gamma"], "gamma_v"))?;
        if x.levels == 0 {
            return Err(Error::param("levels", "must be >= 1"));
        }
        self.bona_smith()
            .validate()
            .map_err(|e| rename(e, &["gamma", "alphas, gammas"], "mollifier_gammas"))?;
        self.dependence().validate()?;
        self.lab
            .validate()
            .map_err(|e| rename(e, &["max_mode"], "corpus_max_mode"))
    }
}

/// Point a validator's error at the config key it came from.
fn rename(e: Error, from: &[&str], key: &'static str) -> Error {
    match e {
        Error::InvalidParameter { name, reason } if from.contains(&name) => {
            Error::InvalidParameter { name: key, reason }
        }
        other => other,
    }
}

/// Where a value came from.
#[derive(Clone, Debug, PartialEq)]
enum Origin {
    Line(usize),
    Flag,
}

struct Entry {
    value: Value,
    origin: Origin,
}

/// Keys per section, in the order they are documented.
const KEYS: &[(&str, &[&str])] = &[
    ("run", &["command", "seed", "out", "threads"]),
    ("equation", &["c1", "c2", "gamma", "direction", "nonlinear"]),
    (
        "solver",
        &[
            "max_mode",
            "dt",
            "horizon",
            "stepper",
            "stride",
            "blowup_threshold",
        ],
    ),
    (
        "energy",
        &[
            "s",
            "s0",
            "a",
            "b",
            "c",
            "bound",
            "probes",
            "probe_max_mode",
        ],
    ),
    (
        "data",
        &[
            "kind",
            "modes",
            "decay",
            "norm",
            "norm_index",
            "reference_mode",
        ],
    ),
    (
        "experiment",
        &[
            "sweep_gammas",
            "mollifier_gammas",
            "alphas",
            "deltas",
            "gamma_u",
            "gamma_v",
            "levels",
            "allow_non_integrable",
            "partner_gamma",
        ],
    ),
    (
        "lab",
        &[
            "corpus_size",
            "corpus_max_mode",
            "identity_samples",
            "identity_max_mode",
            "freq_k_max",
        ],
    ),
];

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

/// Parsed but untyped configuration.
pub struct ConfigDocument {
    entries: BTreeMap<(String, String), Entry>,
}

type RawDocument = BTreeMap<Spanned<String>, Spanned<BTreeMap<Spanned<String>, Spanned<Value>>>>;

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDocument = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let mut entries = BTreeMap::new();
        for (section, table) in raw {
            let Some((_, known)) = KEYS.iter().find(|(name, _)| *name == section.get_ref()) else {
                return Err(Error::Config {
                    line: line_of(text, section.span().start),
                    message: format!("unknown section `[{}]`", section.get_ref()),
                });
            };
            for (key, value) in table.into_inner() {
                let line = line_of(text, key.span().start);
                if !known.contains(&key.get_ref().as_str()) {
                    return Err(Error::Config {
                        line,
                        message: format!(
                            "unknown key `{}` in `[{}]`",
                            key.get_ref(),
                            section.get_ref()
                        ),
                    });
                }
                entries.insert(
                    (section.get_ref().clone(), key.into_inner()),
                    Entry {
                        value: value.into_inner(),
                        origin: Origin::Line(line),
                    },
                );
            }
        }
        Ok(Self { entries })
    }

    /// Apply `section.key=value`; the value is read as TOML, or as a bare
    /// string when that fails.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let fail = |message: String| Error::Override {
            key: assignment.to_string(),
            message,
        };
        let (path, raw) = assignment
            .split_once('=')
            .ok_or_else(|| fail("expected `section.key=value`".into()))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| fail("expected `section.key`".into()))?;
        let known = KEYS
            .iter()
            .find(|(name, _)| *name == section)
            .ok_or_else(|| fail(format!("unknown section `{section}`")))?;
        if !known.1.contains(&key) {
            return Err(fail(format!("unknown key `{key}` in `[{section}]`")));
        }
        let value = toml::from_str::<BTreeMap<String, Value>>(&format!("v = {}", raw.trim()))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.trim().to_string()));
        self.entries.insert(
            (section.to_string(), key.to_string()),
            Entry {
                value,
                origin: Origin::Flag,
            },
        );
        Ok(())
    }

    pub fn into_config(self) -> Result<RunConfig> {
        Reader {
            doc: self,
            seen: HashMap::new(),
        }
        .build()
    }
}

struct Reader {
    doc: ConfigDocument,
    /// Key name to origin, for pointing validator errors at a line.
    seen: HashMap<&'static str, Origin>,
}

fn error_at(origin: Option<&Origin>, key: &str, message: String) -> Error {
    match origin {
        Some(Origin::Line(line)) => Error::Config {
            line: *line,
            message: format!("`{key}`: {message}"),
        },
        Some(Origin::Flag) => Error::Override {
            key: key.to_string(),
            message,
        },
        None => Error::Config {
            line: 0,
            message: format!("`{key}`: {message}"),
        },
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn as_usize(v: &Value) -> Option<usize> {
    v.as_integer().and_then(|i| usize::try_from(i).ok())
}

fn as_f64_list(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(as_f64).collect()
}

impl Reader {
    fn get<T>(
        &mut self,
        section: &str,
        key: &'static str,
        expect: &str,
        convert: impl Fn(&Value) -> Option<T>,
    ) -> Result<Option<T>> {
        let Some(entry) = self
            .doc
            .entries
            .get(&(section.to_string(), key.to_string()))
        else {
            return Ok(None);
        };
        self.seen.insert(key, entry.origin.clone());
        match convert(&entry.value) {
            Some(v) => Ok(Some(v)),
            None => Err(error_at(
                Some(&entry.origin),
                key,
                format!("expected {expect}, found {}", entry.value),
            )),
        }
    }

    fn f64(&mut self, section: &str, key: &'static str) -> Result<Option<f64>> {
        self.get(section, key, "a number", as_f64)
    }

    fn usize(&mut self, section: &str, key: &'static str) -> Result<Option<usize>> {
        self.get(section, key, "a non-negative integer", as_usize)
    }

    fn list(&mut self, section: &str, key: &'static str) -> Result<Option<Vec<f64>>> {
        self.get(section, key, "an array of numbers", as_f64_list)
    }

    fn bool(&mut self, section: &str, key: &'static str) -> Result<Option<bool>> {
        self.get(section, key, "true or false", Value::as_bool)
    }

    fn parsed<T: FromStr>(
        &mut self,
        section: &str,
        key: &'static str,
        expect: &str,
    ) -> Result<Option<T>> {
        self.get(section, key, expect, |v| {
            v.as_str().and_then(|s| s.parse().ok())
        })
    }

    fn named<T>(
        &mut self,
        section: &str,
        key: &'static str,
        options: &[(&str, T)],
    ) -> Result<Option<T>>
    where
        T: Copy,
    {
        let expect = format!(
            "one of {}",
            options
                .iter()
                .map(|(n, _)| format!("\"{n}\""))
                .collect::<Vec<_>>()
                .join(", ")
        );
        self.get(section, key, &expect, |v| {
            let s = v.as_str()?;
            options.iter().find(|(n, _)| *n == s).map(|(_, t)| *t)
        })
    }

    fn build(mut self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        let commands: Vec<(&str, Command)> = Command::ALL.iter().map(|c| (c.name(), *c)).collect();
        c.command = self.named("run", "command", &commands)?;
        if let Some(seed) = self.get(
            "run",
            "seed",
            "an integer in 0..=9223372036854775807",
            as_usize,
        )? {
            c.seed = seed as u64;
        }
        c.out_dir = self.get("run", "out", "a string", |v| v.as_str().map(String::from))?;
        c.threads = self.usize("run", "threads")?.unwrap_or(c.threads);

        let p = &mut c.params;
        p.c1 = self.f64("equation", "c1")?.unwrap_or(p.c1);
        p.c2 = self.f64("equation", "c2")?.unwrap_or(p.c2);
        p.gamma = self.f64("equation", "gamma")?.unwrap_or(p.gamma);
        let directions = [
            ("forward", TimeDirection::Forward),
            ("backward", TimeDirection::Backward),
        ];
        p.direction = self
            .named("equation", "direction", &directions)?
            .unwrap_or(p.direction);
        p.nonlinear = self.bool("equation", "nonlinear")?.unwrap_or(p.nonlinear);

        let steppers = [
            ("etdrk4", Stepper::Etdrk4),
            ("ifrk4", Stepper::Ifrk4),
            ("picard", Stepper::Picard),
        ];
        let v = &mut c.solver;
        v.max_mode = self.usize("solver", "max_mode")?.unwrap_or(v.max_mode);
        v.dt = self.f64("solver", "dt")?.unwrap_or(v.dt);
        v.horizon = self.f64("solver", "horizon")?.unwrap_or(v.horizon);
        v.stepper = self
            .named("solver", "stepper", &steppers)?
            .unwrap_or(v.stepper);
        v.stride = self.usize("solver", "stride")?.unwrap_or(v.stride);
        v.blowup_threshold = self
            .f64("solver", "blowup_threshold")?
            .unwrap_or(v.blowup_threshold);

        let e = &mut c.energy;
        e.s = self.f64("energy", "s")?.unwrap_or(e.s);
        e.s0 = self.f64("energy", "s0")?.unwrap_or(e.s0);
        let abc = [
            self.f64("energy", "a")?,
            self.f64("energy", "b")?,
            self.f64("energy", "c")?,
        ];
        e.constants = match abc {
            [Some(a), Some(b), Some(c)] => Some([a, b, c]),
            [None, None, None] => None,
            _ => {
                let origin = ["a", "b", "c"].iter().find_map(|k| self.seen.get(k));
                return Err(error_at(
                    origin,
                    "a",
                    "set all of a, b, c or none of them".into(),
                ));
            }
        };
        e.bound = self.f64("energy", "bound")?.unwrap_or(e.bound);
        e.probes = self.usize("energy", "probes")?.unwrap_or(e.probes);
        e.probe_max_mode = self
            .usize("energy", "probe_max_mode")?
            .unwrap_or(e.probe_max_mode);

        let kinds = [
            ("mode-list", 0),
            ("random-sobolev", 1),
            ("critical-decay", 2),
        ];
        let kind = self.named("data", "kind", &kinds)?.unwrap_or(1);
        let modes: Option<ModeList> =
            self.parsed("data", "modes", "a mode list like \"1:1, 2:0.5:0.5\"")?;
        let decay = self.f64("data", "decay")?;
        c.data.kind = match kind {
            0 => InitialDataKind::ModeList(modes.ok_or_else(|| {
                error_at(
                    self.seen.get("kind"),
                    "modes",
                    "mode-list data needs `modes`".into(),
                )
            })?),
            1 => InitialDataKind::RandomSobolev { decay },
            _ => InitialDataKind::CriticalDecay,
        };
        c.data.norm = self.f64("data", "norm")?.or(c.data.norm);
        c.data.norm_index = self.f64("data", "norm_index")?;
        c.data.reference_mode = self.usize("data", "reference_mode")?;

        let x = &mut c.experiment;
        x.sweep_gammas = self
            .list("experiment", "sweep_gammas")?
            .unwrap_or(std::mem::take(&mut x.sweep_gammas));
        x.mollifier_gammas = self
            .list("experiment", "mollifier_gammas")?
            .unwrap_or(std::mem::take(&mut x.mollifier_gammas));
        x.alphas = self
            .list("experiment", "alphas")?
            .unwrap_or(std::mem::take(&mut x.alphas));
        x.deltas = self
            .list("experiment", "deltas")?
            .unwrap_or(std::mem::take(&mut x.deltas));
        x.gamma_u = self.f64("experiment", "gamma_u")?.unwrap_or(x.gamma_u);
        x.gamma_v = self.f64("experiment", "gamma_v")?.unwrap_or(x.gamma_v);
        x.levels = self.usize("experiment", "levels")?.unwrap_or(x.levels);
        x.allow_non_integrable = self
            .bool("experiment", "allow_non_integrable")?
            .unwrap_or(x.allow_non_integrable);
        x.partner_gamma = self
            .f64("experiment", "partner_gamma")?
            .unwrap_or(x.partner_gamma);

        let l = &mut c.lab;
        l.corpus_size = self.usize("lab", "corpus_size")?.unwrap_or(l.corpus_size);
        l.max_mode = self.usize("lab", "corpus_max_mode")?.unwrap_or(l.max_mode);
        l.identity_samples = self
            .usize("lab", "identity_samples")?
            .unwrap_or(l.identity_samples);
        l.identity_max_mode = self
            .usize("lab", "identity_max_mode")?
            .unwrap_or(l.identity_max_mode);
        l.freq_k_max = self
            .usize("lab", "freq_k_max")?
            .map_or(l.freq_k_max, |v| v as u64);
        l.seed = c.seed;
        l.s = c.energy.s;
        l.s0 = c.energy.s0;

        c.validate().map_err(|err| match err {
            Error::InvalidParameter { name, reason } => error_at(self.seen.get(name), name, reason),
            other => other,
        })?;
        Ok(c)
    }
}

/// Parse and validate a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    ConfigDocument::parse(text)?.into_config()
}

/// Parse a file, then apply `section.key=value` overrides in order.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut doc = ConfigDocument::parse(text)?;
    for o in overrides {
        doc.set(o)?;
    }
    doc.into_config()
}

/// Render every setting; `parse_config` of the result reproduces `cfg`.
pub fn serialize_config(cfg: &RunConfig) -> String {
    fn float(x: f64) -> Value {
        Value::Float(x)
    }
    fn int(x: usize) -> Value {
        Value::Integer(x as i64)
    }
    fn list(xs: &[f64]) -> Value {
        Value::Array(xs.iter().copied().map(Value::Float).collect())
    }
    fn text(s: &str) -> Value {
        Value::String(s.to_string())
    }
    let mut doc: BTreeMap<&str, BTreeMap<&str, Value>> = BTreeMap::new();
    let mut put = |section: &'static str, key: &'static str, v: Value| {
        doc.entry(section).or_default().insert(key, v);
    };
    if let Some(cmd) = cfg.command {
        put("run", "command", text(cmd.name()));
    }
    put("run", "seed", Value::Integer(cfg.seed as i64));
    if let Some(out) = &cfg.out_dir {
        put("run", "out", text(out));
    }
    put("run", "threads", int(cfg.threads));

    let p = &cfg.params;
    put("equation", "c1", float(p.c1));
    put("equation", "c2", float(p.c2));
    put("equation", "gamma", float(p.gamma));
    let direction = match p.direction {
        TimeDirection::Forward => "forward",
        TimeDirection::Backward => "backward",
    };
    put("equation", "direction", text(direction));
    put("equation", "nonlinear", Value::Boolean(p.nonlinear));

    let v = &cfg.solver;
    put("solver", "max_mode", int(v.max_mode));
    put("solver", "dt", float(v.dt));
    put("solver", "horizon", float(v.horizon));
    let stepper = match v.stepper {
        Stepper::Etdrk4 => "etdrk4",
        Stepper::Ifrk4 => "ifrk4",
        Stepper::Picard => "picard",
    };
    put("solver", "stepper", text(stepper));
    put("solver", "stride", int(v.stride));
    put("solver", "blowup_threshold", float(v.blowup_threshold));

    let e = &cfg.energy;
    put("energy", "s", float(e.s));
    put("energy", "s0", float(e.s0));
    if let Some([a, b, c]) = e.constants {
        put("energy", "a", float(a));
        put("energy", "b", float(b));
        put("energy", "c", float(c));
    }
    put("energy", "bound", float(e.bound));
    put("energy", "probes", int(e.probes));
    put("energy", "probe_max_mode", int(e.probe_max_mode));

    let d = &cfg.data;
    put("data", "kind", text(d.kind.name()));
    match &d.kind {
        InitialDataKind::ModeList(list) => put("data", "modes", text(&list.to_string())),
        InitialDataKind::RandomSobolev { decay: Some(decay) } => {
            put("data", "decay", float(*decay))
        }
        _ => {}
    }
    // an absent norm means the default, so a raw field cannot round-trip
    if let Some(n) = d.norm {
        put("data", "norm", float(n));
    }
    if let Some(r) = d.norm_index {
        put("data", "norm_index", float(r));
    }
    if let Some(m) = d.reference_mode {
        put("data", "reference_mode", int(m));
    }

    let x = &cfg.experiment;
    put("experiment", "sweep_gammas", list(&x.sweep_gammas));
    put("experiment", "mollifier_gammas", list(&x.mollifier_gammas));
    put("experiment", "alphas", list(&x.alphas));
    put("experiment", "deltas", list(&x.deltas));
    put("experiment", "gamma_u", float(x.gamma_u));
    put("experiment", "gamma_v", float(x.gamma_v));
    put("experiment", "levels", int(x.levels));
    put(
        "experiment",
        "allow_non_integrable",
        Value::Boolean(x.allow_non_integrable),
    );
    put("experiment", "partner_gamma", float(x.partner_gamma));

    let l = &cfg.lab;
    put("lab", "corpus_size", int(l.corpus_size));
    put("lab", "corpus_max_mode", int(l.max_mode));
    put("lab", "identity_samples", int(l.identity_samples));
    put("lab", "identity_max_mode", int(l.identity_max_mode));
    put("lab", "freq_k_max", Value::Integer(l.freq_k_max as i64));

    toml::to_string(&doc).expect("config tables serialize")
}
