//! Trace, trajectory and summary files. Every file ends with a
//! `# sha256=<hex>` line over all bytes before it.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dynamics::{EquationParams, TimeDirection, Trajectory, TrajectoryStatus};
use crate::error::{Error, Result};
use crate::experiments::{EnergyRecord, EnergyTrace};
use crate::spectral::SpectralField;

pub const FORMAT_VERSION: u32 = 1;

const CHECKSUM_PREFIX: &str = "# sha256=";
const TRACE_COLUMNS: &str = "t,L2,Hs,Es_total,Es_correction,Etilde,pairing_integral";

fn digest(payload: &str) -> String {
    format!("{:x}", Sha256::digest(payload.as_bytes()))
}

/// Append the checksum line to `payload`.
pub fn seal(mut payload: String) -> String {
    let sum = digest(&payload);
    payload.push_str(CHECKSUM_PREFIX);
    payload.push_str(&sum);
    payload.push('\n');
    payload
}

/// Verify and strip the checksum line.
pub fn unseal<'a>(text: &'a str, path: &Path) -> Result<&'a str> {
    let fail = |message: &str| Error::Format {
        path: path.to_path_buf(),
        message: message.into(),
    };
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| fail("missing final newline"))?;
    let start = body.rfind('\n').map_or(0, |i| i + 1);
    let sum = body[start..]
        .strip_prefix(CHECKSUM_PREFIX)
        .ok_or_else(|| fail("missing checksum line"))?;
    let payload = &text[..start];
    if digest(payload) != sum {
        return Err(fail("checksum mismatch"));
    }
    Ok(payload)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `{:e}` prints the shortest representation that parses back exactly.
fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn trace_to_csv(trace: &EnergyTrace) -> String {
    let mut out = format!(
        "# bolab-trace format_version={FORMAT_VERSION} s={}\n{TRACE_COLUMNS}\n",
        num(trace.s)
    );
    for r in &trace.records {
        let etilde = r.etilde.map(num).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(r.t),
            num(r.l2),
            num(r.hs),
            num(r.es_total),
            num(r.es_correction),
            etilde,
            num(r.pairing)
        );
    }
    seal(out)
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.split_whitespace()
        .find_map(|w| w.strip_prefix(key)?.strip_prefix('='))
}

pub fn trace_from_csv(text: &str, path: &Path) -> Result<EnergyTrace> {
    let fail = |line: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let payload = unseal(text, path)?;
    let mut lines = payload.lines();
    let banner = lines.next().unwrap_or_default();
    if !banner.starts_with("# bolab-trace") {
        return Err(fail(1, "not a trace file".into()));
    }
    check_version(header_value(banner, "format_version"), path)?;
    let s = header_value(banner, "s")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| fail(1, "missing `s`".into()))?;
    if lines.next() != Some(TRACE_COLUMNS) {
        return Err(fail(2, format!("expected columns `{TRACE_COLUMNS}`")));
    }
    let records = lines
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 7 {
                return Err(fail(
                    i + 3,
                    format!("expected 7 columns, found {}", cells.len()),
                ));
            }
            let parse = |c: &str| {
                c.parse::<f64>()
                    .map_err(|_| fail(i + 3, format!("bad number `{c}`")))
            };
            Ok(EnergyRecord {
                t: parse(cells[0])?,
                l2: parse(cells[1])?,
                hs: parse(cells[2])?,
                es_total: parse(cells[3])?,
                es_correction: parse(cells[4])?,
                etilde: if cells[5].is_empty() {
                    None
                } else {
                    Some(parse(cells[5])?)
                },
                pairing: parse(cells[6])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EnergyTrace { s, records })
}

fn check_version(found: Option<&str>, path: &Path) -> Result<()> {
    match found.and_then(|v| v.parse::<u32>().ok()) {
        Some(FORMAT_VERSION) => Ok(()),
        other => Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("unsupported format_version {other:?}, expected {FORMAT_VERSION}"),
        }),
    }
}

/// One line per snapshot: the time, then `re im` for `k = 0..=K`.
pub fn trajectory_to_text(traj: &Trajectory) -> String {
    let p = &traj.params;
    let k = traj.snapshots.first().map_or(0, SpectralField::max_mode);
    let direction = match p.direction {
        TimeDirection::Forward => "forward",
        TimeDirection::Backward => "backward",
    };
    let status = match traj.status {
        TrajectoryStatus::Completed => "completed".to_string(),
        TrajectoryStatus::BlowupDetected { time } => format!("blowup@{}", num(time)),
    };
    let mut out = format!(
        "# bolab-trajectory format_version={FORMAT_VERSION}\n# max_mode={k} dt={} c1={} c2={} gamma={} direction={direction} nonlinear={} status={status}\n",
        num(traj.dt),
        num(p.c1),
        num(p.c2),
        num(p.gamma),
        p.nonlinear,
    );
    for (t, u) in traj.times.iter().zip(&traj.snapshots) {
        out.push_str(&num(*t));
        for c in u.coeffs() {
            let _ = write!(out, " {} {}", num(c.re), num(c.im));
        }
        out.push('\n');
    }
    seal(out)
}

pub fn trajectory_from_text(text: &str, path: &Path) -> Result<Trajectory> {
    let fail = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let payload = unseal(text, path)?;
    let mut lines = payload.lines();
    let banner = lines.next().unwrap_or_default();
    if !banner.starts_with("# bolab-trajectory") {
        return Err(fail("not a trajectory file".into()));
    }
    check_version(header_value(banner, "format_version"), path)?;
    let header = lines
        .next()
        .ok_or_else(|| fail("missing parameter header".into()))?;
    let field =
        |key: &str| header_value(header, key).ok_or_else(|| fail(format!("header lacks `{key}`")));
    let float = |key: &str| {
        field(key)?
            .parse::<f64>()
            .map_err(|_| fail(format!("bad `{key}`")))
    };
    let k: usize = field("max_mode")?
        .parse()
        .map_err(|_| fail("bad `max_mode`".into()))?;
    let params = EquationParams {
        c1: float("c1")?,
        c2: float("c2")?,
        gamma: float("gamma")?,
        direction: match field("direction")? {
            "forward" => TimeDirection::Forward,
            "backward" => TimeDirection::Backward,
            other => return Err(fail(format!("bad direction `{other}`"))),
        },
        nonlinear: field("nonlinear")?
            .parse()
            .map_err(|_| fail("bad `nonlinear`".into()))?,
    };
    let status = match field("status")? {
        "completed" => TrajectoryStatus::Completed,
        other => {
            let time = other
                .strip_prefix("blowup@")
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| fail(format!("bad status `{other}`")))?;
            TrajectoryStatus::BlowupDetected { time }
        }
    };
    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    for (i, line) in lines.enumerate() {
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|w| w.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| fail(format!("line {}: bad number", i + 3)))?;
        if values.len() != 1 + 2 * (k + 1) {
            return Err(fail(format!(
                "line {}: expected {} numbers",
                i + 3,
                1 + 2 * (k + 1)
            )));
        }
        times.push(values[0]);
        let coeffs = values[1..]
            .chunks(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        snapshots.push(SpectralField::from_coeffs(coeffs)?);
    }
    Ok(Trajectory {
        params,
        dt: float("dt")?,
        times,
        snapshots,
        status,
    })
}

/// One pass/fail line of a summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// JSON has no NaN; it is written as `null` and read back as NaN.
    #[serde(deserialize_with = "nan_from_null")]
    pub value: f64,
    /// Human-readable condition, e.g. `<= 1e-6`.
    pub condition: String,
    pub passed: bool,
}

fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("<= {limit:e}"),
            passed: value <= limit,
        }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!(">= {limit:e}"),
            passed: value >= limit,
        }
    }

    pub fn holds(name: &str, passed: bool) -> Self {
        Self {
            name: name.into(),
            value: f64::from(u8::from(passed)),
            condition: "holds".into(),
            passed,
        }
    }
}

/// JSON summary of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub format_version: u32,
    pub experiment: String,
    pub config: Value,
    pub report: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Summary {
    pub fn new(
        experiment: &str,
        config: &impl Serialize,
        report: &impl Serialize,
        checks: Vec<Check>,
    ) -> Result<Self> {
        Ok(Self {
            format_version: FORMAT_VERSION,
            experiment: experiment.into(),
            config: serde_json::to_value(config)?,
            report: serde_json::to_value(report)?,
            passed: checks.iter().all(|c| c.passed),
            checks,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(seal(text))
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let value: Value = serde_json::from_str(unseal(text, path)?)?;
        validate_summary(&value).map_err(|message| Error::Format {
            path: path.to_path_buf(),
            message,
        })?;
        Ok(serde_json::from_value(value)?)
    }
}

/// Structural check of a summary document: required keys with the right
/// JSON types, a known format version and `passed` consistent with checks.
pub fn validate_summary(doc: &Value) -> std::result::Result<(), String> {
    let obj = doc.as_object().ok_or("summary must be an object")?;
    let need = |key: &str, ok: fn(&Value) -> bool, what: &str| match obj.get(key) {
        Some(v) if ok(v) => Ok(()),
        Some(_) => Err(format!("`{key}` must be {what}")),
        None => Err(format!("missing `{key}`")),
    };
    need("format_version", Value::is_u64, "an unsigned integer")?;
    need("experiment", Value::is_string, "a string")?;
    need("config", Value::is_object, "an object")?;
    need("report", |v| !v.is_null(), "present")?;
    need("checks", Value::is_array, "an array")?;
    need("passed", Value::is_boolean, "a boolean")?;
    if obj["format_version"].as_u64() != Some(u64::from(FORMAT_VERSION)) {
        return Err(format!(
            "unsupported format_version {}",
            obj["format_version"]
        ));
    }
    let mut all = true;
    for (i, c) in obj["checks"].as_array().into_iter().flatten().enumerate() {
        let c = c
            .as_object()
            .ok_or(format!("checks[{i}] must be an object"))?;
        let typed = c.get("name").is_some_and(Value::is_string)
            && c.get("value").is_some_and(|v| v.is_number() || v.is_null())
            && c.get("condition").is_some_and(Value::is_string)
            && c.get("passed").is_some_and(Value::is_boolean);
        if !typed {
            return Err(format!(
                "checks[{i}] needs name, value, condition and passed"
            ));
        }
        all &= c["passed"].as_bool().unwrap_or(false);
    }
    if obj["passed"].as_bool() != Some(all) {
        return Err("`passed` disagrees with the checks".into());
    }
    Ok(())
}
