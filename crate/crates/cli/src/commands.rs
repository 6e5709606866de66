use std::path::{Path, PathBuf};

use bolab_core::dynamics::{solve, TrajectoryStatus};
use bolab_core::energy::{calibrate, EnergyCalibration, ProbeCorpus};
use bolab_core::experiments::{
    run_bona_smith, run_conservation_refinement, run_continuous_dependence, run_difference_energy,
    run_energy_monitor, run_gamma_sweep, EnergyTrace,
};
use bolab_core::io::{
    make_initial_data, serialize_config, trace_to_csv, trajectory_to_text, write_file, Check,
    Command, RunConfig, Summary,
};
use bolab_core::lab::run_lab;
use bolab_core::spectral::{mollify, MollifierSpec, SpectralField};
use bolab_core::Result;
use serde::Serialize;

/// Tolerances of the pass/fail lines in each summary.
const CONSERVATION_DRIFT: f64 = 1e-6;
const REFINEMENT_RATIO: f64 = 8.0;
const GAMMA_SPREAD: f64 = 4.0;
const RATE_TOLERANCE: f64 = 0.15;
const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Roundoff allowance per step, in units of machine epsilon. Below
/// `steps · ROUNDOFF_PER_STEP · ε` on the finest level the refinement ratio
/// only measures accumulated roundoff, which grows as `dt` shrinks.
const ROUNDOFF_PER_STEP: f64 = 10.0;

pub struct Outcome {
    pub summary: Summary,
    pub files: Vec<PathBuf>,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_file(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

fn calibration(cfg: &RunConfig) -> Result<EnergyCalibration> {
    let e = &cfg.energy;
    let (c1, c2) = (cfg.params.c1, cfg.params.c2);
    match e.constants {
        Some([a, b, c]) => EnergyCalibration::with_constants(e.s, e.s0, c1, c2, a, b, c, e.bound),
        None => {
            let corpus =
                ProbeCorpus::calibration(cfg.seed, e.probes, e.s, e.bound, e.probe_max_mode);
            calibrate(e.s, e.s0, c1, c2, &corpus)
        }
    }
}

fn initial_data(cfg: &RunConfig) -> Result<SpectralField> {
    make_initial_data(&cfg.data, cfg.energy.s, cfg.seed, cfg.solver.max_mode)
}

fn completed(status: TrajectoryStatus) -> Check {
    Check::holds(
        "completed without blow-up",
        status == TrajectoryStatus::Completed,
    )
}

/// Run `command` and write its summary, the effective configuration and
/// any trace into `out`.
pub fn execute(cfg: &RunConfig, command: Command, out: &Path) -> Result<Outcome> {
    let mut w = Writer {
        dir: out,
        files: Vec::new(),
    };
    w.put("config.toml", &serialize_config(cfg))?;
    let name = command.name();
    let (report, checks): (serde_json::Value, Vec<Check>) = match command {
        Command::Simulate => {
            let phi = initial_data(cfg)?;
            let traj = solve(&phi, &cfg.params, &cfg.solver)?;
            let trace = EnergyTrace::single(&traj, &calibration(cfg)?)?;
            w.put("trajectory.txt", &trajectory_to_text(&traj))?;
            w.put(&format!("{name}.csv"), &trace_to_csv(&trace))?;
            #[derive(Serialize)]
            struct Report {
                samples: usize,
                final_time: f64,
                status: TrajectoryStatus,
            }
            let report = Report {
                samples: traj.len(),
                final_time: traj.times.last().copied().unwrap_or(0.0),
                status: traj.status,
            };
            (to_value(&report)?, vec![completed(traj.status)])
        }
        Command::Conservation => {
            let phi = initial_data(cfg)?;
            let x = &cfg.experiment;
            let r = run_conservation_refinement(
                &phi,
                &cfg.params,
                &cfg.solver,
                x.levels,
                x.allow_non_integrable,
            )?;
            let mut checks = vec![Check::holds("all levels completed", r.completed)];
            if cfg.params.c1 == cfg.params.c2 && cfg.params.gamma == 0.0 {
                checks.push(Check::at_most(
                    "max relative L2 drift",
                    r.drifts[0],
                    CONSERVATION_DRIFT,
                ));
                let steps = cfg.solver.horizon / r.dts.last().copied().unwrap_or(cfg.solver.dt);
                let floor = steps * ROUNDOFF_PER_STEP * f64::EPSILON;
                if let (Some(&q), true) = (r.ratios.first(), r.drifts[0] > floor) {
                    checks.push(Check::at_least(
                        "drift ratio under dt halving",
                        q,
                        REFINEMENT_RATIO,
                    ));
                }
            }
            (to_value(&r)?, checks)
        }
        Command::EnergyMonitor => {
            let phi = initial_data(cfg)?;
            let r = run_energy_monitor(&phi, &calibration(cfg)?, &cfg.params, &cfg.solver)?;
            w.put(&format!("{name}.csv"), &trace_to_csv(&r.trace))?;
            let checks = vec![
                completed(r.status),
                Check::holds(
                    "empirical constant finite",
                    r.empirical_constant.is_finite(),
                ),
                Check::holds("E_s(t) <= E_s(0) exp(Ct)", r.gronwall_holds),
            ];
            (to_value(&r)?, checks)
        }
        Command::GammaSweep => {
            let phi = initial_data(cfg)?;
            let r = run_gamma_sweep(
                &phi,
                &cfg.experiment.sweep_gammas,
                &calibration(cfg)?,
                &cfg.params,
                &cfg.solver,
            )?;
            let mut checks = vec![Check::holds("no member blew up", r.blowups.is_empty())];
            if r.consecutive.len() >= 2 {
                checks.push(Check::at_most(
                    "normalized difference spread",
                    r.spread,
                    GAMMA_SPREAD,
                ));
            }
            (to_value(&r)?, checks)
        }
        Command::BonaSmith => {
            let phi = initial_data(cfg)?;
            let r = run_bona_smith(&phi, &cfg.bona_smith())?;
            let mut checks = vec![Check::holds("mollifier never increases norms", r.monotone)];
            for fit in &r.fits {
                let miss = (fit.difference_slope - fit.alpha).abs() / fit.alpha;
                checks.push(Check::at_most(
                    &format!("relative slope error, alpha={}", fit.alpha),
                    miss,
                    RATE_TOLERANCE,
                ));
            }
            (to_value(&r)?, checks)
        }
        Command::DiffEnergy => {
            let phi = initial_data(cfg)?;
            let psi = mollify(&phi, &MollifierSpec::new(cfg.experiment.partner_gamma)?);
            let r =
                run_difference_energy(&phi, &psi, &calibration(cfg)?, &cfg.params, &cfg.solver)?;
            w.put(&format!("{name}.csv"), &trace_to_csv(&r.trace))?;
            let checks = vec![
                Check::holds("no blow-up", r.blowup.is_none()),
                Check::holds(
                    "budget terms finite",
                    r.budget.iter().all(|b| b.total().is_finite()),
                ),
                Check::holds("Etilde(t) <= Etilde(0) exp(Ct)", r.tilde_gronwall_holds),
            ];
            (to_value(&r)?, checks)
        }
        Command::ContDep => {
            let phi = initial_data(cfg)?;
            let r = run_continuous_dependence(&phi, &cfg.dependence(), &cfg.params, &cfg.solver)?;
            let checks = vec![
                Check::holds("no blow-up", r.blowup.is_none()),
                Check::holds("difference non-increasing along the ladder", r.monotone),
            ];
            (to_value(&r)?, checks)
        }
        Command::VerifyLemmas => {
            let r = run_lab(&cfg.lab)?;
            let mut checks = vec![Check::holds("per-mode frequency inequality", r.freq_est)];
            for id in &r.identities {
                checks.push(Check::at_most(
                    &id.name,
                    id.max_relative_residual,
                    IDENTITY_TOLERANCE,
                ));
            }
            for (i, e) in r.estimates.iter().enumerate() {
                let p = &e.params;
                let mut label = format!("#{} {}", i + 1, e.kind.id());
                for (key, v) in [
                    ("s", p.s),
                    ("s0", p.s0),
                    ("order", p.order.map(f64::from)),
                    ("p", p.exponent),
                ] {
                    if let Some(v) = v {
                        label.push_str(&format!(" {key}={v}"));
                    }
                }
                checks.push(Check::holds(&format!("{label} finite"), e.is_finite()));
            }
            (to_value(&r)?, checks)
        }
    };
    let summary = Summary::new(name, cfg, &report, checks)?;
    w.put(&format!("{name}.json"), &summary.to_json()?)?;
    Ok(Outcome {
        summary,
        files: w.files,
    })
}

fn to_value(report: &impl Serialize) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(report)?)
}
