//! `bolab`: run one experiment per invocation and write its artifacts.
//!
//! Exit codes: 0 when every check passes, 2 for unusable input, 3 when a
//! run fails, 4 when a run completes but a check fails.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use bolab_core::io::{parse_config_with, read_file, Command};
use clap::builder::PossibleValuesParser;
use clap::Parser;

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "BOLAB_OUT";
const DEFAULT_OUT: &str = "bolab-out";

#[derive(Parser, Debug)]
#[command(
    name = "bolab",
    version,
    about = "Spectral laboratory for third-order Benjamin-Ono type equations"
)]
struct Cli {
    /// Experiment to run.
    #[arg(value_parser = PossibleValuesParser::new(Command::ALL.map(Command::name)))]
    command: String,

    /// TOML configuration file; flags override its values.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Output directory. Falls back to `[run] out`, then $BOLAB_OUT, then `bolab-out`.
    #[arg(short, long)]
    out: Option<PathBuf>,

    /// Override any configuration key, e.g. `--set solver.dt=5e-5`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,

    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_mode: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    s0: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<usize>,

    /// Print the effective configuration and exit.
    #[arg(long)]
    dry_run: bool,
}

impl Cli {
    /// Named flags as `section.key=value` overrides, applied after `--set`.
    fn flag_overrides(&self) -> Vec<String> {
        let mut out = self.overrides.clone();
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push(format!("{key}={v}"));
            }
        };
        push("run.seed", self.seed.map(|v| v.to_string()));
        push("run.threads", self.threads.map(|v| v.to_string()));
        push("solver.max_mode", self.max_mode.map(|v| v.to_string()));
        // `{:e}` keeps the value a TOML float even when it is integral
        push("solver.dt", self.dt.map(|v| format!("{v:e}")));
        push("solver.horizon", self.horizon.map(|v| format!("{v:e}")));
        push("equation.c1", self.c1.map(|v| format!("{v:e}")));
        push("equation.c2", self.c2.map(|v| format!("{v:e}")));
        push("equation.gamma", self.gamma.map(|v| format!("{v:e}")));
        push("energy.s", self.s.map(|v| format!("{v:e}")));
        push("energy.s0", self.s0.map(|v| format!("{v:e}")));
        out
    }
}

enum Failure {
    Input(String),
    Runtime(String),
    Criterion,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 3,
            Failure::Criterion => 4,
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let command: Command = cli.command.parse().map_err(Failure::Input)?;
    let text = match &cli.config {
        Some(path) => read_file(path).map_err(|e| Failure::Input(e.to_string()))?,
        None => String::new(),
    };
    let mut cfg = parse_config_with(&text, &cli.flag_overrides()).map_err(|e| {
        let origin = cli
            .config
            .as_ref()
            .map_or("<defaults>".into(), |p| p.display().to_string());
        Failure::Input(format!("{origin}: {e}"))
    })?;
    cfg.command = Some(command);
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    if cli.dry_run {
        print!("{}", bolab_core::io::serialize_config(&cfg));
        return Ok(());
    }
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let outcome =
        commands::execute(&cfg, command, &out).map_err(|e| Failure::Runtime(e.to_string()))?;
    for c in &outcome.summary.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("{mark} {} = {:e} ({})", c.name, c.value, c.condition);
    }
    for path in &outcome.files {
        println!("wrote {}", path.display());
    }
    if outcome.summary.passed {
        Ok(())
    } else {
        Err(Failure::Criterion)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(m) | Failure::Runtime(m) => eprintln!("error: {m}"),
                Failure::Criterion => eprintln!("error: at least one check failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
