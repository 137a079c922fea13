//! `ncilw` command-line front end.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ncilw::cms::{Form, Method};
use ncilw::harness::Experiment;
use ncilw::special::DispersionKind;
use ncilw::spectral::{Dealias, Scheme};
use serde::de::DeserializeOwned;
use serde_json::Value;

use commands::RunStatus;
use config::{ComplexLit, Mode, RunConfig};

/// Exit status when a verdict fails.
const EXIT_FAILED: u8 = 1;
/// Exit status on configuration or runtime errors.
const EXIT_ERROR: u8 = 2;

/// Parses an enum flag through its serde names.
fn serde_name<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.to_owned())).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "ncilw", version, about = "Nonchiral ILW numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact multisoliton fields at the given times.
    Exact {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        times: Times,
        #[command(flatten)]
        integrator: Integrator,
    },
    /// Spectral evolution from pole seeds or a field file.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        solver: Solver,
        /// Initial fields (JSON) instead of pole seeds.
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Exact solution against the spectral solver.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        times: Times,
        #[command(flatten)]
        solver: Solver,
        #[command(flatten)]
        integrator: Integrator,
    },
    /// Pole trajectories.
    Poles {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        times: Times,
        #[command(flatten)]
        integrator: Integrator,
    },
    /// Conserved quantities along the exact solution or of a field file.
    Conserve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        times: Times,
        #[command(flatten)]
        integrator: Integrator,
        /// Field file (JSON) instead of pole seeds.
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Linear dispersion relation values.
    Dispersion {
        #[command(flatten)]
        common: Common,
        /// KdV, BO, ILW or ncILW-coupling.
        #[arg(long)]
        kind: Option<DispersionKind>,
        #[arg(long)]
        delta: Option<f64>,
        /// Wavenumbers, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<f64>,
    },
    /// Identity, operator and conservation checks.
    Selftest {
        #[command(flatten)]
        common: Common,
        /// Experiments to run, comma separated (e.g. identities,operators,fig3).
        #[arg(long, value_delimiter = ',', value_parser = serde_name::<Experiment>)]
        experiments: Vec<Experiment>,
        /// Run every experiment, including the long integrations.
        #[arg(long, conflicts_with = "experiments")]
        all: bool,
    },
    /// Runs the mode named in a config file.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Runs every member of a sweep file as independent jobs.
    Sweep {
        /// Base config plus a `sweep` array of per-member overrides.
        #[arg(long, short)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory (overrides the environment and the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance override, NAME=VALUE; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args, Debug)]
struct Geometry {
    #[arg(long)]
    delta: Option<f64>,
    /// Spatial period; selects the periodic (elliptic) solutions.
    #[arg(long)]
    period: Option<f64>,
    /// Pole seed "re+imi"; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    a: Vec<ComplexLit>,
    /// Grid length.
    #[arg(long)]
    length: Option<f64>,
    /// Grid points 2N (a power of two).
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct Times {
    /// Output times, comma separated and increasing.
    #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true)]
    t: Vec<f64>,
}

#[derive(Args, Debug)]
struct Integrator {
    /// backlund, newton or newton-custom-velocities.
    #[arg(long, value_parser = serde_name::<Form>)]
    form: Option<Form>,
    /// adaptive-RK45 or fixed-RK4.
    #[arg(long, value_parser = serde_name::<Method>)]
    method: Option<Method>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
}

#[derive(Args, Debug)]
struct Solver {
    #[arg(long)]
    dt: Option<f64>,
    /// IFRK4 or RK4.
    #[arg(long, value_parser = serde_name::<Scheme>)]
    scheme: Option<Scheme>,
    /// convolution-b4 or two-thirds.
    #[arg(long, value_parser = serde_name::<Dealias>)]
    dealias: Option<Dealias>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Steps between stored snapshots.
    #[arg(long)]
    output_stride: Option<usize>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl Geometry {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.delta, self.delta);
        if self.period.is_some() {
            c.period = self.period;
        }
        if !self.a.is_empty() {
            c.a = self.a;
        }
        if self.length.is_some() {
            c.length = self.length;
        }
        set(&mut c.points, self.points);
    }
}

impl Times {
    fn apply(self, c: &mut RunConfig) {
        if !self.t.is_empty() {
            c.times = self.t;
        }
    }
}

impl Integrator {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.form, self.form);
        set(&mut c.method, self.method);
        set(&mut c.rtol, self.rtol);
        set(&mut c.atol, self.atol);
    }
}

impl Solver {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.dt, self.dt);
        set(&mut c.scheme, self.scheme);
        set(&mut c.dealias, self.dealias);
        if self.t_end.is_some() {
            c.t_end = self.t_end;
        }
        if self.output_stride.is_some() {
            c.output_stride = self.output_stride;
        }
    }
}

/// The config file (or defaults) with the subcommand's flags applied.
fn resolve(
    common: &Common,
    mode: Option<Mode>,
    apply: impl FnOnce(&mut RunConfig),
) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if mode.is_some() {
        cfg.mode = mode;
    }
    apply(&mut cfg);
    for t in &common.tol {
        cfg.set_tolerance(t)?;
    }
    cfg.validate()?;
    cfg.resolve_output_dir(common.out.clone());
    Ok(cfg)
}

fn print_status(status: &RunStatus) {
    for line in &status.lines {
        println!("{line}");
    }
}

fn run_one(common: Common, mode: Option<Mode>, apply: impl FnOnce(&mut RunConfig)) -> Result<bool> {
    let cfg = resolve(&common, mode, apply)?;
    if common.print_config {
        println!("{}", cfg.to_json());
        return Ok(true);
    }
    let status = commands::run(&cfg)?;
    print_status(&status);
    for f in &status.failures {
        eprintln!("failed: {f}");
    }
    Ok(status.passed())
}

/// Base config object and the member override objects of a sweep file.
fn read_sweep(path: &PathBuf) -> Result<(serde_json::Map<String, Value>, Vec<Value>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading sweep file {}", path.display()))?;
    let mut base: serde_json::Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| anyhow!("sweep file {}: {e}", path.display()))?;
    let members = match base.remove("sweep") {
        Some(Value::Array(m)) if !m.is_empty() => m,
        _ => bail!(
            "sweep file {}: `sweep` must be a non-empty array",
            path.display()
        ),
    };
    Ok((base, members))
}

fn sweep(config: PathBuf, out: Option<PathBuf>, jobs: Option<usize>) -> Result<bool> {
    let (base, members) = read_sweep(&config)?;
    let mut top = RunConfig::default();
    let root = top.resolve_output_dir(out);
    let configs = members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let Value::Object(over) = m else {
                bail!("sweep member {i}: must be an object");
            };
            let mut merged = base.clone();
            merged.extend(over.clone());
            let mut cfg = RunConfig::from_json(&Value::Object(merged).to_string())
                .with_context(|| format!("sweep member {i}"))?;
            if cfg.mode.is_none() {
                bail!("sweep member {i}: no mode given");
            }
            cfg.output_dir = Some(root.join(format!("member_{i:03}")));
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let work = || ncilw::par::map_jobs(&configs, commands::run);
    let results = match jobs {
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building the worker pool")?
            .install(work),
        _ => work(),
    };
    let mut ok = true;
    for (cfg, r) in configs.iter().zip(results) {
        let dir = cfg.output_dir.as_ref().map(|d| d.display().to_string());
        let dir = dir.unwrap_or_default();
        match r {
            Ok(s) if s.passed() => println!("[PASS] {dir}"),
            Ok(s) => {
                ok = false;
                println!("[FAIL] {dir}: {}", s.failures.join("; "));
            }
            Err(e) => {
                ok = false;
                println!("[ERROR] {dir}: {e:#}");
            }
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exact {
            common,
            geometry,
            times,
            integrator,
        } => run_one(common, Some(Mode::Exact), |c| {
            geometry.apply(c);
            times.apply(c);
            integrator.apply(c);
        }),
        Command::Simulate {
            common,
            geometry,
            solver,
            initial,
        } => run_one(common, Some(Mode::Simulate), |c| {
            geometry.apply(c);
            solver.apply(c);
            if initial.is_some() {
                c.initial = initial;
            }
        }),
        Command::Compare {
            common,
            geometry,
            times,
            solver,
            integrator,
        } => run_one(common, Some(Mode::Compare), |c| {
            geometry.apply(c);
            times.apply(c);
            solver.apply(c);
            integrator.apply(c);
        }),
        Command::Poles {
            common,
            geometry,
            times,
            integrator,
        } => run_one(common, Some(Mode::Poles), |c| {
            geometry.apply(c);
            times.apply(c);
            integrator.apply(c);
        }),
        Command::Conserve {
            common,
            geometry,
            times,
            integrator,
            initial,
        } => run_one(common, Some(Mode::Conserve), |c| {
            geometry.apply(c);
            times.apply(c);
            integrator.apply(c);
            if initial.is_some() {
                c.initial = initial;
            }
        }),
        Command::Dispersion {
            common,
            kind,
            delta,
            k,
        } => run_one(common, Some(Mode::Dispersion), |c| {
            set(&mut c.dispersion, kind);
            set(&mut c.delta, delta);
            if !k.is_empty() {
                c.k = k;
            }
        }),
        Command::Selftest {
            common,
            experiments,
            all,
        } => run_one(common, Some(Mode::Selftest), |c| {
            if all {
                c.experiments = Experiment::ALL.to_vec();
            } else if !experiments.is_empty() {
                c.experiments = experiments;
            }
        }),
        Command::Run { common } => run_one(common, None, |_| {}),
        Command::Sweep { config, out, jobs } => sweep(config, out, jobs),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
