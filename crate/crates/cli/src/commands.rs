//! One function per mode. Each writes its artifacts into the output
//! directory and returns the file list and any failed verdicts.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ncilw::cms::{
    build_real_initial, integrate, PoleConfiguration, StepStats, Trajectory, TRAJECTORY_SCHEMA,
};
use ncilw::harness::{
    fig2_experiment, periodic_soliton_experiment, run_all, ExperimentReport, Fig2Params,
    HarnessConfig, PeriodicParams, PoleDiagnostics, REPORT_SCHEMA,
};
use ncilw::io;
use ncilw::soliton::{evaluate, pde_residual, FieldPair, FIELD_SCHEMA};
use ncilw::special::{dispersion, Kernel};
use ncilw::spectral::{conserved_quantities, evolve, Conserved, Grid};
use serde::Serialize;

use crate::config::{Mode, RunConfig};

pub const MANIFEST_SCHEMA: &str = "ncilw.manifest";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub schema: String,
}

/// What a run produced.
#[derive(Debug, Default)]
pub struct RunStatus {
    pub files: Vec<FileEntry>,
    pub failures: Vec<String>,
    /// Human-readable summary lines.
    pub lines: Vec<String>,
}

impl RunStatus {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn file(&mut self, path: impl Into<String>, schema: &str) {
        self.files.push(FileEntry {
            path: path.into(),
            schema: schema.into(),
        });
    }

    fn report(&mut self, dir: &Path, report: &ExperimentReport, name: &str) -> Result<()> {
        report.write_json(dir.join(name))?;
        self.file(name, REPORT_SCHEMA);
        for v in &report.verdicts {
            self.lines.push(v.to_string());
        }
        self.failures.extend(
            report
                .failures()
                .map(|v| format!("{}: {}", report.id, v.name)),
        );
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: String,
    command: Mode,
    created: String,
    status: &'a str,
    error: Option<String>,
    failures: &'a [String],
    config: &'a RunConfig,
    files: &'a [FileEntry],
}

pub fn kernel(cfg: &RunConfig) -> Result<Kernel> {
    Ok(match cfg.period {
        Some(p) => Kernel::elliptic(p, cfg.delta).context("special: elliptic lattice")?,
        None => Kernel::hyperbolic(cfg.delta).context("special: strip geometry")?,
    })
}

fn grid(cfg: &RunConfig) -> Result<Grid> {
    Grid::new(cfg.grid_length(), cfg.points).context("spectral: grid")
}

fn times_or_zero(cfg: &RunConfig) -> Vec<f64> {
    if cfg.times.is_empty() {
        vec![0.0]
    } else {
        cfg.times.clone()
    }
}

/// Pole flow from the seeds at `t = 0`, sampled at increasing `times` on
/// either side of zero.
pub fn pole_trajectory(cfg: &RunConfig, kernel: &Kernel, times: &[f64]) -> Result<Trajectory> {
    let initial =
        build_real_initial(&cfg.seeds(), kernel).context("cms: building the initial poles")?;
    let integ = cfg.integrator();
    let (past, future): (Vec<f64>, Vec<f64>) = times.iter().partition(|&&t| t < 0.0);
    let run = |outputs: &[f64]| {
        integrate(&initial, kernel, outputs, &integ, cfg.form)
            .context("cms: integrating the pole flow")
    };
    let mut pieces = Vec::new();
    if !past.is_empty() {
        pieces.push(run(&past)?);
    }
    if !future.is_empty() {
        pieces.push(run(&future)?);
    }
    let mut out = Trajectory {
        kind: initial.kind,
        delta: cfg.delta,
        form: cfg.form,
        times: Vec::new(),
        states: Vec::new(),
        steps: Vec::new(),
        stats: StepStats::default(),
    };
    for p in pieces {
        out.times.extend(p.times);
        out.states.extend(p.states);
        out.steps.extend(p.steps);
        let (s, q) = (&mut out.stats, p.stats);
        if s.accepted == 0 {
            s.min_step = q.min_step;
            s.max_step = q.max_step;
        } else if q.accepted > 0 {
            s.min_step = s.min_step.min(q.min_step);
            s.max_step = s.max_step.max(q.max_step);
        }
        s.accepted += q.accepted;
        s.rejected += q.rejected;
        s.rhs_evals += q.rhs_evals;
    }
    out.steps.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(out)
}

fn pole_diagnostics(traj: &Trajectory) -> PoleDiagnostics {
    let first = traj.states.first();
    let start = |f: fn(&PoleConfiguration) -> f64| first.map_or(f64::INFINITY, f);
    PoleDiagnostics {
        min_pair_distance: traj
            .min_pair_distance()
            .min(start(|s| s.min_pair_distance())),
        min_strip_margin: traj
            .min_strip_margin()
            .min(first.map_or(f64::INFINITY, |s| s.strip_margin(traj.delta).0)),
        accepted_steps: traj.stats.accepted,
        rejected_steps: traj.stats.rejected,
        collision_time: None,
    }
}

fn drift_verdicts(report: &mut ExperimentReport, rows: &[Conserved]) {
    let Some(first) = rows.first() else {
        return;
    };
    let drift = rows.iter().fold([0.0f64; 3], |m, c| {
        let d = c.drift(first);
        std::array::from_fn(|k| m[k].max(d[k]))
    });
    for (k, d) in drift.iter().enumerate() {
        report.below(format!("I{} drift", k + 1), "conservation_drift", *d);
    }
    report.drift = Some(drift);
}

fn exact(cfg: &RunConfig, dir: &Path, st: &mut RunStatus) -> Result<()> {
    let kernel = kernel(cfg)?;
    let grid = grid(cfg)?;
    let times = times_or_zero(cfg);
    let traj = pole_trajectory(cfg, &kernel, &times)?;
    let mut report = ExperimentReport::new("exact", cfg, &cfg.tolerances);
    let mut max_imag = 0.0f64;
    for (n, state) in traj.states.iter().enumerate() {
        let ev = evaluate(state, &kernel, &grid).context("soliton: evaluating exact fields")?;
        let res = pde_residual(&ev.fields, &ev.rate, cfg.delta).context("soliton: residual")?;
        report.metric(format!("residual_t{}", n + 1), res.max());
        max_imag = max_imag.max(ev.max_imag);
        let name = format!("exact_t{}.csv", n + 1);
        ev.fields.write_csv(dir.join(&name))?;
        st.file(name, "csv:fields");
    }
    report.below("fields are real", "reality", max_imag);
    report.poles = Some(pole_diagnostics(&traj));
    traj.write_csv(dir.join("exact_poles.csv"))?;
    st.file("exact_poles.csv", "csv:trajectory");
    st.report(dir, &report, "exact_report.json")?;
    st.lines.push(format!(
        "{} snapshots on {} points, L = {}",
        traj.len(),
        grid.points(),
        grid.length()
    ));
    Ok(())
}

/// Initial fields: a field file if given, else the exact fields at `t = 0`.
fn initial_fields(cfg: &RunConfig) -> Result<FieldPair> {
    if let Some(path) = &cfg.initial {
        return FieldPair::read_json(path)
            .with_context(|| format!("soliton: reading initial fields {}", path.display()));
    }
    let kernel = kernel(cfg)?;
    let poles =
        build_real_initial(&cfg.seeds(), &kernel).context("cms: building the initial poles")?;
    Ok(evaluate(&poles, &kernel, &grid(cfg)?)
        .context("soliton: evaluating exact fields")?
        .fields)
}

fn simulate(cfg: &RunConfig, dir: &Path, st: &mut RunStatus) -> Result<()> {
    let initial = initial_fields(cfg)?;
    let solver = cfg.solver();
    let run = evolve(&initial, cfg.delta, &solver).context("spectral: evolution")?;
    for (n, snap) in run.snapshots.iter().enumerate() {
        let name = format!("simulate_t{}.csv", n + 1);
        snap.write_csv(dir.join(&name))?;
        st.file(name, "csv:fields");
    }
    run.write_diagnostics_csv(dir.join("simulate_diagnostics.csv"))?;
    st.file("simulate_diagnostics.csv", "csv:diagnostics");
    if let Some(last) = run.snapshots.last() {
        last.write_json(dir.join("simulate_final.json"))?;
        st.file("simulate_final.json", FIELD_SCHEMA);
    }
    let mut report = ExperimentReport::new("simulate", cfg, &cfg.tolerances);
    report.metric("dt_used", run.dt);
    report.metric("steps", run.steps as f64);
    let rows: Vec<Conserved> = run.diagnostics.iter().map(|d| d.conserved()).collect();
    drift_verdicts(&mut report, &rows);
    st.report(dir, &report, "simulate_report.json")?;
    st.lines.push(format!(
        "{} steps of {:e} to t = {}",
        run.steps,
        run.dt,
        initial.time + solver.t_end
    ));
    Ok(())
}

/// Checks that `times` are `0, t0, 2 t0, ...` and returns `t0`.
fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 || times[0] != 0.0 {
        bail!("compare: times must be 0, t0, 2 t0, ... with at least two entries");
    }
    let t0 = times[1];
    for (n, &t) in times.iter().enumerate() {
        if (t - n as f64 * t0).abs() > 1e-12 * t.abs().max(1.0) {
            bail!("compare: times must be equally spaced from 0 (entry {n} is {t})");
        }
    }
    Ok(t0)
}

fn compare(cfg: &RunConfig, dir: &Path, st: &mut RunStatus) -> Result<()> {
    let solver = cfg.solver();
    if let Some(period) = cfg.period {
        let params = PeriodicParams {
            period,
            delta: cfg.delta,
            a: cfg.seeds(),
            points: cfg.points,
            t_end: solver.t_end,
            dt: cfg.dt,
            scheme: cfg.scheme,
            dealias: cfg.dealias,
            integrator: cfg.integrator(),
            ..Default::default()
        };
        let mut report = periodic_soliton_experiment(&params, &cfg.tolerances)
            .context("harness: periodic comparison")?;
        report.id = "compare".into();
        return st.report(dir, &report, "compare_report.json");
    }
    let times = if cfg.times.is_empty() {
        Fig2Params::default().times()
    } else {
        cfg.times.clone()
    };
    let params = Fig2Params {
        delta: cfg.delta,
        a: cfg.seeds(),
        t0: uniform_spacing(&times)?,
        snapshots: times.len(),
        length: cfg.grid_length(),
        points: cfg.points,
        dt: cfg.dt,
        scheme: cfg.scheme,
        dealias: cfg.dealias,
        integrator: cfg.integrator(),
    };
    let mut outcome =
        fig2_experiment(&params, &cfg.tolerances).context("harness: exact vs numeric")?;
    outcome.report.id = "compare".into();
    let files = outcome.write_bundle_as(dir, "compare")?;
    for (name, schema) in files {
        st.file(name, schema);
    }
    st.lines
        .extend(outcome.report.verdicts.iter().map(|v| v.to_string()));
    st.failures.extend(
        outcome
            .report
            .failures()
            .map(|v| format!("compare: {}", v.name)),
    );
    Ok(())
}

fn poles(cfg: &RunConfig, dir: &Path, st: &mut RunStatus) -> Result<()> {
    let kernel = kernel(cfg)?;
    let traj = pole_trajectory(cfg, &kernel, &times_or_zero(cfg))?;
    traj.write_csv(dir.join("poles.csv"))?;
    st.file("poles.csv", "csv:trajectory");
    traj.write_json(dir.join("poles.json"))?;
    st.file("poles.json", TRAJECTORY_SCHEMA);
    let mut report = ExperimentReport::new("poles", cfg, &cfg.tolerances);
    let mut conj = 0.0f64;
    let mut backlund = 0.0f64;
    for s in &traj.states {
        conj = conj.max(s.conjugation_defect());
        backlund = backlund.max(
            s.backlund_defect(&kernel)
                .context("cms: Backlund velocities")?,
        );
    }
    report.below("conjugate families", "conjugation", conj);
    report.below("Backlund consistency", "backlund_consistency", backlund);
    report.poles = Some(pole_diagnostics(&traj));
    st.report(dir, &report, "poles_report.json")?;
    Ok(())
}

fn conserve(cfg: &RunConfig, dir: &Path, st: &mut RunStatus) -> Result<()> {
    let fields: Vec<FieldPair> = if cfg.initial.is_some() {
        vec![initial_fields(cfg)?]
    } else {
        let kernel = kernel(cfg)?;
        let grid = grid(cfg)?;
        let traj = pole_trajectory(cfg, &kernel, &times_or_zero(cfg))?;
        traj.states
            .iter()
            .map(|s| Ok(evaluate(s, &kernel, &grid)?.fields))
            .collect::<ncilw::Result<_>>()
            .context("soliton: evaluating exact fields")?
    };
    let rows = fields
        .iter()
        .map(|f| conserved_quantities(f, cfg.delta))
        .collect::<ncilw::Result<Vec<_>>>()
        .context("spectral: conserved quantities")?;
    io::write_csv(
        dir.join("conserve.csv"),
        &["t", "I1", "I2", "I3"],
        fields.iter().zip(&rows).map(|(f, c)| {
            let [a, b, d] = c.as_array();
            vec![f.time, a, b, d]
        }),
    )?;
    st.file("conserve.csv", "csv:invariants");
    let mut report = ExperimentReport::new("conserve", cfg, &cfg.tolerances);
    for (k, x) in rows[0].as_array().iter().enumerate() {
        report.metric(format!("I{}", k + 1), *x);
    }
    if rows.len() > 1 {
        drift_verdicts(&mut report, &rows);
    }
    st.report(dir, &report, "conserve_report.json")?;
    Ok(())
}

fn dispersion_table(cfg: &RunConfig, dir: &Path, st: &mut RunStatus) -> Result<()> {
    let values: Vec<f64> = cfg
        .k
        .iter()
        .map(|&k| dispersion(cfg.dispersion, k, cfg.delta))
        .collect();
    io::write_csv(
        dir.join("dispersion.csv"),
        &["k", "omega"],
        cfg.k.iter().zip(&values).map(|(&k, &w)| vec![k, w]),
    )?;
    st.file("dispersion.csv", "csv:dispersion");
    st.lines.extend(values.iter().map(|w| w.to_string()));
    Ok(())
}

fn selftest(cfg: &RunConfig, dir: &Path, st: &mut RunStatus) -> Result<()> {
    use ncilw::harness::Experiment;
    let which = if cfg.experiments.is_empty() {
        vec![
            Experiment::Identities,
            Experiment::Operators,
            Experiment::PeriodicOne,
        ]
    } else {
        cfg.experiments.clone()
    };
    let harness = HarnessConfig {
        tolerances: cfg.tolerances.clone(),
        ..HarnessConfig::new()
    };
    for (exp, result) in run_all(&harness, &which) {
        let name = serde_json::to_value(exp)?
            .as_str()
            .unwrap_or("experiment")
            .to_owned();
        match result {
            Ok(report) => {
                let status = if report.passed() { "PASS" } else { "FAIL" };
                st.lines.push(format!("[{status}] {name}"));
                st.report(dir, &report, &format!("{name}_report.json"))?;
            }
            Err(e) => {
                st.lines.push(format!("[FAIL] {name}: {e}"));
                st.failures.push(format!("{name}: {e}"));
            }
        }
    }
    Ok(())
}

fn dispatch(cfg: &RunConfig, mode: Mode, dir: &Path, st: &mut RunStatus) -> Result<()> {
    match mode {
        Mode::Exact => exact(cfg, dir, st),
        Mode::Simulate => simulate(cfg, dir, st),
        Mode::Compare => compare(cfg, dir, st),
        Mode::Poles => poles(cfg, dir, st),
        Mode::Conserve => conserve(cfg, dir, st),
        Mode::Dispersion => dispersion_table(cfg, dir, st),
        Mode::Selftest => selftest(cfg, dir, st),
    }
}

/// Runs a validated config and writes its manifest. The output directory
/// must already be resolved into `cfg.output_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunStatus> {
    let Some(mode) = cfg.mode else {
        bail!("config: no mode given");
    };
    cfg.validate()?;
    cfg.validate_for(mode)?;
    let dir: PathBuf = cfg
        .output_dir
        .clone()
        .context("config: output directory unresolved")?;
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut st = RunStatus::default();
    let outcome = dispatch(cfg, mode, &dir, &mut st);
    let error = outcome.as_ref().err().map(|e| format!("{e:#}"));
    let status = match (&error, st.passed()) {
        (Some(_), _) => "error",
        (None, true) => "passed",
        (None, false) => "failed",
    };
    let manifest = Manifest {
        tool: format!("ncilw {}", env!("CARGO_PKG_VERSION")),
        command: mode,
        created: chrono::Utc::now().to_rfc3339(),
        status,
        error,
        failures: &st.failures,
        config: cfg,
        files: &st.files,
    };
    io::write_json(dir.join("manifest.json"), MANIFEST_SCHEMA, &manifest)?;
    outcome?;
    Ok(st)
}
