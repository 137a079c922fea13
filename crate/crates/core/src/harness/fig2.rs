use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ErrorNorms, ExperimentReport, PoleDiagnostics, Tolerances};
use crate::cms::{build_real_initial, integrate, Form, IntegratorConfig, Trajectory};
use crate::error::Result;
use crate::io;
use crate::soliton::{evaluate, pde_residual, FieldPair};
use crate::special::Kernel;
use crate::spectral::{evolve, Dealias, Evolution, Grid, Scheme, SolverConfig};

/// Two-soliton collision on the line, sampled at `t = n t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Params {
    pub delta: f64,
    pub a: Vec<Complex64>,
    pub t0: f64,
    pub snapshots: usize,
    pub length: f64,
    pub points: usize,
    pub dt: f64,
    pub scheme: Scheme,
    pub dealias: Dealias,
    pub integrator: IntegratorConfig,
}

impl Default for Fig2Params {
    fn default() -> Self {
        Fig2Params {
            delta: PI,
            a: vec![
                Complex64::new(-4.0, 1.2 * PI),
                Complex64::new(3.0, 0.85 * PI),
            ],
            t0: 2.25,
            snapshots: 5,
            length: 200.0,
            points: 1024,
            dt: 5e-4,
            scheme: Scheme::Ifrk4,
            dealias: Dealias::ConvolutionB4,
            integrator: IntegratorConfig::with_tolerance(1e-12),
        }
    }
}

impl Fig2Params {
    pub fn times(&self) -> Vec<f64> {
        (0..self.snapshots).map(|n| n as f64 * self.t0).collect()
    }

    /// Solver settings that land a snapshot on every `t0` multiple.
    pub fn solver_config(&self) -> SolverConfig {
        let per = (self.t0 / self.dt).ceil().max(1.0) as usize;
        SolverConfig {
            dt: self.t0 / per as f64,
            scheme: self.scheme,
            dealias: self.dealias,
            t_end: self.t0 * (self.snapshots.max(2) - 1) as f64,
            output_stride: per,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fig2Outcome {
    pub report: ExperimentReport,
    pub trajectory: Trajectory,
    pub exact: Vec<FieldPair>,
    pub numeric: Vec<FieldPair>,
    pub evolution: Evolution,
}

impl Fig2Outcome {
    /// Writes `fig2_t{n}.csv` per snapshot (n = 1..), the pole samples, the
    /// solver diagnostics and the report; returns the file names.
    pub fn write_bundle(&self, dir: impl AsRef<Path>) -> Result<Vec<(String, &'static str)>> {
        self.write_bundle_as(dir, "fig2")
    }

    /// As [`write_bundle`](Self::write_bundle) with file names starting `{prefix}_`.
    pub fn write_bundle_as(
        &self,
        dir: impl AsRef<Path>,
        prefix: &str,
    ) -> Result<Vec<(String, &'static str)>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for (n, (e, s)) in self.exact.iter().zip(&self.numeric).enumerate() {
            let name = format!("{prefix}_t{}.csv", n + 1);
            let rows = (0..e.u.len()).map(|i| vec![e.grid.x(i), e.u[i], e.v[i], s.u[i], s.v[i]]);
            io::write_csv(
                dir.join(&name),
                &["x", "u_exact", "v_exact", "u_numeric", "v_numeric"],
                rows,
            )?;
            files.push((name, "csv:snapshot_comparison"));
        }
        let mut push = |name: String, schema| files.push((name, schema));
        let poles = format!("{prefix}_poles.csv");
        self.trajectory.write_csv(dir.join(&poles))?;
        push(poles, "csv:trajectory");
        let diag = format!("{prefix}_diagnostics.csv");
        self.evolution.write_diagnostics_csv(dir.join(&diag))?;
        push(diag, "csv:diagnostics");
        let report = format!("{prefix}_report.json");
        self.report.write_json(dir.join(&report))?;
        push(report, super::REPORT_SCHEMA);
        Ok(files)
    }
}

fn argmax(f: &[f64]) -> usize {
    (0..f.len())
        .max_by(|&i, &j| f[i].total_cmp(&f[j]))
        .unwrap_or(0)
}

/// Exact two-soliton fields from the pole flow versus the spectral solver
/// started from the exact `t = 0` snapshot.
pub fn fig2_experiment(params: &Fig2Params, tol: &Tolerances) -> Result<Fig2Outcome> {
    let mut report = ExperimentReport::new("fig2", params, tol);
    let kernel = Kernel::hyperbolic(params.delta)?;
    let grid = Grid::new(params.length, params.points)?;
    let initial = build_real_initial(&params.a, &kernel)?;
    let times = params.times();
    let trajectory = integrate(
        &initial,
        &kernel,
        &times,
        &params.integrator,
        Form::Backlund,
    )?;

    let mut exact = Vec::with_capacity(times.len());
    let mut max_imag = 0.0f64;
    let mut residual = 0.0f64;
    for state in &trajectory.states {
        let ev = evaluate(state, &kernel, &grid)?;
        max_imag = max_imag.max(ev.max_imag);
        residual = residual.max(pde_residual(&ev.fields, &ev.rate, params.delta)?.max());
        exact.push(ev.fields);
    }
    report.metric("exact_residual", residual);
    report.below("exact fields real", "reality", max_imag);

    let first = &exact[0];
    let iu = argmax(&first.u);
    let iv = argmax(&first.v);
    report.metric("u_hump_x", grid.x(iu));
    report.metric("v_hump_x", grid.x(iv));
    report.metric("u_hump_v_ratio", first.v[iu].abs() / first.u[iu]);
    report.metric("v_hump_u_ratio", first.u[iv].abs() / first.v[iv]);
    report.below(
        "u hump at Re a1",
        "hump_position",
        (grid.x(iu) - params.a[0].re).abs(),
    );
    if let Some(a2) = params.a.get(1) {
        report.below(
            "v hump at Re a2",
            "hump_position",
            (grid.x(iv) - a2.re).abs(),
        );
    }

    let evolution = evolve(first, params.delta, &params.solver_config())?;
    let mut numeric = Vec::with_capacity(times.len());
    for (e, &t) in exact.iter().zip(&times) {
        let s = evolution
            .snapshot_near(t)
            .filter(|s| (s.time - t).abs() < 1e-9 * t.abs().max(1.0))
            .ok_or_else(|| {
                crate::error::invalid("snapshots", format!("no solver snapshot at t = {t}"))
            })?;
        let norms = ErrorNorms {
            t,
            max: e.max_diff(s)?,
            l2: e.l2_diff(s)?,
        };
        report.below(format!("error at t = {t}"), "fig2_error", norms.max);
        report.errors.push(norms);
        numeric.push(s.clone());
    }
    let drift = evolution.max_drift();
    for (k, d) in drift.iter().enumerate() {
        report.below(format!("I{} drift", k + 1), "conservation_drift", *d);
    }
    report.drift = Some(drift);
    report.poles = Some(PoleDiagnostics {
        min_pair_distance: trajectory.min_pair_distance(),
        min_strip_margin: trajectory.min_strip_margin(),
        accepted_steps: trajectory.stats.accepted,
        rejected_steps: trajectory.stats.rejected,
        collision_time: None,
    });
    report.metric("dt_used", evolution.dt);
    report.metric("steps", evolution.steps as f64);
    Ok(Fig2Outcome {
        report,
        trajectory,
        exact,
        numeric,
        evolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_config_lands_on_snapshots() {
        let p = Fig2Params {
            dt: 0.3,
            ..Default::default()
        };
        let c = p.solver_config();
        assert_eq!(c.output_stride, 8);
        assert!((c.dt - 2.25 / 8.0).abs() < 1e-15);
        assert_eq!(c.t_end, 9.0);
        assert_eq!(c.steps().0, 32);
    }

    #[test]
    fn coarse_run_reports_every_snapshot() {
        let p = Fig2Params {
            t0: 0.25,
            snapshots: 3,
            points: 512,
            dt: 0.01,
            ..Default::default()
        };
        let out = fig2_experiment(&p, &Tolerances::default()).unwrap();
        assert_eq!(out.report.errors.len(), 3);
        assert!(out.report.errors[0].max < 1e-2);
        assert!(out.report.errors[2].max < 5e-3, "{:?}", out.report.errors);
        assert_eq!(out.numeric.len(), 3);
        let dir = tempfile::tempdir().unwrap();
        let files = out.write_bundle(dir.path()).unwrap();
        assert!(dir.path().join("fig2_t3.csv").exists());
        assert_eq!(files.len(), 6);
    }
}
