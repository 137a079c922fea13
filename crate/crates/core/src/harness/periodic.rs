use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ErrorNorms, ExperimentReport, PoleDiagnostics, Tolerances};
use crate::cms::{build_real_initial, integrate, Form, IntegratorConfig};
use crate::error::{invalid, Result};
use crate::soliton::{eval_point, evaluate, pde_residual, FieldPair};
use crate::special::Kernel;
use crate::spectral::{evolve, Dealias, Grid, Scheme, SolverConfig};

/// Elliptic multisoliton on its native period `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodicParams {
    pub period: f64,
    pub delta: f64,
    pub a: Vec<Complex64>,
    pub points: usize,
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub dealias: Dealias,
    /// Points per period at which `u(x + L) = u(x)` is checked.
    pub periodicity_samples: usize,
    pub integrator: IntegratorConfig,
}

impl Default for PeriodicParams {
    fn default() -> Self {
        PeriodicParams {
            period: 20.0,
            delta: 1.0,
            a: vec![Complex64::new(-2.0, 1.1)],
            points: 512,
            t_end: 1.0,
            dt: 2.5e-4,
            scheme: Scheme::Ifrk4,
            dealias: Dealias::ConvolutionB4,
            periodicity_samples: 64,
            integrator: IntegratorConfig::with_tolerance(1e-12),
        }
    }
}

impl PeriodicParams {
    pub fn two_soliton() -> Self {
        PeriodicParams {
            a: vec![Complex64::new(-4.0, 1.12), Complex64::new(4.0, 0.88)],
            ..Default::default()
        }
    }
}

/// Exact elliptic solution versus the spectral solver, with residual and
/// periodicity checks along the pole flow.
pub fn periodic_soliton_experiment(
    params: &PeriodicParams,
    tol: &Tolerances,
) -> Result<ExperimentReport> {
    if params.periodicity_samples == 0 {
        return Err(invalid("periodicity_samples", "must be at least 1"));
    }
    let id = format!("periodic_{}_soliton", params.a.len());
    let mut report = ExperimentReport::new(&id, params, tol);
    let kernel = Kernel::elliptic(params.period, params.delta)?;
    let grid = Grid::new(params.period, params.points)?;
    let initial = build_real_initial(&params.a, &kernel)?;
    let times = [0.0, 0.5 * params.t_end, params.t_end];
    let outputs: &[f64] = if params.t_end > 0.0 {
        &times
    } else {
        &times[..1]
    };
    let traj = integrate(
        &initial,
        &kernel,
        outputs,
        &params.integrator,
        Form::Backlund,
    )?;

    let mut exact = Vec::new();
    let (mut residual, mut max_imag, mut periodic) = (0.0f64, 0.0f64, 0.0f64);
    let l = params.period;
    for state in &traj.states {
        let ev = evaluate(state, &kernel, &grid)?;
        residual = residual.max(pde_residual(&ev.fields, &ev.rate, params.delta)?.max());
        max_imag = max_imag.max(ev.max_imag);
        for j in 0..params.periodicity_samples {
            // Offset keeps the samples off the collocation grid.
            let x = -0.5 * l + (j as f64 + 0.37) * l / params.periodicity_samples as f64;
            let p = eval_point(state, &kernel, x)?;
            let q = eval_point(state, &kernel, x + l)?;
            for k in 0..2 {
                periodic = periodic.max((p[k] - q[k]).norm());
            }
        }
        exact.push(ev.fields);
    }
    report.below("exact residual", "elliptic_residual", residual);
    report.below("u(x + L) = u(x)", "periodicity", periodic);
    report.below("exact fields real", "reality", max_imag);

    let cfg = SolverConfig {
        dt: params.dt,
        scheme: params.scheme,
        dealias: params.dealias,
        t_end: params.t_end,
        output_stride: usize::MAX,
    };
    let evolution = evolve(&exact[0], params.delta, &cfg)?;
    let last = evolution
        .snapshots
        .last()
        .ok_or_else(|| invalid("solver", "no snapshots"))?;
    let target = exact.last().unwrap_or(&exact[0]);
    let norms = ErrorNorms {
        t: last.time,
        max: target.max_diff(last)?,
        l2: target.l2_diff(last)?,
    };
    report.below(
        format!("solver error at t = {}", norms.t),
        "solver_error",
        norms.max,
    );
    report.errors.push(norms);
    let drift = evolution.max_drift();
    for (k, d) in drift.iter().enumerate() {
        report.below(format!("I{} drift", k + 1), "conservation_drift", *d);
    }
    report.drift = Some(drift);
    report.poles = Some(PoleDiagnostics {
        min_pair_distance: traj.min_pair_distance(),
        min_strip_margin: traj.min_strip_margin(),
        accepted_steps: traj.stats.accepted,
        rejected_steps: traj.stats.rejected,
        collision_time: None,
    });
    Ok(report)
}

/// Elliptic solution at a large period against the hyperbolic one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitParams {
    pub delta: f64,
    /// Period of the elliptic run, also the box of the hyperbolic run.
    pub period: f64,
    pub a: Vec<Complex64>,
    pub points: usize,
    pub t_end: f64,
    pub dt: f64,
    /// Half-width of the central comparison window.
    pub window: f64,
}

impl Default for LimitParams {
    fn default() -> Self {
        LimitParams {
            delta: 1.0,
            period: 100.0,
            a: vec![Complex64::new(0.0, 1.05)],
            points: 2048,
            t_end: 1.0,
            dt: 1e-3,
            window: 5.0,
        }
    }
}

fn window_diff(a: &FieldPair, b: &FieldPair, half: f64) -> f64 {
    (0..a.u.len())
        .filter(|&i| a.grid.x(i).abs() <= half)
        .fold(0.0, |m, i| {
            m.max((a.u[i] - b.u[i]).abs()).max((a.v[i] - b.v[i]).abs())
        })
}

/// Compares exact fields and solver runs of the two kernels on the
/// central window.
pub fn hyperbolic_limit_experiment(
    params: &LimitParams,
    tol: &Tolerances,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("hyperbolic_limit", params, tol);
    let grid = Grid::new(params.period, params.points)?;
    let ell = Kernel::elliptic(params.period, params.delta)?;
    let hyp = Kernel::hyperbolic(params.delta)?;
    let run = |kernel: &Kernel| -> Result<(FieldPair, FieldPair)> {
        let initial = build_real_initial(&params.a, kernel)?;
        let f0 = evaluate(&initial, kernel, &grid)?.fields;
        let cfg = SolverConfig {
            dt: params.dt,
            t_end: params.t_end,
            output_stride: usize::MAX,
            ..Default::default()
        };
        let e = evolve(&f0, params.delta, &cfg)?;
        let last = e
            .snapshots
            .last()
            .cloned()
            .ok_or_else(|| invalid("solver", "no snapshots"))?;
        Ok((f0, last))
    };
    let (e, h) = crate::par::join(|| run(&ell), || run(&hyp));
    let ((e0, e1), (h0, h1)) = (e?, h?);
    report.below(
        "exact fields agree",
        "hyperbolic_limit_exact",
        window_diff(&e0, &h0, params.window),
    );
    report.below(
        "solver runs agree",
        "hyperbolic_limit",
        window_diff(&e1, &h1, params.window),
    );
    Ok(report)
}
