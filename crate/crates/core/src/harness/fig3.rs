use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ExperimentReport, PoleDiagnostics, Tolerances};
use crate::cms::{
    build_real_initial, integrate, Form, IntegratorConfig, PoleConfiguration, Trajectory,
};
use crate::error::{invalid, Result};
use crate::io;
use crate::soliton::{one_soliton_velocity, VelocityConvention};
use crate::special::Kernel;

/// Pole trajectories of the two-soliton collision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig3Params {
    pub delta: f64,
    pub a: Vec<Complex64>,
    /// Backward horizon, taken as the pre-collision asymptote.
    pub t_pre: f64,
    /// Forward horizon.
    pub t_post: f64,
    pub sample_dt: f64,
    /// Time by which the imaginary parts must have exchanged.
    pub swap_time: f64,
    /// Length of the final window over which phase shifts must be constant.
    pub asymptote_window: f64,
    pub integrator: IntegratorConfig,
}

impl Default for Fig3Params {
    fn default() -> Self {
        Fig3Params {
            delta: PI,
            a: vec![
                Complex64::new(-4.0, 1.2 * PI),
                Complex64::new(3.0, 0.85 * PI),
            ],
            t_pre: -15.0,
            t_post: 30.0,
            sample_dt: 0.05,
            swap_time: 9.0,
            asymptote_window: 5.0,
            integrator: IntegratorConfig::with_tolerance(1e-12),
        }
    }
}

/// Grid `0, dt, 2dt, ...` towards `end` (inclusive, `end` appended if the
/// grid misses it), in the direction of `end`.
fn sample_times(end: f64, dt: f64) -> Vec<f64> {
    let n = (end.abs() / dt - 1e-9).ceil() as usize;
    let s = end.signum();
    let mut t: Vec<f64> = (0..n).map(|i| s * i as f64 * dt).collect();
    t.push(end);
    t
}

#[derive(Debug, Clone)]
pub struct Fig3Outcome {
    pub report: ExperimentReport,
    /// Backlund-form samples from `t_pre` to `t_post`.
    pub times: Vec<f64>,
    pub states: Vec<PoleConfiguration>,
    pub forward: Trajectory,
    pub backward: Trajectory,
    pub newton: Trajectory,
    /// Isolated velocity of each initial pole, for the free-flight lines.
    pub free_velocity: Vec<f64>,
}

impl Fig3Outcome {
    /// Writes `fig3_poles.csv` (`t, re_z1, im_z1, ...`), `fig3_free_flight.csv`
    /// (`t, x1, x2, ...`) and the report.
    pub fn write_bundle(&self, dir: impl AsRef<Path>) -> Result<Vec<(String, &'static str)>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let n = self.states.first().map_or(0, PoleConfiguration::n);
        let mut header = vec!["t".to_string()];
        for j in 1..=n {
            header.push(format!("re_z{j}"));
            header.push(format!("im_z{j}"));
        }
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = self.times.iter().zip(&self.states).map(|(&t, s)| {
            let mut r = vec![t];
            for z in &s.z {
                r.push(z.re);
                r.push(z.im);
            }
            r
        });
        io::write_csv(dir.join("fig3_poles.csv"), &h, rows)?;

        let a0 = &self.forward.states[0].z;
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|j| format!("x{j}")));
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = self.times.iter().map(|&t| {
            let mut r = vec![t];
            r.extend(
                a0.iter()
                    .zip(&self.free_velocity)
                    .map(|(a, v)| a.re + v * t),
            );
            r
        });
        io::write_csv(dir.join("fig3_free_flight.csv"), &h, rows)?;
        self.report.write_json(dir.join("fig3_report.json"))?;
        Ok(vec![
            ("fig3_poles.csv".into(), "csv:poles"),
            ("fig3_free_flight.csv".into(), "csv:free_flight"),
            ("fig3_report.json".into(), super::REPORT_SCHEMA),
        ])
    }
}

/// Indices of `values` sorted by decreasing value.
fn rank_desc(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    idx
}

fn collision_time(times: &[f64], states: &[PoleConfiguration]) -> Option<f64> {
    let gap = |s: &PoleConfiguration| {
        let mut m = f64::INFINITY;
        for (j, z) in s.z.iter().enumerate() {
            for (k, w) in s.w.iter().enumerate() {
                if j != k {
                    m = m.min((z.re - w.re).abs());
                }
            }
        }
        m
    };
    times
        .iter()
        .zip(states)
        .map(|(&t, s)| (t, gap(s)))
        .filter(|(_, g)| g.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(t, _)| t)
}

/// Pole flow of the Fig. 2 data: imaginary-part exchange, isolated
/// asymptotic velocities, phase shifts, and Newton/Backlund agreement.
pub fn fig3_experiment(params: &Fig3Params, tol: &Tolerances) -> Result<Fig3Outcome> {
    if !(params.t_pre < 0.0 && params.t_post > params.swap_time && params.swap_time > 0.0) {
        return Err(invalid(
            "t_pre/t_post",
            "need t_pre < 0 < swap_time < t_post",
        ));
    }
    if !(params.sample_dt > 0.0 && params.asymptote_window > 0.0) {
        return Err(invalid("sample_dt", "must be positive"));
    }
    let mut report = ExperimentReport::new("fig3", params, tol);
    let delta = params.delta;
    let kernel = Kernel::hyperbolic(delta)?;
    let initial = build_real_initial(&params.a, &kernel)?;
    let n = initial.n();

    let mut fwd_times = sample_times(params.t_post, params.sample_dt);
    if !fwd_times.contains(&params.swap_time) {
        fwd_times.push(params.swap_time);
        fwd_times.sort_by(f64::total_cmp);
    }
    let bwd_times = sample_times(params.t_pre, params.sample_dt);
    let cfg = &params.integrator;
    let ((forward, backward), (newton, newton_back)) = crate::par::join(
        || {
            crate::par::join(
                || integrate(&initial, &kernel, &fwd_times, cfg, Form::Backlund),
                || integrate(&initial, &kernel, &bwd_times, cfg, Form::Backlund),
            )
        },
        || {
            crate::par::join(
                || integrate(&initial, &kernel, &fwd_times, cfg, Form::Newton),
                || integrate(&initial, &kernel, &bwd_times, cfg, Form::Newton),
            )
        },
    );
    let (forward, backward, newton, newton_back) = (forward?, backward?, newton?, newton_back?);

    // Backward run is stored ascending and ends at t = 0, which starts `forward`.
    let mut times = backward.times[..backward.len() - 1].to_vec();
    let mut states = backward.states[..backward.len() - 1].to_vec();
    times.extend(&forward.times);
    states.extend(forward.states.iter().cloned());

    let agree = forward
        .max_position_diff(&newton)?
        .max(backward.max_position_diff(&newton_back)?);
    report.below("Newton vs Backlund positions", "form_agreement", agree);
    let mut consistency = 0.0f64;
    for s in newton.states.iter().chain(&newton_back.states) {
        consistency = consistency.max(s.backlund_defect(&kernel)?);
    }
    report.below(
        "Newton velocities satisfy Backlund",
        "backlund_consistency",
        consistency,
    );
    let conj = states
        .iter()
        .fold(0.0f64, |m, s| m.max(s.conjugation_defect()));
    report.below("w = conj(z)", "conjugation", conj);

    // Imaginary-part exchange.
    let at = |t: f64| {
        let i = times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        &states[i]
    };
    let s0 = &states[times.iter().position(|&t| t == 0.0).unwrap_or(0)];
    let sw = at(params.swap_time);
    let im0: Vec<f64> = s0.z.iter().map(|z| z.im).collect();
    let imw: Vec<f64> = sw.z.iter().map(|z| z.im).collect();
    if n == 2 {
        let swap = (imw[0] - im0[1]).abs().max((imw[1] - im0[0]).abs());
        report.below(
            format!("Im parts exchanged by t = {}", params.swap_time),
            "swap",
            swap,
        );
    }

    // Asymptotic velocities match isolated solitons.
    let first = &states[0];
    let last = states.last().unwrap_or(first);
    for (label, s) in [("pre", first), ("post", last)] {
        let mut worst = 0.0f64;
        for (z, zd) in s.z.iter().zip(&s.zdot) {
            let v = one_soliton_velocity(*z, delta, VelocityConvention::Backlund);
            worst = worst.max((zd - Complex64::new(v, 0.0)).norm());
        }
        report.below(
            format!("{label}-collision isolated velocities"),
            "isolated_velocity",
            worst,
        );
    }

    // Phase shifts: solitons are identified by the rank of Im z; each is
    // compared against the free-flight line through its pre-collision
    // asymptote.
    let rank_pre = rank_desc(&first.z.iter().map(|z| z.im).collect::<Vec<_>>());
    let t_pre = times[0];
    let t_end = *times.last().unwrap_or(&0.0);
    let window: Vec<usize> = (0..times.len())
        .filter(|&i| times[i] >= t_end - params.asymptote_window)
        .collect();
    for (r, &jp) in rank_pre.iter().enumerate() {
        let z = first.z[jp];
        let v = one_soliton_velocity(z, delta, VelocityConvention::Backlund);
        let shift = |i: usize| {
            let s = &states[i];
            let rank = rank_desc(&s.z.iter().map(|z| z.im).collect::<Vec<_>>());
            s.z[rank[r]].re - (z.re + v * (times[i] - t_pre))
        };
        let shifts: Vec<f64> = window.iter().map(|&i| shift(i)).collect();
        let hi = shifts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = shifts.iter().cloned().fold(f64::INFINITY, f64::min);
        let final_shift = *shifts.last().unwrap_or(&f64::NAN);
        report.metric(format!("phase_shift_{}", r + 1), final_shift);
        report.below(
            format!("phase shift {} constant", r + 1),
            "phase_shift_constancy",
            hi - lo,
        );
        report.above(
            format!("phase shift {} nonzero", r + 1),
            "phase_shift_min",
            final_shift.abs(),
        );
    }

    let collision = collision_time(&times, &states);
    if let Some(tc) = collision {
        report.metric("collision_time", tc);
    }
    for (j, z) in sw.z.iter().enumerate() {
        report.metric(format!("im_z{}_at_swap", j + 1), z.im);
    }
    let pair = forward
        .min_pair_distance()
        .min(backward.min_pair_distance());
    let margin = forward.min_strip_margin().min(backward.min_strip_margin());
    report.poles = Some(PoleDiagnostics {
        min_pair_distance: pair,
        min_strip_margin: margin,
        accepted_steps: forward.stats.accepted + backward.stats.accepted,
        rejected_steps: forward.stats.rejected + backward.stats.rejected,
        collision_time: collision,
    });
    let free_velocity = initial
        .z
        .iter()
        .map(|z| one_soliton_velocity(*z, delta, VelocityConvention::Backlund))
        .collect();
    Ok(Fig3Outcome {
        report,
        times,
        states,
        forward,
        backward,
        newton,
        free_velocity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_grid_includes_end() {
        assert_eq!(sample_times(1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sample_times(-0.5, 0.2), vec![0.0, -0.2, -0.4, -0.5]);
    }

    #[test]
    fn collision_uses_distinct_pairs() {
        let s = |x1: f64, x2: f64| PoleConfiguration {
            z: vec![Complex64::new(x1, 1.0), Complex64::new(x2, 2.0)],
            w: vec![Complex64::new(x1, -1.0), Complex64::new(x2, -2.0)],
            ..PoleConfiguration::empty(crate::special::PoleKind::Hyperbolic)
        };
        let states = vec![s(-2.0, 2.0), s(-0.1, 0.2), s(1.0, -1.0)];
        assert_eq!(collision_time(&[0.0, 1.0, 2.0], &states), Some(1.0));
    }

    #[test]
    fn single_soliton_has_no_phase_shift() {
        let p = Fig3Params {
            a: vec![Complex64::new(0.0, 1.1 * PI)],
            t_pre: -2.0,
            t_post: 3.0,
            swap_time: 1.0,
            asymptote_window: 1.0,
            integrator: IntegratorConfig::with_tolerance(1e-10),
            ..Default::default()
        };
        let out = fig3_experiment(&p, &Tolerances::default()).unwrap();
        assert!(out.report.metrics["phase_shift_1"].abs() < 1e-8);
        assert!(out.report.poles.unwrap().collision_time.is_none());
        assert_eq!(out.times.first(), Some(&-2.0));
        assert_eq!(out.times.last(), Some(&3.0));
    }
}
