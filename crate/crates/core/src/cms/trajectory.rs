use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{backlund_at, check_counts, min_pair_distance, newton_at, strip_margin};
use super::ode::{solve, IntegratorConfig, StepStats};
use super::{PoleConfiguration, DEFAULT_SINGULAR_DISTANCE};
use crate::error::{invalid, Error, Family, Result};
use crate::io;
use crate::special::{PoleKernel, PoleKind};

pub const TRAJECTORY_SCHEMA: &str = "ncilw.trajectory";

/// Which equations of motion to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    /// First-order Backlund system in the positions only.
    #[default]
    Backlund,
    /// Newton equations started from Backlund velocities.
    Newton,
    /// Newton equations started from the velocities stored in the initial data.
    NewtonCustomVelocities,
}

/// Diagnostics of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub h: f64,
    pub min_pair_distance: f64,
    pub strip_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: PoleKind,
    pub delta: f64,
    pub form: Form,
    pub times: Vec<f64>,
    pub states: Vec<PoleConfiguration>,
    pub steps: Vec<StepRecord>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn min_pair_distance(&self) -> f64 {
        self.steps
            .iter()
            .fold(f64::INFINITY, |m, s| m.min(s.min_pair_distance))
    }

    pub fn min_strip_margin(&self) -> f64 {
        self.steps
            .iter()
            .fold(f64::INFINITY, |m, s| m.min(s.strip_margin))
    }

    /// Largest position difference against another trajectory sampled at
    /// the same times.
    pub fn max_position_diff(&self, other: &Trajectory) -> Result<f64> {
        if self.times != other.times {
            return Err(invalid("trajectory", "sample times differ"));
        }
        let mut m = 0.0f64;
        for (a, b) in self.states.iter().zip(&other.states) {
            if a.n() != b.n() || a.m() != b.m() {
                return Err(invalid("trajectory", "pole counts differ"));
            }
            for (p, q) in a.z.iter().zip(&b.z).chain(a.w.iter().zip(&b.w)) {
                m = m.max((p - q).norm());
            }
        }
        Ok(m)
    }

    pub fn csv_header(&self) -> Vec<String> {
        let (n, m) = self.states.first().map_or((0, 0), |s| (s.n(), s.m()));
        let mut h = vec!["t".to_string()];
        for j in 1..=n {
            h.push(format!("re_z{j}"));
            h.push(format!("im_z{j}"));
        }
        for j in 1..=m {
            h.push(format!("re_w{j}"));
            h.push(format!("im_w{j}"));
        }
        h
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| {
                let mut r = vec![t];
                for p in s.z.iter().chain(&s.w) {
                    r.push(p.re);
                    r.push(p.im);
                }
                r
            })
            .collect()
    }

    /// Columns `t, re_z1, im_z1, ..., re_w1, im_w1, ...`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let header = self.csv_header();
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        io::write_csv(path, &h, self.csv_rows())
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_json(path, TRAJECTORY_SCHEMA, self)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        io::read_json(path, TRAJECTORY_SCHEMA)
    }
}

fn split(y: &[Complex64], n: usize, m: usize) -> (&[Complex64], &[Complex64]) {
    (&y[..n], &y[n..n + m])
}

/// Integrates the pole flow from `initial` and samples it at `outputs`.
///
/// `outputs` must be strictly monotone and all on one side of
/// `initial.time`; the trajectory is returned in increasing time order.
/// Every accepted step is checked for same-family collisions and for the
/// strip condition.
pub fn integrate<K: PoleKernel + ?Sized>(
    initial: &PoleConfiguration,
    kernel: &K,
    outputs: &[f64],
    config: &IntegratorConfig,
    form: Form,
) -> Result<Trajectory> {
    let (n, m) = (initial.n(), initial.m());
    check_counts(kernel, n, m)?;
    if initial.kind != kernel.kind() {
        return Err(invalid("kind", "pole configuration and kernel disagree"));
    }
    if outputs.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("tspan", "output times must be strictly monotone"));
    }
    let delta = kernel.delta();
    let t0 = initial.time;
    initial.check_strip(delta, config.strip_eps)?;

    let mut y0: Vec<Complex64> = initial.z.iter().chain(&initial.w).copied().collect();
    match form {
        Form::Backlund => {}
        Form::Newton => {
            let (zd, wd) = backlund_at(&initial.z, &initial.w, kernel, t0)?;
            y0.extend(zd.into_iter().chain(wd));
        }
        Form::NewtonCustomVelocities => {
            if initial.zdot.len() != n || initial.wdot.len() != m {
                return Err(Error::LengthMismatch {
                    expected: n + m,
                    found: initial.zdot.len() + initial.wdot.len(),
                });
            }
            y0.extend(initial.zdot.iter().chain(&initial.wdot).copied());
        }
    }

    let rhs = |t: f64, y: &[Complex64]| -> Result<Vec<Complex64>> {
        let (z, w) = split(y, n, m);
        match form {
            Form::Backlund => {
                let (zd, wd) = backlund_at(z, w, kernel, t)?;
                Ok(zd.into_iter().chain(wd).collect())
            }
            Form::Newton | Form::NewtonCustomVelocities => {
                let (zz, ww) = newton_at(z, w, kernel, t)?;
                let mut out = y[n + m..].to_vec();
                out.extend(zz.into_iter().chain(ww));
                Ok(out)
            }
        }
    };

    let mut steps = Vec::new();
    let band = |p: &Complex64| ((p.im - 0.5 * delta) / delta).floor();
    let mut prev: Option<(f64, Vec<Complex64>)> = None;
    let monitor = |t: f64, y: &[Complex64], h: f64| -> Result<()> {
        let (z, w) = split(y, n, m);
        // A pole may step over a singular line between accepted states.
        if let Some((tp, yp)) = &prev {
            for (i, (a, b)) in yp[..n + m].iter().zip(&y[..n + m]).enumerate() {
                if band(a) != band(b) {
                    let line = (band(a).max(band(b)) + 0.5) * delta;
                    let frac = ((line - a.im) / (b.im - a.im)).clamp(0.0, 1.0);
                    let (family, index) = if i < n {
                        (Family::Z, i)
                    } else {
                        (Family::W, i - n)
                    };
                    return Err(Error::StripViolation {
                        time: tp + frac * (t - tp),
                        family,
                        index,
                        margin: 0.0,
                    });
                }
            }
        }
        prev = Some((t, y.to_vec()));
        let (dist, family, index) = min_pair_distance(z, w);
        if dist < DEFAULT_SINGULAR_DISTANCE {
            return Err(Error::SingularConfiguration {
                time: t,
                family,
                index,
                detail: format!("same-family poles {dist:e} apart"),
            });
        }
        let (margin, family, index) = strip_margin(z, w, delta);
        if margin <= config.strip_eps * delta {
            return Err(Error::StripViolation {
                time: t,
                family,
                index,
                margin,
            });
        }
        if h != 0.0 {
            steps.push(StepRecord {
                t,
                h,
                min_pair_distance: dist,
                strip_margin: margin,
            });
        }
        Ok(())
    };

    let (ys, stats) = solve(rhs, monitor, t0, &y0, outputs, config)?;

    let mut times = outputs.to_vec();
    let mut states = Vec::with_capacity(ys.len());
    for (&t, y) in outputs.iter().zip(&ys) {
        let (z, w) = split(y, n, m);
        let (zdot, wdot) = match form {
            Form::Backlund => backlund_at(z, w, kernel, t)?,
            _ => {
                let (zd, wd) = split(&y[n + m..], n, m);
                (zd.to_vec(), wd.to_vec())
            }
        };
        states.push(PoleConfiguration {
            kind: kernel.kind(),
            time: t,
            z: z.to_vec(),
            w: w.to_vec(),
            zdot,
            wdot,
        });
    }
    if times.len() > 1 && times[0] > times[1] {
        times.reverse();
        states.reverse();
        steps.reverse();
    }
    Ok(Trajectory {
        kind: kernel.kind(),
        delta,
        form,
        times,
        states,
        steps,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cms::build_real_initial;
    use crate::special::GeometryHyperbolic;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_soliton_moves_linearly() {
        let g = GeometryHyperbolic::new(PI).unwrap();
        let p = build_real_initial(&[c(0.5, 1.2 * PI)], &g).unwrap();
        let ts: Vec<f64> = (0..=10).map(f64::from).collect();
        for form in [Form::Backlund, Form::Newton] {
            let tr = integrate(&p, &g, &ts, &IntegratorConfig::default(), form).unwrap();
            for (t, s) in tr.times.iter().zip(&tr.states) {
                let want = p.z[0] + p.zdot[0] * t;
                assert!((s.z[0] - want).norm() < 1e-10, "{form:?} t = {t}");
                assert!((s.z[0].im - 1.2 * PI).abs() < 1e-12);
                assert!((s.w[0] - s.z[0].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn backward_run_is_sorted() {
        let g = GeometryHyperbolic::new(PI).unwrap();
        let p = build_real_initial(&[c(-4.0, 1.2 * PI), c(3.0, 0.85 * PI)], &g).unwrap();
        let tr = integrate(
            &p,
            &g,
            &[0.0, -1.0, -2.0],
            &IntegratorConfig::default(),
            Form::Backlund,
        )
        .unwrap();
        assert_eq!(tr.times, [-2.0, -1.0, 0.0]);
        assert_eq!(tr.states[2].z, p.z);
    }

    #[test]
    fn csv_layout() {
        let g = GeometryHyperbolic::new(PI).unwrap();
        let p = build_real_initial(&[c(-4.0, 1.2 * PI), c(3.0, 0.85 * PI)], &g).unwrap();
        let tr = integrate(
            &p,
            &g,
            &[0.0, 1.0],
            &IntegratorConfig::default(),
            Form::Backlund,
        )
        .unwrap();
        assert_eq!(
            tr.csv_header(),
            ["t", "re_z1", "im_z1", "re_z2", "im_z2", "re_w1", "im_w1", "re_w2", "im_w2"]
        );
        let rows = tr.csv_rows();
        assert_eq!(
            rows[0],
            [
                0.0,
                -4.0,
                1.2 * PI,
                3.0,
                0.85 * PI,
                -4.0,
                -1.2 * PI,
                3.0,
                -0.85 * PI
            ]
        );
        let dir = tempfile::tempdir().unwrap();
        tr.write_json(dir.path().join("t.json")).unwrap();
        assert_eq!(
            Trajectory::read_json(dir.path().join("t.json")).unwrap(),
            tr
        );
    }

    #[test]
    fn strip_crossing_aborts() {
        // Custom velocities that drive the pole onto a singular line.
        let g = GeometryHyperbolic::new(1.0).unwrap();
        let mut p = build_real_initial(&[c(0.0, 1.0)], &g).unwrap();
        p.zdot = vec![c(0.0, 0.2)];
        p.wdot = vec![c(0.0, -0.2)];
        let r = integrate(
            &p,
            &g,
            &[5.0],
            &IntegratorConfig::default(),
            Form::NewtonCustomVelocities,
        );
        match r {
            Err(Error::StripViolation { time, index: 0, .. }) => {
                assert!((time - 2.5).abs() < 1e-9, "{time}")
            }
            other => panic!("{other:?}"),
        }
    }
}
