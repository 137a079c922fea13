//! Runge-Kutta integration of complex ODE systems with exact landing on
//! requested output times, in either time direction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Dormand-Prince 5(4) with step-size control.
    #[default]
    #[serde(rename = "adaptive-RK45", alias = "rk45")]
    AdaptiveRk45,
    /// Classical RK4 with step `dt_init`, shortened to hit output times.
    #[serde(rename = "fixed-RK4", alias = "rk4")]
    FixedRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    pub dt_init: f64,
    pub dt_max: f64,
    pub max_steps: usize,
    /// Strip-condition margin in units of `delta`, checked on accepted steps.
    pub strip_eps: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::AdaptiveRk45,
            rtol: 1e-10,
            atol: 1e-10,
            dt_init: 1e-3,
            dt_max: 0.5,
            max_steps: 1_000_000,
            strip_eps: super::DEFAULT_STRIP_EPS,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        IntegratorConfig {
            rtol: tol,
            atol: tol,
            ..Default::default()
        }
    }

    pub fn fixed_rk4(dt: f64) -> Self {
        IntegratorConfig {
            method: Method::FixedRk4,
            dt_init: dt,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !pos(self.rtol) || !pos(self.atol) {
            return Err(invalid("rtol/atol", "tolerances must be positive"));
        }
        if !pos(self.dt_init) || !(self.dt_max > 0.0) {
            return Err(invalid("dt_init/dt_max", "step bounds must be positive"));
        }
        if !(self.strip_eps >= 0.0) {
            return Err(invalid("strip_eps", "must be non-negative"));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps", "must be at least 1"));
        }
        Ok(())
    }
}

/// Counters over one integration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub min_step: f64,
    pub max_step: f64,
}

impl StepStats {
    fn record(&mut self, h: f64) {
        let h = h.abs();
        if self.accepted == 0 {
            self.min_step = h;
            self.max_step = h;
        } else {
            self.min_step = self.min_step.min(h);
            self.max_step = self.max_step.max(h);
        }
        self.accepted += 1;
    }
}

type State = Vec<Complex64>;

fn lin(y: &[Complex64], h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = y.to_vec();
    for &(c, k) in terms {
        if c != 0.0 {
            let hc = h * c;
            for (o, k) in out.iter_mut().zip(k.iter()) {
                *o += hc * k;
            }
        }
    }
    out
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Fifth- minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each
/// of `outputs`, which must be monotone and on one side of `t0`.
///
/// `monitor` sees every accepted state and may abort the run. Errors from
/// `f` at trial stages shrink the step; at an accepted state they abort.
pub fn solve<F, M>(
    mut f: F,
    mut monitor: M,
    t0: f64,
    y0: &[Complex64],
    outputs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<(Vec<State>, StepStats)>
where
    F: FnMut(f64, &[Complex64]) -> Result<State>,
    M: FnMut(f64, &[Complex64], f64) -> Result<()>,
{
    cfg.validate()?;
    let dir = match outputs.iter().find(|&&t| t != t0) {
        Some(&t) if t > t0 => 1.0,
        Some(_) => -1.0,
        None => 1.0,
    };
    let mut prev = t0;
    for &t in outputs {
        if !t.is_finite() || (t - prev) * dir < 0.0 {
            return Err(invalid(
                "tspan",
                "output times must be finite and monotone away from t0",
            ));
        }
        prev = t;
    }

    let mut stats = StepStats::default();
    let mut out = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0.to_vec();
    monitor(t, &y, 0.0)?;
    let mut k1 = f(t, &y)?;
    stats.rhs_evals += 1;
    let mut h = dir * cfg.dt_init.min(cfg.dt_max);

    for &target in outputs {
        while (target - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= cfg.max_steps {
                return Err(Error::MaxStepsExceeded {
                    time: t,
                    max_steps: cfg.max_steps,
                });
            }
            let remaining = target - t;
            let landing = remaining.abs() <= h.abs() * (1.0 + 1e-12);
            let step = if landing { remaining } else { h };
            if step.abs() <= 1e-14 * t.abs().max(1.0) && !landing {
                return Err(Error::StepFailure { time: t, dt: step });
            }
            match cfg.method {
                Method::FixedRk4 => {
                    let n = (remaining.abs() / cfg.dt_init - 1e-9).ceil().max(1.0);
                    let step = remaining / n;
                    let k2 = f(t + 0.5 * step, &lin(&y, 0.5 * step, &[(1.0, &k1)]))?;
                    let k3 = f(t + 0.5 * step, &lin(&y, 0.5 * step, &[(1.0, &k2)]))?;
                    let k4 = f(t + step, &lin(&y, step, &[(1.0, &k3)]))?;
                    y = lin(
                        &y,
                        step / 6.0,
                        &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)],
                    );
                    t = if n == 1.0 { target } else { t + step };
                    monitor(t, &y, step)?;
                    k1 = f(t, &y)?;
                    stats.rhs_evals += 4;
                    stats.record(step);
                }
                Method::AdaptiveRk45 => {
                    let trial = dp_stages(&mut f, t, &y, &k1, step, &mut stats);
                    let (ynew, k7, err) = match trial {
                        Ok(v) => v,
                        Err(_) => {
                            stats.rejected += 1;
                            h = 0.25 * step;
                            continue;
                        }
                    };
                    let mut norm = 0.0f64;
                    for i in 0..y.len() {
                        let sc = cfg.atol + cfg.rtol * y[i].norm().max(ynew[i].norm());
                        norm = norm.max(err[i].norm() / sc);
                    }
                    if !norm.is_finite() {
                        stats.rejected += 1;
                        h = 0.25 * step;
                        continue;
                    }
                    let fac = if norm == 0.0 {
                        5.0
                    } else {
                        (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if norm <= 1.0 {
                        t = if landing { target } else { t + step };
                        y = ynew;
                        k1 = k7;
                        stats.record(step);
                        monitor(t, &y, step)?;
                        // Do not let a short landing step shrink the next one.
                        let base = if landing {
                            h.abs().max(step.abs())
                        } else {
                            step.abs()
                        };
                        h = dir * (base * fac.min(if landing { 1.0 } else { 5.0 })).min(cfg.dt_max);
                    } else {
                        stats.rejected += 1;
                        h = step * fac.min(1.0);
                    }
                }
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

#[allow(clippy::type_complexity)]
fn dp_stages<F>(
    f: &mut F,
    t: f64,
    y: &[Complex64],
    k1: &State,
    h: f64,
    stats: &mut StepStats,
) -> Result<(State, State, State)>
where
    F: FnMut(f64, &[Complex64]) -> Result<State>,
{
    stats.rhs_evals += 6;
    let k2 = f(t + C[1] * h, &lin(y, h, &[(A2[0], k1)]))?;
    let k3 = f(t + C[2] * h, &lin(y, h, &[(A3[0], k1), (A3[1], &k2)]))?;
    let k4 = f(
        t + C[3] * h,
        &lin(y, h, &[(A4[0], k1), (A4[1], &k2), (A4[2], &k3)]),
    )?;
    let k5 = f(
        t + C[4] * h,
        &lin(
            y,
            h,
            &[(A5[0], k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)],
        ),
    )?;
    let k6 = f(
        t + C[5] * h,
        &lin(
            y,
            h,
            &[
                (A6[0], k1),
                (A6[1], &k2),
                (A6[2], &k3),
                (A6[3], &k4),
                (A6[4], &k5),
            ],
        ),
    )?;
    let ynew = lin(
        y,
        h,
        &[
            (B[0], k1),
            (B[2], &k3),
            (B[3], &k4),
            (B[4], &k5),
            (B[5], &k6),
        ],
    );
    let k7 = f(t + C[6] * h, &ynew)?;
    let zero = vec![Complex64::default(); y.len()];
    let err = lin(
        &zero,
        h,
        &[
            (E[0], k1),
            (E[2], &k3),
            (E[3], &k4),
            (E[4], &k5),
            (E[5], &k6),
            (E[6], &k7),
        ],
    );
    Ok((ynew, k7, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_: f64, y: &[Complex64]) -> Result<State> {
        Ok(y.iter().map(|y| Complex64::new(0.0, 1.0) * y).collect())
    }

    #[test]
    fn rotation_is_accurate_both_directions() {
        let y0 = [Complex64::new(1.0, 0.0)];
        for (cfg, tol) in [
            (IntegratorConfig::default(), 1e-8),
            (IntegratorConfig::fixed_rk4(1e-3), 1e-10),
        ] {
            for &t in &[3.0, -3.0] {
                let (ys, stats) =
                    solve(decay, |_, _, _| Ok(()), 0.0, &y0, &[t / 2.0, t], &cfg).unwrap();
                let exact = Complex64::new(0.0, t).exp();
                assert!(
                    (ys[1][0] - exact).norm() < tol,
                    "{:?} {}",
                    cfg.method,
                    (ys[1][0] - exact).norm()
                );
                assert!(stats.accepted > 0);
            }
        }
    }

    #[test]
    fn outputs_hit_requested_times() {
        let mut seen = Vec::new();
        let outs = [0.0, 0.1, 0.7, 2.0];
        solve(
            decay,
            |t, _, _| {
                seen.push(t);
                Ok(())
            },
            0.0,
            &[Complex64::new(1.0, 0.0)],
            &outs,
            &IntegratorConfig::default(),
        )
        .unwrap();
        for t in outs {
            assert!(seen.contains(&t), "{t}");
        }
    }

    #[test]
    fn non_monotone_outputs_rejected() {
        let r = solve(
            decay,
            |_, _, _| Ok(()),
            0.0,
            &[Complex64::new(1.0, 0.0)],
            &[1.0, 0.5],
            &IntegratorConfig::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn max_steps_enforced() {
        let cfg = IntegratorConfig {
            max_steps: 3,
            dt_max: 0.01,
            ..Default::default()
        };
        let r = solve(
            decay,
            |_, _, _| Ok(()),
            0.0,
            &[Complex64::new(1.0, 0.0)],
            &[1.0],
            &cfg,
        );
        assert!(matches!(r, Err(Error::MaxStepsExceeded { .. })));
    }
}
