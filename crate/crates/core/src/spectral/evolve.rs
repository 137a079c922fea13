use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::transform::enforce_reality;
use super::{Conserved, Dealias, Operators, Propagator, SpectralPair, Squarer};
use crate::error::{invalid, Error, Result};
use crate::io;
use crate::soliton::FieldPair;

/// Fields larger than this abort the run.
pub const INSTABILITY_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Classical RK4 in the frame of the exact linear propagator (Lawson).
    #[default]
    #[serde(rename = "IFRK4", alias = "ifrk4")]
    Ifrk4,
    #[serde(rename = "RK4", alias = "rk4")]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub dealias: Dealias,
    pub t_end: f64,
    /// Steps between stored snapshots.
    pub output_stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 5e-4,
            scheme: Scheme::Ifrk4,
            dealias: Dealias::ConvolutionB4,
            t_end: 9.0,
            output_stride: 4500,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(invalid(
                "t_end",
                format!("must be non-negative, got {}", self.t_end),
            ));
        }
        if self.output_stride == 0 {
            return Err(invalid("output_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Step count and the uniform step that lands exactly on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        let r = self.t_end / self.dt;
        let n = if (r - r.round()).abs() < 1e-9 * r.max(1.0) {
            r.round()
        } else {
            r.ceil()
        } as usize;
        if n == 0 {
            (0, self.dt)
        } else {
            (n, self.t_end / n as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub max_u: f64,
    pub max_v: f64,
}

impl DiagnosticsRow {
    pub fn conserved(&self) -> Conserved {
        Conserved {
            i1: self.i1,
            i2: self.i2,
            i3: self.i3,
        }
    }
}

pub const DIAGNOSTICS_HEADER: [&str; 6] = ["t", "I1", "I2", "I3", "max|u|", "max|v|"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Evolution {
    pub delta: f64,
    pub config: SolverConfig,
    /// Step actually taken, `t_end / steps`.
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<FieldPair>,
    pub diagnostics: Vec<DiagnosticsRow>,
}

impl Evolution {
    /// Largest relative drift of each invariant from its initial value.
    pub fn max_drift(&self) -> [f64; 3] {
        let Some(first) = self.diagnostics.first() else {
            return [0.0; 3];
        };
        let r = first.conserved();
        self.diagnostics.iter().fold([0.0; 3], |m, d| {
            let x = d.conserved().drift(&r);
            std::array::from_fn(|k| m[k].max(x[k]))
        })
    }

    pub fn snapshot_near(&self, t: f64) -> Option<&FieldPair> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.time - t).abs().total_cmp(&(b.time - t).abs()))
    }

    pub fn write_diagnostics_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_csv(
            path,
            &DIAGNOSTICS_HEADER,
            self.diagnostics
                .iter()
                .map(|d| vec![d.t, d.i1, d.i2, d.i3, d.max_u, d.max_v]),
        )
    }
}

/// Time stepper for one run. Owns its state; not shareable mid-run.
#[derive(Debug, Clone)]
pub struct Solver {
    ops: Operators,
    squarer: Squarer,
    scheme: Scheme,
    dt: f64,
    half: Propagator,
    full: Propagator,
    u: Vec<Complex64>,
    v: Vec<Complex64>,
    t: f64,
    steps: usize,
}

type Pair = (Vec<Complex64>, Vec<Complex64>);

fn axpy(y: &[Complex64], a: f64, x: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(x).map(|(y, x)| y + a * x).collect()
}

impl Solver {
    pub fn new(
        initial: &FieldPair,
        delta: f64,
        dt: f64,
        scheme: Scheme,
        dealias: Dealias,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        if let Some(i) = initial
            .u
            .iter()
            .chain(&initial.v)
            .position(|x| !x.is_finite())
        {
            return Err(invalid(
                "initial",
                format!("non-finite sample at index {i}"),
            ));
        }
        let ops = Operators::new(initial.grid, delta)?;
        let mut spec = ops.transform.transform(initial)?;
        spec.enforce_reality();
        Ok(Solver {
            squarer: Squarer::new(initial.grid, dealias),
            half: Propagator::new(&ops.symbols, 0.5 * dt),
            full: Propagator::new(&ops.symbols, dt),
            ops,
            scheme,
            dt,
            u: spec.uhat,
            v: spec.vhat,
            t: initial.time,
            steps: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn spectral(&self) -> SpectralPair {
        SpectralPair {
            grid: *self.ops.grid(),
            time: self.t,
            uhat: self.u.clone(),
            vhat: self.v.clone(),
        }
    }

    pub fn fields(&self) -> Result<FieldPair> {
        self.ops.transform.inverse_transform(&self.spectral())
    }

    /// Right-hand side of the nonlinear part, `(-i k (u^2)^, i k (v^2)^)`.
    fn nonlinear(&self, u: &[Complex64], v: &[Complex64]) -> Pair {
        let (mut a, mut b) = self.squarer.nonlinear_term(u, v);
        a.iter_mut().chain(b.iter_mut()).for_each(|c| *c = -*c);
        (a, b)
    }

    fn full_rhs(&self, u: &[Complex64], v: &[Complex64]) -> Pair {
        let (mut a, mut b) = self.nonlinear(u, v);
        let (lu, lv) = self.ops.symbols.apply_calt(u, v);
        for (i, k) in self.ops.symbols.k.iter().enumerate() {
            a[i] += k * k * lu[i];
            b[i] += k * k * lv[i];
        }
        (a, b)
    }

    fn step_ifrk4(&mut self) {
        let h = self.dt;
        let (u, v) = (&self.u, &self.v);
        let (k1u, k1v) = self.nonlinear(u, v);
        let (au, av) = self
            .half
            .applied(&axpy(u, 0.5 * h, &k1u), &axpy(v, 0.5 * h, &k1v));
        let (k2u, k2v) = self.nonlinear(&au, &av);
        let (eu, ev) = self.half.applied(u, v);
        let (k3u, k3v) = self.nonlinear(&axpy(&eu, 0.5 * h, &k2u), &axpy(&ev, 0.5 * h, &k2v));
        let (ek3u, ek3v) = self.half.applied(&k3u, &k3v);
        let (fu, fv) = self.full.applied(u, v);
        let (k4u, k4v) = self.nonlinear(&axpy(&fu, h, &ek3u), &axpy(&fv, h, &ek3v));
        let (ek1u, ek1v) = self.full.applied(&k1u, &k1v);
        let s23u: Vec<Complex64> = k2u.iter().zip(&k3u).map(|(a, b)| a + b).collect();
        let s23v: Vec<Complex64> = k2v.iter().zip(&k3v).map(|(a, b)| a + b).collect();
        let (es23u, es23v) = self.half.applied(&s23u, &s23v);
        let c = h / 6.0;
        for i in 0..fu.len() {
            self.u[i] = fu[i] + c * (ek1u[i] + 2.0 * es23u[i] + k4u[i]);
            self.v[i] = fv[i] + c * (ek1v[i] + 2.0 * es23v[i] + k4v[i]);
        }
    }

    fn step_rk4(&mut self) {
        let h = self.dt;
        let (u, v) = (&self.u, &self.v);
        let (k1u, k1v) = self.full_rhs(u, v);
        let (k2u, k2v) = self.full_rhs(&axpy(u, 0.5 * h, &k1u), &axpy(v, 0.5 * h, &k1v));
        let (k3u, k3v) = self.full_rhs(&axpy(u, 0.5 * h, &k2u), &axpy(v, 0.5 * h, &k2v));
        let (k4u, k4v) = self.full_rhs(&axpy(u, h, &k3u), &axpy(v, h, &k3v));
        let c = h / 6.0;
        for i in 0..self.u.len() {
            self.u[i] += c * (k1u[i] + 2.0 * (k2u[i] + k3u[i]) + k4u[i]);
            self.v[i] += c * (k1v[i] + 2.0 * (k2v[i] + k3v[i]) + k4v[i]);
        }
    }

    /// Advances one step, then projects back onto real fields and checks
    /// for blow-up.
    pub fn step(&mut self) -> Result<()> {
        match self.scheme {
            Scheme::Ifrk4 => self.step_ifrk4(),
            Scheme::Rk4 => self.step_rk4(),
        }
        self.steps += 1;
        self.t += self.dt;
        let grid = *self.ops.grid();
        enforce_reality(&mut self.u, &grid);
        enforce_reality(&mut self.v, &grid);
        let mut bound = 0.0;
        for c in self.u.iter().chain(&self.v) {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Instability {
                    time: self.t,
                    max_abs: f64::INFINITY,
                });
            }
            bound += c.norm();
        }
        // sum |c_n| bounds max |u| + max |v|; only transform when it is large.
        if bound > INSTABILITY_THRESHOLD {
            let m = self.fields()?.max_abs();
            if m > INSTABILITY_THRESHOLD {
                return Err(Error::Instability {
                    time: self.t,
                    max_abs: m,
                });
            }
        }
        Ok(())
    }

    pub fn diagnostics(&self) -> Result<(FieldPair, DiagnosticsRow)> {
        let f = self.fields()?;
        let c = self.ops.conserved(&f.u, &f.v)?;
        let row = DiagnosticsRow {
            t: self.t,
            i1: c.i1,
            i2: c.i2,
            i3: c.i3,
            max_u: crate::soliton::max_abs(&f.u),
            max_v: crate::soliton::max_abs(&f.v),
        };
        Ok((f, row))
    }
}

/// Integrates from `initial` to `initial.time + t_end`, storing a snapshot
/// and a diagnostics row every `output_stride` steps and at the end.
pub fn evolve(initial: &FieldPair, delta: f64, config: &SolverConfig) -> Result<Evolution> {
    config.validate()?;
    let (steps, dt) = config.steps();
    let mut solver = Solver::new(initial, delta, dt, config.scheme, config.dealias)?;
    let t0 = initial.time;
    let mut snapshots = Vec::new();
    let mut diagnostics = Vec::new();
    let mut record = |s: &Solver| -> Result<()> {
        let (f, row) = s.diagnostics()?;
        snapshots.push(f);
        diagnostics.push(row);
        Ok(())
    };
    record(&solver)?;
    for n in 1..=steps {
        solver.step()?;
        // Avoid accumulated rounding in the reported times.
        solver.t = t0 + n as f64 * dt;
        if n % config.output_stride == 0 || n == steps {
            record(&solver)?;
        }
    }
    Ok(Evolution {
        delta,
        config: *config,
        dt,
        steps,
        snapshots,
        diagnostics,
    })
}
