use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::spectral::Grid;

/// Real field pair `(u, v)` sampled on a [`Grid`] at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldPair {
    pub grid: Grid,
    pub time: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

pub const FIELD_SCHEMA: &str = "ncilw.field_pair";

impl FieldPair {
    pub fn new(grid: Grid, time: f64, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let n = grid.points();
        for len in [u.len(), v.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        Ok(FieldPair { grid, time, u, v })
    }

    pub fn zeros(grid: Grid, time: f64) -> Self {
        let n = grid.points();
        FieldPair {
            grid,
            time,
            u: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    /// Samples `(u, v) = f(x)` at every grid node.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64) -> (f64, f64)) -> Self {
        let (u, v) = grid.xs().into_iter().map(f).unzip();
        FieldPair { grid, time, u, v }
    }

    pub fn xs(&self) -> Vec<f64> {
        self.grid.xs()
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.grid != *grid {
            return Err(Error::GridMismatch(format!(
                "expected L = {}, 2N = {}; found L = {}, 2N = {}",
                grid.length(),
                grid.points(),
                self.grid.length(),
                self.grid.points()
            )));
        }
        if self.u.len() != grid.points() || self.v.len() != grid.points() {
            return Err(Error::LengthMismatch {
                expected: grid.points(),
                found: self.u.len().min(self.v.len()),
            });
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.u).max(max_abs(&self.v))
    }

    /// Max-norm of the difference over both components.
    pub fn max_diff(&self, other: &FieldPair) -> Result<f64> {
        other.check_grid(&self.grid)?;
        Ok(max_abs_diff(&self.u, &other.u).max(max_abs_diff(&self.v, &other.v)))
    }

    /// Discrete L2 norm of the difference, `sqrt(h sum (du^2 + dv^2))`.
    pub fn l2_diff(&self, other: &FieldPair) -> Result<f64> {
        other.check_grid(&self.grid)?;
        let s: f64 = self
            .u
            .iter()
            .zip(&other.u)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok((s * self.grid.spacing()).sqrt())
    }

    /// Parity map `(u, v)(x) -> (v(-x), u(-x))`.
    pub fn parity(&self) -> FieldPair {
        let n = self.grid.points();
        let reflect = |f: &[f64]| (0..n).map(|i| f[(n - i) % n]).collect::<Vec<_>>();
        FieldPair {
            grid: self.grid,
            time: self.time,
            u: reflect(&self.v),
            v: reflect(&self.u),
        }
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let xs = self.xs();
        let rows = (0..self.grid.points()).map(|i| vec![xs[i], self.u[i], self.v[i]]);
        io::write_csv(path, &["x", "u", "v"], rows)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_json(path, FIELD_SCHEMA, self)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let f: FieldPair = io::read_json(path, FIELD_SCHEMA)?;
        f.check_grid(&f.grid)?;
        Ok(f)
    }
}

pub(crate) fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
