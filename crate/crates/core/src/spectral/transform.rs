use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::Grid;
use crate::error::{Error, Result};
use crate::soliton::FieldPair;

/// Fourier coefficients `(u_hat, v_hat)` of a field pair, FFT-ordered.
///
/// Normalised so that `u(x_j) = sum_n u_hat_n exp(i k_n x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPair {
    pub grid: Grid,
    pub time: f64,
    pub uhat: Vec<Complex64>,
    pub vhat: Vec<Complex64>,
}

impl SpectralPair {
    pub fn zeros(grid: Grid, time: f64) -> Self {
        let n = grid.points();
        SpectralPair {
            grid,
            time,
            uhat: vec![Complex64::default(); n],
            vhat: vec![Complex64::default(); n],
        }
    }

    /// Coefficients of mode `n` in `-N..N-1`.
    pub fn mode(&self, n: i64) -> (Complex64, Complex64) {
        let i = self.grid.index(n);
        (self.uhat[i], self.vhat[i])
    }

    pub fn map(&self, f: impl Fn(usize, Complex64, Complex64) -> (Complex64, Complex64)) -> Self {
        let (uhat, vhat) = (0..self.grid.points())
            .map(|i| f(i, self.uhat[i], self.vhat[i]))
            .unzip();
        SpectralPair {
            grid: self.grid,
            time: self.time,
            uhat,
            vhat,
        }
    }

    /// Largest coefficient magnitude over both components.
    pub fn max_abs(&self) -> f64 {
        self.uhat
            .iter()
            .chain(&self.vhat)
            .fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn max_diff(&self, other: &SpectralPair) -> f64 {
        self.uhat
            .iter()
            .zip(&other.uhat)
            .chain(self.vhat.iter().zip(&other.vhat))
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Projects onto the coefficients of a real field: `c_{-n} = conj(c_n)`,
    /// real mean, and a zero `n = -N` mode.
    pub fn enforce_reality(&mut self) {
        let g = self.grid;
        enforce_reality(&mut self.uhat, &g);
        enforce_reality(&mut self.vhat, &g);
    }
}

pub(crate) fn enforce_reality(c: &mut [Complex64], grid: &Grid) {
    let m = grid.points();
    c[0].im = 0.0;
    c[grid.nyquist_index()] = Complex64::default();
    for i in 1..grid.half_count() {
        let s = 0.5 * (c[i] + c[m - i].conj());
        c[i] = s;
        c[m - i] = s.conj();
    }
}

/// Planned forward and inverse transforms for one grid.
#[derive(Clone)]
pub struct Transform {
    grid: Grid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transform")
            .field("grid", &self.grid)
            .finish()
    }
}

impl Transform {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        Transform {
            grid,
            fwd: planner.plan_fft_forward(grid.points()),
            inv: planner.plan_fft_inverse(grid.points()),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.grid.points() {
            return Err(Error::LengthMismatch {
                expected: self.grid.points(),
                found: n,
            });
        }
        Ok(())
    }

    /// Coefficients of complex samples taken at `x_j`, `j = -N..N-1`.
    pub fn forward(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(samples.len())?;
        let mut buf = samples.to_vec();
        self.fwd.process(&mut buf);
        // x_j starts at -L/2, which contributes (-1)^n.
        let scale = 1.0 / self.grid.points() as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= if i % 2 == 0 { scale } else { -scale };
        }
        Ok(buf)
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c } else { -c })
            .collect();
        self.inv.process(&mut buf);
        Ok(buf)
    }

    pub fn forward_real(&self, samples: &[f64]) -> Result<Vec<Complex64>> {
        let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&c)
    }

    /// Real part of the synthesis; exact for conjugate-symmetric input.
    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Result<Vec<f64>> {
        Ok(self.inverse(coeffs)?.into_iter().map(|c| c.re).collect())
    }

    pub fn transform(&self, fields: &FieldPair) -> Result<SpectralPair> {
        fields.check_grid(&self.grid)?;
        Ok(SpectralPair {
            grid: self.grid,
            time: fields.time,
            uhat: self.forward_real(&fields.u)?,
            vhat: self.forward_real(&fields.v)?,
        })
    }

    pub fn inverse_transform(&self, spec: &SpectralPair) -> Result<FieldPair> {
        if spec.grid != self.grid {
            return Err(Error::GridMismatch(format!(
                "spectral pair on 2N = {}, transform on 2N = {}",
                spec.grid.points(),
                self.grid.points()
            )));
        }
        FieldPair::new(
            self.grid,
            spec.time,
            self.inverse_real(&spec.uhat)?,
            self.inverse_real(&spec.vhat)?,
        )
    }
}

pub fn transform(fields: &FieldPair) -> Result<SpectralPair> {
    Transform::new(fields.grid).transform(fields)
}

pub fn inverse_transform(spec: &SpectralPair, grid: &Grid) -> Result<FieldPair> {
    Transform::new(*grid).inverse_transform(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_has_two_modes() {
        let g = Grid::new(7.0, 64).unwrap();
        let f = FieldPair::from_fn(g, 0.0, |x| ((2.0 * PI * x / 7.0).cos(), 3.0));
        let s = transform(&f).unwrap();
        for n in -32..32 {
            let (u, v) = s.mode(n);
            let eu = if n.abs() == 1 { 0.5 } else { 0.0 };
            let ev = if n == 0 { 3.0 } else { 0.0 };
            assert!((u - eu).norm() < 1e-15, "n = {n}: {u}");
            assert!((v - ev).norm() < 1e-15, "n = {n}: {v}");
        }
    }

    #[test]
    fn round_trip() {
        let g = Grid::new(20.0, 128).unwrap();
        let f = FieldPair::from_fn(g, 1.5, |x| ((x * 0.3).sin().exp(), 1.0 / (1.0 + x * x)));
        let back = inverse_transform(&transform(&f).unwrap(), &g).unwrap();
        assert!(back.max_diff(&f).unwrap() < 1e-14);
        assert_eq!(back.time, 1.5);
    }

    #[test]
    fn rejects_wrong_length() {
        let t = Transform::new(Grid::new(1.0, 8).unwrap());
        assert!(matches!(
            t.forward(&[Complex64::default(); 4]),
            Err(Error::LengthMismatch {
                expected: 8,
                found: 4
            })
        ));
    }
}
