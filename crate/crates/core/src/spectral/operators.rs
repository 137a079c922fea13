use num_complex::Complex64;

use super::{Grid, SpectralPair, Transform};
use crate::error::{invalid, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(invalid("delta", format!("must be positive, got {delta}")))
    }
}

/// `coth(k delta)`, with the `k = 0` value set to 0.
pub fn coth_symbol(k: f64, delta: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        1.0 / (k * delta).tanh()
    }
}

/// `1 / sinh(k delta)`, with the `k = 0` value set to 0.
pub fn csch_symbol(k: f64, delta: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        1.0 / (k * delta).sinh()
    }
}

/// Multiplier of `T`: `i coth(k delta)`.
pub fn t_multiplier(k: f64, delta: f64) -> Complex64 {
    I * coth_symbol(k, delta)
}

/// Multiplier of `T~`: `i / sinh(k delta)`.
pub fn ttilde_multiplier(k: f64, delta: f64) -> Complex64 {
    I * csch_symbol(k, delta)
}

/// Per-mode symbols of one grid and depth, FFT-ordered. The `k = 0` and
/// unpaired `n = -N` entries of `coth` and `csch` are zero.
#[derive(Debug, Clone)]
pub struct Symbols {
    pub grid: Grid,
    pub delta: f64,
    pub k: Vec<f64>,
    pub coth: Vec<f64>,
    pub csch: Vec<f64>,
}

impl Symbols {
    pub fn new(grid: Grid, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        let k = grid.wavenumbers();
        let nyq = grid.nyquist_index();
        let sym = |f: fn(f64, f64) -> f64| -> Vec<f64> {
            k.iter()
                .enumerate()
                .map(|(i, &k)| if i == nyq { 0.0 } else { f(k, delta) })
                .collect()
        };
        let coth = sym(coth_symbol);
        let csch = sym(csch_symbol);
        Ok(Symbols {
            grid,
            delta,
            k,
            coth,
            csch,
        })
    }

    pub fn apply_t(&self, c: &[Complex64]) -> Vec<Complex64> {
        c.iter().zip(&self.coth).map(|(c, s)| I * s * c).collect()
    }

    pub fn apply_ttilde(&self, c: &[Complex64]) -> Vec<Complex64> {
        c.iter().zip(&self.csch).map(|(c, s)| I * s * c).collect()
    }

    /// Mode-space matrix operator `i [[coth, csch], [-csch, -coth]]`.
    pub fn apply_calt(&self, u: &[Complex64], v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        (0..u.len())
            .map(|i| {
                let (ct, cs) = (self.coth[i], self.csch[i]);
                (I * (ct * u[i] + cs * v[i]), -I * (cs * u[i] + ct * v[i]))
            })
            .unzip()
    }

    /// `order`-th x-derivative; the `n = -N` mode is dropped for odd orders.
    pub fn derivative(&self, c: &[Complex64], order: u32) -> Vec<Complex64> {
        let nyq = self.grid.nyquist_index();
        c.iter()
            .zip(&self.k)
            .enumerate()
            .map(|(i, (c, &k))| {
                if order % 2 == 1 && i == nyq {
                    Complex64::default()
                } else {
                    c * (I * k).powu(order)
                }
            })
            .collect()
    }
}

pub fn apply_t(spec: &SpectralPair, delta: f64) -> Result<SpectralPair> {
    let s = Symbols::new(spec.grid, delta)?;
    Ok(SpectralPair {
        grid: spec.grid,
        time: spec.time,
        uhat: s.apply_t(&spec.uhat),
        vhat: s.apply_t(&spec.vhat),
    })
}

pub fn apply_ttilde(spec: &SpectralPair, delta: f64) -> Result<SpectralPair> {
    let s = Symbols::new(spec.grid, delta)?;
    Ok(SpectralPair {
        grid: spec.grid,
        time: spec.time,
        uhat: s.apply_ttilde(&spec.uhat),
        vhat: s.apply_ttilde(&spec.vhat),
    })
}

/// The matrix operator `[[T, T~], [-T~, -T]]` acting on `(u, v)`.
pub fn apply_calt(spec: &SpectralPair, delta: f64) -> Result<SpectralPair> {
    let s = Symbols::new(spec.grid, delta)?;
    let (uhat, vhat) = s.apply_calt(&spec.uhat, &spec.vhat);
    Ok(SpectralPair {
        grid: spec.grid,
        time: spec.time,
        uhat,
        vhat,
    })
}

/// Physical-space spectral operators on one grid.
#[derive(Debug, Clone)]
pub struct Operators {
    pub transform: Transform,
    pub symbols: Symbols,
}

impl Operators {
    pub fn new(grid: Grid, delta: f64) -> Result<Self> {
        Ok(Operators {
            transform: Transform::new(grid),
            symbols: Symbols::new(grid, delta)?,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.transform.grid()
    }

    fn real_op(&self, f: &[f64], op: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Result<Vec<f64>> {
        let c = self.transform.forward_real(f)?;
        self.transform.inverse_real(&op(&c))
    }

    pub fn derivative(&self, f: &[f64], order: u32) -> Result<Vec<f64>> {
        self.real_op(f, |c| self.symbols.derivative(c, order))
    }

    pub fn t(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.real_op(f, |c| self.symbols.apply_t(c))
    }

    pub fn ttilde(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.real_op(f, |c| self.symbols.apply_ttilde(c))
    }

    /// `T` applied after `order` derivatives.
    pub fn t_derivative(&self, f: &[f64], order: u32) -> Result<Vec<f64>> {
        self.real_op(f, |c| {
            self.symbols.apply_t(&self.symbols.derivative(c, order))
        })
    }

    pub fn ttilde_derivative(&self, f: &[f64], order: u32) -> Result<Vec<f64>> {
        self.real_op(f, |c| {
            self.symbols
                .apply_ttilde(&self.symbols.derivative(c, order))
        })
    }

    /// Matrix operator on complex samples.
    pub fn calt_complex(
        &self,
        u: &[Complex64],
        v: &[Complex64],
    ) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let (uh, vh) = self
            .symbols
            .apply_calt(&self.transform.forward(u)?, &self.transform.forward(v)?);
        Ok((self.transform.inverse(&uh)?, self.transform.inverse(&vh)?))
    }
}
