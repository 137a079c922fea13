use serde::{Deserialize, Serialize};

use super::Operators;
use crate::error::Result;
use crate::soliton::FieldPair;

/// The first three conserved integrals.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Conserved {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl Conserved {
    pub fn as_array(&self) -> [f64; 3] {
        [self.i1, self.i2, self.i3]
    }

    /// `|I_k - I_k(ref)| / max(1, |I_k(ref)|)` for each k.
    pub fn drift(&self, reference: &Conserved) -> [f64; 3] {
        let a = self.as_array();
        let r = reference.as_array();
        std::array::from_fn(|k| (a[k] - r[k]).abs() / r[k].abs().max(1.0))
    }
}

impl Operators {
    /// Trapezoidal quadrature of the conserved densities, spectrally exact
    /// for band-limited integrands.
    pub fn conserved(&self, u: &[f64], v: &[f64]) -> Result<Conserved> {
        let h = self.grid().spacing();
        let tux = self.t_derivative(u, 1)?;
        let tvx = self.t_derivative(v, 1)?;
        let ttux = self.ttilde_derivative(u, 1)?;
        let ttvx = self.ttilde_derivative(v, 1)?;
        let (mut i1, mut i2, mut i3) = (0.0, 0.0, 0.0);
        for j in 0..u.len() {
            let (a, b) = (u[j], v[j]);
            i1 += a + b;
            i2 += a * a - b * b;
            i3 += a * a * a / 3.0
                + 0.5 * a * (tux[j] + ttvx[j])
                + b * b * b / 3.0
                + 0.5 * b * (tvx[j] + ttux[j]);
        }
        Ok(Conserved {
            i1: h * i1,
            i2: 0.5 * h * i2,
            i3: h * i3,
        })
    }
}

pub fn conserved_quantities(fields: &FieldPair, delta: f64) -> Result<Conserved> {
    Operators::new(fields.grid, delta)?.conserved(&fields.u, &fields.v)
}
