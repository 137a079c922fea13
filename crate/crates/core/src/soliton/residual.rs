use serde::{Deserialize, Serialize};

use super::{max_abs, FieldPair};
use crate::error::Result;
use crate::spectral::Operators;

/// Max-norms of the two equation residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Residual {
    pub u: f64,
    pub v: f64,
}

impl Residual {
    pub fn max(&self) -> f64 {
        self.u.max(self.v)
    }
}

impl Operators {
    /// Pointwise residuals
    /// `u_t + 2 u u_x + T u_xx + T~ v_xx` and `v_t - 2 v v_x - T v_xx - T~ u_xx`
    /// with spectral spatial derivatives.
    pub fn residual_fields(
        &self,
        fields: &FieldPair,
        rate: &FieldPair,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let grid = *self.grid();
        fields.check_grid(&grid)?;
        rate.check_grid(&grid)?;
        let ux = self.derivative(&fields.u, 1)?;
        let vx = self.derivative(&fields.v, 1)?;
        let tuxx = self.t_derivative(&fields.u, 2)?;
        let tvxx = self.t_derivative(&fields.v, 2)?;
        let ttuxx = self.ttilde_derivative(&fields.u, 2)?;
        let ttvxx = self.ttilde_derivative(&fields.v, 2)?;
        let n = grid.points();
        let ru = (0..n)
            .map(|j| rate.u[j] + 2.0 * fields.u[j] * ux[j] + tuxx[j] + ttvxx[j])
            .collect();
        let rv = (0..n)
            .map(|j| rate.v[j] - 2.0 * fields.v[j] * vx[j] - tvxx[j] - ttuxx[j])
            .collect();
        Ok((ru, rv))
    }

    pub fn residual(&self, fields: &FieldPair, rate: &FieldPair) -> Result<Residual> {
        let (ru, rv) = self.residual_fields(fields, rate)?;
        Ok(Residual {
            u: max_abs(&ru),
            v: max_abs(&rv),
        })
    }
}

/// PDE residual of a candidate solution given its time derivative.
pub fn pde_residual(fields: &FieldPair, rate: &FieldPair, delta: f64) -> Result<Residual> {
    Operators::new(fields.grid, delta)?.residual(fields, rate)
}
