//! Quadrature used by the oracles: composite Gauss-Legendre for complex
//! integrands and Cauchy-integral derivatives of analytic functions.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Composite Gauss-Legendre rule with a fixed number of nodes per panel.
#[derive(Debug)]
pub struct Composite {
    rule: GaussLegendre,
}

impl Composite {
    pub fn new(nodes: usize) -> Result<Self> {
        let rule = GaussLegendre::new(nodes).map_err(|e| invalid("nodes", e.to_string()))?;
        Ok(Composite { rule })
    }

    /// `int_a^b f(x) dx` over `panels` equal panels.
    pub fn integrate(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Complex64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut total = Complex64::default();
        for p in 0..panels {
            let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
            let re = self.rule.integrate(lo, hi, |x| f(x).re);
            let im = self.rule.integrate(lo, hi, |x| f(x).im);
            total += Complex64::new(re, im);
        }
        total
    }

    /// Integral with panel width at most `width`.
    pub fn integrate_width(
        &self,
        a: f64,
        b: f64,
        width: f64,
        f: impl Fn(f64) -> Complex64,
    ) -> Complex64 {
        let panels = ((b - a).abs() / width).ceil() as usize;
        self.integrate(a, b, panels, f)
    }
}

/// `f'(z)` from the trapezoidal rule on a circle of radius `r` with `m`
/// points. Converges geometrically when `f` is analytic on a larger disc.
pub fn cauchy_derivative(
    f: impl Fn(Complex64) -> Complex64,
    z: Complex64,
    r: f64,
    m: usize,
) -> Complex64 {
    let mut s = Complex64::default();
    for j in 0..m {
        let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
        s += f(z + r * e) / e;
    }
    s / (m as f64 * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_oscillatory_gaussian() {
        let q = Composite::new(20).unwrap();
        let k: f64 = 1.7;
        let got = q.integrate(-12.0, 12.0, 24, |x| {
            Complex64::new(0.0, -k * x).exp() * (-x * x).exp()
        });
        let want = PI.sqrt() * (-k * k / 4.0).exp();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn derivative_of_exponential() {
        let z = Complex64::new(0.3, -0.8);
        let d = cauchy_derivative(|w| (2.0 * w).exp(), z, 0.4, 48);
        assert!((d - 2.0 * (2.0 * z).exp()).norm() < 1e-13);
    }
}
