use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default pole-proximity threshold, in units of the imaginary period.
pub const DEFAULT_POLE_EPS: f64 = 1e-12;

// Reduce the imaginary part into [-pi/2, pi/2]; coth and csch^2 are
// i*pi-periodic.
fn reduce_ipi(w: Complex64) -> Complex64 {
    let m = (w.im / PI).round();
    Complex64::new(w.re, w.im - m * PI)
}

/// Hyperbolic cotangent, accurate across the whole plane.
pub fn coth(w: Complex64) -> Complex64 {
    if w.re > 1.0 {
        let e = (-2.0 * w).exp();
        (1.0 + e) / (1.0 - e)
    } else if w.re < -1.0 {
        -coth(-w)
    } else {
        let w = reduce_ipi(w);
        if w.im.abs() <= FRAC_PI_4 {
            1.0 / w.tanh()
        } else {
            let (a2, b2) = (2.0 * w.re, 2.0 * w.im);
            Complex64::new(a2.sinh(), -b2.sin()) / (a2.cosh() - b2.cos())
        }
    }
}

/// `1 / sinh(w)^2`.
pub fn csch2(w: Complex64) -> Complex64 {
    if w.re > 1.0 {
        let e = (-2.0 * w).exp();
        let d = 1.0 - e;
        4.0 * e / (d * d)
    } else if w.re < -1.0 {
        csch2(-w)
    } else {
        let s = reduce_ipi(w).sinh();
        1.0 / (s * s)
    }
}

pub fn cot(w: Complex64) -> Complex64 {
    Complex64::i() * coth(Complex64::i() * w)
}

/// `1 / sin(w)^2`.
pub fn csc2(w: Complex64) -> Complex64 {
    -csch2(Complex64::i() * w)
}

/// Strip geometry of the hyperbolic (whole-line) problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryHyperbolic {
    delta: f64,
    pole_eps: f64,
}

impl GeometryHyperbolic {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        Ok(Self {
            delta,
            pole_eps: DEFAULT_POLE_EPS,
        })
    }

    pub fn with_pole_eps(mut self, eps: f64) -> Self {
        self.pole_eps = eps;
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn pole_eps(&self) -> f64 {
        self.pole_eps
    }

    /// `pi / (2 delta)`.
    #[inline]
    pub fn scale(&self) -> f64 {
        FRAC_PI_2 / self.delta
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        let period = 2.0 * self.delta;
        let m = (z.im / period).round();
        let r = Complex64::new(z.re, z.im - m * period);
        let eps = self.pole_eps * period;
        if r.norm() < eps {
            Err(Error::PoleProximity { arg: z, eps })
        } else {
            Ok(())
        }
    }

    /// `(pi/2delta) coth(pi z / 2delta)`.
    pub fn alpha(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let c = self.scale();
        Ok(c * coth(c * z))
    }

    /// `(pi/2delta)^2 sinh^-2(pi z / 2delta)`.
    pub fn v(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let c = self.scale();
        Ok(c * c * csch2(c * z))
    }

    /// Derivative of [`Self::v`], in closed form.
    pub fn v_prime(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let c = self.scale();
        let w = c * z;
        Ok(-2.0 * c * c * c * coth(w) * csch2(w))
    }

    /// Inter-family potential `V(z - i delta) = -(pi/2delta)^2 cosh^-2(pi z/2delta)`.
    pub fn v_tilde(&self, z: Complex64) -> Result<Complex64> {
        self.v(z - Complex64::new(0.0, self.delta))
    }
}
