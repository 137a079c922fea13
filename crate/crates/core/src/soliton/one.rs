use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FieldPair;
use crate::error::{Error, Result};
use crate::special::GeometryHyperbolic;
use crate::spectral::Grid;

/// Sign convention for the one-soliton velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VelocityConvention {
    /// `z'(0) = -2i alpha(a - conj(a) + i delta)`, the `N = 1` Backlund system.
    #[default]
    Backlund,
    /// The opposite sign, kept as a falsification control.
    Literal,
}

/// Checks `delta/2 < Im a < 3 delta/2`.
pub fn check_window(a: Complex64, delta: f64, index: usize) -> Result<()> {
    if !(a.re.is_finite() && a.im > 0.5 * delta && a.im < 1.5 * delta) {
        return Err(Error::WindowViolation {
            index,
            value: a,
            reason: format!("need {} < Im a < {}", 0.5 * delta, 1.5 * delta),
        });
    }
    Ok(())
}

/// Velocity of the single pole, `-(pi/delta) cot(pi (2 Im a + delta) / 2delta)`
/// for the Backlund convention, written as `(pi/delta) tan(pi (Im a/delta - 1))`
/// so that it vanishes exactly on the midline.
pub fn one_soliton_velocity(a: Complex64, delta: f64, convention: VelocityConvention) -> f64 {
    let v = (PI / delta) * (PI * (a.im / delta - 1.0)).tan();
    match convention {
        VelocityConvention::Backlund => v,
        VelocityConvention::Literal => -v,
    }
}

/// Closed-form single soliton: with `xi = x - Re z(t)`, `c = pi/2delta`,
/// `th_u = pi (b + delta/2)/delta`, `th_v = pi (b - delta/2)/delta`,
///
/// ```text
/// u = -2c sin th_u / (cosh 2c xi - cos th_u)
/// v =  2c sin th_v / (cosh 2c xi - cos th_v)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSoliton {
    pub a: Complex64,
    pub delta: f64,
    pub velocity: f64,
}

impl OneSoliton {
    pub fn new(
        a: Complex64,
        geometry: &GeometryHyperbolic,
        convention: VelocityConvention,
    ) -> Result<Self> {
        let delta = geometry.delta();
        check_window(a, delta, 0)?;
        Ok(OneSoliton {
            a,
            delta,
            velocity: one_soliton_velocity(a, delta, convention),
        })
    }

    fn parts(&self) -> (f64, f64, f64) {
        let c = PI / (2.0 * self.delta);
        let b = self.a.im;
        (
            c,
            PI * (b + 0.5 * self.delta) / self.delta,
            PI * (b - 0.5 * self.delta) / self.delta,
        )
    }

    pub fn center(&self, t: f64) -> f64 {
        self.a.re + self.velocity * t
    }

    /// `(u, v, u_x, v_x)` at distance `xi` from the center.
    pub fn profile(&self, xi: f64) -> [f64; 4] {
        let (c, thu, thv) = self.parts();
        let (s, ch) = ((2.0 * c * xi).sinh(), (2.0 * c * xi).cosh());
        let du = ch - thu.cos();
        let dv = ch - thv.cos();
        [
            -2.0 * c * thu.sin() / du,
            2.0 * c * thv.sin() / dv,
            4.0 * c * c * thu.sin() * s / (du * du),
            -4.0 * c * c * thv.sin() * s / (dv * dv),
        ]
    }

    /// Nearest periodic image of `x - center` on a grid of period `l`.
    fn offset(&self, x: f64, t: f64, l: f64) -> f64 {
        let xi = x - self.center(t);
        xi - l * (xi / l).round()
    }

    pub fn fields(&self, grid: &Grid, t: f64) -> FieldPair {
        let l = grid.length();
        FieldPair::from_fn(*grid, t, |x| {
            let p = self.profile(self.offset(x, t, l));
            (p[0], p[1])
        })
    }

    /// `(u_t, v_t) = -velocity (u_x, v_x)`.
    pub fn rate(&self, grid: &Grid, t: f64) -> FieldPair {
        let l = grid.length();
        FieldPair::from_fn(*grid, t, |x| {
            let p = self.profile(self.offset(x, t, l));
            (-self.velocity * p[2], -self.velocity * p[3])
        })
    }
}

/// The one-soliton with Backlund velocity, sampled at time `t`.
///
/// The profile is centered at the periodic image of the pole nearest each
/// grid point; on the line the far tail is exponentially small.
pub fn one_soliton(
    a: Complex64,
    geometry: &GeometryHyperbolic,
    grid: &Grid,
    t: f64,
) -> Result<FieldPair> {
    Ok(OneSoliton::new(a, geometry, VelocityConvention::Backlund)?.fields(grid, t))
}
