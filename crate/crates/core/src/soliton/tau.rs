use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FieldPair;
use crate::cms::PoleConfiguration;
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::special::{coth, csch2, GeometryHyperbolic, PoleKind};
use crate::spectral::Grid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tau functions `F(z) = prod_j sinh(c (z - z_j))`, `G(z) = prod_j sinh(c (z - w_j))`
/// with `c = pi/2delta`, so that `u = i d_x log(F^- / G^+)` and
/// `v = -i d_x log(F^+ / G^-)` where `F^(+-)(x) = F(x +- i delta/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauPair {
    pub delta: f64,
    pub time: f64,
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub zdot: Vec<Complex64>,
    pub wdot: Vec<Complex64>,
}

/// Source of the time derivatives in the Hirota residual.
#[derive(Debug, Clone, Copy)]
pub enum TimeDerivative<'a> {
    /// Chain rule through the pole velocities.
    ChainRule,
    /// Centered differences between the tau pairs at `t - dt` and `t + dt`.
    Centered {
        before: &'a TauPair,
        after: &'a TauPair,
        dt: f64,
    },
}

/// Hirota residuals of `(i D_t - D_x^2) F^- . G^+` (`f`) and
/// `(i D_t - D_x^2) F^+ . G^-` (`g`).
///
/// `pointwise_*` is `max_x |R / (F G)|`; `global_*` is `max_x |R| / max_x |F G|`.
/// The global form is dominated by the domain edges, where `|F G|` is
/// exponentially large, so the pointwise form is the meaningful check.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HirotaResidual {
    pub pointwise_f: f64,
    pub pointwise_g: f64,
    pub global_f: f64,
    pub global_g: f64,
}

impl HirotaResidual {
    pub fn max(&self) -> f64 {
        self.pointwise_f.max(self.pointwise_g)
    }
}

/// Logarithmic derivatives of one product at one point.
#[derive(Debug, Clone, Copy, Default)]
struct LogDerivs {
    dx: Complex64,
    dxx: Complex64,
    dt: Complex64,
    log_abs: f64,
}

impl TauPair {
    pub fn new(poles: &PoleConfiguration, geometry: &GeometryHyperbolic) -> Result<Self> {
        if poles.kind != PoleKind::Hyperbolic {
            return Err(invalid(
                "kind",
                "tau functions are defined for the hyperbolic kernel only",
            ));
        }
        if poles.zdot.len() != poles.n() || poles.wdot.len() != poles.m() {
            return Err(Error::LengthMismatch {
                expected: poles.n() + poles.m(),
                found: poles.zdot.len() + poles.wdot.len(),
            });
        }
        Ok(TauPair {
            delta: geometry.delta(),
            time: poles.time,
            z: poles.z.clone(),
            w: poles.w.clone(),
            zdot: poles.zdot.clone(),
            wdot: poles.wdot.clone(),
        })
    }

    fn scale(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.delta)
    }

    fn check_zero(&self, zeta: Complex64, p: Complex64, index: usize) -> Result<()> {
        // Zeros of sinh(c (zeta - p)) lie at p + 2i delta Z.
        let d = zeta - p;
        let period = 2.0 * self.delta;
        let im = d.im - period * (d.im / period).round();
        if (d.re * d.re + im * im).sqrt() <= 1e-12 * self.delta {
            return Err(Error::PoleOnGrid { x: zeta.re, index });
        }
        Ok(())
    }

    fn log_derivs(
        &self,
        zeta: Complex64,
        poles: &[Complex64],
        vel: &[Complex64],
    ) -> Result<LogDerivs> {
        let c = self.scale();
        let mut out = LogDerivs::default();
        for (j, (&p, &pd)) in poles.iter().zip(vel).enumerate() {
            self.check_zero(zeta, p, j)?;
            let arg = c * (zeta - p);
            let ct = coth(arg);
            out.dx += c * ct;
            out.dxx -= c * c * csch2(arg);
            out.dt -= c * ct * pd;
            out.log_abs += log_abs_sinh(arg);
        }
        out.dxx += out.dx * out.dx;
        Ok(out)
    }

    /// `F(t + dt)/F(t) - F(t - dt)/F(t)` over `2 dt`, evaluated factorwise.
    fn centered_dt(
        &self,
        zeta: Complex64,
        now: &[Complex64],
        before: &[Complex64],
        after: &[Complex64],
        dt: f64,
    ) -> Complex64 {
        let c = self.scale();
        let ratio = |other: &[Complex64]| -> Complex64 {
            now.iter()
                .zip(other)
                .map(|(&p, &q)| sinh_ratio(c * (zeta - q), c * (zeta - p)))
                .product()
        };
        (ratio(after) - ratio(before)) / (2.0 * dt)
    }

    fn pair_residual(
        &self,
        x: f64,
        sf: f64,
        sg: f64,
        deriv: &TimeDerivative<'_>,
    ) -> Result<(Complex64, f64)> {
        let h = 0.5 * self.delta;
        let zf = Complex64::new(x, sf * h);
        let zg = Complex64::new(x, sg * h);
        let mut f = self.log_derivs(zf, &self.z, &self.zdot)?;
        let mut g = self.log_derivs(zg, &self.w, &self.wdot)?;
        if let TimeDerivative::Centered { before, after, dt } = deriv {
            f.dt = self.centered_dt(zf, &self.z, &before.z, &after.z, *dt);
            g.dt = self.centered_dt(zg, &self.w, &before.w, &after.w, *dt);
        }
        let r = I * (f.dt - g.dt) - (f.dxx - 2.0 * f.dx * g.dx + g.dxx);
        Ok((r, f.log_abs + g.log_abs))
    }

    /// Reconstructs `(u, v)` from logarithmic derivatives of the tau functions.
    /// Returns the fields and the largest discarded imaginary part.
    pub fn fields(&self, grid: &Grid) -> Result<(FieldPair, f64)> {
        let h = 0.5 * self.delta;
        let pts = par::try_map_range(grid.points(), |i| {
            let x = grid.x(i);
            let d = |s: f64, poles: &[Complex64]| -> Result<Complex64> {
                Ok(self.log_derivs(Complex64::new(x, s * h), poles, poles)?.dx)
            };
            let u = I * (d(-1.0, &self.z)? - d(1.0, &self.w)?);
            let v = -I * (d(1.0, &self.z)? - d(-1.0, &self.w)?);
            Ok((u, v))
        })?;
        let max_imag = pts
            .iter()
            .fold(0.0f64, |m, (u, v)| m.max(u.im.abs()).max(v.im.abs()));
        let (u, v) = pts.iter().map(|(u, v)| (u.re, v.re)).unzip();
        Ok((FieldPair::new(*grid, self.time, u, v)?, max_imag))
    }
}

fn log_abs_sinh(w: Complex64) -> f64 {
    // |sinh(a + ib)|^2 = sinh^2 a + sin^2 b
    let (a, b) = (w.re, w.im);
    if a.abs() > 20.0 {
        a.abs() - std::f64::consts::LN_2 + 0.5 * (1.0 + (b.sin() / a.sinh()).powi(2)).ln()
    } else {
        0.5 * (a.sinh().powi(2) + b.sin().powi(2)).ln()
    }
}

/// `sinh(p) / sinh(q)` for nearby `p, q`, without overflow.
fn sinh_ratio(p: Complex64, q: Complex64) -> Complex64 {
    // sinh p / sinh q = cosh(p - q) + coth(q) sinh(p - q)
    let d = p - q;
    d.cosh() + coth(q) * d.sinh()
}

/// Evaluates both Hirota residuals on `grid`.
pub fn hirota_residual(
    tau: &TauPair,
    grid: &Grid,
    deriv: TimeDerivative<'_>,
) -> Result<HirotaResidual> {
    if let TimeDerivative::Centered { before, after, dt } = deriv {
        if !(dt > 0.0) || before.z.len() != tau.z.len() || after.w.len() != tau.w.len() {
            return Err(invalid(
                "dt_fd",
                "centered differences need dt > 0 and matching pole counts",
            ));
        }
    }
    let rows = par::try_map_range(grid.points(), |i| {
        let x = grid.x(i);
        Ok((
            tau.pair_residual(x, -1.0, 1.0, &deriv)?,
            tau.pair_residual(x, 1.0, -1.0, &deriv)?,
        ))
    })?;
    let reduce =
        |sel: fn(&((Complex64, f64), (Complex64, f64))) -> (Complex64, f64)| -> (f64, f64) {
            let max_log = rows
                .iter()
                .map(|r| sel(r).1)
                .fold(f64::NEG_INFINITY, f64::max);
            rows.iter().fold((0.0f64, 0.0f64), |(p, g), r| {
                let (res, log_fg) = sel(r);
                (
                    p.max(res.norm()),
                    g.max(res.norm() * (log_fg - max_log).exp()),
                )
            })
        };
    let (pf, gf) = reduce(|r| r.0);
    let (pg, gg) = reduce(|r| r.1);
    Ok(HirotaResidual {
        pointwise_f: pf,
        pointwise_g: pg,
        global_f: gf,
        global_g: gg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cms::build_real_initial;
    use crate::soliton::eval_hyperbolic;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_soliton_residual_vanishes() {
        let geo = GeometryHyperbolic::new(PI).unwrap();
        let g = Grid::new(200.0, 1024).unwrap();
        for b in [0.6, 1.0, 1.2, 1.45] {
            let p = build_real_initial(&[c(0.7, b * PI)], &geo).unwrap();
            let tau = TauPair::new(&p, &geo).unwrap();
            let r = hirota_residual(&tau, &g, TimeDerivative::ChainRule).unwrap();
            assert!(r.max() < 1e-12, "b = {b}: {r:?}");
            assert!(r.global_f <= r.pointwise_f * 1.0001);
        }
    }

    #[test]
    fn wrong_velocity_is_detected() {
        let geo = GeometryHyperbolic::new(PI).unwrap();
        let g = Grid::new(50.0, 256).unwrap();
        let mut p = build_real_initial(&[c(0.0, 1.2 * PI)], &geo).unwrap();
        p.zdot[0] = -p.zdot[0];
        p.wdot[0] = -p.wdot[0];
        let r = hirota_residual(
            &TauPair::new(&p, &geo).unwrap(),
            &g,
            TimeDerivative::ChainRule,
        )
        .unwrap();
        assert!(r.max() > 1e-2, "{r:?}");
    }

    #[test]
    fn reconstruction_matches_pole_sum() {
        let geo = GeometryHyperbolic::new(PI).unwrap();
        let g = Grid::new(200.0, 512).unwrap();
        let p = build_real_initial(&[c(-4.0, 1.2 * PI), c(3.0, 0.85 * PI)], &geo).unwrap();
        let (f, im) = TauPair::new(&p, &geo).unwrap().fields(&g).unwrap();
        assert!(im < 1e-12);
        let e = eval_hyperbolic(&p, &geo, &g).unwrap();
        assert!(f.max_diff(&e).unwrap() < 1e-12);
    }

    #[test]
    fn centered_differences_agree_with_chain_rule() {
        let geo = GeometryHyperbolic::new(PI).unwrap();
        let g = Grid::new(60.0, 256).unwrap();
        let a = c(0.0, 1.2 * PI);
        let at = |t: f64| {
            let mut p = build_real_initial(&[a], &geo).unwrap();
            let v = p.zdot[0];
            p.z[0] += v * t;
            p.w[0] += v * t;
            p.time = t;
            TauPair::new(&p, &geo).unwrap()
        };
        let dt = 1e-4;
        let (b, now, af) = (at(1.0 - dt), at(1.0), at(1.0 + dt));
        let r = hirota_residual(
            &now,
            &g,
            TimeDerivative::Centered {
                before: &b,
                after: &af,
                dt,
            },
        )
        .unwrap();
        assert!(r.max() < 1e-7, "{r:?}");
    }

    #[test]
    fn zero_on_grid_is_reported() {
        let geo = GeometryHyperbolic::new(1.0).unwrap();
        let tau = TauPair {
            delta: 1.0,
            time: 0.0,
            z: vec![c(0.0, -0.5)],
            w: vec![],
            zdot: vec![c(0.0, 0.0)],
            wdot: vec![],
        };
        let _ = geo;
        let r = hirota_residual(&tau, &Grid::new(4.0, 8).unwrap(), TimeDerivative::ChainRule);
        assert!(matches!(r, Err(Error::PoleOnGrid { index: 0, .. })));
    }

    #[test]
    fn log_abs_sinh_is_stable() {
        for w in [
            c(0.3, 1.1),
            c(-5.0, 0.2),
            c(30.0, 2.0),
            c(-700.0, 0.4),
            c(900.0, 1.0),
        ] {
            let want = if w.re.abs() < 300.0 {
                w.sinh().norm().ln()
            } else {
                w.re.abs() - std::f64::consts::LN_2
            };
            assert!(
                (log_abs_sinh(w) - want).abs() < 1e-12 * want.abs().max(1.0),
                "{w}"
            );
        }
    }
}
