use num_complex::Complex64;

use super::FieldPair;
use crate::cms::{PoleConfiguration, DEFAULT_STRIP_EPS};
use crate::error::{Error, Result};
use crate::par;
use crate::special::{GeometryHyperbolic, LatticeElliptic, PoleKernel, PoleKind};
use crate::spectral::Grid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Exact fields, their analytic time derivatives, and the largest imaginary
/// part discarded when storing them as reals.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub fields: FieldPair,
    pub rate: FieldPair,
    pub max_imag: f64,
}

fn check<K: PoleKernel + ?Sized>(poles: &PoleConfiguration, kernel: &K) -> Result<()> {
    if kernel.kind() == PoleKind::Elliptic && poles.n() != poles.m() {
        return Err(Error::PoleCountMismatch {
            n: poles.n(),
            m: poles.m(),
        });
    }
    poles.check_strip(kernel.delta(), DEFAULT_STRIP_EPS)
}

/// `(u, v, u_t, v_t)` at one point, as complex numbers.
pub fn eval_point<K: PoleKernel + ?Sized>(
    poles: &PoleConfiguration,
    kernel: &K,
    x: f64,
) -> Result<[Complex64; 4]> {
    let h = 0.5 * kernel.delta() * I;
    let xc = Complex64::new(x, 0.0);
    let (mut u, mut v, mut ut, mut vt) = Default::default();
    for (j, &z) in poles.z.iter().enumerate() {
        let zd = poles.zdot.get(j).copied().unwrap_or_default();
        let (a, b) = (xc - z - h, xc - z + h);
        u += I * kernel.alpha(a)?;
        v -= I * kernel.alpha(b)?;
        ut -= I * kernel.alpha_prime(a)? * zd;
        vt += I * kernel.alpha_prime(b)? * zd;
    }
    for (j, &w) in poles.w.iter().enumerate() {
        let wd = poles.wdot.get(j).copied().unwrap_or_default();
        let (a, b) = (xc - w + h, xc - w - h);
        u -= I * kernel.alpha(a)?;
        v += I * kernel.alpha(b)?;
        ut += I * kernel.alpha_prime(a)? * wd;
        vt -= I * kernel.alpha_prime(b)? * wd;
    }
    Ok([u, v, ut, vt])
}

/// Evaluates the pole ansatz and its time derivative on `grid` at
/// `poles.time`, using the velocities stored in `poles`.
pub fn evaluate<K: PoleKernel + ?Sized>(
    poles: &PoleConfiguration,
    kernel: &K,
    grid: &Grid,
) -> Result<Evaluation> {
    check(poles, kernel)?;
    let pts = par::try_map_range(grid.points(), |i| eval_point(poles, kernel, grid.x(i)))?;
    let max_imag = pts
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, c| m.max(c.im.abs()));
    let col = |k: usize| pts.iter().map(|p| p[k].re).collect::<Vec<_>>();
    let t = poles.time;
    Ok(Evaluation {
        fields: FieldPair::new(*grid, t, col(0), col(1))?,
        rate: FieldPair::new(*grid, t, col(2), col(3))?,
        max_imag,
    })
}

pub fn eval_hyperbolic(
    poles: &PoleConfiguration,
    geometry: &GeometryHyperbolic,
    grid: &Grid,
) -> Result<FieldPair> {
    Ok(evaluate(poles, geometry, grid)?.fields)
}

pub fn eval_elliptic(
    poles: &PoleConfiguration,
    lattice: &LatticeElliptic,
    grid: &Grid,
) -> Result<FieldPair> {
    Ok(evaluate(poles, lattice, grid)?.fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cms::build_real_initial;
    use crate::special::Kernel;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn no_poles_no_fields() {
        let g = Grid::new(20.0, 64).unwrap();
        for k in [
            Kernel::hyperbolic(1.0).unwrap(),
            Kernel::elliptic(20.0, 1.0).unwrap(),
        ] {
            let p = build_real_initial(&[], &k).unwrap();
            let e = evaluate(&p, &k, &g).unwrap();
            assert_eq!(e.fields.max_abs(), 0.0);
            assert_eq!(e.rate.max_abs(), 0.0);
        }
    }

    #[test]
    fn midline_soliton_has_equal_humps() {
        let geo = GeometryHyperbolic::new(PI).unwrap();
        let p = build_real_initial(&[c(0.0, PI)], &geo).unwrap();
        let g = Grid::new(200.0, 1024).unwrap();
        let e = evaluate(&p, &geo, &g).unwrap();
        let mu = e.fields.u.iter().cloned().fold(f64::MIN, f64::max);
        let mv = e.fields.v.iter().cloned().fold(f64::MIN, f64::max);
        assert!((mu - mv).abs() < 1e-14);
        assert!(e.rate.max_abs() < 1e-14);
    }

    #[test]
    fn conjugate_data_is_real() {
        let geo = GeometryHyperbolic::new(PI).unwrap();
        let p = build_real_initial(&[c(-4.0, 1.2 * PI), c(3.0, 0.85 * PI)], &geo).unwrap();
        let e = evaluate(&p, &geo, &Grid::new(200.0, 1024).unwrap()).unwrap();
        assert!(e.max_imag < 1e-12, "{}", e.max_imag);
    }

    #[test]
    fn fig2_initial_humps() {
        let geo = GeometryHyperbolic::new(PI).unwrap();
        let p = build_real_initial(&[c(-4.0, 1.2 * PI), c(3.0, 0.85 * PI)], &geo).unwrap();
        let g = Grid::new(200.0, 1024).unwrap();
        let f = eval_hyperbolic(&p, &geo, &g).unwrap();
        let argmax = |f: &[f64]| (0..f.len()).max_by(|&a, &b| f[a].total_cmp(&f[b])).unwrap();
        assert!((g.x(argmax(&f.u)) + 4.0).abs() < 0.5);
        assert!((g.x(argmax(&f.v)) - 3.0).abs() < 0.5);
    }

    #[test]
    fn strip_violation_rejected() {
        let geo = GeometryHyperbolic::new(1.0).unwrap();
        let mut p = build_real_initial(&[c(0.0, 1.0)], &geo).unwrap();
        p.z[0] = c(0.0, 0.5);
        assert!(matches!(
            evaluate(&p, &geo, &Grid::new(10.0, 16).unwrap()),
            Err(Error::StripViolation { .. })
        ));
    }
}
