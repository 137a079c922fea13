use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExperimentReport, Tolerances};
use crate::error::Result;
use crate::quadrature::{cauchy_derivative, Composite};
use crate::special::{coth, GeometryHyperbolic, LatticeElliptic};
use crate::spectral::t_multiplier;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const CAUCHY_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityParams {
    pub seed: u64,
    /// Random samples per identity.
    pub samples: usize,
    /// Grid for the Fourier-transform quadratures.
    pub deltas: Vec<f64>,
    /// Shifts `a`, in units of `delta`.
    pub shifts: Vec<f64>,
    /// Wavenumbers, as `k delta`.
    pub wavenumbers: Vec<f64>,
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
    /// `(L, delta)` lattices for the elliptic identities.
    pub lattices: Vec<(f64, f64)>,
}

impl Default for IdentityParams {
    fn default() -> Self {
        IdentityParams {
            seed: 20_240_601,
            samples: 128,
            deltas: vec![0.5, 1.0, PI],
            shifts: vec![0.3, 1.0, 1.7],
            wavenumbers: vec![0.4, 1.3, -2.5],
            nodes: 20,
            lattices: vec![(20.0, 1.0), (6.0, 1.0), (1.5, 1.0), (10.0, PI)],
        }
    }
}

fn rel(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// `int c coth(c (x - s i a)) e^{-ikx} dx` for `s = +-1`, by subtracting
/// `sign(x)`, whose transform is `-2i/k`.
pub fn coth_transform_quadrature(q: &Composite, delta: f64, a: f64, k: f64, s: f64) -> Complex64 {
    let c = PI / (2.0 * delta);
    let shift = Complex64::new(0.0, -s * a);
    let dist = a.min(2.0 * delta - a);
    let width = 0.5 * dist.min(1.0 / k.abs());
    let x_max = 20.0 / c;
    let f = |x: f64| (coth(c * (x + shift)) - x.signum()) * Complex64::new(0.0, -k * x).exp();
    let body = q.integrate_width(-x_max, 0.0, width, f) + q.integrate_width(0.0, x_max, width, f);
    c * (body - 2.0 * I / k)
}

/// `-pi i e^{s (a k - k delta)} / sinh(k delta)`.
pub fn coth_transform_closed(delta: f64, a: f64, k: f64, s: f64) -> Complex64 {
    -PI * I * (s * (a * k - k * delta)).exp() / (k * delta).sinh()
}

/// `(1/2delta) PV int coth(c x) e^{-ikx} dx` (`tanh = false`) or the same
/// with `tanh(c x)`, via `-i/delta [int_0^inf (kernel - 1) sin kx dx + 1/k]`.
pub fn odd_kernel_transform_quadrature(q: &Composite, delta: f64, k: f64, tanh: bool) -> Complex64 {
    let c = PI / (2.0 * delta);
    let dist = if tanh { delta } else { 2.0 * delta };
    let width = 0.5 * dist.min(1.0 / k.abs());
    let x_max = 20.0 / c;
    let body = q.integrate_width(0.0, x_max, width, |x| {
        let e = 2.0 * c * x;
        let g = if tanh {
            -2.0 / (e.exp() + 1.0)
        } else {
            2.0 / e.exp_m1()
        };
        Complex64::new(g * (k * x).sin(), 0.0)
    });
    -I / delta * (body + 1.0 / k)
}

fn hyperbolic_dist(z: Complex64, delta: f64) -> f64 {
    let m = (z.im / (2.0 * delta)).round();
    Complex64::new(z.re, z.im - 2.0 * delta * m).norm()
}

fn lattice_dist(z: Complex64, period: f64, delta: f64) -> f64 {
    let k = (z.re / period).round();
    let m = (z.im / (2.0 * delta)).round();
    let mut best = f64::INFINITY;
    for dk in -1..=1 {
        for dm in -1..=1 {
            let p = Complex64::new((k + dk as f64) * period, 2.0 * delta * (m + dm as f64));
            best = best.min((z - p).norm());
        }
    }
    best
}

/// Rejection sampler for points at least `min_dist` from all singular
/// points, as judged by `dist`.
fn sample_point(
    rng: &mut ChaCha8Rng,
    re: f64,
    im: f64,
    min_dist: f64,
    ok: impl Fn(Complex64) -> f64,
) -> (Complex64, f64) {
    loop {
        let z = Complex64::new(rng.random_range(-re..re), rng.random_range(-im..im));
        let d = ok(z);
        if d >= min_dist {
            return (z, d);
        }
    }
}

/// Folds the relative defect of one sample into `worst`; evaluation
/// failures count as infinite.
fn track(worst: &mut f64, lhs: Result<Complex64>, rhs: Result<Complex64>) {
    let e = match (lhs, rhs) {
        (Ok(l), Ok(r)) => rel(l, r),
        _ => f64::INFINITY,
    };
    *worst = if e.is_nan() {
        f64::INFINITY
    } else {
        worst.max(e)
    };
}

fn quadrature_checks(params: &IdentityParams, report: &mut ExperimentReport) -> Result<()> {
    let q = Composite::new(params.nodes)?;
    let (mut j, mut pv, mut th, mut reduce, mut odd) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut count = 0usize;
    for &delta in &params.deltas {
        for &kd in &params.wavenumbers {
            let k = kd / delta;
            for &frac in &params.shifts {
                let a = frac * delta;
                for s in [1.0, -1.0] {
                    let lhs = coth_transform_quadrature(&q, delta, a, k, s);
                    track(&mut j, Ok(lhs), Ok(coth_transform_closed(delta, a, k, s)));
                    count += 1;
                }
            }
            track(
                &mut pv,
                Ok(odd_kernel_transform_quadrature(&q, delta, k, false)),
                Ok(-I * (k * delta).cosh() / (k * delta).sinh()),
            );
            track(
                &mut th,
                Ok(odd_kernel_transform_quadrature(&q, delta, k, true)),
                Ok(-I / (k * delta).sinh()),
            );
            // At a = delta the shifted coth kernel is tanh.
            track(
                &mut reduce,
                Ok(coth_transform_quadrature(&q, delta, delta, k, 1.0)),
                Ok(PI * odd_kernel_transform_quadrature(&q, delta, k, true)),
            );
            track(
                &mut odd,
                Ok(t_multiplier(-k, delta)),
                Ok(-t_multiplier(k, delta)),
            );
        }
    }
    report.metric("shifted_coth_transform_cases", count as f64);
    report.below("shifted coth transform", "identity", j);
    report.below("coth principal-value transform", "identity", pv);
    report.below("tanh transform", "identity", th);
    report.below("a = delta reduces to tanh transform", "identity", reduce);
    report.below("T multiplier odd in k", "identity", odd);
    Ok(())
}

fn hyperbolic_checks(
    params: &IdentityParams,
    rng: &mut ChaCha8Rng,
    report: &mut ExperimentReport,
) -> Result<()> {
    let (mut d1, mut d2, mut per, mut prod) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..params.samples {
        let delta = rng.random_range(0.5..2.0);
        let g = GeometryHyperbolic::new(delta)?;
        let min = 0.2 * delta;
        let dist = |z| hyperbolic_dist(z, delta);
        let (z, dz) = sample_point(rng, 2.0 * delta, 2.0 * delta, min, dist);
        let r = 0.5 * dz;
        let alpha = |w: Complex64| g.alpha(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
        track(
            &mut d1,
            Ok(cauchy_derivative(alpha, z, r, CAUCHY_POINTS)),
            g.v(z).map(|v| -v),
        );
        track(
            &mut d2,
            Ok(cauchy_derivative(
                |w| alpha(w) * alpha(w),
                z,
                r,
                CAUCHY_POINTS,
            )),
            g.v_prime(z),
        );
        track(&mut per, g.alpha(z + 2.0 * I * delta), g.alpha(z));

        let (a, b, x) = loop {
            let (a, _) = sample_point(rng, 2.0 * delta, 2.0 * delta, 0.0, dist);
            let (b, _) = sample_point(rng, 2.0 * delta, 2.0 * delta, 0.0, dist);
            let ok = |x: Complex64| dist(x - a).min(dist(x - b));
            if dist(a - b) < min {
                continue;
            }
            break (a, b, sample_point(rng, 2.0 * delta, 2.0 * delta, min, ok));
        };
        let (x, dx) = x;
        let lhs = cauchy_derivative(|w| alpha(w - a) * alpha(w - b), x, 0.5 * dx, CAUCHY_POINTS);
        let diff = cauchy_derivative(|w| alpha(w - a) - alpha(w - b), x, 0.5 * dx, CAUCHY_POINTS);
        track(&mut prod, Ok(lhs), g.alpha(a - b).map(|c| diff * c));
    }
    report.below("hyperbolic alpha' = -V", "identity", d1);
    report.below("hyperbolic (alpha^2)' = V'", "identity", d2);
    report.below("hyperbolic alpha 2i delta periodic", "identity", per);
    report.below("hyperbolic product identity", "identity", prod);
    Ok(())
}

fn elliptic_checks(
    params: &IdentityParams,
    rng: &mut ChaCha8Rng,
    report: &mut ExperimentReport,
) -> Result<()> {
    let lattices: Vec<LatticeElliptic> = params
        .lattices
        .iter()
        .map(|&(l, d)| LatticeElliptic::new(l, d))
        .collect::<Result<_>>()?;
    if lattices.is_empty() {
        return Ok(());
    }
    let nan = Complex64::new(f64::NAN, 0.0);
    let (mut deriv, mut shift, mut per, mut a17, mut a18) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut fe, mut fe1, mut fe2) = (0.0, 0.0, 0.0);
    for _ in 0..params.samples {
        let lat = &lattices[rng.random_range(0..lattices.len())];
        let (l, delta) = (lat.period(), lat.delta());
        let min = 0.2 * delta.min(0.5 * l);
        let dist = |z| lattice_dist(z, l, delta);
        let (re, im) = (l, 2.0 * delta);
        let z2 = |w: Complex64| lat.zeta2(w).unwrap_or(nan);

        let (z, dz) = sample_point(rng, re, im, min, dist);
        let (y, _) = sample_point(rng, re, im, min, dist);
        let d = cauchy_derivative(z2, z, 0.5 * dz, CAUCHY_POINTS);
        track(&mut deriv, Ok(d), lat.zeta2_prime(z));
        // zeta2' = -wp + const, so zeta2' + wp agrees between two points.
        let g = |w: Complex64| -> Result<Complex64> { Ok(lat.zeta2_prime(w)? + lat.wp(w)?) };
        track(&mut shift, lat.wp(z).map(|p| d + p), g(y));
        track(&mut per, lat.zeta2(z + 2.0 * I * delta), lat.zeta2(z));
        track(
            &mut a17,
            Ok(cauchy_derivative(
                |w| z2(w) * z2(w),
                z,
                0.5 * dz,
                CAUCHY_POINTS,
            )),
            lat.wp_prime(z).and_then(|p| Ok(p + lat.f2(z)?)),
        );

        let (a, b, x, dx) = loop {
            let (a, _) = sample_point(rng, re, im, 0.0, dist);
            let (b, _) = sample_point(rng, re, im, 0.0, dist);
            if dist(a - b) < min {
                continue;
            }
            let ok = |x: Complex64| dist(x - a).min(dist(x - b));
            let (x, dx) = sample_point(rng, re, im, min, ok);
            break (a, b, x, dx);
        };
        let lhs = cauchy_derivative(|w| z2(w - a) * z2(w - b), x, 0.5 * dx, CAUCHY_POINTS);
        let diff = cauchy_derivative(|w| z2(w - a) - z2(w - b), x, 0.5 * dx, CAUCHY_POINTS);
        let rhs = || -> Result<Complex64> {
            Ok(diff * lat.zeta2(a - b)? + 0.5 * (lat.f2(x - a)? + lat.f2(x - b)?))
        };
        track(&mut a18, Ok(lhs), rhs());

        // Functional equation at x + y + z = 0.
        let (u, v, w) = loop {
            let (u, _) = sample_point(rng, re, im, min, dist);
            let (v, _) = sample_point(rng, re, im, min, dist);
            let w = -u - v;
            if dist(w) >= min {
                break (u, v, w);
            }
        };
        let wp_sum = || -> Result<Complex64> { Ok(lat.wp(u)? + lat.wp(v)? + lat.wp(w)?) };
        let sq = |f: &dyn Fn(Complex64) -> Result<Complex64>| -> Result<Complex64> {
            let s = f(u)? + f(v)? + f(w)?;
            Ok(s * s)
        };
        track(&mut fe, sq(&|p| lat.zeta(p)), wp_sum());
        track(&mut fe1, sq(&|p| lat.zeta1(p)), wp_sum());
        track(&mut fe2, sq(&|p| lat.zeta2(p)), wp_sum());
    }
    report.below("zeta2' matches its derivative", "identity", deriv);
    report.below("zeta2' + wp constant", "identity", shift);
    report.below("zeta2 2i delta periodic", "identity", per);
    report.below("(zeta2^2)' = wp' + f2", "identity", a17);
    report.below("elliptic product identity", "identity", a18);
    report.below("functional equation (zeta)", "identity", fe);
    report.below("functional equation (zeta1)", "identity", fe1);
    report.below("functional equation (zeta2)", "identity", fe2);
    Ok(())
}

/// Fourier-transform quadratures against closed forms, and randomized
/// checks of the kernel identities behind the pole ansatz.
pub fn identity_suite(params: &IdentityParams, tol: &Tolerances) -> ExperimentReport {
    let mut report = ExperimentReport::new("identity_suite", params, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    report.metric("samples_per_identity", params.samples as f64);
    let steps: [&dyn Fn(&mut ChaCha8Rng, &mut ExperimentReport) -> Result<()>; 3] = [
        &|_, r| quadrature_checks(params, r),
        &|g, r| hyperbolic_checks(params, g, r),
        &|g, r| elliptic_checks(params, g, r),
    ];
    for (i, step) in steps.iter().enumerate() {
        if let Err(e) = step(&mut rng, &mut report) {
            report.below(
                format!("identity group {i} ran ({e})"),
                "identity",
                f64::INFINITY,
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_transform_matches_closed_form() {
        let q = Composite::new(20).unwrap();
        for s in [1.0, -1.0] {
            let got = coth_transform_quadrature(&q, 1.0, 0.6, 0.9, s);
            let want = coth_transform_closed(1.0, 0.6, 0.9, s);
            assert!((got - want).norm() < 1e-10, "{got} {want}");
        }
    }

    #[test]
    fn lattice_distance() {
        let d = lattice_dist(Complex64::new(9.5, 1.9), 10.0, 1.0);
        assert!((d - Complex64::new(0.5, 0.1).norm()).abs() < 1e-14);
        assert!(
            (hyperbolic_dist(Complex64::new(0.3, -3.9), 1.0) - 0.3f64.hypot(0.1)).abs() < 1e-14
        );
    }

    #[test]
    fn suite_passes_with_few_samples() {
        let p = IdentityParams {
            samples: 12,
            ..Default::default()
        };
        let r = identity_suite(&p, &Tolerances::default());
        assert!(r.passed(), "{r}");
        assert_eq!(r, identity_suite(&p, &Tolerances::default()));
    }
}
