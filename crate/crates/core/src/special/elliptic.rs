//! Weierstrass functions for the rectangular lattice with periods `L` and
//! `2 i delta`.
//!
//! Two theta-type expansions are available: a Fourier series along the real
//! period in the nome `q = exp(-2 pi delta / L)`, and the series in the dual
//! nome `q' = exp(-pi L / (2 delta))` obtained by exchanging the roles of the
//! periods. Their logarithms multiply to `pi^2`, so one of them always has a
//! nome below `exp(-pi)`; that one is used for evaluation. Each quasi-period
//! `eta_j` is summed from its own series, so the Legendre relation is a real
//! consistency check rather than an identity built into the code.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hyperbolic::{cot, csc2, GeometryHyperbolic, DEFAULT_POLE_EPS};
use crate::error::{invalid, Error, Result};

const SERIES_TOL: f64 = 1e-17;

/// Which nome the evaluation series is expanded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expansion {
    /// Fourier series along the real period, nome `exp(-2 pi delta / L)`.
    Real,
    /// Series around the hyperbolic kernel, nome `exp(-pi L / (2 delta))`.
    Imaginary,
}

#[derive(Debug, Clone)]
pub struct LatticeElliptic {
    period: f64,
    delta: f64,
    pole_eps: f64,
    nome: f64,
    dual_nome: f64,
    eta1: f64,
    // eta2 is purely imaginary; this is its imaginary part.
    eta2_im: f64,
    expansion: Expansion,
    // x^{2n} / (1 - x^{2n}) for the evaluation nome x, n = 1, 2, ...
    coeffs: Vec<f64>,
    strip: GeometryHyperbolic,
}

/// `sum_{n>=1} n x^{2n} / (1 - x^{2n})`, summed until terms drop below
/// `SERIES_TOL` relative to the partial sum.
fn lambert_sum(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut terms = Vec::new();
    let mut p = 1.0;
    let mut partial = 0.0;
    for n in 1..50_000_000usize {
        p *= x2;
        let t = n as f64 * p / (1.0 - p);
        terms.push(t);
        partial += t;
        if t < SERIES_TOL * partial.max(1e-300) && p < 0.5 {
            break;
        }
    }
    // Smallest terms first.
    terms.iter().rev().sum()
}

fn series_coeffs(x: f64) -> Vec<f64> {
    // After reduction into the fundamental cell the n-th term grows at most
    // like x^{-n}, so n^2 x^n bounds its contribution to every function here.
    let x2 = x * x;
    let mut out = Vec::new();
    let mut p = 1.0;
    for n in 1..10_000usize {
        p *= x2;
        let c = p / (1.0 - p);
        let nf = n as f64;
        if nf * nf * x.powi(n as i32) / (1.0 - x2) < SERIES_TOL {
            break;
        }
        out.push(c);
    }
    out
}

impl LatticeElliptic {
    /// Lattice with periods `period` (real) and `2 i delta`, evaluated with
    /// whichever expansion has the smaller nome.
    pub fn new(period: f64, delta: f64) -> Result<Self> {
        let expansion = if period > 2.0 * delta {
            Expansion::Imaginary
        } else {
            Expansion::Real
        };
        Self::with_expansion(period, delta, expansion)
    }

    pub fn with_expansion(period: f64, delta: f64, expansion: Expansion) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(invalid("L", format!("must be positive, got {period}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        let nome = (-2.0 * PI * delta / period).exp();
        let dual_nome = (-PI * period / (2.0 * delta)).exp();
        if !(nome > 0.0 && nome < 1.0) && !(dual_nome > 0.0 && dual_nome < 1.0) {
            return Err(invalid("L/delta", "lattice aspect ratio out of range"));
        }
        let eta1 = PI * PI / (6.0 * period) * (1.0 - 24.0 * lambert_sum(nome));
        let eta2_im = -PI * PI / (12.0 * delta) * (1.0 - 24.0 * lambert_sum(dual_nome));
        let coeffs = match expansion {
            Expansion::Real => series_coeffs(nome),
            Expansion::Imaginary => series_coeffs(dual_nome),
        };
        Ok(Self {
            period,
            delta,
            pole_eps: DEFAULT_POLE_EPS,
            nome,
            dual_nome,
            eta1,
            eta2_im,
            expansion,
            coeffs,
            strip: GeometryHyperbolic::new(delta)?,
        })
    }

    pub fn with_pole_eps(mut self, eps: f64) -> Self {
        self.pole_eps = eps;
        self.strip = self.strip.with_pole_eps(eps);
        self
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Half-periods `(omega1, omega2) = (L/2, i delta)`.
    pub fn half_periods(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(0.5 * self.period, 0.0),
            Complex64::new(0.0, self.delta),
        )
    }

    /// `q = exp(-2 pi delta / L)`.
    pub fn nome(&self) -> f64 {
        self.nome
    }

    pub fn dual_nome(&self) -> f64 {
        self.dual_nome
    }

    pub fn expansion(&self) -> Expansion {
        self.expansion
    }

    pub fn series_len(&self) -> usize {
        self.coeffs.len()
    }

    /// `eta1 = zeta(omega1)`.
    pub fn eta1(&self) -> Complex64 {
        Complex64::new(self.eta1, 0.0)
    }

    /// `eta2 = zeta(omega2)`.
    pub fn eta2(&self) -> Complex64 {
        Complex64::new(0.0, self.eta2_im)
    }

    /// Jump of `zeta2` across one real period: `zeta2(z + L) - zeta2(z)`.
    pub fn zeta2_jump(&self) -> f64 {
        PI / self.delta
    }

    /// Splits `z = z0 + k L + 2 i delta m` with `z0` in the fundamental cell.
    fn reduce(&self, z: Complex64) -> Result<(Complex64, f64, f64)> {
        let k = (z.re / self.period).round();
        let m = (z.im / (2.0 * self.delta)).round();
        let z0 = Complex64::new(z.re - k * self.period, z.im - 2.0 * self.delta * m);
        let eps = self.pole_eps * self.period.min(2.0 * self.delta);
        if z0.norm() < eps {
            return Err(Error::PoleProximity { arg: z, eps });
        }
        Ok((z0, k, m))
    }

    // Sums over the evaluation series at a reduced argument.
    // Real expansion:      (sum c sin, sum n c cos, sum n^2 c sin) at 2 pi n z / L
    // Imaginary expansion: (sum c sinh, sum n c cosh, sum n^2 c sinh) at n pi z / delta
    fn series(&self, z0: Complex64) -> (Complex64, Complex64, Complex64) {
        let arg = match self.expansion {
            Expansion::Real => 2.0 * PI * z0 / self.period,
            Expansion::Imaginary => PI * z0 / self.delta,
        };
        let mut s0 = Complex64::new(0.0, 0.0);
        let mut s1 = s0;
        let mut s2 = s0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            let a = n * arg;
            let (odd, even) = match self.expansion {
                Expansion::Real => (a.sin(), a.cos()),
                Expansion::Imaginary => (a.sinh(), a.cosh()),
            };
            s0 += c * odd;
            s1 += n * c * even;
            s2 += n * n * c * odd;
        }
        (s0, s1, s2)
    }

    fn zeta2_reduced(&self, z0: Complex64) -> Result<Complex64> {
        let (s0, _, _) = self.series(z0);
        Ok(match self.expansion {
            Expansion::Real => {
                let l = self.period;
                PI / l * cot(PI * z0 / l) + 4.0 * PI / l * s0 + PI * z0 / (self.delta * l)
            }
            Expansion::Imaginary => self.strip.alpha(z0)? - 2.0 * PI / self.delta * s0,
        })
    }

    /// The `2 i delta`-periodic zeta function `zeta(z) - eta2 z / omega2`.
    pub fn zeta2(&self, z: Complex64) -> Result<Complex64> {
        let (z0, k, _) = self.reduce(z)?;
        Ok(self.zeta2_reduced(z0)? + k * self.zeta2_jump())
    }

    /// The `L`-periodic zeta function `zeta(z) - eta1 z / omega1`.
    pub fn zeta1(&self, z: Complex64) -> Result<Complex64> {
        let (z0, _, m) = self.reduce(z)?;
        let z1 = self.zeta2_reduced(z0)? - PI * z0 / (self.delta * self.period);
        Ok(z1 - Complex64::new(0.0, 2.0 * PI * m / self.period))
    }

    /// Weierstrass zeta.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        match self.expansion {
            Expansion::Real => Ok(self.zeta1(z)? + 2.0 * self.eta1 * z / self.period),
            // eta2 / omega2 = Im(eta2) / delta
            Expansion::Imaginary => Ok(self.zeta2(z)? + self.eta2_im / self.delta * z),
        }
    }

    /// Weierstrass `wp`.
    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        let (z0, _, _) = self.reduce(z)?;
        let (_, s1, _) = self.series(z0);
        Ok(match self.expansion {
            Expansion::Real => {
                let l = self.period;
                let r = PI / l;
                -2.0 * self.eta1 / l + r * r * csc2(r * z0) - 8.0 * r * r * s1
            }
            Expansion::Imaginary => {
                let d = self.delta;
                Complex64::new(-self.eta2_im / d, 0.0)
                    + self.strip.v(z0)?
                    + 2.0 * PI * PI / (d * d) * s1
            }
        })
    }

    /// Derivative of `wp`.
    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        let (z0, _, _) = self.reduce(z)?;
        let (_, _, s2) = self.series(z0);
        Ok(match self.expansion {
            Expansion::Real => {
                let r = PI / self.period;
                let w = r * z0;
                -2.0 * r * r * r * cot(w) * csc2(w) + 16.0 * r * r * r * s2
            }
            Expansion::Imaginary => {
                let d = self.delta;
                self.strip.v_prime(z0)? + 2.0 * PI * PI * PI / (d * d * d) * s2
            }
        })
    }

    /// Derivative of `zeta2`, i.e. `-wp(z) - eta2 / omega2`.
    pub fn zeta2_prime(&self, z: Complex64) -> Result<Complex64> {
        let (z0, _, _) = self.reduce(z)?;
        let (_, s1, _) = self.series(z0);
        Ok(match self.expansion {
            Expansion::Real => {
                let l = self.period;
                let r = PI / l;
                -r * r * csc2(r * z0) + 8.0 * r * r * s1 + PI / (self.delta * l)
            }
            Expansion::Imaginary => {
                let d = self.delta;
                -self.strip.v(z0)? - 2.0 * PI * PI / (d * d) * s1
            }
        })
    }

    /// `d/dz [zeta2(z)^2 - wp(z)]`; vanishes in the hyperbolic limit.
    pub fn f2(&self, z: Complex64) -> Result<Complex64> {
        Ok(2.0 * self.zeta2(z)? * self.zeta2_prime(z)? - self.wp_prime(z)?)
    }

    /// `zeta1` from the symmetric cotangent sum truncated at `|n| <= terms`.
    ///
    /// Independent of the theta-type series; intended as a cross-check.
    pub fn zeta1_cot_sum(&self, z: Complex64, terms: usize) -> Complex64 {
        let l = self.period;
        let mut acc = Complex64::new(0.0, 0.0);
        let m = terms as i64;
        for n in -m..=m {
            let shifted = z - Complex64::new(0.0, 2.0 * n as f64 * self.delta);
            acc += cot(PI * shifted / l);
        }
        PI / l * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    const POINTS: [(f64, f64); 5] = [
        (0.31, 0.17),
        (-0.7, 0.45),
        (1.3, -0.9),
        (0.05, 1.6),
        (-2.2, -0.3),
    ];

    #[test]
    fn both_expansions_agree() {
        for &(l, d) in &[(2.0, 1.0), (3.0, 1.2), (1.5, 1.0)] {
            let a = LatticeElliptic::with_expansion(l, d, Expansion::Real).unwrap();
            let b = LatticeElliptic::with_expansion(l, d, Expansion::Imaginary).unwrap();
            for &(x, y) in &POINTS {
                let z = c(x, y);
                assert!(
                    close(a.zeta(z).unwrap(), b.zeta(z).unwrap(), 1e-12),
                    "zeta at {z}"
                );
                assert!(
                    close(a.wp(z).unwrap(), b.wp(z).unwrap(), 1e-12),
                    "wp at {z}"
                );
                assert!(close(a.wp_prime(z).unwrap(), b.wp_prime(z).unwrap(), 1e-11));
                assert!(close(a.zeta2(z).unwrap(), b.zeta2(z).unwrap(), 1e-12));
                assert!(close(
                    a.zeta2_prime(z).unwrap(),
                    b.zeta2_prime(z).unwrap(),
                    1e-12
                ));
            }
        }
    }

    #[test]
    fn zeta1_matches_cotangent_sum() {
        for &(l, d) in &[(2.0, 1.0), (5.0, 1.0), (1.0, 3.0), (8.0, 1.5)] {
            let lat = LatticeElliptic::new(l, d).unwrap();
            for &(x, y) in &POINTS {
                let z = c(x, y);
                let oracle = lat.zeta1_cot_sum(z, 64);
                assert!(
                    close(lat.zeta1(z).unwrap(), oracle, 1e-12),
                    "L={l} d={d} z={z}"
                );
            }
        }
    }

    #[test]
    fn wp_is_minus_zeta_derivative() {
        let lat = LatticeElliptic::new(4.0, 1.0).unwrap();
        let h = 1e-5;
        for &(x, y) in &POINTS {
            let z = c(x, y);
            let fd = (lat.zeta(z + h).unwrap() - lat.zeta(z - h).unwrap()) / (2.0 * h);
            assert!(close(-fd, lat.wp(z).unwrap(), 1e-8));
            let fdw = (lat.wp(z + h).unwrap() - lat.wp(z - h).unwrap()) / (2.0 * h);
            assert!(close(fdw, lat.wp_prime(z).unwrap(), 1e-8));
        }
    }

    #[test]
    fn periodicity_and_parity() {
        let lat = LatticeElliptic::new(6.0, 1.3).unwrap();
        let l = c(6.0, 0.0);
        let ip = c(0.0, 2.6);
        for &(x, y) in &POINTS {
            let z = c(x, y);
            let z1 = lat.zeta1(z).unwrap();
            let z2 = lat.zeta2(z).unwrap();
            assert!(close(lat.zeta1(z + l).unwrap(), z1, 1e-13));
            assert!(close(lat.zeta2(z + ip).unwrap(), z2, 1e-13));
            assert!(close(
                lat.zeta2(z + l).unwrap() - z2,
                c(PI / 1.3, 0.0),
                1e-13
            ));
            assert!(close(lat.zeta1(-z).unwrap(), -z1, 1e-13));
            assert!(close(lat.wp(-z).unwrap(), lat.wp(z).unwrap(), 1e-13));
            // zeta2^2 - wp is even, so its derivative f2 is odd.
            assert!(close(lat.f2(-z).unwrap(), -lat.f2(z).unwrap(), 1e-12));
        }
    }

    #[test]
    fn quasi_period_jump_from_etas() {
        // 2 zeta(omega1) - 2 eta2 omega1 / omega2 = pi / delta
        for &(l, d) in &[(3.0, 1.0), (20.0, 1.0), (1.0, 2.0)] {
            let lat = LatticeElliptic::new(l, d).unwrap();
            let (w1, w2) = lat.half_periods();
            let jump = 2.0 * lat.zeta(w1).unwrap() - 2.0 * lat.eta2() * w1 / w2;
            assert!(close(jump, c(PI / d, 0.0), 1e-11), "{jump}");
        }
    }

    #[test]
    fn legendre_relation() {
        for &(l, d) in &[(0.5, 50.0), (50.0, 0.5), (3.0, 3.0), (13.0, 0.9)] {
            let lat = LatticeElliptic::new(l, d).unwrap();
            let (w1, w2) = lat.half_periods();
            let lhs = lat.eta1() * w2 - lat.eta2() * w1;
            assert!(
                (lhs - c(0.0, PI / 2.0)).norm() < 1e-10,
                "L={l} d={d}: {lhs}"
            );
        }
    }

    #[test]
    fn lattice_poles_rejected() {
        let lat = LatticeElliptic::new(4.0, 1.0).unwrap();
        assert!(lat.wp(c(4.0, 2.0)).is_err());
        assert!(lat.zeta2(c(0.0, 0.0)).is_err());
        assert!(lat.zeta2(c(2.0, 1.0)).is_ok());
    }

    #[test]
    fn hyperbolic_limit() {
        let d = 1.0;
        let lat = LatticeElliptic::new(100.0 * d, d).unwrap();
        let g = GeometryHyperbolic::new(d).unwrap();
        let z = c(1.0, 0.2);
        assert!(lat.f2(z).unwrap().norm() < 1e-6);
        assert!((lat.zeta2(z).unwrap() - g.alpha(z).unwrap()).norm() < 1e-6);
    }
}
