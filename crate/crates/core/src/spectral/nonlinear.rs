use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{Grid, SpectralPair};
use crate::par;

/// Treatment of the quadratic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dealias {
    /// Truncated convolution over `-N <= m, n - m <= N - 1`.
    #[default]
    ConvolutionB4,
    /// Truncated convolution with inputs and output restricted to `|n| <= 2N/3`.
    TwoThirds,
}

/// Squares of band-limited fields via a zero-padded transform of length `3N`,
/// which reproduces the truncated convolution exactly.
#[derive(Clone)]
pub struct Squarer {
    grid: Grid,
    dealias: Dealias,
    padded: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Squarer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Squarer")
            .field("grid", &self.grid)
            .field("dealias", &self.dealias)
            .field("padded", &self.padded)
            .finish()
    }
}

impl Squarer {
    pub fn new(grid: Grid, dealias: Dealias) -> Self {
        let padded = 3 * grid.half_count();
        let mut planner = FftPlanner::new();
        Squarer {
            grid,
            dealias,
            padded,
            fwd: planner.plan_fft_forward(padded),
            inv: planner.plan_fft_inverse(padded),
        }
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    fn keeps(&self, n: i64) -> bool {
        match self.dealias {
            Dealias::ConvolutionB4 => true,
            Dealias::TwoThirds => 3 * n.unsigned_abs() <= 2 * self.grid.half_count() as u64,
        }
    }

    /// Coefficients of `f^2` given those of `f`.
    pub fn square(&self, c: &[Complex64]) -> Vec<Complex64> {
        let (m, p) = (self.grid.points(), self.padded);
        let mut buf = vec![Complex64::default(); p];
        for (i, &ci) in c.iter().enumerate() {
            let n = self.grid.mode(i);
            if self.keeps(n) {
                buf[n.rem_euclid(p as i64) as usize] = ci;
            }
        }
        self.inv.process(&mut buf);
        for b in buf.iter_mut() {
            *b = *b * *b;
        }
        self.fwd.process(&mut buf);
        let scale = 1.0 / p as f64;
        (0..m)
            .map(|i| {
                let n = self.grid.mode(i);
                if self.keeps(n) {
                    buf[n.rem_euclid(p as i64) as usize] * scale
                } else {
                    Complex64::default()
                }
            })
            .collect()
    }

    /// `(i k (u^2)^, -i k (v^2)^)`, the quadratic terms of the equation as
    /// they appear on its left-hand side.
    pub fn nonlinear_term(
        &self,
        uhat: &[Complex64],
        vhat: &[Complex64],
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let (mut su, mut sv) = par::join(|| self.square(uhat), || self.square(vhat));
        let nyq = self.grid.nyquist_index();
        for (i, (a, b)) in su.iter_mut().zip(sv.iter_mut()).enumerate() {
            if i == nyq {
                *a = Complex64::default();
                *b = Complex64::default();
                continue;
            }
            let ik = Complex64::new(0.0, self.grid.wavenumber(i));
            *a *= ik;
            *b *= -ik;
        }
        (su, sv)
    }
}

/// Truncated convolution `sum_m c_{n-m} c_m` by direct summation.
pub fn square_direct(c: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let half = grid.half_count() as i64;
    par::map_range(grid.points(), |i| {
        let n = grid.mode(i);
        let mut s = Complex64::default();
        for m in -half..half {
            let r = n - m;
            if (-half..half).contains(&r) {
                s += c[grid.index(r)] * c[grid.index(m)];
            }
        }
        s
    })
}

pub fn nonlinear_term(spec: &SpectralPair, dealias: Dealias) -> SpectralPair {
    let (uhat, vhat) = Squarer::new(spec.grid, dealias).nonlinear_term(&spec.uhat, &spec.vhat);
    SpectralPair {
        grid: spec.grid,
        time: spec.time,
        uhat,
        vhat,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::FieldPair;
    use crate::spectral::transform;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn product_to_sum() {
        let g = Grid::new(5.0, 32).unwrap();
        let k = 2.0 * PI / 5.0;
        let f = FieldPair::from_fn(g, 0.0, |x| ((k * x).cos(), 0.0));
        let s = transform(&f).unwrap();
        let sq = Squarer::new(g, Dealias::ConvolutionB4).square(&s.uhat);
        for n in -16..16i64 {
            let want = match n {
                0 => 0.5,
                2 | -2 => 0.25,
                _ => 0.0,
            };
            assert!((sq[g.index(n)] - want).norm() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn padded_matches_direct_on_random_coefficients() {
        let g = Grid::new(3.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c: Vec<Complex64> = (0..64)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let a = Squarer::new(g, Dealias::ConvolutionB4).square(&c);
        let b = square_direct(&c, &g);
        let err = a
            .iter()
            .zip(&b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn two_thirds_drops_high_modes() {
        let g = Grid::new(1.0, 32).unwrap();
        let mut c = vec![Complex64::default(); g.points()];
        c[g.index(6)] = Complex64::new(1.0, 0.0);
        c[g.index(-6)] = Complex64::new(1.0, 0.0);
        let b4 = Squarer::new(g, Dealias::ConvolutionB4).square(&c);
        let tt = Squarer::new(g, Dealias::TwoThirds).square(&c);
        assert!((b4[g.index(12)] - 1.0).norm() < 1e-15);
        assert!(tt[g.index(12)].norm() == 0.0);
        assert!((tt[0] - 2.0).norm() < 1e-15);
    }
}
