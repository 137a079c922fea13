use num_complex::Complex64;

use super::{SpectralPair, Symbols};
use crate::error::Result;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Exact flow of the linear part, `exp(k^2 T(k) t) = cos(k^2 t) + sin(k^2 t) T(k)`
/// with `T(k) = i [[coth, csch], [-csch, -coth]]`, stored per mode as
/// `[a, b, c, d]` for the matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone)]
pub struct Propagator {
    dt: f64,
    m: Vec<[Complex64; 4]>,
}

impl Propagator {
    pub fn new(symbols: &Symbols, dt: f64) -> Self {
        let nyq = symbols.grid.nyquist_index();
        let m = (0..symbols.k.len())
            .map(|i| {
                if i == nyq {
                    return [Complex64::default(); 4];
                }
                let k = symbols.k[i];
                let (s, c) = (k * k * dt).sin_cos();
                let (ct, cs) = (symbols.coth[i], symbols.csch[i]);
                [
                    c + I * (s * ct),
                    I * (s * cs),
                    -I * (s * cs),
                    c - I * (s * ct),
                ]
            })
            .collect();
        Propagator { dt, m }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, u: &mut [Complex64], v: &mut [Complex64]) {
        for ((m, a), b) in self.m.iter().zip(u.iter_mut()).zip(v.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = m[0] * x + m[1] * y;
            *b = m[2] * x + m[3] * y;
        }
    }

    pub fn applied(&self, u: &[Complex64], v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let (mut a, mut b) = (u.to_vec(), v.to_vec());
        self.apply(&mut a, &mut b);
        (a, b)
    }
}

/// Advances the linear part of the equation by `dt` in closed form.
pub fn linear_propagator(spec: &SpectralPair, delta: f64, dt: f64) -> Result<SpectralPair> {
    let p = Propagator::new(&Symbols::new(spec.grid, delta)?, dt);
    let (uhat, vhat) = p.applied(&spec.uhat, &spec.vhat);
    Ok(SpectralPair {
        grid: spec.grid,
        time: spec.time + dt,
        uhat,
        vhat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn random_pair(g: Grid) -> SpectralPair {
        let mut s = SpectralPair::zeros(g, 0.0);
        for i in 0..g.points() {
            let t = i as f64;
            s.uhat[i] = Complex64::new((1.3 * t).sin(), (0.7 * t).cos());
            s.vhat[i] = Complex64::new((2.1 * t).cos(), (0.4 * t).sin());
        }
        s.enforce_reality();
        s
    }

    #[test]
    fn zero_step_is_identity() {
        let s = random_pair(Grid::new(9.0, 64).unwrap());
        let p = linear_propagator(&s, 1.1, 0.0).unwrap();
        assert_eq!(p.uhat, s.uhat);
        assert_eq!(p.vhat, s.vhat);
    }

    #[test]
    fn half_steps_compose() {
        let s = random_pair(Grid::new(9.0, 64).unwrap());
        let full = linear_propagator(&s, 1.1, 0.3).unwrap();
        let half =
            linear_propagator(&linear_propagator(&s, 1.1, 0.15).unwrap(), 1.1, 0.15).unwrap();
        assert!(full.max_diff(&half) < 1e-14);
    }

    #[test]
    fn eigenmode_rotates_by_phase() {
        let g = Grid::new(9.0, 64).unwrap();
        let delta = 0.8;
        let sym = Symbols::new(g, delta).unwrap();
        let dt = 0.37;
        let p = Propagator::new(&sym, dt);
        for n in [1i64, 3, -5, 20] {
            let i = g.index(n);
            let (ct, cs) = (sym.coth[i], sym.csch[i]);
            // T(k) (x, y) = i (x, y) with x = csch, y = 1 - coth.
            let (x, y) = (Complex64::new(cs, 0.0), Complex64::new(1.0 - ct, 0.0));
            let mut u = vec![Complex64::default(); g.points()];
            let mut v = u.clone();
            u[i] = x;
            v[i] = y;
            p.apply(&mut u, &mut v);
            let k = sym.k[i];
            let ph = (I * k * k * dt).exp();
            assert!((u[i] - ph * x).norm() < 1e-14, "n = {n}");
            assert!((v[i] - ph * y).norm() < 1e-14, "n = {n}");
        }
    }
}
