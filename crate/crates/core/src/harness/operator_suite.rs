use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExperimentReport, Tolerances};
use crate::error::Result;
use crate::spectral::{Grid, Operators};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorParams {
    pub seed: u64,
    /// `(L, delta)` pairs for the involution check.
    pub geometries: Vec<(f64, f64)>,
    pub points: Vec<usize>,
    /// Random fields per geometry and resolution.
    pub trials: usize,
    /// Eigenfunction check with `g(z) = z exp(-z^2 / width^2)`.
    pub eigen_length: f64,
    pub eigen_delta: f64,
    pub eigen_points: usize,
    pub eigen_width: f64,
}

impl Default for OperatorParams {
    fn default() -> Self {
        OperatorParams {
            seed: 11,
            geometries: vec![(200.0, std::f64::consts::PI), (20.0, 1.0)],
            points: vec![256, 1024, 4096],
            trials: 4,
            eigen_length: 20.0,
            eigen_delta: 1.0,
            eigen_points: 512,
            eigen_width: 1.5,
        }
    }
}

/// Real field with uniform random samples, projected off the mean and
/// Nyquist modes.
pub fn random_zero_mean(ops: &Operators, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let grid = ops.grid();
    let f: Vec<f64> = (0..grid.points())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let mut c = ops.transform.forward_real(&f)?;
    c[0] = Complex64::default();
    c[grid.nyquist_index()] = Complex64::default();
    ops.transform.inverse_real(&c)
}

/// `max |calT^2 (u, v) + (u, v)| / max |(u, v)|`, in physical space, with
/// each application of the operator one transform pair.
pub fn involution_defect(ops: &Operators, u: &[f64], v: &[f64]) -> Result<f64> {
    let lift = |f: &[f64]| {
        f.iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect::<Vec<_>>()
    };
    let (a, b) = ops.calt_complex(&lift(u), &lift(v))?;
    let (a, b) = ops.calt_complex(&a, &b)?;
    let scale = u.iter().chain(v).fold(0.0f64, |m, x| m.max(x.abs()));
    let err = a
        .iter()
        .zip(u)
        .chain(b.iter().zip(v))
        .fold(0.0f64, |m, (x, y)| m.max((x + y).norm()));
    Ok(err / scale)
}

/// The same defect coefficient by coefficient, relative to the largest
/// coefficient.
pub fn involution_defect_spectral(ops: &Operators, u: &[f64], v: &[f64]) -> Result<f64> {
    let (uh, vh) = (
        ops.transform.forward_real(u)?,
        ops.transform.forward_real(v)?,
    );
    let (a, b) = ops.symbols.apply_calt(&uh, &vh);
    let (a, b) = ops.symbols.apply_calt(&a, &b);
    let scale = uh.iter().chain(&vh).fold(0.0f64, |m, c| m.max(c.norm()));
    let err = a
        .iter()
        .zip(&uh)
        .chain(b.iter().zip(&vh))
        .fold(0.0f64, |m, (x, y)| m.max((x + y).norm()));
    Ok(err / scale)
}

/// Defect of `calT v_pm = +-i v_pm` for `v_pm = (g(x -+ i delta/2), -g(x +- i delta/2))`,
/// relative to `max |v_pm|`.
pub fn eigen_defect(
    ops: &Operators,
    g: impl Fn(Complex64) -> Complex64,
    delta: f64,
    sign: f64,
) -> Result<f64> {
    let h = Complex64::new(0.0, 0.5 * delta);
    let xs = ops.grid().xs();
    let u: Vec<Complex64> = xs.iter().map(|&x| g(x - sign * h)).collect();
    let v: Vec<Complex64> = xs.iter().map(|&x| -g(x + sign * h)).collect();
    let (tu, tv) = ops.calt_complex(&u, &v)?;
    let lam = Complex64::new(0.0, sign);
    let scale = u.iter().chain(&v).fold(0.0f64, |m, c| m.max(c.norm()));
    let err = tu
        .iter()
        .zip(&u)
        .chain(tv.iter().zip(&v))
        .fold(0.0f64, |m, (a, b)| m.max((a - lam * b).norm()));
    Ok(err / scale)
}

/// Involution and eigenfunction properties of the matrix operator.
pub fn operator_suite(params: &OperatorParams, tol: &Tolerances) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("operator_suite", params, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for &(l, delta) in &params.geometries {
        for &n in &params.points {
            let ops = Operators::new(Grid::new(l, n)?, delta)?;
            let (mut worst, mut coeff) = (0.0f64, 0.0f64);
            for _ in 0..params.trials {
                let u = random_zero_mean(&ops, &mut rng)?;
                let v = random_zero_mean(&ops, &mut rng)?;
                worst = worst.max(involution_defect(&ops, &u, &v)?);
                coeff = coeff.max(involution_defect_spectral(&ops, &u, &v)?);
            }
            report.metric(format!("coefficient_involution_L{l}_2N{n}"), coeff);
            report.below(
                format!("T^2 = -I (L = {l}, delta = {delta:.4}, 2N = {n})"),
                "involution",
                worst,
            );
        }
    }
    let grid = Grid::new(params.eigen_length, params.eigen_points)?;
    let ops = Operators::new(grid, params.eigen_delta)?;
    let s2 = params.eigen_width * params.eigen_width;
    let g = |z: Complex64| z * (-z * z / s2).exp();
    for (sign, label) in [(1.0, "+i"), (-1.0, "-i")] {
        let e = eigen_defect(&ops, g, params.eigen_delta, sign)?;
        report.below(
            format!("eigenfunction with eigenvalue {label}"),
            "eigenfunction",
            e,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_fields_are_zero_mean() {
        let ops = Operators::new(Grid::new(10.0, 64).unwrap(), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_zero_mean(&ops, &mut rng).unwrap();
        assert!(u.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn wrong_eigenvalue_detected() {
        let ops = Operators::new(Grid::new(20.0, 256).unwrap(), 1.0).unwrap();
        let g = |z: Complex64| z * (-z * z).exp();
        assert!(eigen_defect(&ops, g, 1.0, 1.0).unwrap() < 1e-12);
        // Swapping the shifts gives the other eigenvalue, so this is O(1).
        let h = |z: Complex64| g(z);
        let swapped = eigen_defect(&ops, h, -1.0, 1.0).unwrap();
        assert!(swapped > 0.1);
    }
}
