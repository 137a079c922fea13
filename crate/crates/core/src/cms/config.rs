use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Family, Result};
use crate::special::{PoleKernel, PoleKind};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Strip-condition margin in units of `delta`.
pub const DEFAULT_STRIP_EPS: f64 = 1e-6;

/// Same-family poles closer than this are a collision.
pub const DEFAULT_SINGULAR_DISTANCE: f64 = 1e-10;

/// Pole positions and velocities of both families at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleConfiguration {
    pub kind: PoleKind,
    #[serde(default)]
    pub time: f64,
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub zdot: Vec<Complex64>,
    pub wdot: Vec<Complex64>,
}

/// Distance of `Im p` from the singular lines `Im p = delta/2 + delta Z`.
fn line_distance(p: Complex64, delta: f64) -> f64 {
    let s = (p.im - 0.5 * delta) / delta;
    (s - s.round()).abs() * delta
}

/// Smallest distance of any pole from the lines where the shifted kernels
/// are singular, with the offending pole.
pub fn strip_margin(z: &[Complex64], w: &[Complex64], delta: f64) -> (f64, Family, usize) {
    let mut best = (f64::INFINITY, Family::Z, 0);
    for (fam, list) in [(Family::Z, z), (Family::W, w)] {
        for (i, &p) in list.iter().enumerate() {
            let d = line_distance(p, delta);
            if d < best.0 {
                best = (d, fam, i);
            }
        }
    }
    best
}

/// Smallest same-family pairwise distance, with the first pole of the pair.
pub(crate) fn min_pair_distance(z: &[Complex64], w: &[Complex64]) -> (f64, Family, usize) {
    let mut best = (f64::INFINITY, Family::Z, 0);
    for (fam, list) in [(Family::Z, z), (Family::W, w)] {
        for j in 0..list.len() {
            for k in j + 1..list.len() {
                let d = (list[j] - list[k]).norm();
                if d < best.0 {
                    best = (d, fam, j);
                }
            }
        }
    }
    best
}

fn singular(time: f64, family: Family, index: usize, e: Error) -> Error {
    match e {
        Error::PoleProximity { arg, eps } => Error::SingularConfiguration {
            time,
            family,
            index,
            detail: format!("kernel argument {arg} within {eps:e} of a pole"),
        },
        other => other,
    }
}

pub(crate) fn check_counts<K: PoleKernel + ?Sized>(kernel: &K, n: usize, m: usize) -> Result<()> {
    if kernel.kind() == PoleKind::Elliptic && n != m {
        return Err(Error::PoleCountMismatch { n, m });
    }
    Ok(())
}

pub(crate) fn backlund_at<K: PoleKernel + ?Sized>(
    z: &[Complex64],
    w: &[Complex64],
    kernel: &K,
    time: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let shift = I * kernel.delta();
    let one =
        |own: &[Complex64], other: &[Complex64], j: usize, fam: Family| -> Result<Complex64> {
            let p = own[j];
            let mut s_own = Complex64::default();
            for (k, &q) in own.iter().enumerate() {
                if k != j {
                    s_own += kernel.alpha(p - q).map_err(|e| singular(time, fam, j, e))?;
                }
            }
            let mut s_other = Complex64::default();
            for &q in other {
                s_other += kernel
                    .alpha(p - q + shift)
                    .map_err(|e| singular(time, fam, j, e))?;
            }
            Ok(2.0 * I * (s_own - s_other))
        };
    let zdot = (0..z.len())
        .map(|j| one(z, w, j, Family::Z))
        .collect::<Result<Vec<_>>>()?;
    let wdot = (0..w.len())
        .map(|j| one(w, z, j, Family::W).map(|x| -x))
        .collect::<Result<Vec<_>>>()?;
    Ok((zdot, wdot))
}

pub(crate) fn newton_at<K: PoleKernel + ?Sized>(
    z: &[Complex64],
    w: &[Complex64],
    kernel: &K,
    time: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let family = |list: &[Complex64], fam: Family| -> Result<Vec<Complex64>> {
        (0..list.len())
            .map(|j| {
                let mut s = Complex64::default();
                for (k, &q) in list.iter().enumerate() {
                    if k != j {
                        s += kernel
                            .potential_prime(list[j] - q)
                            .map_err(|e| singular(time, fam, j, e))?;
                    }
                }
                Ok(-4.0 * s)
            })
            .collect()
    };
    Ok((family(z, Family::Z)?, family(w, Family::W)?))
}

/// Velocities `(z', w')` from the Backlund system.
pub fn backlund_velocities<K: PoleKernel + ?Sized>(
    poles: &PoleConfiguration,
    kernel: &K,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_counts(kernel, poles.z.len(), poles.w.len())?;
    backlund_at(&poles.z, &poles.w, kernel, poles.time)
}

/// Accelerations `(z'', w'')` from the Newton equations.
pub fn newton_acceleration<K: PoleKernel + ?Sized>(
    poles: &PoleConfiguration,
    kernel: &K,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_counts(kernel, poles.z.len(), poles.w.len())?;
    newton_at(&poles.z, &poles.w, kernel, poles.time)
}

impl PoleConfiguration {
    /// Configuration with Backlund velocities.
    pub fn with_backlund<K: PoleKernel + ?Sized>(
        z: Vec<Complex64>,
        w: Vec<Complex64>,
        kernel: &K,
        time: f64,
    ) -> Result<Self> {
        check_counts(kernel, z.len(), w.len())?;
        let (zdot, wdot) = backlund_at(&z, &w, kernel, time)?;
        Ok(PoleConfiguration {
            kind: kernel.kind(),
            time,
            z,
            w,
            zdot,
            wdot,
        })
    }

    pub fn empty(kind: PoleKind) -> Self {
        PoleConfiguration {
            kind,
            time: 0.0,
            z: Vec::new(),
            w: Vec::new(),
            zdot: Vec::new(),
            wdot: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn m(&self) -> usize {
        self.w.len()
    }

    pub fn strip_margin(&self, delta: f64) -> (f64, Family, usize) {
        strip_margin(&self.z, &self.w, delta)
    }

    /// Fails if any pole is within `eps * delta` of a singular line.
    pub fn check_strip(&self, delta: f64, eps: f64) -> Result<()> {
        let (margin, family, index) = self.strip_margin(delta);
        if margin <= eps * delta {
            return Err(Error::StripViolation {
                time: self.time,
                family,
                index,
                margin,
            });
        }
        Ok(())
    }

    pub fn min_pair_distance(&self) -> f64 {
        min_pair_distance(&self.z, &self.w).0
    }

    /// `max_j |w_j - conj(z_j)|`; zero for real-solution data.
    pub fn conjugation_defect(&self) -> f64 {
        if self.z.len() != self.w.len() {
            return f64::INFINITY;
        }
        self.z
            .iter()
            .zip(&self.w)
            .fold(0.0, |m, (z, w)| m.max((w - z.conj()).norm()))
    }

    /// `max |velocity - Backlund velocity|` over both families.
    pub fn backlund_defect<K: PoleKernel + ?Sized>(&self, kernel: &K) -> Result<f64> {
        let (zd, wd) = backlund_velocities(self, kernel)?;
        Ok(zd
            .iter()
            .zip(&self.zdot)
            .chain(wd.iter().zip(&self.wdot))
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }
}

/// Real-solution data `z = a`, `w = conj(a)` with Backlund velocities.
///
/// Requires `delta/2 < Im a_j < 3 delta/2`, distinct `a_j`, and for a
/// periodic kernel `-L/2 <= Re a_j < L/2`.
pub fn build_real_initial<K: PoleKernel + ?Sized>(
    a: &[Complex64],
    kernel: &K,
) -> Result<PoleConfiguration> {
    let delta = kernel.delta();
    for (index, &value) in a.iter().enumerate() {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::WindowViolation {
                index,
                value,
                reason: "non-finite".into(),
            });
        }
        if !(value.im > 0.5 * delta && value.im < 1.5 * delta) {
            return Err(Error::WindowViolation {
                index,
                value,
                reason: format!("need {} < Im a < {}", 0.5 * delta, 1.5 * delta),
            });
        }
        if let Some(l) = kernel.period() {
            if !(value.re >= -0.5 * l && value.re < 0.5 * l) {
                return Err(Error::WindowViolation {
                    index,
                    value,
                    reason: format!("need {} <= Re a < {}", -0.5 * l, 0.5 * l),
                });
            }
        }
        for (k, &b) in a[..index].iter().enumerate() {
            if (value - b).norm() <= DEFAULT_SINGULAR_DISTANCE {
                return Err(Error::WindowViolation {
                    index,
                    value,
                    reason: format!("coincides with a[{k}]"),
                });
            }
        }
    }
    let w = a.iter().map(|z| z.conj()).collect();
    PoleConfiguration::with_backlund(a.to_vec(), w, kernel, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{GeometryHyperbolic, Kernel};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn stationary_on_midline() {
        for delta in [0.5, PI, 7.0] {
            let g = GeometryHyperbolic::new(delta).unwrap();
            for x0 in [-3.0, 0.0, 11.5] {
                let p = build_real_initial(&[c(x0, delta)], &g).unwrap();
                assert!(p.zdot[0].norm() < 1e-14, "{}", p.zdot[0]);
            }
        }
    }

    #[test]
    fn one_soliton_velocity() {
        let g = GeometryHyperbolic::new(PI).unwrap();
        let p = build_real_initial(&[c(0.0, 1.2 * PI)], &g).unwrap();
        // -2i alpha(2i b + i delta) = -(pi/delta) cot(pi (2b + delta) / 2delta)
        let want = -1.0 / (PI * (2.4 * PI + PI) / (2.0 * PI)).tan();
        assert!((want - 0.726542528005361).abs() < 1e-12);
        assert!((p.zdot[0] - c(want, 0.0)).norm() < 1e-12, "{}", p.zdot[0]);
        assert!((p.wdot[0] - p.zdot[0].conj()).norm() < 1e-15);
    }

    #[test]
    fn window_enforced() {
        let g = GeometryHyperbolic::new(1.0).unwrap();
        for a in [c(0.0, 0.5), c(0.0, 1.5), c(0.0, 0.2), c(f64::NAN, 1.0)] {
            assert!(matches!(
                build_real_initial(&[a], &g),
                Err(Error::WindowViolation { index: 0, .. })
            ));
        }
        let e = build_real_initial(&[c(0.0, 1.0), c(0.0, 1.0)], &g);
        assert!(matches!(e, Err(Error::WindowViolation { index: 1, .. })));
        let k = Kernel::elliptic(10.0, 1.0).unwrap();
        assert!(build_real_initial(&[c(5.0, 1.0)], &k).is_err());
        assert!(build_real_initial(&[c(-5.0, 1.0)], &k).is_ok());
    }

    #[test]
    fn empty_is_empty() {
        let g = GeometryHyperbolic::new(1.0).unwrap();
        let p = build_real_initial(&[], &g).unwrap();
        assert_eq!(p.n(), 0);
        assert!(p.zdot.is_empty() && p.wdot.is_empty());
    }

    #[test]
    fn newton_free_flight_and_third_law() {
        let g = GeometryHyperbolic::new(PI).unwrap();
        let p = build_real_initial(&[c(1.0, 3.5)], &g).unwrap();
        let (zz, ww) = newton_acceleration(&p, &g).unwrap();
        assert_eq!(zz[0], c(0.0, 0.0));
        assert_eq!(ww[0], c(0.0, 0.0));
        let p = build_real_initial(&[c(-4.0, 1.2 * PI), c(3.0, 0.85 * PI)], &g).unwrap();
        let (zz, ww) = newton_acceleration(&p, &g).unwrap();
        assert!((zz[0] + zz[1]).norm() < 1e-15 * zz[0].norm().max(1.0));
        assert!((ww[0] + ww[1]).norm() < 1e-15 * ww[0].norm().max(1.0));
    }

    #[test]
    fn newton_vanishes_at_half_period_separation() {
        let delta = 1.3;
        let g = GeometryHyperbolic::new(delta).unwrap();
        let p = PoleConfiguration {
            kind: PoleKind::Hyperbolic,
            time: 0.0,
            z: vec![c(0.2, 1.1 * delta), c(0.2, 0.1 * delta)],
            w: vec![],
            zdot: vec![],
            wdot: vec![],
        };
        let (zz, _) = newton_acceleration(&p, &g).unwrap();
        assert!(zz[0].norm() < 1e-12, "{}", zz[0]);
        // Finite-difference oracle for V'(i delta).
        let h = 1e-5;
        let iv = c(0.0, delta);
        let fd = (g.v(iv + h).unwrap() - g.v(iv - h).unwrap()) / (2.0 * h);
        assert!(fd.norm() < 1e-8);
    }

    #[test]
    fn elliptic_requires_equal_counts() {
        let k = Kernel::elliptic(10.0, 1.0).unwrap();
        let r = PoleConfiguration::with_backlund(vec![c(0.0, 1.0)], vec![], &k, 0.0);
        assert!(matches!(r, Err(Error::PoleCountMismatch { n: 1, m: 0 })));
    }

    #[test]
    fn strip_violation_is_reported() {
        let g = GeometryHyperbolic::new(2.0).unwrap();
        let mut p = build_real_initial(&[c(0.0, 2.0), c(5.0, 1.5)], &g).unwrap();
        p.check_strip(2.0, DEFAULT_STRIP_EPS).unwrap();
        p.z[1] = c(5.0, 1.0);
        p.time = 0.75;
        assert!(matches!(
            p.check_strip(2.0, DEFAULT_STRIP_EPS),
            Err(Error::StripViolation { family: Family::Z, index: 1, time, .. }) if time == 0.75
        ));
    }

    #[test]
    fn singular_kernel_argument_names_pole() {
        let g = GeometryHyperbolic::new(1.0).unwrap();
        let r = PoleConfiguration::with_backlund(vec![c(0.0, 1.0), c(0.0, 1.0)], vec![], &g, 2.0);
        assert!(matches!(
            r,
            Err(Error::SingularConfiguration {
                family: Family::Z,
                index: 0,
                ..
            })
        ));
    }
}
