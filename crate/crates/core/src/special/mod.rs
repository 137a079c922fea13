//! Scalar kernels: the hyperbolic strip functions, Weierstrass functions of
//! the rectangular lattice, and the BO-family dispersion relations.

mod dispersion;
mod elliptic;
mod hyperbolic;

pub use dispersion::{dispersion, DispersionKind};
pub use elliptic::{Expansion, LatticeElliptic};
pub use hyperbolic::{cot, coth, csc2, csch2, GeometryHyperbolic, DEFAULT_POLE_EPS};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleKind {
    Hyperbolic,
    Elliptic,
}

/// The kernel `alpha` of the pole ansatz together with the CMS potential it
/// generates. Hyperbolic: `alpha = (pi/2delta) coth`, `V = -alpha'`.
/// Elliptic: `alpha = zeta2`, `V = wp`.
pub trait PoleKernel: Sync + Send {
    fn kind(&self) -> PoleKind;
    fn delta(&self) -> f64;
    /// Real period, if the kernel is periodic along the real axis.
    fn period(&self) -> Option<f64>;
    fn alpha(&self, z: Complex64) -> Result<Complex64>;
    fn alpha_prime(&self, z: Complex64) -> Result<Complex64>;
    fn potential(&self, z: Complex64) -> Result<Complex64>;
    fn potential_prime(&self, z: Complex64) -> Result<Complex64>;
}

impl PoleKernel for GeometryHyperbolic {
    fn kind(&self) -> PoleKind {
        PoleKind::Hyperbolic
    }
    fn delta(&self) -> f64 {
        GeometryHyperbolic::delta(self)
    }
    fn period(&self) -> Option<f64> {
        None
    }
    fn alpha(&self, z: Complex64) -> Result<Complex64> {
        GeometryHyperbolic::alpha(self, z)
    }
    fn alpha_prime(&self, z: Complex64) -> Result<Complex64> {
        Ok(-self.v(z)?)
    }
    fn potential(&self, z: Complex64) -> Result<Complex64> {
        self.v(z)
    }
    fn potential_prime(&self, z: Complex64) -> Result<Complex64> {
        self.v_prime(z)
    }
}

impl PoleKernel for LatticeElliptic {
    fn kind(&self) -> PoleKind {
        PoleKind::Elliptic
    }
    fn delta(&self) -> f64 {
        LatticeElliptic::delta(self)
    }
    fn period(&self) -> Option<f64> {
        Some(LatticeElliptic::period(self))
    }
    fn alpha(&self, z: Complex64) -> Result<Complex64> {
        self.zeta2(z)
    }
    fn alpha_prime(&self, z: Complex64) -> Result<Complex64> {
        self.zeta2_prime(z)
    }
    fn potential(&self, z: Complex64) -> Result<Complex64> {
        self.wp(z)
    }
    fn potential_prime(&self, z: Complex64) -> Result<Complex64> {
        self.wp_prime(z)
    }
}

/// Runtime choice between the two kernels.
#[derive(Debug, Clone)]
pub enum Kernel {
    Hyperbolic(GeometryHyperbolic),
    Elliptic(LatticeElliptic),
}

impl Kernel {
    pub fn hyperbolic(delta: f64) -> Result<Self> {
        Ok(Self::Hyperbolic(GeometryHyperbolic::new(delta)?))
    }

    pub fn elliptic(period: f64, delta: f64) -> Result<Self> {
        Ok(Self::Elliptic(LatticeElliptic::new(period, delta)?))
    }

    fn inner(&self) -> &dyn PoleKernel {
        match self {
            Kernel::Hyperbolic(g) => g,
            Kernel::Elliptic(l) => l,
        }
    }
}

impl PoleKernel for Kernel {
    fn kind(&self) -> PoleKind {
        self.inner().kind()
    }
    fn delta(&self) -> f64 {
        self.inner().delta()
    }
    fn period(&self) -> Option<f64> {
        self.inner().period()
    }
    fn alpha(&self, z: Complex64) -> Result<Complex64> {
        self.inner().alpha(z)
    }
    fn alpha_prime(&self, z: Complex64) -> Result<Complex64> {
        self.inner().alpha_prime(z)
    }
    fn potential(&self, z: Complex64) -> Result<Complex64> {
        self.inner().potential(z)
    }
    fn potential_prime(&self, z: Complex64) -> Result<Complex64> {
        self.inner().potential_prime(z)
    }
}
