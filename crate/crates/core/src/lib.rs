//! Numerical laboratory for the nonchiral intermediate long-wave (ncILW)
//! equation
//!
//! ```text
//! u_t + 2 u u_x + T u_xx + T~ v_xx = 0
//! v_t - 2 v v_x - T v_xx - T~ u_xx = 0
//! ```
//!
//! with the strip operators `T` (Fourier multiplier `i coth(k delta)`) and
//! `T~` (`i / sinh(k delta)`).
//!
//! * [`special`]: strip kernels, Weierstrass functions, dispersion relations.
//! * [`cms`]: Calogero-Moser-Sutherland pole dynamics in Newton and Backlund form.
//! * [`soliton`]: exact multisoliton fields, tau functions, PDE residuals.
//! * [`spectral`]: Fourier collocation solver and conserved quantities.
//! * [`harness`]: reproduction experiments and cross-oracle checks.

pub mod cms;
pub mod error;
pub mod harness;
pub mod io;
pub mod par;
pub mod quadrature;
pub mod soliton;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
