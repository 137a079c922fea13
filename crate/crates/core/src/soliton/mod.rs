//! Exact solutions built from pole data, tau functions, and PDE residuals.

mod exact;
mod field;
mod one;
mod residual;
mod tau;

pub use exact::{eval_elliptic, eval_hyperbolic, eval_point, evaluate, Evaluation};
pub use field::{FieldPair, FIELD_SCHEMA};
pub use one::{check_window, one_soliton, one_soliton_velocity, OneSoliton, VelocityConvention};
pub use residual::{pde_residual, Residual};
pub use tau::{hirota_residual, HirotaResidual, TauPair, TimeDerivative};

pub(crate) use field::max_abs;
