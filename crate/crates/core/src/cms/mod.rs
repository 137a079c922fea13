//! Complex Calogero-Moser-Sutherland pole dynamics.
//!
//! Two pole families `z_j` (N of them) and `w_j` (M of them) obey the
//! first-order Backlund system
//!
//! ```text
//! z_j' =  2i sum_{k != j} alpha(z_j - z_k) - 2i sum_k alpha(z_j - w_k + i delta)
//! w_j' = -2i sum_{k != j} alpha(w_j - w_k) + 2i sum_k alpha(w_j - z_k + i delta)
//! ```
//!
//! whose solutions also satisfy the decoupled Newton equations
//! `z_j'' = -4 sum_{k != j} V'(z_j - z_k)`.

mod config;
mod ode;
mod trajectory;

pub use config::{
    backlund_velocities, build_real_initial, newton_acceleration, strip_margin, PoleConfiguration,
    DEFAULT_SINGULAR_DISTANCE, DEFAULT_STRIP_EPS,
};
pub use ode::{solve, IntegratorConfig, Method, StepStats};
pub use trajectory::{integrate, Form, StepRecord, Trajectory, TRAJECTORY_SCHEMA};
