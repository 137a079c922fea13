use serde::{Deserialize, Serialize};

/// Named acceptance tolerances. Every verdict in a report refers to one of
/// these fields by name; all are overridable from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max-norm PDE residual of exact hyperbolic solutions.
    pub residual: f64,
    /// Exact-vs-numeric max-norm error in the two-soliton reproduction.
    pub fig2_error: f64,
    /// Relative drift of I1, I2, I3.
    pub conservation_drift: f64,
    /// Distance of a hump maximum from its pole's real part at t = 0.
    pub hump_position: f64,
    /// Imaginary-part exchange across the collision.
    pub swap: f64,
    /// Asymptotic pole velocity vs the isolated one-soliton velocity.
    pub isolated_velocity: f64,
    /// Change of the asymptotic phase shift over the final window.
    pub phase_shift_constancy: f64,
    /// Smallest phase shift counted as nonzero.
    pub phase_shift_min: f64,
    /// Newton-form vs Backlund-form pole positions.
    pub form_agreement: f64,
    /// |velocity - Backlund velocity| along a Newton trajectory.
    pub backlund_consistency: f64,
    /// |w - conj(z)| along a trajectory.
    pub conjugation: f64,
    /// Discrete involution error, relative to the field max-norm.
    pub involution: f64,
    /// Eigenfunction defect, relative to the field max-norm.
    pub eigenfunction: f64,
    /// Quadrature and randomized special-function identities.
    pub identity: f64,
    /// PDE residual of elliptic solutions on their native period.
    pub elliptic_residual: f64,
    /// Spectral solver vs exact elliptic solution.
    pub solver_error: f64,
    /// |u(x + L) - u(x)|.
    pub periodicity: f64,
    /// Elliptic vs hyperbolic solver runs at large period.
    pub hyperbolic_limit: f64,
    /// Exact elliptic vs hyperbolic fields at large period.
    pub hyperbolic_limit_exact: f64,
    /// Pointwise-normalized Hirota residual.
    pub hirota: f64,
    /// Tau-reconstructed fields vs pole sums.
    pub tau_reconstruction: f64,
    /// Smallest residual counted as order one (sign control).
    pub order_one: f64,
    /// Required growth of the observed order between successive doublings.
    pub convergence_acceleration: f64,
    /// Largest discarded imaginary part of real-solution evaluations.
    pub reality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-8,
            fig2_error: 1e-4,
            conservation_drift: 1e-8,
            hump_position: 0.5,
            swap: 1e-3,
            isolated_velocity: 1e-4,
            phase_shift_constancy: 1e-6,
            phase_shift_min: 1e-3,
            form_agreement: 1e-8,
            backlund_consistency: 1e-6,
            conjugation: 1e-8,
            involution: 1e-14,
            eigenfunction: 1e-12,
            identity: 1e-8,
            elliptic_residual: 1e-7,
            solver_error: 1e-6,
            periodicity: 1e-12,
            hyperbolic_limit: 1e-5,
            hyperbolic_limit_exact: 1e-6,
            hirota: 1e-6,
            tau_reconstruction: 1e-10,
            order_one: 0.1,
            convergence_acceleration: 1.5,
            reality: 1e-12,
        }
    }
}

impl Tolerances {
    /// Value of the tolerance with the given field name.
    pub fn get(&self, name: &str) -> Option<f64> {
        serde_json::to_value(self).ok()?.get(name)?.as_f64()
    }
}
