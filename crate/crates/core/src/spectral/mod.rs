//! Fourier collocation solver for the periodic equation and its conserved
//! integrals.

mod conserved;
mod evolve;
mod grid;
mod nonlinear;
mod operators;
mod propagator;
mod transform;

pub use conserved::{conserved_quantities, Conserved};
pub use evolve::{
    evolve, DiagnosticsRow, Evolution, Scheme, Solver, SolverConfig, DIAGNOSTICS_HEADER,
    INSTABILITY_THRESHOLD,
};
pub use grid::Grid;
pub use nonlinear::{nonlinear_term, square_direct, Dealias, Squarer};
pub use operators::{
    apply_calt, apply_t, apply_ttilde, coth_symbol, csch_symbol, t_multiplier, ttilde_multiplier,
    Operators, Symbols,
};
pub use propagator::{linear_propagator, Propagator};
pub use transform::{inverse_transform, transform, SpectralPair, Transform};
