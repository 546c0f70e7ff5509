//! Stability analysis of generalized Lotka–Volterra systems
//! `x' = k1 x^α1 y^β1 − k2 x^α2 y^β2`, `y' = k3 x^α2 y^β2 − k4 x^α3 y^β3`
//! on the open positive quadrant.

pub mod certificates;
pub mod classify;
pub mod equilibrium;
pub mod error;
pub mod exact;
pub mod exec;
pub mod focal;
pub mod local;
pub mod model;
pub mod network;
pub mod ode;
pub mod portrait;
pub mod simulate;
pub mod svg;

pub use equilibrium::{solve_equilibrium, EquilibriumKind, EquilibriumResult};
pub use error::{GlvError, Result};
pub use exec::Execution;
pub use local::{jacobian, jacobian_reduced, EigenClass, JacobianReport, LinearVerdict};
pub use model::{ExponentMatrix, GlvSystem, Rates, ReducedSystem, VectorField};
pub use network::{parse_network, ReactionNetwork};
