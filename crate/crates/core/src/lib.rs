//! Numerical and semi-exact tools for the six Painlevé transcendents.
//!
//! The crate provides four layers that build on each other:
//!
//! * residual forms and first-order systems for the Painlevé equations,
//!   their sigma variants, and the equation satisfied by the derivative
//!   combination usually written P34 ([`equations`], [`hamiltonian`]);
//! * an adaptive Runge-Kutta integrator that continues solutions through
//!   movable poles by fitting a local Laurent expansion on the near side
//!   of each pole and re-seeding from it on the far side ([`solver`]);
//! * exact and special solutions: integer polynomial hierarchies, rational
//!   solutions, Airy- and Bessel-seeded families, and the recurrence ladder
//!   between them ([`specialsol`]);
//! * transformations between equations with residual-based verification,
//!   and asymptotic connection formulae confronted against integrated
//!   trajectories ([`transforms`], [`asymptotics`]).
//!
//! Everything downstream of [`specialfn`] is deterministic: no global
//! state, no randomness, identical output for identical input.

pub mod asymptotics;
mod dd;
pub mod equations;
mod error;
pub mod hamiltonian;
pub mod interp;
pub mod solver;
pub mod specialfn;
pub mod specialsol;
pub mod transforms;

pub use error::{Error, Result};
pub use equations::{EquationId, ParamSet};
pub use solver::{StepControl, Trajectory};
