//! Numerical laboratory for the zero-temperature BCS functional in a trap and
//! its Gross-Pitaevskii limit.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: radial grids, quadrature, tridiagonal eigensolvers, the
//!   unitary radial Fourier transform and scalar root finding.
//! * [`model`]: interaction `V`, trap `W`, scale ratio `h` and offset `D`.
//! * [`twobody`]: the microscopic pair ground state `α₀`, its spectral gap,
//!   moments and the pairing coefficient `g_BCS`.
//! * [`gp`]: the grand-canonical GP functional, its minimizer and the
//!   mass-constrained / Ginzburg-Landau splitting.
//! * [`bcs`]: separable pair kernels, admissible trial states, Schatten norms
//!   and the term-by-term BCS energy (Monte Carlo for the quartic traces).
//! * [`asymptotics`]: h-sweeps and the critical-offset bisection.
//! * [`oracles`]: closed-form references used by the verification suite.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bcs;
pub mod error;
pub mod exec;
pub mod gp;
pub mod model;
pub mod numerics;
pub mod oracles;
pub mod twobody;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use model::{Interaction, PhysicsModel, Trap};
pub use numerics::{GridScheme, RadialFunction, RadialGrid};
