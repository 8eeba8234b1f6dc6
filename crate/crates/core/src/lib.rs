//! Numerical approximation of singularly perturbed convection-diffusion
//! problems whose initial condition jumps at an interior point.
//!
//! The solution of such a problem develops an interior layer that is
//! convected along the characteristic of the reduced problem, plus a
//! boundary layer at the outflow edge. The pipeline implemented here:
//!
//! 1. [`problem`] describes the continuous problem (coefficients, the
//!    two smooth initial branches meeting at the jump, boundary data).
//! 2. [`characteristic`] integrates the layer path `d(t)` and checks the
//!    final-time restrictions.
//! 3. [`transform`] maps the moving layer onto the fixed line `x = d`
//!    with a piecewise-linear coordinate change.
//! 4. [`singular`] supplies the complementary-error-function family that
//!    absorbs the discontinuity analytically, and the damping factor
//!    accumulated along the layer path when a reaction term is present.
//! 5. [`mesh`] builds the piecewise-uniform fitted mesh whose transition
//!    points resolve both layers.
//! 6. [`solver`] marches the upwinded implicit scheme with a flux
//!    transmission row at the interface, one tridiagonal solve per step.
//! 7. [`interp`] turns the grid function into a globally defined bilinear
//!    interpolant and reconstructs the original unknown.
//!
//! The crate is `no_std` (allocation required); IO, the convergence-rate
//! harness and the command line live in the companion `layertrack` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod characteristic;
pub mod error;
pub mod interp;
mod math;
pub mod mesh;
pub mod problem;
pub mod singular;
pub mod solver;
pub mod transform;
pub mod tridiag;

pub use error::{Error, Result};
pub use problem::ProblemSpec;
pub use solver::DiscreteSolution;
