//! Pseudospectral toolkit for the isothermal compressible Navier–Stokes–Korteweg
//! system with density-dependent capillarity.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of in-memory fields on a periodic grid: Fourier-multiplier
//! operators, constitutive laws, both forms of the Korteweg stress, an RK4
//! integrator in conservative variables, and the energy/regularity
//! diagnostics evaluated along trajectories. IO, configuration files and the
//! command line live in the `nsk-harness` crate.

#![no_std]
#![warn(missing_debug_implementations)]
// Whenever std is linked (tests, dev-dependency feature unification) its inherent
// float methods shadow `num_traits::Float`.
#![allow(unused_imports)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod besov;
pub mod constitutive;
pub mod diagnostics;
mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod korteweg;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod state;

pub use error::{Bound, Error, Result};
pub use field::{ScalarField, TensorField, VectorField};
pub use grid::Grid;
pub use spectral::{Spectral, Spectrum};
pub use state::FlowState;
