//! Numerical laboratory for 1-D quasilinear Klein-Gordon flows
//!
//! `u_tt - u_xx + m u = N(u, ∂u, ∂²u)` on a periodic grid, with the
//! normal-form symbol algebra, paradifferential energies and an RK4
//! method-of-lines integrator.

pub mod bilinear;
pub mod energy;
pub mod error;
pub mod evolve;
pub mod model;
pub mod normalform;
pub mod spectral;

pub use error::{KgError, Result};
pub use spectral::{make_grid, Field, Grid, State, C64};
