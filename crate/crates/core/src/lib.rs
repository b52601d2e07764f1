//! Divergence-free Fourier–Galerkin solver for the incompressible
//! Navier–Stokes equations on the periodic cube `[0, l]^3`.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod error;
pub mod estimates;
pub mod forcing;
pub mod galerkin;
pub mod pressure;
pub mod spectral;
pub mod timestepper;

pub use error::{Error, Result};
