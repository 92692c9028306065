//! Dispersion relations and kinetic wave simulation for plane sound waves in
//! a discrete-velocity gas with Uehling-Uhlenbeck (Bose/Fermi) collisions.
//!
//! Two independent routes to the complex wavenumber are provided:
//!
//! * [`dispersion`] solves the plane-wave eigenvalue relation as a polynomial
//!   in `lambda^2` and labels its roots by branch;
//! * [`simulate`] integrates the kinetic equations on a 1D grid with a
//!   driven boundary and measures the wavenumber from the resulting field.
//!
//! [`analysis`] builds parameter sweeps, attenuation peaks, localization
//! lengths and orientation scans on top of the first route.

pub mod analysis;
pub mod dispersion;
pub mod error;
pub mod model;
pub mod output;
pub mod simulate;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ModelConfig, ReducedParams, Statistics};
pub use num_complex::Complex64;
