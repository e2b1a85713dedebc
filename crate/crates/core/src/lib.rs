//! Numerical inverse scattering for the focusing cubic NLS equation
//! `i u_t + u_xx + 2|u|^2 u = 0` on the line.

pub mod asymptotics;
pub mod backlund;
pub mod error;
pub mod experiments;
pub mod flow;
pub mod integrator;
pub mod io;
pub mod manifest;
pub mod rh;
pub mod runner;
pub mod scattering;
pub mod types;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
