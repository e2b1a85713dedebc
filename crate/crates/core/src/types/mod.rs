//! Grids, sampled fields, 2x2 complex matrices and spectral data containers.

mod field;
mod grid;
mod mat2;
mod spectral;

pub use field::{linear_interpolate, ComplexField1D};
pub(crate) use field::cubic_interpolate;
pub use grid::RealGrid;
pub use mat2::{sigma3_conjugate, Mat2};
pub use spectral::{Eigenpair, SolitonParams, SpectralData};
