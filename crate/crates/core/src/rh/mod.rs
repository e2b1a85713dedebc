//! Riemann-Hilbert inversion: spectral data to potential.

mod cauchy;
mod jump;
mod linalg;
mod solver;
mod stabilized;

pub use cauchy::{cauchy_minus, cauchy_plus, CauchyOutput};
pub use jump::{build_jump, JumpData, PoleJump};
pub use linalg::SolverConfig;
pub use solver::{reconstruct_potential, rh_matrix_at, solve_rh, RhConfig, RhSolutionSlice, RhSolver};

use crate::error::Result;
use crate::types::SpectralData;

/// Solve with the stabilized factorization (plain formulation when the data
/// carry discrete spectrum).
pub fn solve_rh_stabilized(data: &SpectralData, x: f64) -> Result<RhSolutionSlice> {
    RhSolver::new(data, RhConfig::default()).solve_stabilized(x)
}

/// Reconstructed potential at each `x`, solved in parallel.
pub fn reconstruct_on(data: &SpectralData, xs: &[f64], cfg: RhConfig) -> Result<Vec<crate::C64>> {
    RhSolver::new(data, cfg).sweep(xs)
}
