use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jost::{check_potential, det, CellPotential, JostKind};
use crate::error::{Error, Result};
use crate::types::{ComplexField1D, RealGrid};
use crate::C64;

/// Potentials larger than this at the x-grid edges get a truncation diagnostic.
pub const EDGE_DECAY_TOLERANCE: f64 = 1e-10;

/// `|a(z)|` below this on the real line marks the datum as non-generic.
pub const GENERICITY_THRESHOLD: f64 = 1e-6;

/// Scattering function `a` and coefficient `b` on a real z-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCoefficients {
    pub z_grid: RealGrid,
    pub a_values: Vec<C64>,
    pub b_values: Vec<C64>,
    /// Largest `|u|` at the x-grid edges.
    pub edge_potential: f64,
}

impl ScatteringCoefficients {
    /// The edge magnitude when it exceeds [`EDGE_DECAY_TOLERANCE`]; a rough
    /// bound on the error from truncating the Volterra integrals.
    pub fn truncation_warning(&self) -> Option<f64> {
        (self.edge_potential > EDGE_DECAY_TOLERANCE).then_some(self.edge_potential)
    }

    /// `max_z | |a|^2 + |b|^2 - 1 |`.
    pub fn unitarity_defect(&self) -> f64 {
        self.a_values
            .iter()
            .zip(&self.b_values)
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `a(z)` and `b(z)` on a real grid from Wronskians at the node nearest `x = 0`.
pub fn scattering_ab(u: &ComplexField1D, z_grid: &RealGrid) -> Result<ScatteringCoefficients> {
    check_potential(u)?;
    let cells = CellPotential::new(u)?;
    let xc = cells.center_x();
    let (a_values, b_values): (Vec<C64>, Vec<C64>) = z_grid
        .nodes()
        .into_par_iter()
        .map(|z| {
            let z = C64::new(z, 0.0);
            let m1m = cells.at_center(z, JostKind::M1Minus);
            let m2p = cells.at_center(z, JostKind::M2Plus);
            let m1p = cells.at_center(z, JostKind::M1Plus);
            let shift = C64::new(0.0, -2.0 * xc) * z;
            let shifted = [m1m[0] * shift.exp(), m1m[1] * shift.exp()];
            (det(m1m, m2p), det(m1p, shifted))
        })
        .unzip();
    Ok(ScatteringCoefficients { z_grid: *z_grid, a_values, b_values, edge_potential: u.edge_magnitude() })
}

/// `r = b / a`, rejecting data for which `a` nearly vanishes on the grid.
pub fn reflection_coefficient(coeffs: &ScatteringCoefficients) -> Result<Vec<C64>> {
    coeffs
        .a_values
        .iter()
        .zip(&coeffs.b_values)
        .enumerate()
        .map(|(i, (a, b))| {
            if a.norm() < GENERICITY_THRESHOLD || !a.is_finite() {
                Err(Error::NonGeneric { z: coeffs.z_grid.node(i), modulus: a.norm() })
            } else {
                Ok(b / a)
            }
        })
        .collect()
}

/// `a(z)` at a single point of the closed upper half-plane.
pub fn scattering_function(u: &ComplexField1D, z: C64) -> Result<C64> {
    check_potential(u)?;
    if z.im < 0.0 {
        return Err(Error::Domain(format!("a(z) is only continued to the upper half-plane, got {z}")));
    }
    Ok(CellPotential::new(u)?.a(z))
}
