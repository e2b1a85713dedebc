use serde::{Deserialize, Serialize};

use super::grid::RealGrid;
use crate::error::{Error, Result};
use crate::C64;

/// One discrete eigenvalue in the upper half-plane with its norming constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub z: C64,
    pub c: C64,
}

/// Reflection coefficient samples plus the discrete spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    z_grid: RealGrid,
    r_values: Vec<C64>,
    discrete: Vec<Eigenpair>,
}

impl SpectralData {
    pub fn new(z_grid: RealGrid, r_values: Vec<C64>, discrete: Vec<Eigenpair>) -> Result<Self> {
        if r_values.len() != z_grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} reflection samples for a grid of {} points",
                r_values.len(),
                z_grid.len()
            )));
        }
        if let Some(i) = r_values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("reflection sample {i}")));
        }
        for (k, e) in discrete.iter().enumerate() {
            if !e.z.is_finite() || !e.c.is_finite() {
                return Err(Error::NonFinite(format!("eigenpair {k}")));
            }
            if e.z.im <= 0.0 {
                return Err(Error::Domain(format!("eigenvalue {} not in the upper half-plane", e.z)));
            }
            if e.c.norm() == 0.0 {
                return Err(Error::Domain(format!("norming constant {k} vanishes")));
            }
            if discrete[..k].iter().any(|o| o.z == e.z) {
                return Err(Error::Domain(format!("repeated eigenvalue {}", e.z)));
            }
        }
        Ok(Self { z_grid, r_values, discrete })
    }

    /// Pure radiation data.
    pub fn radiation(z_grid: RealGrid, r_values: Vec<C64>) -> Result<Self> {
        Self::new(z_grid, r_values, Vec::new())
    }

    /// Reflectionless data on the given grid.
    pub fn reflectionless(z_grid: RealGrid, discrete: Vec<Eigenpair>) -> Result<Self> {
        Self::new(z_grid, vec![C64::new(0.0, 0.0); z_grid.len()], discrete)
    }

    pub fn z_grid(&self) -> &RealGrid {
        &self.z_grid
    }

    pub fn r_values(&self) -> &[C64] {
        &self.r_values
    }

    pub fn discrete(&self) -> &[Eigenpair] {
        &self.discrete
    }

    pub fn sup_r(&self) -> f64 {
        self.r_values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest `|r|` at the two ends of the z-grid.
    pub fn edge_reflection(&self) -> f64 {
        self.r_values[0].norm().max(self.r_values[self.r_values.len() - 1].norm())
    }

    pub fn with_reflection(&self, r_values: Vec<C64>) -> Result<Self> {
        Self::new(self.z_grid, r_values, self.discrete.clone())
    }

    pub fn with_discrete(&self, discrete: Vec<Eigenpair>) -> Result<Self> {
        Self::new(self.z_grid, self.r_values.clone(), discrete)
    }
}

/// Parameters `(omega, gamma, v, x0)` of the travelling soliton
/// `omega e^{i x v + i (omega^2 - v^2) t + i gamma} sech(omega (x - 2 v t - x0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub omega: f64,
    pub gamma: f64,
    pub v: f64,
    pub x0: f64,
}

impl SolitonParams {
    pub fn new(omega: f64, gamma: f64, v: f64, x0: f64) -> Result<Self> {
        if !(omega.is_finite() && gamma.is_finite() && v.is_finite() && x0.is_finite()) {
            return Err(Error::NonFinite("soliton parameters".into()));
        }
        if omega <= 0.0 {
            return Err(Error::Domain(format!("soliton amplitude must be positive, got {omega}")));
        }
        Ok(Self { omega, gamma, v, x0 })
    }

    /// The soliton profile at time `t`.
    pub fn evaluate(&self, t: f64, x: f64) -> C64 {
        let phase = x * self.v + (self.omega * self.omega - self.v * self.v) * t + self.gamma;
        let arg = self.omega * (x - 2.0 * self.v * t - self.x0);
        C64::from_polar(self.omega / arg.cosh(), phase)
    }
}
