use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Uniform discretisation of an interval of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct RealGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl TryFrom<RawGrid> for RealGrid {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        RealGrid::new(raw.x_min, raw.x_max, raw.n_points)
    }
}

impl RealGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n_points}")));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!("x_min = {x_min} must be below x_max = {x_max}")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Index of the node closest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let s = ((x - self.x_min) / self.spacing()).round();
        s.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Cell index `i` with `node(i) <= x < node(i+1)`, clamped to the last cell.
    pub fn cell_index(&self, x: f64) -> usize {
        let s = ((x - self.x_min) / self.spacing()).floor();
        s.clamp(0.0, (self.n_points - 2) as f64) as usize
    }

    /// Trapezoid rule for samples on this grid.
    pub fn trapezoid(&self, values: &[C64]) -> C64 {
        debug_assert_eq!(values.len(), self.n_points);
        let n = values.len();
        let inner: C64 = values[1..n - 1].iter().sum();
        (inner + 0.5 * (values[0] + values[n - 1])) * self.spacing()
    }

    pub fn trapezoid_real(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let n = values.len();
        let inner: f64 = values[1..n - 1].iter().sum();
        (inner + 0.5 * (values[0] + values[n - 1])) * self.spacing()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(RealGrid::new(0.0, 1.0, 1).is_err());
        assert!(RealGrid::new(1.0, 1.0, 10).is_err());
        assert!(RealGrid::new(2.0, 1.0, 10).is_err());
        assert!(RealGrid::new(f64::NAN, 1.0, 10).is_err());
    }

    #[test]
    fn nodes_hit_both_endpoints() {
        let g = RealGrid::new(-3.0, 7.0, 11).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.node(0), -3.0);
        assert_eq!(g.node(10), 7.0);
        assert_eq!(g.nearest_index(0.4), 3);
        assert_eq!(g.cell_index(7.0), 9);
    }

    #[test]
    fn deserialisation_validates() {
        let bad = r#"{"x_min": 1.0, "x_max": 0.0, "n_points": 5}"#;
        assert!(serde_json::from_str::<RealGrid>(bad).is_err());
        let good = r#"{"x_min": 0.0, "x_max": 1.0, "n_points": 5}"#;
        assert_eq!(serde_json::from_str::<RealGrid>(good).unwrap().len(), 5);
    }
}
