use serde::{Deserialize, Serialize};

use super::grid::RealGrid;
use crate::error::{Error, Result};
use crate::C64;

/// Complex samples of a function of one real variable on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexField1D {
    grid: RealGrid,
    values: Vec<C64>,
}

impl ComplexField1D {
    pub fn new(grid: RealGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample {i} at x = {}", grid.node(i))));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: RealGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: RealGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| f(self.grid.node(i), *v))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Trapezoid-rule `L^2` norm.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        self.grid.trapezoid_real(&sq).sqrt()
    }

    /// Largest modulus at the two end nodes.
    pub fn edge_magnitude(&self) -> f64 {
        self.values[0].norm().max(self.values[self.values.len() - 1].norm())
    }

    pub fn linear_interpolate(&self, x: f64) -> Result<C64> {
        linear_interpolate(self, x)
    }
}

/// Piecewise-linear interpolant, exact at the nodes.
pub fn linear_interpolate(f: &ComplexField1D, x: f64) -> Result<C64> {
    let g = f.grid();
    if !x.is_finite() || !g.contains(x) {
        return Err(Error::OutOfRange { value: x, min: g.x_min(), max: g.x_max() });
    }
    let i = g.cell_index(x);
    let x0 = g.node(i);
    let x1 = g.node(i + 1);
    if x == x0 {
        return Ok(f.values[i]);
    }
    if x == x1 {
        return Ok(f.values[i + 1]);
    }
    if i > 0 && x == g.node(i - 1) {
        return Ok(f.values[i - 1]);
    }
    let s = (x - x0) / (x1 - x0);
    Ok(f.values[i] * (1.0 - s) + f.values[i + 1] * s)
}

/// Four-point Lagrange interpolation of grid samples, exact for cubics.
pub(crate) fn cubic_interpolate(grid: &RealGrid, values: &[C64], x: f64) -> C64 {
    let n = grid.len();
    if n < 4 {
        let i = grid.cell_index(x);
        let s = (x - grid.node(i)) / grid.spacing();
        return values[i] * (1.0 - s) + values[i + 1] * s;
    }
    let h = grid.spacing();
    let i = grid.cell_index(x);
    let start = i.saturating_sub(1).min(n - 4);
    let s = (x - grid.x_min()) / h - start as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != k {
                w *= (s - m as f64) / (k as f64 - m as f64);
            }
        }
        acc += values[start + k] * w;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_field_interpolates_to_constant() {
        let g = RealGrid::new(-1.0, 2.0, 7).unwrap();
        let f = ComplexField1D::from_fn(g, |_| C64::new(3.0, 0.0)).unwrap();
        assert_eq!(f.linear_interpolate(0.123).unwrap(), C64::new(3.0, 0.0));
    }

    #[test]
    fn linear_function_is_reproduced_at_midpoints() {
        let g = RealGrid::new(0.0, 1.0, 11).unwrap();
        let f = ComplexField1D::from_fn(g, |x| C64::new(x, 0.0)).unwrap();
        let mid = 0.5 * (g.node(3) + g.node(4));
        assert!((f.linear_interpolate(mid).unwrap().re - mid).abs() < 1e-15);
    }

    #[test]
    fn sech_interpolation_matches_closed_form() {
        let g = RealGrid::symmetric(20.0, 4001).unwrap();
        let f = ComplexField1D::from_fn(g, |x| C64::new(1.0 / x.cosh(), 0.0)).unwrap();
        let v = f.linear_interpolate(0.5).unwrap();
        assert!((v.re - 1.0 / 0.5f64.cosh()).abs() < 1e-6);
    }

    #[test]
    fn outside_domain_is_a_range_error() {
        let g = RealGrid::new(0.0, 1.0, 3).unwrap();
        let f = ComplexField1D::zeros(g);
        assert!(matches!(f.linear_interpolate(1.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn length_mismatch_and_nan_are_rejected() {
        let g = RealGrid::new(0.0, 1.0, 3).unwrap();
        assert!(ComplexField1D::new(g, vec![C64::new(0.0, 0.0); 2]).is_err());
        let bad = vec![C64::new(0.0, 0.0), C64::new(f64::NAN, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(ComplexField1D::new(g, bad), Err(Error::NonFinite(_))));
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics() {
        let g = RealGrid::new(-2.0, 3.0, 21).unwrap();
        let p = |x: f64| C64::new(x * x * x - 2.0 * x, 0.5 * x * x);
        let vals: Vec<C64> = g.nodes().into_iter().map(p).collect();
        for &x in &[-1.97, -0.3, 0.01, 2.2, 2.99] {
            assert!((cubic_interpolate(&g, &vals, x) - p(x)).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn interpolation_is_exact_on_nodes(vals in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 2..50)) {
            let n = vals.len();
            let g = RealGrid::new(-1.3, 4.1, n).unwrap();
            let values: Vec<C64> = vals.iter().map(|&(a, b)| C64::new(a, b)).collect();
            let f = ComplexField1D::new(g, values.clone()).unwrap();
            for (i, v) in values.iter().enumerate() {
                prop_assert_eq!(f.linear_interpolate(g.node(i)).unwrap(), *v);
            }
        }
    }
}
