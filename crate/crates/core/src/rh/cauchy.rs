use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::types::ComplexField1D;
use crate::C64;

/// Boundary values `C^{+-} h = +-h/2 + (i/2) H h` of the Cauchy integral of
/// the band-limited (sinc) interpolant of grid samples, where `H` is the
/// discrete Hilbert transform with Toeplitz kernel
/// `(1 - (-1)^d) / (pi d)`. Applied as a zero-padded FFT convolution, so the
/// cost is `O(N log N)` and `C^+ - C^- = I` holds exactly.
pub(crate) struct CauchyOperator {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<C64>,
}

fn kernel(d: i64) -> f64 {
    if d % 2 == 0 {
        0.0
    } else {
        2.0 / (PI * d as f64)
    }
}

impl CauchyOperator {
    pub(crate) fn new(n: usize) -> Self {
        let padded = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(padded);
        let inverse = planner.plan_fft_inverse(padded);
        let mut kernel_hat = vec![C64::new(0.0, 0.0); padded];
        for d in 1..n as i64 {
            kernel_hat[d as usize] = C64::new(kernel(d), 0.0);
            kernel_hat[padded - d as usize] = C64::new(kernel(-d), 0.0);
        }
        forward.process(&mut kernel_hat);
        let scale = 1.0 / padded as f64;
        kernel_hat.iter_mut().for_each(|v| *v *= scale);
        Self { n, forward, inverse, kernel_hat }
    }

    fn hilbert(&self, h: &[C64]) -> Vec<C64> {
        debug_assert_eq!(h.len(), self.n);
        let mut buf = vec![C64::new(0.0, 0.0); self.kernel_hat.len()];
        buf[..self.n].copy_from_slice(h);
        self.forward.process(&mut buf);
        buf.iter_mut().zip(&self.kernel_hat).for_each(|(b, k)| *b *= k);
        self.inverse.process(&mut buf);
        buf.truncate(self.n);
        buf
    }

    /// `C^{sign} h` with `sign = +1` or `-1`.
    pub(crate) fn apply(&self, h: &[C64], sign: f64) -> Vec<C64> {
        let half_i = C64::new(0.0, 0.5);
        self.hilbert(h).into_iter().zip(h).map(|(hh, v)| sign * 0.5 * v + half_i * hh).collect()
    }

    pub(crate) fn minus(&self, h: &[C64]) -> Vec<C64> {
        self.apply(h, -1.0)
    }

    pub(crate) fn plus(&self, h: &[C64]) -> Vec<C64> {
        self.apply(h, 1.0)
    }

    /// Dense matrix of `C^{sign}` for direct solves.
    pub(crate) fn dense(&self, sign: f64) -> DMatrix<C64> {
        let half_i = C64::new(0.0, 0.5);
        DMatrix::from_fn(self.n, self.n, |j, l| {
            let d = j as i64 - l as i64;
            let diag = if d == 0 { sign * 0.5 } else { 0.0 };
            C64::new(diag, 0.0) + half_i * kernel(d)
        })
    }
}

/// Cauchy boundary values together with the edge-decay diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyOutput {
    pub values: Vec<C64>,
    /// Largest `|h|` at the two grid ends before tail correction.
    pub edge_magnitude: f64,
}

/// Split `h` into a rational tail `alpha/(z-i) + beta/(z+i)` matching the
/// edge samples, plus a remainder vanishing at both edges. The tail's
/// boundary values are exact: `alpha/(z-i)` is analytic below the axis and
/// `beta/(z+i)` above it.
fn tail_split(h: &ComplexField1D) -> (C64, C64) {
    let g = h.grid();
    let i = C64::new(0.0, 1.0);
    let (a, b) = (g.x_min(), g.x_max());
    let (ha, hb) = (h.values()[0], h.values()[g.len() - 1]);
    // [1/(a-i) 1/(a+i); 1/(b-i) 1/(b+i)] [alpha; beta] = [ha; hb]
    let (m11, m12) = (1.0 / (a - i), 1.0 / (a + i));
    let (m21, m22) = (1.0 / (b - i), 1.0 / (b + i));
    let det = m11 * m22 - m12 * m21;
    if det.norm() < 1e-300 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    ((ha * m22 - m12 * hb) / det, (m11 * hb - m21 * ha) / det)
}

fn cauchy_with_tail(h: &ComplexField1D, sign: f64) -> Result<CauchyOutput> {
    let g = *h.grid();
    let i = C64::new(0.0, 1.0);
    let (alpha, beta) = tail_split(h);
    let nodes = g.nodes();
    let rest: Vec<C64> = nodes
        .iter()
        .zip(h.values())
        .map(|(&z, v)| v - alpha / (z - i) - beta / (z + i))
        .collect();
    let op = CauchyOperator::new(g.len());
    let mut values = op.apply(&rest, sign);
    for (v, &z) in values.iter_mut().zip(&nodes) {
        *v += if sign > 0.0 { beta / (z + i) } else { -alpha / (z - i) };
    }
    Ok(CauchyOutput { values, edge_magnitude: h.edge_magnitude() })
}

/// Lower boundary value `C^- h` of the Cauchy integral on the grid line.
pub fn cauchy_minus(h: &ComplexField1D) -> Result<CauchyOutput> {
    cauchy_with_tail(h, -1.0)
}

/// Upper boundary value `C^+ h`.
pub fn cauchy_plus(h: &ComplexField1D) -> Result<CauchyOutput> {
    cauchy_with_tail(h, 1.0)
}
