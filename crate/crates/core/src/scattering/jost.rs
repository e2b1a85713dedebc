use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{cubic_interpolate, ComplexField1D, Mat2, RealGrid};
use crate::C64;

/// Which normalised Jost solution to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JostKind {
    /// `e_1` at `-inf`, analytic in the upper half-plane.
    M1Minus,
    /// `e_2` at `+inf`, analytic in the upper half-plane.
    M2Plus,
    /// `e_1` at `+inf`, analytic in the lower half-plane.
    M1Plus,
    /// `e_2` at `-inf`, analytic in the lower half-plane.
    M2Minus,
}

impl JostKind {
    fn upper(self) -> bool {
        matches!(self, JostKind::M1Minus | JostKind::M2Plus)
    }

    fn starts_left(self) -> bool {
        matches!(self, JostKind::M1Minus | JostKind::M2Minus)
    }

    fn start(self) -> [C64; 2] {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match self {
            JostKind::M1Minus | JostKind::M1Plus => [one, zero],
            JostKind::M2Plus | JostKind::M2Minus => [zero, one],
        }
    }

    /// Exponent `s` in the per-cell factor `e^{s i z h}` relating the
    /// normalised solution to the spectral-system propagator.
    fn gauge(self) -> f64 {
        match self {
            JostKind::M1Minus | JostKind::M2Plus => 1.0,
            JostKind::M1Plus | JostKind::M2Minus => -1.0,
        }
    }
}

/// A Jost solution sampled on the x-grid of its potential.
#[derive(Debug, Clone, PartialEq)]
pub struct JostSolution {
    pub kind: JostKind,
    pub z: C64,
    pub grid: RealGrid,
    pub values: Vec<[C64; 2]>,
}

/// Potential samples at the two Gauss points of every x-cell.
#[derive(Debug, Clone)]
pub(crate) struct CellPotential {
    pub(crate) grid: RealGrid,
    gauss: Vec<[C64; 2]>,
    /// Node at which Wronskians are evaluated (closest to `x = 0`).
    pub(crate) center: usize,
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3) / 6

impl CellPotential {
    pub(crate) fn new(u: &ComplexField1D) -> Result<Self> {
        let grid = *u.grid();
        if grid.len() < 4 {
            return Err(Error::InvalidGrid("Jost solver needs at least 4 x-nodes".into()));
        }
        let h = grid.spacing();
        let gauss = (0..grid.len() - 1)
            .map(|j| {
                let mid = grid.node(j) + 0.5 * h;
                [
                    cubic_interpolate(&grid, u.values(), mid - GAUSS_OFFSET * h),
                    cubic_interpolate(&grid, u.values(), mid + GAUSS_OFFSET * h),
                ]
            })
            .collect();
        let center = grid.nearest_index(0.0);
        Ok(Self { grid, gauss, center })
    }

    /// Fourth-order Magnus propagator of `phi' = (-i z sigma_3 + Q) phi` over cell `j`,
    /// returned with its inverse.
    fn cell(&self, j: usize, z: C64) -> (Mat2, Mat2) {
        let h = self.grid.spacing();
        let [u1, u2] = self.gauss[j];
        let iz = C64::new(0.0, 1.0) * z;
        let a1 = Mat2::new(-iz, u1, -u1.conj(), iz);
        let a2 = Mat2::new(-iz, u2, -u2.conj(), iz);
        let comm = a1 * a2 - a2 * a1;
        let omega = (a1 + a2).scale(C64::new(0.5 * h, 0.0)) - comm.scale(C64::new(3f64.sqrt() * h * h / 12.0, 0.0));
        // Omega is traceless, so Omega^2 = k^2 I with k^2 = -det(Omega).
        let k2 = -omega.det();
        let (ch, shc) = cosh_sinhc(k2);
        let id = Mat2::IDENTITY.scale(ch);
        let lin = omega.scale(shc);
        (id + lin, id - lin)
    }

    fn march(&self, z: C64, kind: JostKind, stop: usize, mut record: impl FnMut(usize, [C64; 2])) -> [C64; 2] {
        let n = self.grid.len();
        let h = self.grid.spacing();
        let gauge = C64::new(0.0, kind.gauge() * h) * z;
        let phase = gauge.exp();
        let mut m = kind.start();
        if kind.starts_left() {
            record(0, m);
            for j in 0..stop {
                let (fwd, _) = self.cell(j, z);
                m = (fwd * m).map(|v| v * phase);
                record(j + 1, m);
            }
        } else {
            record(n - 1, m);
            for j in (stop..n - 1).rev() {
                let (_, back) = self.cell(j, z);
                m = (back * m).map(|v| v * phase);
                record(j, m);
            }
        }
        m
    }

    /// Value of a Jost solution at the Wronskian node.
    pub(crate) fn at_center(&self, z: C64, kind: JostKind) -> [C64; 2] {
        self.march(z, kind, self.center, |_, _| {})
    }

    pub(crate) fn full(&self, z: C64, kind: JostKind) -> Vec<[C64; 2]> {
        let n = self.grid.len();
        let mut out = vec![[C64::new(0.0, 0.0); 2]; n];
        let stop = if kind.starts_left() { n - 1 } else { 0 };
        self.march(z, kind, stop, |i, v| out[i] = v);
        out
    }

    pub(crate) fn center_x(&self) -> f64 {
        self.grid.node(self.center)
    }

    /// `a(z) = det[m1^-, m2^+]` for `Im z >= 0`.
    pub(crate) fn a(&self, z: C64) -> C64 {
        det(self.at_center(z, JostKind::M1Minus), self.at_center(z, JostKind::M2Plus))
    }
}

pub(crate) fn det(p: [C64; 2], q: [C64; 2]) -> C64 {
    p[0] * q[1] - p[1] * q[0]
}

/// `cosh(k)` and `sinh(k)/k` as functions of `k^2` (both even in `k`).
fn cosh_sinhc(k2: C64) -> (C64, C64) {
    if k2.norm() < 1e-6 {
        let ch = 1.0 + k2 * (0.5 + k2 / 24.0);
        let sh = 1.0 + k2 * (1.0 / 6.0 + k2 / 120.0);
        (ch, sh)
    } else {
        let k = k2.sqrt();
        (k.cosh(), k.sinh() / k)
    }
}

pub(crate) fn check_potential(u: &ComplexField1D) -> Result<()> {
    if let Some(i) = u.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("potential sample {i}")));
    }
    Ok(())
}

/// Solve the Volterra problem for one Jost solution, marching from the
/// infinity at which it is normalised.
pub fn solve_jost(u: &ComplexField1D, z: C64, kind: JostKind) -> Result<JostSolution> {
    check_potential(u)?;
    if !z.is_finite() {
        return Err(Error::NonFinite("spectral parameter".into()));
    }
    if kind.upper() && z.im < 0.0 || !kind.upper() && z.im > 0.0 {
        return Err(Error::Domain(format!("{kind:?} is not defined at z = {z}")));
    }
    let cells = CellPotential::new(u)?;
    Ok(JostSolution { kind, z, grid: cells.grid, values: cells.full(z, kind) })
}
