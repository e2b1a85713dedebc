use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cauchy::CauchyOperator;
use super::jump::{build_jump, JumpData};
use super::linalg::{solve, LinearSystem, SolverConfig};
use crate::error::{Error, Result};
use crate::types::{Mat2, RealGrid, SpectralData};
use crate::C64;

/// Configuration of the RH solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct RhConfig {
    pub solver: SolverConfig,
    /// `|x|` beyond which [`RhSolver::solve_auto`] switches to the stabilized
    /// formulation; `None` uses `8 / (max_k omega_k + 1)`.
    pub crossover: Option<f64>,
}

/// Solution of the RH problem at one `x`: boundary values `M_x = m_-` on
/// the grid and the regular parts of `m` at the poles.
#[derive(Debug, Clone, PartialEq)]
pub struct RhSolutionSlice {
    pub x: f64,
    pub jump: JumpData,
    pub m_values: Vec<Mat2>,
    /// `M_x(z_1..z_n)` followed by `M_x(zbar_1..zbar_n)`.
    pub m_at_poles: Vec<Mat2>,
    /// Column-1 residues of `m` at `z_k`, i.e. `(M_x V_x)(z_k)`.
    pub residues_upper: Vec<Mat2>,
    /// Column-2 residues of `m` at `zbar_k`.
    pub residues_lower: Vec<Mat2>,
    /// Reconstructed potential `u(x) = 2i lim z m_12(x, z)`.
    pub u: C64,
    /// Relative residual of the discrete linear system.
    pub residual: f64,
    /// GMRES iterations used (0 for a direct solve).
    pub iterations: usize,
}

pub(crate) const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

pub(crate) fn trapezoid_weights(g: &RealGrid) -> Vec<f64> {
    let h = g.spacing();
    let n = g.len();
    (0..n).map(|j| if j == 0 || j + 1 == n { 0.5 * h } else { h }).collect()
}

impl RhSolutionSlice {
    /// `m(x, z) = 1 + sum_poles R / (z - zeta) + (1/2 pi i) int M (V - 1) / (s - z) ds`,
    /// skipping the pole `skip` when evaluating a regular part.
    fn evaluate(&self, z: C64, skip: Option<C64>) -> Mat2 {
        let g = &self.jump.z_grid;
        let w = trapezoid_weights(g);
        let mut m = Mat2::IDENTITY;
        for (p, res) in self.jump.poles.iter().zip(&self.residues_upper) {
            if Some(p.z) != skip {
                m += res.scale(1.0 / (z - p.z));
            }
        }
        for (p, res) in self.jump.poles.iter().zip(&self.residues_lower) {
            if Some(p.z_conj) != skip {
                m += res.scale(1.0 / (z - p.z_conj));
            }
        }
        let mut integral = Mat2::ZERO;
        for (j, s) in g.nodes().into_iter().enumerate() {
            let f = self.m_values[j] * (self.jump.v_values[j] - Mat2::IDENTITY);
            integral += f.scale(C64::new(w[j], 0.0) / (s - z));
        }
        m + integral.scale(1.0 / TWO_PI_I)
    }

    /// `m(x, z)` off the real axis. Points within one grid spacing of the
    /// axis are rejected because the quadrature is not accurate there.
    pub fn m_at(&self, z: C64) -> Result<Mat2> {
        let h = self.jump.z_grid.spacing();
        if !z.is_finite() {
            return Err(Error::NonFinite("spectral parameter".into()));
        }
        if z.im.abs() < h {
            return Err(Error::Accuracy(format!("z = {z} is within one grid spacing of the real axis")));
        }
        if self.jump.poles.iter().any(|p| (p.z - z).norm() < 1e-12 || (p.z_conj - z).norm() < 1e-12) {
            return Err(Error::Domain(format!("m has a pole at {z}")));
        }
        Ok(self.evaluate(z, None))
    }

    /// `u(x) = 2i lim z m_12(x, z)` from the residues and the jump integral.
    pub(crate) fn plain_potential(&self) -> C64 {
        let g = &self.jump.z_grid;
        let w = trapezoid_weights(g);
        let poles: C64 = self.residues_lower.iter().map(|r| r.get(0, 1)).sum::<C64>()
            + self.residues_upper.iter().map(|r| r.get(0, 1)).sum::<C64>();
        let integral: C64 = (0..g.len())
            .map(|j| {
                let f = self.m_values[j] * (self.jump.v_values[j] - Mat2::IDENTITY);
                f.get(0, 1) * w[j]
            })
            .sum();
        C64::new(0.0, 2.0) * (poles - integral / TWO_PI_I)
    }

    pub(crate) fn fill_poles(&mut self) {
        let poles: Vec<C64> = self.jump.poles.iter().map(|p| p.z).chain(self.jump.poles.iter().map(|p| p.z_conj)).collect();
        self.m_at_poles = poles.iter().map(|&z| self.evaluate(z, Some(z))).collect();
    }
}

/// Reconstructed potential from a solved slice.
pub fn reconstruct_potential(slice: &RhSolutionSlice, data: &SpectralData, x: f64) -> Result<C64> {
    if slice.x != x || slice.jump.z_grid != *data.z_grid() || slice.jump.poles.len() != data.discrete().len() {
        return Err(Error::Domain("slice was not solved for this data and x".into()));
    }
    Ok(slice.u)
}

/// Discrete form of the singular-integral and algebraic system for one row
/// of `M_x`. Unknowns are `X = M - e_i` on the grid (two components), the
/// residue weights `P_k = (M V)_{i1}(z_k)` and `Q_k = (M V)_{i2}(zbar_k)`.
struct PlainSystem<'a> {
    op: &'a CauchyOperator,
    nodes: &'a [f64],
    weights: &'a [f64],
    w11: Vec<C64>,
    w21: Vec<C64>,
    w12: Vec<C64>,
    zs: Vec<C64>,
    a: Vec<C64>,
    b: Vec<C64>,
}

impl<'a> PlainSystem<'a> {
    fn new(op: &'a CauchyOperator, nodes: &'a [f64], weights: &'a [f64], jump: &JumpData) -> Self {
        let w11 = jump.v_values.iter().map(|v| v.get(0, 0) - 1.0).collect();
        let w21 = jump.v_values.iter().map(|v| v.get(1, 0)).collect();
        let w12 = jump.v_values.iter().map(|v| v.get(0, 1)).collect();
        let zs = jump.poles.iter().map(|p| p.z).collect();
        let a = jump.poles.iter().map(|p| p.upper_weight()).collect();
        let b = jump.poles.iter().map(|p| p.lower_weight()).collect();
        Self { op, nodes, weights, w11, w21, w12, zs, a, b }
    }

    fn n(&self) -> usize {
        self.nodes.len()
    }

    fn poles(&self) -> usize {
        self.zs.len()
    }

    /// Row scalings of the pole equations keeping every coefficient bounded.
    fn theta(&self, k: usize) -> (C64, C64) {
        (self.a[k] / (1.0 + self.a[k].norm()), self.b[k] / (1.0 + self.b[k].norm()))
    }

    fn quad(&self, f: impl Fn(usize) -> C64, z: C64) -> C64 {
        (0..self.n()).map(|j| f(j) * self.weights[j] / (self.nodes[j] - z)).sum::<C64>() / TWO_PI_I
    }

    fn rhs(&self, row: usize) -> Vec<C64> {
        let n = self.n();
        let d1 = if row == 0 { 1.0 } else { 0.0 };
        let d2 = 1.0 - d1;
        let f1: Vec<C64> = (0..n).map(|j| d1 * self.w11[j] + d2 * self.w21[j]).collect();
        let f2: Vec<C64> = (0..n).map(|j| d1 * self.w12[j]).collect();
        let mut out = self.op.minus(&f1);
        out.extend(self.op.minus(&f2));
        for k in 0..self.poles() {
            let (ta, _) = self.theta(k);
            out.push(ta * (d2 + self.quad(|j| f2[j], self.zs[k])));
        }
        for k in 0..self.poles() {
            let (_, tb) = self.theta(k);
            out.push(tb * (d1 + self.quad(|j| f1[j], self.zs[k].conj())));
        }
        out
    }

    fn unpack(&self, row: usize, y: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let n = self.n();
        let (d1, d2) = if row == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
        let m1 = y[..n].iter().map(|v| v + d1).collect();
        let m2 = y[n..2 * n].iter().map(|v| v + d2).collect();
        (m1, m2)
    }
}

impl LinearSystem for PlainSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.n() + 2 * self.poles()
    }

    fn apply(&self, y: &[C64]) -> Vec<C64> {
        let n = self.n();
        let np = self.poles();
        let (x1, rest) = y.split_at(n);
        let (x2, rest) = rest.split_at(n);
        let (p, q) = rest.split_at(np);
        let f1: Vec<C64> = (0..n).map(|j| x1[j] * self.w11[j] + x2[j] * self.w21[j]).collect();
        let f2: Vec<C64> = (0..n).map(|j| x1[j] * self.w12[j]).collect();
        let c1 = self.op.minus(&f1);
        let c2 = self.op.minus(&f2);
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..n {
            let s = self.nodes[j];
            let poles: C64 = (0..np).map(|k| p[k] / (s - self.zs[k])).sum();
            out.push(x1[j] - c1[j] - poles);
        }
        for j in 0..n {
            let s = self.nodes[j];
            let poles: C64 = (0..np).map(|k| q[k] / (s - self.zs[k].conj())).sum();
            out.push(x2[j] - c2[j] - poles);
        }
        for k in 0..np {
            let (ta, _) = self.theta(k);
            let zk = self.zs[k];
            let cross: C64 = (0..np).map(|l| q[l] / (zk - self.zs[l].conj())).sum();
            out.push(p[k] / (1.0 + self.a[k].norm()) - ta * (cross + self.quad(|j| f2[j], zk)));
        }
        for k in 0..np {
            let (_, tb) = self.theta(k);
            let zk = self.zs[k].conj();
            let cross: C64 = (0..np).map(|l| p[l] / (zk - self.zs[l])).sum();
            out.push(q[k] / (1.0 + self.b[k].norm()) - tb * (cross + self.quad(|j| f1[j], zk)));
        }
        out
    }

    fn dense(&self) -> DMatrix<C64> {
        let n = self.n();
        let np = self.poles();
        let dim = self.dim();
        let cm = self.op.dense(-1.0);
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for j in 0..n {
            for l in 0..n {
                m[(j, l)] = -cm[(j, l)] * self.w11[l];
                m[(j, n + l)] = -cm[(j, l)] * self.w21[l];
                m[(n + j, l)] = -cm[(j, l)] * self.w12[l];
            }
            m[(j, j)] += 1.0;
            m[(n + j, n + j)] += 1.0;
            let s = self.nodes[j];
            for k in 0..np {
                m[(j, 2 * n + k)] = -1.0 / (s - self.zs[k]);
                m[(n + j, 2 * n + np + k)] = -1.0 / (s - self.zs[k].conj());
            }
        }
        for k in 0..np {
            let (ta, tb) = self.theta(k);
            let zk = self.zs[k];
            let zc = zk.conj();
            let ra = 2 * n + k;
            let rb = 2 * n + np + k;
            for j in 0..n {
                let wa = self.weights[j] / ((self.nodes[j] - zk) * TWO_PI_I);
                let wb = self.weights[j] / ((self.nodes[j] - zc) * TWO_PI_I);
                m[(ra, j)] = -ta * self.w12[j] * wa;
                m[(rb, j)] = -tb * self.w11[j] * wb;
                m[(rb, n + j)] = -tb * self.w21[j] * wb;
            }
            m[(ra, ra)] = C64::new(1.0 / (1.0 + self.a[k].norm()), 0.0);
            m[(rb, rb)] = C64::new(1.0 / (1.0 + self.b[k].norm()), 0.0);
            for l in 0..np {
                m[(ra, 2 * n + np + l)] = -ta / (zk - self.zs[l].conj());
                m[(rb, 2 * n + l)] = -tb / (zc - self.zs[l]);
            }
        }
        m
    }
}

/// Reusable solver bound to one set of spectral data.
pub struct RhSolver {
    data: SpectralData,
    cfg: RhConfig,
    op: CauchyOperator,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RhSolver {
    pub fn new(data: &SpectralData, cfg: RhConfig) -> Self {
        let g = *data.z_grid();
        Self { data: data.clone(), cfg, op: CauchyOperator::new(g.len()), nodes: g.nodes(), weights: trapezoid_weights(&g) }
    }

    pub fn data(&self) -> &SpectralData {
        &self.data
    }

    pub fn config(&self) -> &RhConfig {
        &self.cfg
    }

    pub(crate) fn cauchy(&self) -> &CauchyOperator {
        &self.op
    }

    pub(crate) fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `|x|` beyond which the stabilized formulation is preferred.
    pub fn crossover(&self) -> f64 {
        self.cfg.crossover.unwrap_or_else(|| {
            let omega = self.data.discrete().iter().map(|e| 2.0 * e.z.im).fold(0.0, f64::max);
            8.0 / (omega + 1.0)
        })
    }

    /// Solve the system with poles appended as extra unknowns.
    pub fn solve(&self, x: f64) -> Result<RhSolutionSlice> {
        if !x.is_finite() {
            return Err(Error::NonFinite("x".into()));
        }
        let jump = build_jump(&self.data, x);
        let sys = PlainSystem::new(&self.op, &self.nodes, &self.weights, &jump);
        let rhs = [sys.rhs(0), sys.rhs(1)];
        let solved = solve(&sys, &rhs, &self.cfg.solver)?;
        let n = sys.n();
        let np = sys.poles();
        let (r1, r2) = (&solved.solutions[0], &solved.solutions[1]);
        let (m11, m12) = sys.unpack(0, r1);
        let (m21, m22) = sys.unpack(1, r2);
        let m_values = (0..n).map(|j| Mat2::new(m11[j], m12[j], m21[j], m22[j])).collect();
        let zero = C64::new(0.0, 0.0);
        let residues_upper = (0..np).map(|k| Mat2::new(r1[2 * n + k], zero, r2[2 * n + k], zero)).collect();
        let residues_lower = (0..np).map(|k| Mat2::new(zero, r1[2 * n + np + k], zero, r2[2 * n + np + k])).collect();
        let mut slice = RhSolutionSlice {
            x,
            jump,
            m_values,
            m_at_poles: Vec::new(),
            residues_upper,
            residues_lower,
            u: C64::new(0.0, 0.0),
            residual: solved.residual,
            iterations: solved.iterations,
        };
        slice.u = slice.plain_potential();
        slice.fill_poles();
        Ok(slice)
    }

    /// Plain solver for `|x|` below the crossover, stabilized beyond it.
    pub fn solve_auto(&self, x: f64) -> Result<RhSolutionSlice> {
        if x.abs() > self.crossover() {
            self.solve_stabilized(x)
        } else {
            self.solve(x)
        }
    }

    /// Reconstructed `u(x)` on a set of points, solved in parallel.
    pub fn sweep(&self, xs: &[f64]) -> Result<Vec<C64>> {
        xs.par_iter().map(|&x| self.solve_auto(x).map(|s| s.u)).collect()
    }
}

/// Solve the RH problem at `x` with the plain formulation.
pub fn solve_rh(data: &SpectralData, x: f64) -> Result<RhSolutionSlice> {
    RhSolver::new(data, RhConfig::default()).solve(x)
}

/// `m(x, z)` for `z` off the real axis.
pub fn rh_matrix_at(data: &SpectralData, x: f64, z: C64) -> Result<Mat2> {
    let h = data.z_grid().spacing();
    if z.im.abs() < h {
        return Err(Error::Accuracy(format!("z = {z} is within one grid spacing of the real axis")));
    }
    RhSolver::new(data, RhConfig::default()).solve_auto(x)?.m_at(z)
}
