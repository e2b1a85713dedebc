use nalgebra::DMatrix;

use super::cauchy::CauchyOperator;
use super::jump::build_jump;
use super::linalg::{solve, LinearSystem};
use super::solver::{RhSolutionSlice, RhSolver};
use crate::error::{Error, Result};
use crate::types::{Mat2, SpectralData};
use crate::C64;

/// `mu_1 = e_i1 + C^{s1}(mu_2 f1)`, `mu_2 = e_i2 + C^{s2}(mu_1 f2)`, written
/// for `Y = mu - e_i`.
struct FactoredSystem<'a> {
    op: &'a CauchyOperator,
    s1: f64,
    f1: Vec<C64>,
    s2: f64,
    f2: Vec<C64>,
}

impl FactoredSystem<'_> {
    fn n(&self) -> usize {
        self.f1.len()
    }

    fn rhs(&self, row: usize) -> Vec<C64> {
        let (d1, d2) = if row == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
        let g1: Vec<C64> = self.f1.iter().map(|f| f * d2).collect();
        let g2: Vec<C64> = self.f2.iter().map(|f| f * d1).collect();
        let mut out = self.op.apply(&g1, self.s1);
        out.extend(self.op.apply(&g2, self.s2));
        out
    }
}

impl LinearSystem for FactoredSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.n()
    }

    fn apply(&self, y: &[C64]) -> Vec<C64> {
        let n = self.n();
        let (y1, y2) = y.split_at(n);
        let g1: Vec<C64> = y2.iter().zip(&self.f1).map(|(a, b)| a * b).collect();
        let g2: Vec<C64> = y1.iter().zip(&self.f2).map(|(a, b)| a * b).collect();
        let c1 = self.op.apply(&g1, self.s1);
        let c2 = self.op.apply(&g2, self.s2);
        y1.iter().zip(c1).map(|(a, b)| a - b).chain(y2.iter().zip(c2).map(|(a, b)| a - b)).collect()
    }

    fn dense(&self) -> DMatrix<C64> {
        let n = self.n();
        let c1 = self.op.dense(self.s1);
        let c2 = self.op.dense(self.s2);
        let mut m = DMatrix::<C64>::identity(2 * n, 2 * n);
        for j in 0..n {
            for l in 0..n {
                m[(j, n + l)] = -c1[(j, l)] * self.f1[l];
                m[(n + j, l)] = -c2[(j, l)] * self.f2[l];
            }
        }
        m
    }
}

/// `delta_{+-} = exp(C^{+-} log(1 + |r|^2))` on the grid.
pub(crate) fn delta_boundary_values(op: &CauchyOperator, data: &SpectralData) -> (Vec<C64>, Vec<C64>) {
    let log: Vec<C64> = data.r_values().iter().map(|r| C64::new(r.norm_sqr().ln_1p(), 0.0)).collect();
    let plus = op.plus(&log).into_iter().map(|v| v.exp()).collect();
    let minus = op.minus(&log).into_iter().map(|v| v.exp()).collect();
    (plus, minus)
}

impl RhSolver {
    /// Solve at `x` after factoring the jump so that every oscillatory
    /// factor decays into the half-plane where it is extended: upper/lower
    /// for `x >= 0`, lower/diagonal/upper with the scalar `delta` for
    /// `x < 0`. Data with discrete spectrum falls back to [`RhSolver::solve`].
    pub fn solve_stabilized(&self, x: f64) -> Result<RhSolutionSlice> {
        if !x.is_finite() {
            return Err(Error::NonFinite("x".into()));
        }
        let data = self.data();
        if !data.discrete().is_empty() {
            return self.solve(x);
        }
        let jump = build_jump(data, x);
        let nodes = self.nodes();
        let n = nodes.len();
        let e: Vec<C64> = nodes.iter().map(|&s| C64::from_polar(1.0, 2.0 * x * s)).collect();
        let r = data.r_values();
        let one = C64::new(1.0, 0.0);

        let (sys, delta_minus) = if x >= 0.0 {
            let f1 = (0..n).map(|j| e[j] * r[j]).collect();
            let f2 = (0..n).map(|j| e[j].conj() * r[j].conj()).collect();
            (FactoredSystem { op: self.cauchy(), s1: -1.0, f1, s2: 1.0, f2 }, None)
        } else {
            let (dp, dm) = delta_boundary_values(self.cauchy(), data);
            let f1 = (0..n).map(|j| e[j] * r[j] / (dm[j] * dm[j] * (1.0 + r[j].norm_sqr()))).collect();
            let f2 = (0..n).map(|j| dp[j] * dp[j] * e[j].conj() * r[j].conj() / (1.0 + r[j].norm_sqr())).collect();
            (FactoredSystem { op: self.cauchy(), s1: 1.0, f1, s2: -1.0, f2 }, Some(dm))
        };
        let solved = solve(&sys, &[sys.rhs(0), sys.rhs(1)], &self.config().solver)?;
        let (r1, r2) = (&solved.solutions[0], &solved.solutions[1]);
        let mu: Vec<Mat2> = (0..n).map(|j| Mat2::new(r1[j] + one, r1[n + j], r2[j], r2[n + j] + one)).collect();

        let weights = self.weights();
        let tail = &sys.f2;
        let integral: C64 = (0..n).map(|j| mu[j].get(0, 0) * tail[j] * weights[j]).sum();
        let u = -integral / std::f64::consts::PI;

        let m_values = match &delta_minus {
            None => (0..n).map(|j| mu[j] * Mat2::upper(-sys.f2[j])).collect(),
            Some(dm) => (0..n).map(|j| mu[j] * Mat2::lower(-sys.f1[j]) * Mat2::diag(dm[j], one / dm[j])).collect(),
        };
        Ok(RhSolutionSlice {
            x,
            jump,
            m_values,
            m_at_poles: Vec::new(),
            residues_upper: Vec::new(),
            residues_lower: Vec::new(),
            u,
            residual: solved.residual,
            iterations: solved.iterations,
        })
    }
}
