use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// A square linear operator available both matrix-free and as a dense matrix.
pub(crate) trait LinearSystem: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, y: &[C64]) -> Vec<C64>;
    fn dense(&self) -> DMatrix<C64>;
}

/// Solver settings shared by the plain and stabilized RH solvers.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverConfig {
    /// Largest number of unknowns solved by dense LU; above this GMRES is used.
    pub dense_limit: usize,
    pub gmres_tol: f64,
    pub gmres_restart: usize,
    pub max_iterations: usize,
    /// Largest accepted relative residual of the discrete system.
    pub residual_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { dense_limit: 700, gmres_tol: 1e-13, gmres_restart: 80, max_iterations: 2000, residual_tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Solved {
    pub(crate) solutions: Vec<Vec<C64>>,
    pub(crate) residual: f64,
    pub(crate) iterations: usize,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn relative_residual(sys: &impl LinearSystem, x: &[C64], b: &[C64]) -> f64 {
    let ax = sys.apply(x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    let nb = norm(b);
    if nb == 0.0 {
        norm(&r)
    } else {
        norm(&r) / nb
    }
}

/// Solve `A y = b` for every right-hand side, densely when small and by
/// restarted GMRES otherwise (or when the factorisation fails).
pub(crate) fn solve(sys: &impl LinearSystem, rhs: &[Vec<C64>], cfg: &SolverConfig) -> Result<Solved> {
    let n = sys.dim();
    let mut condition = f64::NAN;
    if n <= cfg.dense_limit {
        let lu = sys.dense().lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..n).map(|k| u[(k, k)].norm()).collect();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &d| (l.min(d), h.max(d)));
        condition = hi / lo;
        if lo > 0.0 && condition.is_finite() {
            let mut solutions = Vec::with_capacity(rhs.len());
            let mut residual = 0.0f64;
            for b in rhs {
                if let Some(x) = lu.solve(&DVector::from_column_slice(b)) {
                    let x: Vec<C64> = x.iter().copied().collect();
                    residual = residual.max(relative_residual(sys, &x, b));
                    solutions.push(x);
                }
            }
            if solutions.len() == rhs.len() && residual <= cfg.residual_tol {
                return Ok(Solved { solutions, residual, iterations: 0 });
            }
        }
    }
    let mut solutions = Vec::with_capacity(rhs.len());
    let mut residual = 0.0f64;
    let mut iterations = 0;
    for b in rhs {
        let (x, its) = gmres(|y| sys.apply(y), b, cfg.gmres_tol, cfg.gmres_restart, cfg.max_iterations);
        iterations = iterations.max(its);
        residual = residual.max(relative_residual(sys, &x, b));
        solutions.push(x);
    }
    if !(residual <= cfg.residual_tol) {
        return Err(Error::IllConditioned { residual, condition });
    }
    Ok(Solved { solutions, residual, iterations })
}

/// Complex Givens rotation `(c, s)` zeroing `b` in `[a; b]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b.norm() == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = a.norm().hypot(b.norm());
    (a.norm() / r, a / a.norm() * b.conj() / r)
}

/// Restarted GMRES with modified Gram-Schmidt Arnoldi; returns the iterate
/// and the number of inner iterations.
pub(crate) fn gmres(apply: impl Fn(&[C64]) -> Vec<C64>, b: &[C64], tol: f64, restart: usize, max_iter: usize) -> (Vec<C64>, usize) {
    let n = b.len();
    let mut x = vec![C64::new(0.0, 0.0); n];
    let nb = norm(b);
    if nb == 0.0 {
        return (x, 0);
    }
    let restart = restart.max(1).min(n.max(1));
    let mut total = 0;
    while total < max_iter {
        let ax = apply(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let beta = norm(&r);
        if beta <= tol * nb {
            break;
        }
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![C64::new(0.0, 0.0); restart]; restart + 1];
        let mut rot: Vec<(f64, C64)> = Vec::with_capacity(restart);
        let mut g = vec![C64::new(0.0, 0.0); restart + 1];
        g[0] = C64::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..restart {
            total += 1;
            let mut w = apply(&basis[k]);
            for (j, v) in basis.iter().enumerate() {
                let hjk: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                h[j][k] = hjk;
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= hjk * vi);
            }
            let hn = norm(&w);
            h[k + 1][k] = C64::new(hn, 0.0);
            for (j, &(c, s)) in rot.iter().enumerate() {
                let (a, bb) = (h[j][k], h[j + 1][k]);
                h[j][k] = c * a + s * bb;
                h[j + 1][k] = -s.conj() * a + c * bb;
            }
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            let (a, bb) = (h[k][k], h[k + 1][k]);
            h[k][k] = c * a + s * bb;
            h[k + 1][k] = C64::new(0.0, 0.0);
            rot.push((c, s));
            let gk = g[k];
            g[k] = c * gk;
            g[k + 1] = -s.conj() * gk;
            k_used = k + 1;
            if g[k + 1].norm() <= tol * nb || hn == 0.0 || total >= max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        let mut yk = vec![C64::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut acc = g[i];
            for j in i + 1..k_used {
                acc -= h[i][j] * yk[j];
            }
            yk[i] = acc / h[i][i];
        }
        for (j, coef) in yk.iter().enumerate() {
            x.iter_mut().zip(&basis[j]).for_each(|(xi, vj)| *xi += coef * vj);
        }
        if g[k_used].norm() <= tol * nb {
            break;
        }
    }
    (x, total)
}
