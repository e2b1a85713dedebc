//! Cauchy integrals of `log(1 + |r|^2)` over half-lines.
//!
//! The samples are interpolated by local cubics and each cubic piece is
//! integrated against `1/(s - z)` in closed form near the singularity and by
//! Gauss-Legendre away from it, so points close to the cut and the
//! subtracted integrand of `beta(z0, z0)` are handled without loss.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::types::{RealGrid, SpectralData};
use crate::C64;

const GAUSS_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GAUSS_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// `log(1 + |r|^2)` on the z-grid, with `r` kept for interpolation.
#[derive(Debug, Clone)]
pub(crate) struct CutDensity {
    grid: RealGrid,
    r: Vec<C64>,
    g: Vec<f64>,
}

/// The `chi` subtraction of `beta`: `g0 (s - z0 + 1)` on `[z0 - 1, z0]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Subtraction {
    pub(crate) z0: f64,
    pub(crate) g0: f64,
}

impl CutDensity {
    pub(crate) fn new(data: &SpectralData) -> Self {
        Self::from_samples(*data.z_grid(), data.r_values().to_vec())
    }

    pub(crate) fn from_samples(grid: RealGrid, r: Vec<C64>) -> Self {
        let g = r.iter().map(|v| v.norm_sqr().ln_1p()).collect();
        Self { grid, r, g }
    }

    pub(crate) fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.g.iter().all(|&v| v == 0.0)
    }

    /// First node of the four-point stencil used on cell `j`.
    fn stencil(&self, j: usize) -> usize {
        let n = self.grid.len();
        if n < 4 {
            return 0;
        }
        j.saturating_sub(1).min(n - 4)
    }

    /// Power coefficients in `t` of the cubic through the stencil of cell `j`.
    fn cubic(&self, j: usize, values: &[f64]) -> [f64; 4] {
        let n = self.grid.len();
        let s0 = self.stencil(j);
        let m = n.min(4);
        let ts: Vec<f64> = (0..m).map(|k| (s0 + k) as f64 - j as f64).collect();
        let ys: Vec<f64> = (0..m).map(|k| values[s0 + k]).collect();
        // Newton divided differences, then expand to powers of t.
        let mut dd = ys.clone();
        for level in 1..m {
            for k in (level..m).rev() {
                dd[k] = (dd[k] - dd[k - 1]) / (ts[k] - ts[k - level]);
            }
        }
        let mut coeffs = [0.0; 4];
        let mut basis = [1.0, 0.0, 0.0, 0.0];
        for k in 0..m {
            for p in 0..4 {
                coeffs[p] += dd[k] * basis[p];
            }
            // basis *= (t - ts[k])
            let mut next = [0.0; 4];
            for p in 0..4 {
                if p > 0 {
                    next[p] += basis[p - 1];
                }
                next[p] -= ts[k] * basis[p];
            }
            basis = next;
        }
        coeffs
    }

    fn locate(&self, s: f64) -> Option<(usize, f64)> {
        if !(s >= self.grid.x_min() && s <= self.grid.x_max()) {
            return None;
        }
        let j = self.grid.cell_index(s);
        Some((j, (s - self.grid.node(j)) / self.grid.spacing()))
    }

    /// Interpolated `log(1 + |r|^2)`, zero off the grid.
    pub(crate) fn density_at(&self, s: f64) -> f64 {
        match self.locate(s) {
            Some((j, t)) => horner(&self.cubic(j, &self.g), t),
            None => 0.0,
        }
    }

    /// Interpolated `r`, zero off the grid.
    pub(crate) fn reflection_at(&self, s: f64) -> C64 {
        match self.locate(s) {
            Some((j, t)) => {
                let re: Vec<f64> = self.r.iter().map(|v| v.re).collect();
                let im: Vec<f64> = self.r.iter().map(|v| v.im).collect();
                C64::new(horner(&self.cubic(j, &re), t), horner(&self.cubic(j, &im), t))
            }
            None => C64::new(0.0, 0.0),
        }
    }

    /// `(1/2 pi i) int_a^b (g(s) - sub(s)) / (s - z) ds`; `a`, `b` may be
    /// infinite (the density vanishes off the grid).
    pub(crate) fn integral(&self, a: f64, b: f64, z: C64, sub: Option<Subtraction>) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        let (lo, hi) = (a.max(self.grid.x_min()), b.min(self.grid.x_max()));
        let h = self.grid.spacing();
        if lo < hi {
            let mut breaks = vec![lo, hi];
            if let Some(s) = sub {
                for p in [s.z0 - 1.0, s.z0] {
                    if p > lo && p < hi {
                        breaks.push(p);
                    }
                }
            }
            let first = self.grid.cell_index(lo);
            let last = self.grid.cell_index(hi);
            for j in first..=last {
                let node = self.grid.node(j);
                if node > lo && node < hi {
                    breaks.push(node);
                }
            }
            breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
            breaks.dedup();
            for w in breaks.windows(2) {
                let (pa, pb) = (w[0], w[1]);
                if pb - pa <= 0.0 {
                    continue;
                }
                let j = self.grid.cell_index(0.5 * (pa + pb));
                let node = self.grid.node(j);
                let mut c = self.cubic(j, &self.g);
                if let Some(s) = sub {
                    let mid = 0.5 * (pa + pb);
                    if mid > s.z0 - 1.0 && mid < s.z0 {
                        c[0] -= s.g0 * (node - s.z0 + 1.0);
                        c[1] -= s.g0 * h;
                    }
                }
                let tau = (z - node) / h;
                total += piece(&c, (pa - node) / h, (pb - node) / h, tau);
            }
        }
        // The subtraction continues where the density has been cut off.
        if let Some(s) = sub {
            let (sa, sb) = ((s.z0 - 1.0).max(a), s.z0.min(b));
            let uncovered = if lo < hi { [(sa, sb.min(lo)), (sa.max(hi), sb)] } else { [(sa, sb), (0.0, 0.0)] };
            for (pa, pb) in uncovered {
                if pb > pa {
                    total -= s.g0 * linear_piece(pa, pb, s.z0, z);
                }
            }
        }
        total / C64::new(0.0, 2.0 * PI)
    }
}

fn horner(c: &[f64; 4], t: f64) -> f64 {
    ((c[3] * t + c[2]) * t + c[1]) * t + c[0]
}

fn horner_c(c: &[f64; 4], t: C64) -> C64 {
    ((c[3] * t + c[2]) * t + c[1]) * t + c[0]
}

/// `int_{ta}^{tb} q(t) / (t - tau) dt` for the cubic `q`.
fn piece(c: &[f64; 4], ta: f64, tb: f64, tau: C64) -> C64 {
    let len = tb - ta;
    let dist = if tau.re < ta {
        C64::new(ta - tau.re, tau.im).norm()
    } else if tau.re > tb {
        C64::new(tau.re - tb, tau.im).norm()
    } else {
        tau.im.abs()
    };
    if dist > 2.0 * len {
        let (mid, half) = (0.5 * (ta + tb), 0.5 * len);
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            for t in [mid - half * x, mid + half * x] {
                acc += w * horner(c, t) / (t - tau);
            }
        }
        return acc * half;
    }
    // (q(t) - q(tau)) / (t - tau) = sum_k c_k sum_{m<k} t^m tau^{k-1-m}
    let mut regular = C64::new(0.0, 0.0);
    for k in 1..4 {
        for m in 0..k {
            let span = (tb.powi(m as i32 + 1) - ta.powi(m as i32 + 1)) / (m + 1) as f64;
            regular += c[k] * tau.powu((k - 1 - m) as u32) * span;
        }
    }
    let q_tau = horner_c(c, tau);
    let (ea, eb) = (ta - tau, tb - tau);
    if ea.norm() == 0.0 || eb.norm() == 0.0 {
        // Endpoint singularity: only reached with a vanishing numerator.
        return regular;
    }
    regular + q_tau * (eb / ea).ln()
}

/// `int_a^b (s - z0 + 1) / (s - z) ds` in closed form.
fn linear_piece(a: f64, b: f64, z0: f64, z: C64) -> C64 {
    let (ea, eb) = (a - z, b - z);
    let log = if ea.norm() == 0.0 || eb.norm() == 0.0 { C64::new(0.0, 0.0) } else { (eb / ea).ln() };
    (b - a) + (z - z0 + 1.0) * log
}

/// Distance from `z` to the half-line `(-inf, z0]` (or `[z0, inf)` when `right`).
pub(crate) fn distance_to_cut(z: C64, z0: f64, right: bool) -> f64 {
    let beyond = if right { z.re < z0 } else { z.re > z0 };
    if beyond {
        C64::new(z.re - z0, z.im).norm()
    } else {
        z.im.abs()
    }
}

pub(crate) fn check_off_cut(density: &CutDensity, z: C64, z0: f64, right: bool) -> Result<()> {
    if !z.is_finite() || !z0.is_finite() {
        return Err(Error::NonFinite("cut integral arguments".into()));
    }
    let d = distance_to_cut(z, z0, right);
    if d < density.spacing() {
        return Err(Error::Accuracy(format!(
            "z = {z} is {d:.3e} from the cut, below the grid spacing {:.3e}",
            density.spacing()
        )));
    }
    Ok(())
}
