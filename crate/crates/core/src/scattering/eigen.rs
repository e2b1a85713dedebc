use serde::{Deserialize, Serialize};

use super::jost::{check_potential, CellPotential, JostKind};
use crate::error::{Error, Result};
use crate::types::ComplexField1D;
use crate::C64;

/// Axis-aligned rectangle inside the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let b = Self { re_min, re_max, im_min, im_max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.re_min, self.re_max, self.im_min, self.im_max];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("search box".into()));
        }
        if self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::Domain("empty search box".into()));
        }
        if self.im_min <= 0.0 {
            return Err(Error::Domain("search box must lie strictly inside the upper half-plane".into()));
        }
        Ok(())
    }

    /// A box holding every eigenvalue the x-grid of `u` can resolve:
    /// `Im z <= sup|u|` bounds the point spectrum of the spectral system.
    pub fn for_potential(u: &ComplexField1D) -> Self {
        let re = (std::f64::consts::FRAC_PI_4 / u.grid().spacing()).min(16.0);
        Self { re_min: -re, re_max: re, im_min: 1e-3, im_max: u.sup_norm() + 0.5 }
    }

    fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }

    fn split(&self, fx: f64, fy: f64) -> [SearchBox; 4] {
        let xm = self.re_min + fx * (self.re_max - self.re_min);
        let ym = self.im_min + fy * (self.im_max - self.im_min);
        [
            SearchBox { re_max: xm, im_max: ym, ..*self },
            SearchBox { re_min: xm, im_max: ym, ..*self },
            SearchBox { re_min: xm, im_min: ym, ..*self },
            SearchBox { re_max: xm, im_min: ym, ..*self },
        ]
    }
}

fn contour_error() -> Error {
    Error::Accuracy("a(z) vanishes on or near the search contour".into())
}

const MAX_PHASE_STEP: f64 = 0.5;
const MIN_SEGMENT: f64 = 1e-9;

/// Net change of `arg f` along a segment, bisecting until each piece turns
/// by less than [`MAX_PHASE_STEP`].
fn phase_change(f: &impl Fn(C64) -> C64, p: C64, q: C64, fp: C64, fq: C64) -> Result<f64> {
    let step = (fq / fp).arg();
    if step.abs() < MAX_PHASE_STEP {
        return Ok(step);
    }
    if (q - p).norm() < MIN_SEGMENT {
        return Err(contour_error());
    }
    let mid = 0.5 * (p + q);
    let fm = f(mid);
    if fm.norm() == 0.0 || !fm.is_finite() {
        return Err(contour_error());
    }
    Ok(phase_change(f, p, mid, fp, fm)? + phase_change(f, mid, q, fm, fq)?)
}

/// Winding number of `f` around the box boundary (argument principle).
pub(crate) fn winding_number(f: &impl Fn(C64) -> C64, b: &SearchBox) -> Result<i64> {
    let corners = b.corners();
    let mut total = 0.0;
    for side in 0..4 {
        let p = corners[side];
        let q = corners[(side + 1) % 4];
        let pieces = 16;
        let mut prev = p;
        let mut fprev = f(p);
        for k in 1..=pieces {
            let next = p + (q - p) * (k as f64 / pieces as f64);
            let fnext = f(next);
            if fnext.norm() == 0.0 || !fnext.is_finite() || fprev.norm() == 0.0 {
                return Err(contour_error());
            }
            total += phase_change(f, prev, next, fprev, fnext)?;
            prev = next;
            fprev = fnext;
        }
    }
    let w = total / std::f64::consts::TAU;
    if (w - w.round()).abs() > 0.1 {
        return Err(contour_error());
    }
    Ok(w.round() as i64)
}

/// Derivative of an analytic function by the four-point rotated stencil,
/// accurate to `O(h^4)`.
pub(crate) fn complex_derivative(f: &impl Fn(C64) -> C64, z: C64, h: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    (f(z + h) - f(z - h) - i * (f(z + i * h) - f(z - i * h))) / (4.0 * h)
}

fn derivative_step(z: C64) -> f64 {
    (1e-5 * (1.0 + z.norm())).min(0.25 * z.im.abs())
}

fn newton(f: &impl Fn(C64) -> C64, mut z: C64) -> Option<C64> {
    for _ in 0..60 {
        let fz = f(z);
        if fz.norm() < 1e-13 {
            return Some(z);
        }
        if z.im <= 0.0 {
            return None;
        }
        let d = complex_derivative(f, z, derivative_step(z));
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let dz = fz / d;
        z -= dz;
        if dz.norm() < 1e-15 * (1.0 + z.norm()) {
            return (f(z).norm() < 1e-10).then_some(z);
        }
    }
    (f(z).norm() < 1e-10).then_some(z)
}

const SPLITS: [(f64, f64); 3] = [(0.5137, 0.4871), (0.4419, 0.5533), (0.5791, 0.4207)];

fn locate(f: &impl Fn(C64) -> C64, b: SearchBox, count: i64, depth: usize, roots: &mut Vec<C64>) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if count == 1 {
        let centre = C64::new(0.5 * (b.re_min + b.re_max), 0.5 * (b.im_min + b.im_max));
        if let Some(z) = newton(f, centre) {
            let pad = 1e-8 * (1.0 + z.norm());
            let grown = SearchBox { re_min: b.re_min - pad, re_max: b.re_max + pad, im_min: b.im_min - pad, im_max: b.im_max + pad };
            if grown.contains(z) {
                roots.push(z);
                return Ok(());
            }
        }
    }
    if depth > 40 {
        return Err(Error::EigenvalueCount { winding: count, roots: roots.len() });
    }
    for (fx, fy) in SPLITS {
        let children = b.split(fx, fy);
        let counts: Result<Vec<i64>> = children.iter().map(|c| winding_number(f, c)).collect();
        if let Ok(counts) = counts {
            if counts.iter().sum::<i64>() == count {
                for (c, n) in children.into_iter().zip(counts) {
                    locate(f, c, n, depth + 1, roots)?;
                }
                return Ok(());
            }
        }
    }
    Err(Error::EigenvalueCount { winding: count, roots: roots.len() })
}

/// Zeros of `a(z)` inside the box, counted by the argument principle and
/// refined by Newton iteration.
pub fn find_eigenvalues(u: &ComplexField1D, search_box: &SearchBox) -> Result<Vec<C64>> {
    check_potential(u)?;
    search_box.validate()?;
    let cells = CellPotential::new(u)?;
    let a = |z: C64| cells.a(z);
    let count = winding_number(&a, search_box)?;
    if count < 0 {
        return Err(Error::EigenvalueCount { winding: count, roots: 0 });
    }
    let mut roots = Vec::new();
    locate(&a, *search_box, count, 0, &mut roots)?;
    if roots.len() as i64 != count {
        return Err(Error::EigenvalueCount { winding: count, roots: roots.len() });
    }
    roots.sort_by(|p, q| p.im.total_cmp(&q.im).reverse().then(p.re.total_cmp(&q.re)));
    Ok(roots)
}

/// Relative residual above which a point is not accepted as an eigenvalue.
pub const PROPORTIONALITY_TOLERANCE: f64 = 1e-6;

/// `c_k = gamma_k / a'(z_k)` where `phi(x, z_k) = gamma_k psi(x, z_k)`.
pub fn norming_constants(u: &ComplexField1D, eigenvalues: &[C64]) -> Result<Vec<C64>> {
    check_potential(u)?;
    let cells = CellPotential::new(u)?;
    let xc = cells.center_x();
    let a = |z: C64| cells.a(z);
    eigenvalues
        .iter()
        .map(|&z| {
            if z.im <= 0.0 {
                return Err(Error::Domain(format!("eigenvalue {z} not in the upper half-plane")));
            }
            let i = C64::new(0.0, 1.0);
            let m1 = cells.at_center(z, JostKind::M1Minus);
            let m2 = cells.at_center(z, JostKind::M2Plus);
            let phi = [m1[0] * (-i * xc * z).exp(), m1[1] * (-i * xc * z).exp()];
            let psi = [m2[0] * (i * xc * z).exp(), m2[1] * (i * xc * z).exp()];
            let num = psi[0].conj() * phi[0] + psi[1].conj() * phi[1];
            let den = psi[0].norm_sqr() + psi[1].norm_sqr();
            let gamma = num / den;
            let resid = ((phi[0] - gamma * psi[0]).norm_sqr() + (phi[1] - gamma * psi[1]).norm_sqr()).sqrt();
            let scale = (phi[0].norm_sqr() + phi[1].norm_sqr()).sqrt();
            if resid > PROPORTIONALITY_TOLERANCE * scale {
                return Err(Error::NotEigenvalue(resid / scale));
            }
            let da = complex_derivative(&a, z, derivative_step(z));
            if da.norm() < 1e-8 {
                return Err(Error::NonSimpleZero(da.norm()));
            }
            Ok(gamma / da)
        })
        .collect()
}
