//! Split-step Fourier integrator for `i u_t + u_xx + 2|u|^2 u = 0`.
//!
//! The free flow is exact in frequency space and the nonlinear flow is an
//! exact pointwise phase rotation, so every sub-step is an `L^2` isometry.
//! The grid is periodic with the last node identified with the first.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ComplexField1D, RealGrid};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitScheme {
    StrangSplit,
    FourthOrderSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: SplitScheme,
    #[serde(default)]
    pub dealias: bool,
    /// Largest tolerated modulus at the periodic seam.
    #[serde(default = "default_wrap_tolerance")]
    pub wrap_tolerance: f64,
    /// Re-run with `dt / 2` and report the snapshot differences.
    #[serde(default)]
    pub error_estimate: bool,
}

fn default_wrap_tolerance() -> f64 {
    1e-3
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            scheme: SplitScheme::StrangSplit,
            dealias: false,
            wrap_tolerance: default_wrap_tolerance(),
            error_estimate: false,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Domain(format!("time step must be positive, got {}", self.dt)));
        }
        if !self.t_end.is_finite() {
            return Err(Error::NonFinite("t_end".into()));
        }
        Ok(())
    }

    /// `dt * k_max^2`, the phase advance of the highest resolved mode per step.
    pub fn stability_number(&self, grid: &RealGrid) -> f64 {
        let k_max = std::f64::consts::PI / grid.spacing();
        self.dt * k_max * k_max
    }
}

/// Reusable split-step propagator bound to one grid.
pub struct SplitStep {
    grid: RealGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    mask: Option<Vec<bool>>,
    scratch: Vec<C64>,
    work: Vec<C64>,
    cached_dt: f64,
    cached_phase: Vec<C64>,
}

impl SplitStep {
    pub fn new(grid: RealGrid, dealias: bool) -> Self {
        let m = grid.len() - 1;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let period = grid.x_max() - grid.x_min();
        let wavenumbers: Vec<f64> = (0..m)
            .map(|j| {
                let j = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
                std::f64::consts::TAU * j / period
            })
            .collect();
        let mask = dealias.then(|| {
            let k_max = wavenumbers.iter().fold(0.0f64, |a, k| a.max(k.abs()));
            wavenumbers.iter().map(|k| k.abs() <= 2.0 * k_max / 3.0).collect()
        });
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            wavenumbers,
            mask,
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
            work: vec![C64::new(0.0, 0.0); m],
            cached_dt: f64::NAN,
            cached_phase: Vec::new(),
        }
    }

    /// Free flow in increment form `u + F^{-1}[(e^{-ik^2 dt} - 1) F u]`, so FFT
    /// round-off scales with the change rather than with `u` (keeps the mass
    /// drift of long runs near the unit round-off per step times `|k|^2 dt`).
    fn linear(&mut self, u: &mut [C64], dt: f64) {
        if dt != self.cached_dt {
            let norm = 1.0 / u.len() as f64;
            self.cached_phase = self
                .wavenumbers
                .iter()
                .enumerate()
                .map(|(j, k)| {
                    if self.mask.as_ref().is_some_and(|m| !m[j]) {
                        return C64::new(-norm, 0.0);
                    }
                    // e^{-i theta} - 1 = -2 sin(theta/2) (sin(theta/2) + i cos(theta/2))
                    let half = 0.5 * k * k * dt;
                    let (s, c) = half.sin_cos();
                    C64::new(-2.0 * s * s, -2.0 * s * c) * norm
                })
                .collect();
            self.cached_dt = dt;
        }
        self.work.copy_from_slice(u);
        self.forward.process_with_scratch(&mut self.work, &mut self.scratch);
        for (v, p) in self.work.iter_mut().zip(&self.cached_phase) {
            *v *= p;
        }
        self.inverse.process_with_scratch(&mut self.work, &mut self.scratch);
        for (v, w) in u.iter_mut().zip(&self.work) {
            *v += w;
        }
    }

    fn nonlinear(u: &mut [C64], dt: f64) {
        for v in u.iter_mut() {
            *v *= C64::from_polar(1.0, 2.0 * v.norm_sqr() * dt);
        }
    }

    fn strang(&mut self, u: &mut [C64], dt: f64) {
        Self::nonlinear(u, 0.5 * dt);
        self.linear(u, dt);
        Self::nonlinear(u, 0.5 * dt);
    }

    /// Advance the periodic samples (without the seam node) by `dt`.
    pub fn advance(&mut self, u: &mut [C64], dt: f64, scheme: SplitScheme) {
        match scheme {
            SplitScheme::StrangSplit => self.strang(u, dt),
            SplitScheme::FourthOrderSplit => {
                let cbrt2 = 2f64.powf(1.0 / 3.0);
                let w1 = 1.0 / (2.0 - cbrt2);
                let w0 = -cbrt2 * w1;
                self.strang(u, w1 * dt);
                self.strang(u, w0 * dt);
                self.strang(u, w1 * dt);
            }
        }
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }
}

fn check_wrap(u: &ComplexField1D, tol: f64) -> Result<()> {
    let edge = u.edge_magnitude();
    if edge > tol {
        return Err(Error::DomainTooSmall(edge));
    }
    Ok(())
}

fn periodic_part(u: &ComplexField1D) -> Vec<C64> {
    let v = u.values();
    v[..v.len() - 1].to_vec()
}

fn close_seam(grid: RealGrid, mut v: Vec<C64>) -> Result<ComplexField1D> {
    v.push(v[0]);
    ComplexField1D::new(grid, v)
}

/// One split step of size `dt` (negative `dt` integrates backwards).
pub fn step(u: &ComplexField1D, dt: f64, scheme: SplitScheme) -> Result<ComplexField1D> {
    check_wrap(u, default_wrap_tolerance())?;
    let mut stepper = SplitStep::new(*u.grid(), false);
    let mut v = periodic_part(u);
    stepper.advance(&mut v, dt, scheme);
    close_seam(*u.grid(), v)
}

/// Snapshots of a reference run together with run diagnostics.
#[derive(Debug, Clone)]
pub struct ReferenceRun {
    pub times: Vec<f64>,
    pub snapshots: Vec<ComplexField1D>,
    /// Sup-norm difference against a run with half the step, per snapshot.
    pub temporal_error: Option<Vec<f64>>,
    /// Largest relative mass deviation over all snapshots.
    pub mass_drift: f64,
}

fn integrate(u0: &ComplexField1D, cfg: &IntegratorConfig, dt: f64, times: &[f64]) -> Result<Vec<ComplexField1D>> {
    let grid = *u0.grid();
    let mut stepper = SplitStep::new(grid, cfg.dealias);
    let mut v = periodic_part(u0);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    let dir = if cfg.t_end < 0.0 { -1.0 } else { 1.0 };
    for &target in times {
        let span = (target - t) * dir;
        if span < -1e-12 {
            return Err(Error::Domain("sample times must be monotone towards t_end".into()));
        }
        let n_steps = (span / dt - 1e-9).ceil().max(0.0) as usize;
        if n_steps > 0 {
            let h = dir * span / n_steps as f64;
            for k in 0..n_steps {
                stepper.advance(&mut v, h, cfg.scheme);
                if k % 64 == 0 {
                    let edge = v[0].norm();
                    if edge > cfg.wrap_tolerance {
                        return Err(Error::DomainTooSmall(edge));
                    }
                }
            }
        }
        t = target;
        let snap = close_seam(grid, v.clone())?;
        check_wrap(&snap, cfg.wrap_tolerance)?;
        out.push(snap);
    }
    Ok(out)
}

/// Integrate `u0` and return snapshots at `sample_times`.
///
/// Sample times must be ordered from 0 towards `cfg.t_end`, which may be
/// negative for backward runs.
pub fn evolve_reference(u0: &ComplexField1D, cfg: &IntegratorConfig, sample_times: &[f64]) -> Result<ReferenceRun> {
    cfg.validate()?;
    check_wrap(u0, cfg.wrap_tolerance)?;
    let (lo, hi) = if cfg.t_end < 0.0 { (cfg.t_end, 0.0) } else { (0.0, cfg.t_end) };
    if let Some(t) = sample_times.iter().find(|t| **t < lo - 1e-12 || **t > hi + 1e-12 || !t.is_finite()) {
        return Err(Error::OutOfRange { value: *t, min: lo, max: hi });
    }
    let snapshots = integrate(u0, cfg, cfg.dt, sample_times)?;
    let temporal_error = if cfg.error_estimate {
        let fine = integrate(u0, cfg, 0.5 * cfg.dt, sample_times)?;
        Some(
            snapshots
                .iter()
                .zip(&fine)
                .map(|(a, b)| a.values().iter().zip(b.values()).fold(0.0f64, |m, (p, q)| m.max((p - q).norm())))
                .collect(),
        )
    } else {
        None
    };
    let (m0, _) = conserved_quantities(u0);
    let mass_drift = snapshots
        .iter()
        .map(|s| ((conserved_quantities(s).0 - m0) / m0.max(f64::MIN_POSITIVE)).abs())
        .fold(0.0, f64::max);
    Ok(ReferenceRun { times: sample_times.to_vec(), snapshots, temporal_error, mass_drift })
}

/// Mass `int |u|^2` and energy `int (|u_x|^2 - |u|^4)` by the trapezoid rule,
/// with the derivative taken spectrally on the periodic grid.
pub fn conserved_quantities(u: &ComplexField1D) -> (f64, f64) {
    let grid = *u.grid();
    let mass = grid.trapezoid_real(&u.values().iter().map(|v| v.norm_sqr()).collect::<Vec<_>>());
    let m = grid.len() - 1;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut w = periodic_part(u);
    fwd.process(&mut w);
    let period = grid.x_max() - grid.x_min();
    for (j, v) in w.iter_mut().enumerate() {
        let jj = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
        let k = std::f64::consts::TAU * jj / period;
        // The Nyquist mode has no well-defined derivative on an even grid.
        let k = if m.is_multiple_of(2) && j == m / 2 { 0.0 } else { k };
        *v *= C64::new(0.0, k) / m as f64;
    }
    inv.process(&mut w);
    let mut dens: Vec<f64> = w
        .iter()
        .zip(u.values())
        .map(|(ux, v)| ux.norm_sqr() - v.norm_sqr() * v.norm_sqr())
        .collect();
    dens.push(dens[0]);
    let energy = grid.trapezoid_real(&dens);
    (mass, energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::SolitonParams;

    fn soliton_field(grid: RealGrid, p: &SolitonParams, t: f64) -> ComplexField1D {
        ComplexField1D::from_fn(grid, |x| p.evaluate(t, x)).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let g = RealGrid::symmetric(10.0, 65).unwrap();
        let u = step(&ComplexField1D::zeros(g), 0.01, SplitScheme::StrangSplit).unwrap();
        assert_eq!(u.sup_norm(), 0.0);
    }

    #[test]
    fn unit_soliton_mass_is_two() {
        let g = RealGrid::symmetric(30.0, 2049).unwrap();
        let u = soliton_field(g, &SolitonParams::new(1.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        let (mass, energy) = conserved_quantities(&u);
        assert!((mass - 2.0).abs() < 1e-10, "mass {mass}");
        // int sech^2 tanh^2 - sech^4 = 2/3 - 4/3
        assert!((energy + 2.0 / 3.0).abs() < 1e-9, "energy {energy}");
        assert_eq!(conserved_quantities(&ComplexField1D::zeros(g)), (0.0, 0.0));
    }

    #[test]
    fn exact_soliton_is_preserved() {
        let g = RealGrid::symmetric(30.0, 1025).unwrap();
        let p = SolitonParams::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let cfg = IntegratorConfig { dt: 1e-3, t_end: 1.0, ..Default::default() };
        let run = evolve_reference(&soliton_field(g, &p, 0.0), &cfg, &[0.0, 1.0]).unwrap();
        assert_eq!(run.snapshots[0], soliton_field(g, &p, 0.0));
        let exact = soliton_field(g, &p, 1.0);
        let err = run.snapshots[1].values().iter().zip(exact.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-6, "soliton error {err}");
    }

    #[test]
    fn moving_soliton_with_fourth_order_scheme() {
        let g = RealGrid::symmetric(40.0, 2049).unwrap();
        let p = SolitonParams::new(1.3, 0.4, 0.6, -3.0).unwrap();
        let cfg = IntegratorConfig { dt: 2.5e-3, t_end: 2.0, scheme: SplitScheme::FourthOrderSplit, ..Default::default() };
        let run = evolve_reference(&soliton_field(g, &p, 0.0), &cfg, &[2.0]).unwrap();
        let exact = soliton_field(g, &p, 2.0);
        let err = run.snapshots[0].values().iter().zip(exact.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-7, "soliton error {err}");
    }

    #[test]
    fn mass_is_conserved_over_many_steps() {
        let g = RealGrid::symmetric(60.0, 1025).unwrap();
        let u0 = ComplexField1D::from_fn(g, |x| C64::new(1.0 / x.cosh(), 0.05 * (-x * x).exp())).unwrap();
        let cfg = IntegratorConfig { dt: 1e-3, t_end: 10.0, ..Default::default() };
        let run = evolve_reference(&u0, &cfg, &[10.0]).unwrap();
        let drift = (run.snapshots[0].l2_norm() - u0.l2_norm()).abs();
        assert!(drift < 1e-12, "norm drift {drift}");
        assert!(run.mass_drift < 1e-10);
    }

    #[test]
    fn strang_converges_at_second_order() {
        let g = RealGrid::symmetric(30.0, 513).unwrap();
        let u0 = ComplexField1D::from_fn(g, |x| C64::new(1.4 / x.cosh(), 0.0)).unwrap();
        let run = |dt: f64| {
            let cfg = IntegratorConfig { dt, t_end: 1.0, ..Default::default() };
            evolve_reference(&u0, &cfg, &[1.0]).unwrap().snapshots.remove(0)
        };
        let reference = run(0.025 / 4.0);
        let dist = |a: &ComplexField1D| a.values().iter().zip(reference.values()).fold(0.0f64, |m, (p, q)| m.max((p - q).norm()));
        let ratio = dist(&run(0.05)) / dist(&run(0.025));
        assert!(ratio > 3.0 && ratio < 6.0, "ratio {ratio}");
    }

    #[test]
    fn time_reversal_returns_conjugate_datum() {
        let g = RealGrid::symmetric(30.0, 513).unwrap();
        let u0 = ComplexField1D::from_fn(g, |x| C64::new(1.1 / x.cosh(), 0.2 * x * (-x * x).exp())).unwrap();
        let cfg = IntegratorConfig { dt: 2e-3, t_end: 2.0, scheme: SplitScheme::FourthOrderSplit, ..Default::default() };
        let u_t = evolve_reference(&u0, &cfg, &[2.0]).unwrap().snapshots.remove(0);
        let back = evolve_reference(&u_t.map(|_, v| v.conj()).unwrap(), &cfg, &[2.0]).unwrap().snapshots.remove(0);
        let err = back.values().iter().zip(u0.values()).fold(0.0f64, |m, (a, b)| m.max((a - b.conj()).norm()));
        assert!(err < 1e-8, "reversal error {err}");
    }

    #[test]
    fn wide_datum_is_rejected() {
        let g = RealGrid::symmetric(3.0, 65).unwrap();
        let u0 = ComplexField1D::from_fn(g, |x| C64::new(1.0 / x.cosh(), 0.0)).unwrap();
        assert!(matches!(step(&u0, 0.01, SplitScheme::StrangSplit), Err(Error::DomainTooSmall(_))));
    }
}
