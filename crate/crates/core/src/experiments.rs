//! End-to-end experiments composed from the library stages: round trips,
//! the Backlund pipeline, and long-time comparisons against split-step runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    asymptotic_norming_constant, radiation_profile, soliton_shift, AsymptoticConfig, TimeDirection,
};
use crate::backlund::{backlund_combine, spectrum_to_params, strip_reflection, BacklundInputs};
use crate::error::{Error, Result};
use crate::flow::{evolve_spectral, Convention};
use crate::integrator::{evolve_reference, IntegratorConfig};
use crate::rh::{RhConfig, RhSolver};
use crate::scattering::{scatter, scattering_ab, reflection_coefficient, ScatteringReport, SearchBox};
use crate::types::{ComplexField1D, RealGrid, SolitonParams, SpectralData};
use crate::C64;

/// A localized bump `epsilon * coefficient * exp(-((x - center)/width)^2) e^{i frequency x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub epsilon: f64,
    pub center: f64,
    pub width: f64,
    pub frequency: f64,
    pub coefficient: C64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self { epsilon: 0.04, center: 1.0, width: 1.0, frequency: 1.5, coefficient: C64::new(1.0, 0.5) }
    }
}

impl Perturbation {
    /// A bump with shape parameters drawn from a seeded generator.
    pub fn random(epsilon: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            epsilon,
            center: rng.gen_range(-2.0..2.0),
            width: rng.gen_range(0.7..1.5),
            frequency: rng.gen_range(-2.0..2.0),
            coefficient: C64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)),
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        let s = (x - self.center) / self.width;
        self.epsilon * self.coefficient * C64::from_polar((-s * s).exp(), self.frequency * x)
    }
}

/// Initial data for an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Datum {
    /// `amplitude sech(x) e^{i frequency x}`.
    Sech { amplitude: f64, frequency: f64 },
    /// A soliton at `t = 0`, optionally with a bump on top.
    Soliton { params: SolitonParams, perturbation: Option<Perturbation> },
    /// Given samples, linearly interpolated and zero outside their grid.
    #[serde(skip)]
    Samples(ComplexField1D),
}

impl Datum {
    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Datum::Sech { amplitude, frequency } => C64::from_polar(amplitude / x.cosh(), frequency * x),
            Datum::Soliton { params, perturbation } => {
                params.evaluate(0.0, x) + perturbation.map_or(C64::new(0.0, 0.0), |p| p.eval(x))
            }
            Datum::Samples(f) => {
                if f.grid().contains(x) {
                    f.linear_interpolate(x).unwrap_or_default()
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn sample(&self, grid: RealGrid) -> Result<ComplexField1D> {
        match self {
            Datum::Samples(f) if *f.grid() == grid => Ok(f.clone()),
            _ => ComplexField1D::from_fn(grid, |x| self.eval(x)),
        }
    }
}

/// Least-squares fit of `log y = log c + p log |t|`; returns `(p, c)`.
pub fn power_law_fit(ts: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if ts.len() != ys.len() || ts.len() < 2 {
        return Err(Error::Domain("a power-law fit needs at least two points".into()));
    }
    if ts.iter().chain(ys).any(|v| !(v.abs() > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("power-law fit needs finite nonzero samples".into()));
    }
    let lx: Vec<f64> = ts.iter().map(|t| t.abs().ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let p = sxy / sxx;
    Ok((p, (my - p * mx).exp()))
}

/// Grid nodes in `[lo, hi]` taken every `stride` points.
pub fn nodes_in(grid: &RealGrid, lo: f64, hi: f64, stride: usize) -> Vec<usize> {
    (0..grid.len()).filter(|&i| grid.node(i) >= lo - 1e-12 && grid.node(i) <= hi + 1e-12).step_by(stride.max(1)).collect()
}

/// Scatter with the default search box for the sampled potential.
pub fn scatter_datum(u: &ComplexField1D, z_grid: &RealGrid) -> Result<(SpectralData, ScatteringReport)> {
    scatter(u, z_grid, &SearchBox::for_potential(u))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundTrip {
    pub report: ScatteringReport,
    pub eigenvalues: usize,
    pub xs: Vec<f64>,
    pub original: Vec<C64>,
    pub reconstructed: Vec<C64>,
    pub max_error: f64,
}

/// Scatter `u0`, then rebuild it by RH solves at the nodes in `[lo, hi]`.
pub fn round_trip(u0: &ComplexField1D, z_grid: &RealGrid, lo: f64, hi: f64, stride: usize) -> Result<RoundTrip> {
    let (data, report) = scatter_datum(u0, z_grid)?;
    let idx = nodes_in(u0.grid(), lo, hi, stride);
    let xs: Vec<f64> = idx.iter().map(|&i| u0.grid().node(i)).collect();
    let original: Vec<C64> = idx.iter().map(|&i| u0.values()[i]).collect();
    let reconstructed = RhSolver::new(&data, RhConfig::default()).sweep(&xs)?;
    let max_error = original.iter().zip(&reconstructed).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(RoundTrip { report, eigenvalues: data.discrete().len(), xs, original, reconstructed, max_error })
}

/// Grids and run settings of [`backlund_pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Grid on which the datum is scattered.
    pub scatter_grid: RealGrid,
    pub z_grid: RealGrid,
    /// Grid of the split-step comparison run; the comparison points are its nodes.
    pub pde_grid: RealGrid,
    pub integrator: IntegratorConfig,
    pub times: Vec<f64>,
    pub window: (f64, f64),
    pub stride: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub z1: C64,
    pub c1: C64,
    pub report: ScatteringReport,
    pub times: Vec<f64>,
    pub gaps: Vec<f64>,
    pub mass_drift: f64,
}

/// Scatter a one-soliton datum, strip the soliton from `r`, evolve the
/// radiation and the soliton data, solve the pole-free RH problem and put
/// the soliton back with the Backlund formula; compare with split-step.
pub fn backlund_pipeline(datum: &Datum, cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    let u0 = datum.sample(cfg.scatter_grid)?;
    let (data, report) = scatter_datum(&u0, &cfg.z_grid)?;
    let [pair] = data.discrete() else {
        return Err(Error::Arity(data.discrete().len()));
    };
    let (z1, c1) = (pair.z, pair.c);
    let r = ComplexField1D::new(cfg.z_grid, data.r_values().to_vec())?;
    let stripped = SpectralData::radiation(cfg.z_grid, strip_reflection(&r, z1)?.into_values())?;

    let run = evolve_reference(&datum.sample(cfg.pde_grid)?, &cfg.integrator, &cfg.times)?;
    let idx = nodes_in(&cfg.pde_grid, cfg.window.0, cfg.window.1, cfg.stride);
    let mut gaps = Vec::with_capacity(cfg.times.len());
    for (&t, snap) in cfg.times.iter().zip(&run.snapshots) {
        let evolved = evolve_spectral(&stripped, t, Convention::PaperR)?;
        let solver = RhSolver::new(&evolved, RhConfig::default());
        let values: Vec<C64> = idx
            .par_iter()
            .map(|&i| {
                let x = cfg.pde_grid.node(i);
                let slice = solver.solve_auto(x)?;
                let m = slice.m_at(z1)?;
                backlund_combine(&BacklundInputs::new(z1, c1, t, x, m)?, slice.u)
            })
            .collect::<Result<_>>()?;
        gaps.push(idx.iter().zip(&values).map(|(&i, v)| (snap.values()[i] - v).norm()).fold(0.0, f64::max));
    }
    Ok(PipelineOutcome { z1, c1, report, times: cfg.times.clone(), gaps, mass_drift: run.mass_drift })
}

/// Best soliton with fixed `(omega, v)` near a predicted `(gamma, x0)`, by
/// compass search on the sup-norm gap inside a window around the soliton.
/// Returns the full-domain gap (the window fit against the field outside).
pub fn fit_soliton(snapshot: &ComplexField1D, t: f64, predicted: &SolitonParams, radius: f64) -> Result<(f64, SolitonParams)> {
    let grid = snapshot.grid();
    let centre = predicted.x0 + 2.0 * predicted.v * t;
    let half = 30.0 / predicted.omega;
    let (inside, outside): (Vec<usize>, Vec<usize>) = (0..grid.len()).partition(|&i| (grid.node(i) - centre).abs() <= half);
    let tail = outside.iter().map(|&i| snapshot.values()[i].norm()).fold(0.0, f64::max);
    let gap = |gamma: f64, x0: f64| -> Result<f64> {
        let p = SolitonParams::new(predicted.omega, gamma, predicted.v, x0)?;
        Ok(inside.iter().map(|&i| (snapshot.values()[i] - p.evaluate(t, grid.node(i))).norm()).fold(0.0, f64::max))
    };
    let (mut g, mut x0) = (predicted.gamma, predicted.x0);
    let mut best = gap(g, x0)?;
    let mut step = radius / 8.0;
    while step > 1e-5 {
        let mut moved = false;
        for (dg, dx) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (cg, cx) = (g + dg, x0 + dx);
            if (cg - predicted.gamma).abs() > radius || (cx - predicted.x0).abs() > radius {
                continue;
            }
            let v = gap(cg, cx)?;
            if v < best {
                (best, g, x0, moved) = (v, cg, cx, true);
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    Ok((best.max(tail), SolitonParams::new(predicted.omega, g, predicted.v, x0)?))
}

/// Settings of [`asymptotic_stability`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub scatter_grid: RealGrid,
    pub z_grid: RealGrid,
    pub pde_grid: RealGrid,
    pub integrator: IntegratorConfig,
    /// Sample times; their sign must agree with `direction`.
    pub times: Vec<f64>,
    pub direction: TimeDirection,
    pub asymptotics: AsymptoticConfig,
    /// Half-width of the `(gamma, x0)` neighbourhood searched around the prediction.
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityOutcome {
    pub z1: C64,
    pub c1: C64,
    pub report: ScatteringReport,
    /// `Delta(z1)` forward, `Lambda(z1)` backward.
    pub shift: C64,
    /// Share of `int log(1 + |r|^2)` lying left of `Re z1`.
    pub left_weight: f64,
    pub predicted: SolitonParams,
    pub fitted: Vec<SolitonParams>,
    pub times: Vec<f64>,
    pub gaps: Vec<f64>,
    pub slope: f64,
    pub prefactor: f64,
    pub mass_drift: f64,
}

/// Distance of a perturbed soliton to the nearest soliton around the
/// asymptotic prediction, and its power-law decay in `|t|`.
pub fn asymptotic_stability(datum: &Datum, cfg: &StabilityConfig) -> Result<StabilityOutcome> {
    let sign = match cfg.direction {
        TimeDirection::Forward => 1.0,
        TimeDirection::Backward => -1.0,
    };
    if cfg.times.iter().any(|t| t * sign <= 0.0) || cfg.integrator.t_end * sign <= 0.0 {
        return Err(Error::Domain("sample times must lie in the chosen time direction".into()));
    }
    let (data, report) = scatter_datum(&datum.sample(cfg.scatter_grid)?, &cfg.z_grid)?;
    let [pair] = data.discrete() else {
        return Err(Error::Arity(data.discrete().len()));
    };
    let shift = soliton_shift(&data, cfg.direction)?;
    let (mut left, mut total) = (0.0, 0.0);
    for (z, r) in data.z_grid().nodes().into_iter().zip(data.r_values()) {
        let w = r.norm_sqr().ln_1p();
        total += w;
        if z < pair.z.re {
            left += w;
        }
    }
    let predicted = spectrum_to_params(pair.z, asymptotic_norming_constant(&data, cfg.direction, &cfg.asymptotics)?)?;
    let run = evolve_reference(&datum.sample(cfg.pde_grid)?, &cfg.integrator, &cfg.times)?;
    let fits: Vec<(f64, SolitonParams)> = cfg
        .times
        .par_iter()
        .zip(&run.snapshots)
        .map(|(&t, snap)| fit_soliton(snap, t, &predicted, cfg.radius))
        .collect::<Result<_>>()?;
    let gaps: Vec<f64> = fits.iter().map(|f| f.0).collect();
    let (slope, prefactor) = power_law_fit(&cfg.times, &gaps)?;
    Ok(StabilityOutcome {
        z1: pair.z,
        c1: pair.c,
        report,
        shift,
        left_weight: left / total,
        predicted,
        fitted: fits.into_iter().map(|f| f.1).collect(),
        times: cfg.times.clone(),
        gaps,
        slope,
        prefactor,
        mass_drift: run.mass_drift,
    })
}

/// Settings of [`radiation_decay`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationConfig {
    pub scatter_grid: RealGrid,
    pub z_grid: RealGrid,
    pub pde_grid: RealGrid,
    pub integrator: IntegratorConfig,
    pub times: Vec<f64>,
    /// Stationary points at which the leading-order profile is compared.
    pub stationary_points: Vec<f64>,
    pub asymptotics: AsymptoticConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiationOutcome {
    pub eigenvalues: usize,
    pub report: ScatteringReport,
    pub times: Vec<f64>,
    /// `sup_x |u(t, x)| sqrt(t)`.
    pub scaled_sup: Vec<f64>,
    /// `(max - min) / max` of `scaled_sup`.
    pub variation: f64,
    /// Largest pointwise gap to the leading-order profile over the stationary points.
    pub pointwise_gaps: Vec<f64>,
    pub exponent: f64,
    pub mass_drift: f64,
}

/// Decay of a solitonless datum against the leading-order radiation profile.
pub fn radiation_decay(datum: &Datum, cfg: &RadiationConfig) -> Result<RadiationOutcome> {
    let u_small = datum.sample(cfg.scatter_grid)?;
    let (probe, report) = scatter_datum(&u_small, &cfg.z_grid)?;
    let eigenvalues = probe.discrete().len();
    if eigenvalues > 0 {
        return Err(Error::Domain(format!("datum carries {eigenvalues} eigenvalue(s)")));
    }
    let r = reflection_coefficient(&scattering_ab(&u_small, &cfg.z_grid)?)?;
    let data = SpectralData::radiation(cfg.z_grid, r)?;
    let run = evolve_reference(&datum.sample(cfg.pde_grid)?, &cfg.integrator, &cfg.times)?;
    let grid = cfg.pde_grid;
    let mut scaled_sup = Vec::new();
    let mut pointwise_gaps = Vec::new();
    for (&t, snap) in cfg.times.iter().zip(&run.snapshots) {
        scaled_sup.push(snap.sup_norm() * t.sqrt());
        let mut gap: f64 = 0.0;
        for &z0 in &cfg.stationary_points {
            let i = grid.nearest_index(-4.0 * t * z0);
            let x = grid.node(i);
            let lead = radiation_profile(&data, t, x, &cfg.asymptotics)?.value;
            gap = gap.max((snap.values()[i] - lead).norm());
        }
        pointwise_gaps.push(gap);
    }
    let hi = scaled_sup.iter().cloned().fold(0.0, f64::max);
    let lo = scaled_sup.iter().cloned().fold(f64::INFINITY, f64::min);
    let (exponent, _) = power_law_fit(&cfg.times, &pointwise_gaps)?;
    Ok(RadiationOutcome {
        eigenvalues,
        report,
        times: cfg.times.clone(),
        scaled_sup,
        variation: (hi - lo) / hi,
        pointwise_gaps,
        exponent,
        mass_drift: run.mass_drift,
    })
}
