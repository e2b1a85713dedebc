//! Executes manifests and the single-stage CLI operations, producing a
//! JSON report whose rows cite the acceptance criteria they support.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asymptotics::{asymptotic_soliton, radiation_profile, AsymptoticConfig, TimeDirection};
use crate::error::{Error, Result};
use crate::experiments::{
    asymptotic_stability, backlund_pipeline, nodes_in, radiation_decay, round_trip, scatter_datum, PipelineConfig,
    RadiationConfig, StabilityConfig,
};
use crate::flow::{evolve_spectral, Convention};
use crate::integrator::{evolve_reference, IntegratorConfig};
use crate::io::{load_spectral, save_field, save_spectral, save_table};
use crate::manifest::{ExperimentKind, ExperimentManifest};
use crate::rh::{RhConfig, RhSolver};
use crate::types::{ComplexField1D, RealGrid, SpectralData};
use crate::validation;
use crate::C64;

/// One measured quantity, with its limit when it is a pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub criterion: String,
    pub quantity: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub rows: Vec<ReportRow>,
    pub outputs: Vec<PathBuf>,
    pub errors: Vec<StageError>,
    pub passed: bool,
}

impl ExperimentReport {
    fn new(kind: ExperimentKind) -> Self {
        Self { kind, rows: Vec::new(), outputs: Vec::new(), errors: Vec::new(), passed: true }
    }

    pub fn info(&mut self, criterion: &str, quantity: impl Into<String>, value: f64) {
        self.rows.push(ReportRow { criterion: criterion.into(), quantity: quantity.into(), value, limit: None, passed: None });
    }

    pub fn below(&mut self, criterion: &str, quantity: impl Into<String>, value: f64, bound: f64) {
        self.check(criterion, quantity, value, format!("< {bound:e}"), value < bound);
    }

    pub fn within(&mut self, criterion: &str, quantity: impl Into<String>, value: f64, lo: f64, hi: f64) {
        self.check(criterion, quantity, value, format!("[{lo}, {hi}]"), (lo..=hi).contains(&value));
    }

    fn check(&mut self, criterion: &str, quantity: impl Into<String>, value: f64, limit: String, ok: bool) {
        self.passed &= ok;
        let row = ReportRow { criterion: criterion.into(), quantity: quantity.into(), value, limit: Some(limit), passed: Some(ok) };
        self.rows.push(row);
    }

    fn error(&mut self, stage: &str, err: Error) {
        self.passed = false;
        self.errors.push(StageError { stage: stage.into(), message: err.to_string() });
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Integrator settings reaching the farthest sample time.
fn integrator_for(m: &ExperimentManifest, times: &[f64]) -> IntegratorConfig {
    let far = times.iter().cloned().fold(0.0, |a: f64, t| if t.abs() > a.abs() { t } else { a });
    IntegratorConfig { t_end: far, ..m.integrator }
}

fn spectral_of(m: &ExperimentManifest, report: &mut ExperimentReport) -> Result<SpectralData> {
    if let Some(p) = &m.spectral {
        return load_spectral(p);
    }
    let (data, rep) = scatter_datum(&m.datum()?.sample(m.grids.x)?, &m.grids.z)?;
    report.below("A8", "unitarity_defect", rep.unitarity_defect, m.tolerance("unitarity"));
    Ok(data)
}

/// Run a manifest. Module errors are recorded per stage; outputs written
/// before a failure are kept.
pub fn run(m: &ExperimentManifest) -> ExperimentReport {
    let mut report = ExperimentReport::new(m.kind);
    if let Err(e) = fs::create_dir_all(&m.output_dir) {
        report.error("output", e.into());
        return report;
    }
    let stage = format!("{:?}", m.kind);
    if let Err(e) = run_kind(m, &mut report) {
        report.error(&stage, e);
    }
    let path = m.output_dir.join("report.json");
    report.outputs.push(path.clone());
    match report.to_json() {
        Ok(text) => {
            if let Err(e) = fs::write(&path, text) {
                report.error("report", e.into());
            }
        }
        Err(e) => report.error("report", e),
    }
    report
}

fn run_kind(m: &ExperimentManifest, report: &mut ExperimentReport) -> Result<()> {
    let out = &m.output_dir;
    match m.kind {
        ExperimentKind::Scatter => {
            let (data, rep) = scatter_datum(&m.datum()?.sample(m.grids.x)?, &m.grids.z)?;
            report.below("A8", "unitarity_defect", rep.unitarity_defect, m.tolerance("unitarity"));
            report.info("A1", "eigenvalue_count", data.discrete().len() as f64);
            for (k, e) in data.discrete().iter().enumerate() {
                report.info("A1", format!("eigenvalue_{k}_re"), e.z.re);
                report.info("A1", format!("eigenvalue_{k}_im"), e.z.im);
            }
            if let Some(z) = m.exact_eigenvalue() {
                let err = data.discrete().iter().map(|e| (e.z - z).norm()).fold(f64::INFINITY, f64::min);
                report.below("A1", "eigenvalue_error", err, m.tolerance("eigenvalue"));
                report.below("A1", "sup_r", data.sup_r(), m.tolerance("reflection_sup"));
            } else {
                report.info("A1", "sup_r", data.sup_r());
            }
            write_spectral(report, &out.join("spectral.json"), &data)?;
            write_reflection_table(report, &out.join("reflection.csv"), &data)?;
        }
        ExperimentKind::Reconstruct => {
            let data = spectral_of(m, report)?;
            let times = if m.times.is_empty() { vec![0.0] } else { m.times.clone() };
            for t in times {
                let f = reconstruct_field(&data, t, m.convention, &m.grids.x, m.window())?;
                report.info("A2", format!("sup_u_t{t}"), f.sup_norm());
                write_field(report, &out.join(format!("u_t{t}.csv")), &f)?;
            }
        }
        ExperimentKind::Roundtrip => {
            let (lo, hi) = m.window();
            let u0 = m.datum()?.sample(m.grids.x)?;
            let rt = round_trip(&u0, &m.grids.z, lo, hi, 1)?;
            report.below("A8", "unitarity_defect", rt.report.unitarity_defect, m.tolerance("unitarity"));
            report.below("A2", "roundtrip_linf", rt.max_error, m.tolerance("roundtrip_linf"));
            let cols = vec![
                rt.xs.clone(),
                rt.original.iter().map(|v| v.re).collect(),
                rt.original.iter().map(|v| v.im).collect(),
                rt.reconstructed.iter().map(|v| v.re).collect(),
                rt.reconstructed.iter().map(|v| v.im).collect(),
            ];
            write_table(report, &out.join("roundtrip.csv"), &["x", "u0_re", "u0_im", "u_re", "u_im"], &cols)?;
        }
        ExperimentKind::BacklundPipeline => {
            let times = if m.times.is_empty() { vec![1.0, 5.0] } else { m.times.clone() };
            let cfg = PipelineConfig {
                scatter_grid: m.grids.x,
                z_grid: m.grids.z,
                pde_grid: m.grids.pde(),
                integrator: integrator_for(m, &times),
                times,
                window: m.window(),
                stride: 1,
            };
            let o = backlund_pipeline(&m.datum()?, &cfg)?;
            report.below("A8", "unitarity_defect", o.report.unitarity_defect, m.tolerance("unitarity"));
            report.below("A8", "mass_drift", o.mass_drift, m.tolerance("mass_drift"));
            for (t, g) in o.times.iter().zip(&o.gaps) {
                report.below("A6", format!("gap_t{t}"), *g, m.tolerance("pipeline_linf"));
            }
            write_table(report, &out.join("pipeline.csv"), &["t", "gap"], &[o.times.clone(), o.gaps.clone()])?;
        }
        ExperimentKind::AsymptoticStability => {
            let sign = if m.direction == TimeDirection::Backward { -1.0 } else { 1.0 };
            let times: Vec<f64> =
                if m.times.is_empty() { [10.0, 20.0, 40.0, 80.0].iter().map(|t| t * sign).collect() } else { m.times.clone() };
            let cfg = StabilityConfig {
                scatter_grid: m.grids.x,
                z_grid: m.grids.z,
                pde_grid: m.grids.pde(),
                integrator: integrator_for(m, &times),
                times,
                direction: m.direction,
                asymptotics: AsymptoticConfig::default(),
                radius: 0.5,
            };
            let o = asymptotic_stability(&m.datum()?, &cfg)?;
            let id = if m.direction == TimeDirection::Backward { "A9" } else { "A3" };
            report.below("A8", "unitarity_defect", o.report.unitarity_defect, m.tolerance("unitarity"));
            report.below("A8", "mass_drift", o.mass_drift, m.tolerance("mass_drift"));
            report.info(id, "shift_re", o.shift.re);
            report.info(id, "shift_im", o.shift.im);
            for (t, g) in o.times.iter().zip(&o.gaps) {
                report.info(id, format!("gap_t{t}"), *g);
            }
            let w = m.tolerance("slope_halfwidth");
            report.within(id, "fitted_slope", o.slope, -0.5 - w, -0.5 + w);
            report.info(id, "fitted_prefactor", o.prefactor);
            write_table(report, &out.join("stability.csv"), &["t", "gap"], &[o.times.clone(), o.gaps.clone()])?;
        }
        ExperimentKind::RadiationDecay => {
            let times = if m.times.is_empty() { vec![25.0, 50.0, 100.0, 150.0, 200.0] } else { m.times.clone() };
            let cfg = RadiationConfig {
                scatter_grid: m.grids.x,
                z_grid: m.grids.z,
                pde_grid: m.grids.pde(),
                integrator: integrator_for(m, &times),
                times,
                stationary_points: vec![-0.5, -0.25, 0.0, 0.25, 0.5],
                asymptotics: AsymptoticConfig::default(),
            };
            let o = radiation_decay(&m.datum()?, &cfg)?;
            report.below("A8", "unitarity_defect", o.report.unitarity_defect, m.tolerance("unitarity"));
            report.below("A8", "mass_drift", o.mass_drift, m.tolerance("mass_drift"));
            report.below("A4", "sup_sqrt_t_variation", o.variation, m.tolerance("sup_variation"));
            report.below("A4", "pointwise_exponent", o.exponent, m.tolerance("radiation_exponent") + f64::EPSILON);
            let cols = [o.times.clone(), o.scaled_sup.clone(), o.pointwise_gaps.clone()];
            write_table(report, &out.join("radiation.csv"), &["t", "sup_sqrt_t", "pointwise_gap"], &cols)?;
        }
        ExperimentKind::ValidateAll => {
            for c in validation::run_all().criteria {
                for (name, v) in &c.measured {
                    report.info(&c.id, name.clone(), *v);
                }
                report.check(&c.id, "criterion", if c.passed { 1.0 } else { 0.0 }, "pass".into(), c.passed);
            }
        }
    }
    Ok(())
}

fn write_field(report: &mut ExperimentReport, path: &Path, f: &ComplexField1D) -> Result<()> {
    save_field(path, f)?;
    report.outputs.push(path.to_path_buf());
    Ok(())
}

fn write_spectral(report: &mut ExperimentReport, path: &Path, data: &SpectralData) -> Result<()> {
    save_spectral(path, data)?;
    report.outputs.push(path.to_path_buf());
    Ok(())
}

fn write_table(report: &mut ExperimentReport, path: &Path, headers: &[&str], cols: &[Vec<f64>]) -> Result<()> {
    save_table(path, headers, cols)?;
    report.outputs.push(path.to_path_buf());
    Ok(())
}

fn write_reflection_table(report: &mut ExperimentReport, path: &Path, data: &SpectralData) -> Result<()> {
    let r = data.r_values();
    let cols = [
        data.z_grid().nodes(),
        r.iter().map(|v| v.re).collect(),
        r.iter().map(|v| v.im).collect(),
        r.iter().map(|v| v.norm()).collect(),
    ];
    write_table(report, path, &["z", "r_re", "r_im", "r_abs"], &cols)
}

/// `u(t, x)` by RH solves at the nodes of `grid` inside `window`.
pub fn reconstruct_field(
    data: &SpectralData,
    t: f64,
    convention: Convention,
    grid: &RealGrid,
    window: (f64, f64),
) -> Result<ComplexField1D> {
    let evolved = evolve_spectral(data, t, convention)?;
    let idx = nodes_in(grid, window.0, window.1, 1);
    let (Some(&first), Some(&last)) = (idx.first(), idx.last()) else {
        return Err(Error::InvalidGrid("no grid nodes inside the window".into()));
    };
    let sub = RealGrid::new(grid.node(first), grid.node(last), idx.len())?;
    let values = RhSolver::new(&evolved, RhConfig::default()).sweep(&sub.nodes())?;
    ComplexField1D::new(sub, values)
}

/// Split-step snapshots of the manifest datum at `times`.
pub fn simulate(m: &ExperimentManifest, times: &[f64]) -> Result<Vec<ComplexField1D>> {
    let u0 = m.datum()?.sample(m.grids.pde())?;
    Ok(evolve_reference(&u0, &integrator_for(m, times), times)?.snapshots)
}

/// Leading-order long-time prediction on the manifest grid: the asymptotic
/// soliton when there is one eigenvalue, the radiation profile when there
/// are none.
pub fn asymptote(m: &ExperimentManifest, t: f64) -> Result<ComplexField1D> {
    let mut scratch = ExperimentReport::new(m.kind);
    let data = spectral_of(m, &mut scratch)?;
    let cfg = AsymptoticConfig::default();
    let dir = if t < 0.0 { TimeDirection::Backward } else { TimeDirection::Forward };
    let grid = m.grids.pde();
    match data.discrete().len() {
        0 => ComplexField1D::from_fn(grid, |x| {
            radiation_profile(&data, t, x, &cfg).map(|a| a.value).unwrap_or(C64::new(f64::NAN, f64::NAN))
        })
        .map_err(|e| Error::Domain(format!("radiation profile unavailable on part of the grid: {e}"))),
        1 => {
            let values = grid.nodes().into_iter().map(|x| asymptotic_soliton(&data, dir, t, x, &cfg)).collect::<Result<_>>()?;
            ComplexField1D::new(grid, values)
        }
        n => Err(Error::Arity(n)),
    }
}

/// Spectral data of the manifest evolved to time `t`.
pub fn evolve_spectral_data(m: &ExperimentManifest, t: f64) -> Result<SpectralData> {
    let mut scratch = ExperimentReport::new(m.kind);
    evolve_spectral(&spectral_of(m, &mut scratch)?, t, m.convention)
}

/// Spectral data of the manifest datum.
pub fn scatter_manifest(m: &ExperimentManifest) -> Result<SpectralData> {
    Ok(scatter_datum(&m.datum()?.sample(m.grids.x)?, &m.grids.z)?.0)
}
