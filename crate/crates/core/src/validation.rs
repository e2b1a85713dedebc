//! The acceptance suite A1-A9, each criterion checked at its stated
//! tolerance and reported with the measured quantities.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    k_pair, model_p, nu_of, parabolic_cylinder, parabolic_cylinder_with_derivative, AsymptoticConfig, TimeDirection,
};
use crate::backlund::{backlund_combine, soliton_closed_form, spectrum_to_params, BacklundInputs};
use crate::error::Result;
use crate::experiments::{
    asymptotic_stability, backlund_pipeline, power_law_fit, radiation_decay, round_trip, scatter_datum, Datum,
    Perturbation, PipelineConfig, RadiationConfig, StabilityConfig, StabilityOutcome,
};
use crate::integrator::{IntegratorConfig, SplitScheme};
use crate::types::{Mat2, RealGrid, SolitonParams};
use crate::C64;

pub const IDS: [&str; 9] = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9"];

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{} {verdict} {}: {}", self.id, self.title, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub criteria: Vec<CriterionReport>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

/// Quantities gathered across criteria for the A8 checks.
#[derive(Default)]
struct Diagnostics {
    unitarity: Vec<f64>,
    mass_drift: Vec<f64>,
}

struct Check {
    measured: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { measured: BTreeMap::new(), failures: Vec::new() }
    }

    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.measured.insert(name.into(), value);
        if !(value < bound) {
            self.failures.push(format!("{name} = {value:.3e} (limit {bound:.0e})"));
        }
    }

    fn within(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        self.measured.insert(name.into(), value);
        if !(lo..=hi).contains(&value) {
            self.failures.push(format!("{name} = {value:.4} outside [{lo:.3}, {hi:.3}]"));
        }
    }

    fn record(&mut self, name: &str, value: f64) {
        self.measured.insert(name.into(), value);
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    fn finish(self, id: &str, title: &str) -> CriterionReport {
        let passed = self.failures.is_empty();
        let detail = if passed {
            self.measured.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect::<Vec<_>>().join(" ")
        } else {
            self.failures.join("; ")
        };
        CriterionReport { id: id.into(), title: title.into(), passed, measured: self.measured, detail }
    }
}

fn failed(id: &str, title: &str, err: crate::Error) -> CriterionReport {
    CriterionReport { id: id.into(), title: title.into(), passed: false, measured: BTreeMap::new(), detail: err.to_string() }
}

fn title(id: &str) -> &'static str {
    match id {
        "A1" => "soliton spectral identity",
        "A2" => "inverse round trip",
        "A3" => "asymptotic stability forward in time",
        "A4" => "pure radiation decay",
        "A5" => "Backlund exactness",
        "A6" => "Backlund pipeline against split-step",
        "A7" => "special-function layer",
        "A8" => "unitarity and mass conservation",
        "A9" => "forward and backward ground states",
        _ => "unknown criterion",
    }
}

/// Run every criterion, in order.
pub fn run_all() -> ValidationReport {
    run_selected(&IDS)
}

/// Run the listed criteria; A8 judges whatever the others produced, so it is
/// evaluated last.
pub fn run_selected(ids: &[&str]) -> ValidationReport {
    run_with(ids, |_| {})
}

/// As [`run_selected`], calling `progress` as each criterion finishes.
pub fn run_with(ids: &[&str], mut progress: impl FnMut(&CriterionReport)) -> ValidationReport {
    let mut diag = Diagnostics::default();
    let mut report = ValidationReport::default();
    let mut forward = None;
    for &id in ids.iter().filter(|id| **id != "A8") {
        let result = match id {
            "A1" => a1(&mut diag),
            "A2" => a2(&mut diag),
            "A3" => a3(&mut diag).map(|(c, fwd)| {
                forward = Some(fwd);
                c
            }),
            "A4" => a4(&mut diag),
            "A5" => a5(),
            "A6" => a6(&mut diag),
            "A7" => a7(),
            "A9" => a9(&mut diag, forward.as_ref()),
            other => Ok(failed(other, "unknown criterion", crate::Error::Domain(format!("no criterion {other}")))),
        };
        let c = result.unwrap_or_else(|e| failed(id, title(id), e));
        progress(&c);
        report.criteria.push(c);
    }
    if ids.contains(&"A8") {
        let c = a8(&diag);
        progress(&c);
        report.criteria.push(c);
    }
    report
}

fn a1(diag: &mut Diagnostics) -> Result<CriterionReport> {
    let grid = RealGrid::symmetric(30.0, 3073)?;
    let z_grid = RealGrid::symmetric(4.0, 161)?;
    let mut check = Check::new();
    for (omega, v, x0) in [(1.0, 0.0, 0.0), (2.0, 1.0, 0.0), (1.0, 0.0, 3.0)] {
        let tag = format!("w{omega}_v{v}_x{x0}");
        let params = SolitonParams::new(omega, 0.0, v, x0)?;
        let (data, report) = scatter_datum(&Datum::Soliton { params, perturbation: None }.sample(grid)?, &z_grid)?;
        diag.unitarity.push(report.unitarity_defect);
        let [pair] = data.discrete() else {
            check.fail(format!("{tag}: {} eigenvalues", data.discrete().len()));
            continue;
        };
        check.below(&format!("{tag}_eigenvalue_error"), (pair.z - C64::new(-v / 2.0, omega / 2.0)).norm(), 1e-6);
        check.below(&format!("{tag}_sup_r"), data.sup_r(), 1e-5);
        let delta0 = (pair.c.norm() / omega).ln();
        check.below(&format!("{tag}_delta0_error"), (delta0 - omega * x0).abs(), 1e-4);
    }
    Ok(check.finish("A1", title("A1")))
}

fn a2(diag: &mut Diagnostics) -> Result<CriterionReport> {
    let grid = RealGrid::symmetric(30.0, 3073)?;
    let z_grid = RealGrid::symmetric(12.0, 601)?;
    let mut check = Check::new();
    for (amplitude, frequency, tag) in [(0.3, 0.0, "sech_0.3"), (0.5, 1.0, "sech_0.5_e^ix")] {
        let u0 = Datum::Sech { amplitude, frequency }.sample(grid)?;
        match round_trip(&u0, &z_grid, -10.0, 10.0, 16) {
            Ok(rt) => {
                diag.unitarity.push(rt.report.unitarity_defect);
                check.record(&format!("{tag}_min_abs_a"), rt.report.min_abs_a);
                check.below(&format!("{tag}_error"), rt.max_error, 1e-4);
            }
            Err(e) => check.fail(format!("{tag}: {e}")),
        }
    }
    Ok(check.finish("A2", title("A2")))
}

fn perturbed_soliton(epsilon: f64) -> Datum {
    Datum::Soliton {
        params: SolitonParams::new(1.0, 0.0, 0.0, 0.0).expect("valid soliton"),
        perturbation: Some(Perturbation { epsilon, ..Perturbation::default() }),
    }
}

fn stability_config(direction: TimeDirection) -> Result<StabilityConfig> {
    let sign = match direction {
        TimeDirection::Forward => 1.0,
        TimeDirection::Backward => -1.0,
    };
    Ok(StabilityConfig {
        scatter_grid: RealGrid::symmetric(30.0, 3073)?,
        z_grid: RealGrid::symmetric(8.0, 801)?,
        pde_grid: RealGrid::symmetric(1000.0, 16385)?,
        integrator: IntegratorConfig { dt: 5e-3, t_end: 80.0 * sign, scheme: SplitScheme::StrangSplit, ..Default::default() },
        times: [10.0, 20.0, 40.0, 80.0].iter().map(|t| t * sign).collect(),
        direction,
        asymptotics: AsymptoticConfig::default(),
        radius: 0.5,
    })
}

fn record_stability(check: &mut Check, tag: &str, out: &StabilityOutcome) {
    for (t, g) in out.times.iter().zip(&out.gaps) {
        check.record(&format!("{tag}_gap_t{t}"), *g);
    }
    check.within(&format!("{tag}_slope"), out.slope, -0.6, -0.4);
    check.record(&format!("{tag}_prefactor"), out.prefactor);
}

fn a3(diag: &mut Diagnostics) -> Result<(CriterionReport, StabilityOutcome)> {
    let cfg = stability_config(TimeDirection::Forward)?;
    let mut check = Check::new();
    let mut runs = Vec::new();
    for epsilon in [0.02, 0.04] {
        let out = asymptotic_stability(&perturbed_soliton(epsilon), &cfg)?;
        diag.unitarity.push(out.report.unitarity_defect);
        diag.mass_drift.push(out.mass_drift);
        record_stability(&mut check, &format!("eps{epsilon}"), &out);
        runs.push(out);
    }
    let ratio = runs[1].prefactor / runs[0].prefactor;
    check.within("prefactor_ratio_eps0.04_over_eps0.02", ratio, 2.0 / 1.5, 2.0 * 1.5);
    let forward = runs.pop().expect("two runs");
    Ok((check.finish("A3", title("A3")), forward))
}

fn a4(diag: &mut Diagnostics) -> Result<CriterionReport> {
    let cfg = RadiationConfig {
        scatter_grid: RealGrid::symmetric(40.0, 2049)?,
        z_grid: RealGrid::symmetric(6.0, 1201)?,
        pde_grid: RealGrid::symmetric(1200.0, 16385)?,
        integrator: IntegratorConfig { dt: 5e-3, t_end: 200.0, scheme: SplitScheme::StrangSplit, ..Default::default() },
        times: vec![25.0, 50.0, 100.0, 150.0, 200.0],
        stationary_points: vec![-0.5, -0.25, 0.0, 0.25, 0.5],
        asymptotics: AsymptoticConfig::default(),
    };
    let out = radiation_decay(&Datum::Sech { amplitude: 0.3, frequency: 0.0 }, &cfg)?;
    diag.unitarity.push(out.report.unitarity_defect);
    diag.mass_drift.push(out.mass_drift);
    let mut check = Check::new();
    check.record("eigenvalues", out.eigenvalues as f64);
    for (t, (s, g)) in out.times.iter().zip(out.scaled_sup.iter().zip(&out.pointwise_gaps)) {
        check.record(&format!("sup_sqrt_t_t{t}"), *s);
        check.record(&format!("pointwise_gap_t{t}"), *g);
    }
    check.below("sup_sqrt_t_variation", out.variation, 0.2);
    check.below("pointwise_exponent", out.exponent, -0.6 + f64::EPSILON);
    Ok(check.finish("A4", title("A4")))
}

fn a5() -> Result<CriterionReport> {
    let mut check = Check::new();
    let identity = Mat2::IDENTITY;
    let zero = C64::new(0.0, 0.0);
    for (k, (z1, c1)) in [(C64::new(0.0, 0.5), C64::new(0.0, -1.0)), (C64::new(-0.3, 0.6), C64::from_polar(1.7, 0.8))]
        .into_iter()
        .enumerate()
    {
        let mut err: f64 = 0.0;
        for i in 0..100 {
            let t = -2.0 + 4.0 * i as f64 / 99.0;
            for j in 0..100 {
                let x = -10.0 + 20.0 * j as f64 / 99.0;
                let u = backlund_combine(&BacklundInputs::new(z1, c1, t, x, identity)?, zero)?;
                err = err.max((u - soliton_closed_form(z1, c1, t, x)?).norm());
            }
        }
        check.below(&format!("soliton{k}_max_error"), err, 1e-12);
    }
    Ok(check.finish("A5", title("A5")))
}

fn a6(diag: &mut Diagnostics) -> Result<CriterionReport> {
    let cfg = PipelineConfig {
        scatter_grid: RealGrid::symmetric(30.0, 3073)?,
        z_grid: RealGrid::symmetric(6.0, 1201)?,
        pde_grid: RealGrid::symmetric(128.0, 4097)?,
        integrator: IntegratorConfig { dt: 2e-3, t_end: 5.0, scheme: SplitScheme::FourthOrderSplit, ..Default::default() },
        times: vec![1.0, 5.0],
        window: (-10.0, 10.0),
        stride: 8,
    };
    let out = backlund_pipeline(&perturbed_soliton(0.04), &cfg)?;
    diag.unitarity.push(out.report.unitarity_defect);
    diag.mass_drift.push(out.mass_drift);
    let mut check = Check::new();
    for (t, g) in out.times.iter().zip(&out.gaps) {
        check.below(&format!("gap_t{t}"), *g, 5e-3);
    }
    Ok(check.finish("A6", title("A6")))
}

fn a7() -> Result<CriterionReport> {
    let mut check = Check::new();
    let orders = [C64::new(0.0, -0.3), C64::new(0.0, -0.9), C64::new(0.4, 0.7), C64::new(-0.6, -0.2), C64::new(0.8, 0.0)];
    let mut recurrence: f64 = 0.0;
    let mut ode: f64 = 0.0;
    for &a in &orders {
        for re in [-20.0, -11.0, -5.5, -2.0, -0.3, 0.0, 0.8, 3.0, 7.5, 13.0, 19.0] {
            for im in [-19.0, -9.0, -4.2, -1.0, 0.0, 0.6, 2.5, 6.0, 12.5, 18.0] {
                let z = C64::new(re, im);
                let (d, dp) = parabolic_cylinder_with_derivative(a, z)?;
                let (dm, dmp) = parabolic_cylinder_with_derivative(a - 1.0, z)?;
                let dplus = parabolic_cylinder(a + 1.0, z)?;
                let scale = dplus.norm() + (z * d).norm() + (a * dm).norm();
                if scale > 0.0 {
                    recurrence = recurrence.max((dplus - z * d + a * dm).norm() / scale);
                }
                // D'' from differentiating D' = -z D / 2 + a D_{a-1}
                let dpp = -0.5 * d - 0.5 * z * dp + a * dmp;
                let rhs = (0.25 * z * z - a - 0.5) * d;
                let scale = dpp.norm() + rhs.norm();
                if scale > 0.0 {
                    ode = ode.max((dpp - rhs).norm() / scale);
                }
            }
        }
    }
    check.below("recurrence_residual", recurrence, 1e-9);
    check.below("ode_residual", ode, 1e-7);

    let r0s = [C64::new(0.5, 0.0), C64::new(0.3, -0.4), C64::from_polar(1.2, 2.0), C64::new(0.05, 0.02)];
    let mut modulus: f64 = 0.0;
    let mut det: f64 = 0.0;
    let mut jump: f64 = 0.0;
    let mut rates = Vec::new();
    let i = C64::new(0.0, 1.0);
    for &r0 in &r0s {
        let nu = nu_of(r0);
        let (k1, k2) = k_pair(nu, r0);
        modulus = modulus.max((k1.norm_sqr() + nu).abs());
        for rho in [0.4, 1.0, 2.5, 5.0, 9.0, 16.0, 30.0] {
            for k in 0..24 {
                let p = model_p(C64::from_polar(rho, -PI + (k as f64 + 0.5) * PI / 12.0), nu, r0)?;
                det = det.max((p.det() - 1.0).norm());
            }
        }
        let damp = 1.0 + r0.norm_sqr();
        let e = |z: C64| (-2.0 * i * nu * z.ln() + 0.5 * i * z * z).exp();
        for rho in [0.5, 1.7, 4.4, 8.0] {
            // side of the ray with the larger argument, smaller argument, jump
            let rays: [(f64, Box<dyn Fn(C64) -> Mat2>); 4] = [
                (FRAC_PI_4, Box::new(|z| Mat2::lower(r0 * e(z)))),
                (3.0 * FRAC_PI_4, Box::new(|z| Mat2::upper(r0.conj() / damp / e(z)).inverse().unwrap())),
                (-3.0 * FRAC_PI_4, Box::new(|z| Mat2::lower(r0 / damp * e(z)).inverse().unwrap())),
                (-FRAC_PI_4, Box::new(|z| Mat2::upper(r0.conj() / e(z)))),
            ];
            for (theta, v) in rays {
                let z = C64::from_polar(rho, theta);
                let above = model_p(C64::from_polar(rho, theta + 1e-11), nu, r0)?;
                let below = model_p(C64::from_polar(rho, theta - 1e-11), nu, r0)?;
                jump = jump.max((above - below * v(z)).max_abs() / above.max_abs());
            }
        }
        let p1 = Mat2::new(C64::new(0.0, 0.0), k1, k2, C64::new(0.0, 0.0));
        let radii = [10.0, 14.0, 20.0, 28.0, 40.0];
        let errs: Vec<f64> = radii
            .iter()
            .map(|&rho| {
                let zeta = C64::from_polar(rho, PI / 2.0);
                model_p(zeta, nu, r0).map(|p| ((p - Mat2::IDENTITY).scale(zeta) - p1).max_abs())
            })
            .collect::<Result<_>>()?;
        rates.push(power_law_fit(&radii, &errs)?.0);
    }
    check.below("k1_modulus_identity", modulus, 1e-10);
    check.below("det_p_minus_one", det, 1e-7);
    check.below("jump_residual", jump, 1e-7);
    let worst = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    check.within("p1_remainder_exponent", worst, -1.1, -0.9);
    Ok(check.finish("A7", title("A7")))
}

fn a8(diag: &Diagnostics) -> CriterionReport {
    let mut check = Check::new();
    if diag.unitarity.is_empty() && diag.mass_drift.is_empty() {
        check.fail("no scattering or split-step runs to judge".into());
    }
    check.record("scatterings", diag.unitarity.len() as f64);
    check.record("runs", diag.mass_drift.len() as f64);
    check.below("max_unitarity_defect", diag.unitarity.iter().cloned().fold(0.0, f64::max), 1e-7);
    check.below("max_mass_drift", diag.mass_drift.iter().cloned().fold(0.0, f64::max), 1e-10);
    check.finish("A8", title("A8"))
}

fn a9(diag: &mut Diagnostics, forward: Option<&StabilityOutcome>) -> Result<CriterionReport> {
    let forward = match forward {
        Some(f) => f.clone(),
        None => asymptotic_stability(&perturbed_soliton(0.04), &stability_config(TimeDirection::Forward)?)?,
    };
    let backward = asymptotic_stability(&perturbed_soliton(0.04), &stability_config(TimeDirection::Backward)?)?;
    diag.unitarity.push(backward.report.unitarity_defect);
    diag.mass_drift.push(backward.mass_drift);
    let mut check = Check::new();
    let separation = (forward.shift - backward.shift).norm();
    check.record("delta_re", forward.shift.re);
    check.record("delta_im", forward.shift.im);
    check.record("lambda_re", backward.shift.re);
    check.record("lambda_im", backward.shift.im);
    check.measured.insert("shift_separation".into(), separation);
    if !(separation > 1e-6) {
        check.fail(format!("shift_separation = {separation:.3e} does not exceed 1e-6"));
    }
    let fwd_x0 = spectrum_to_params(forward.z1, forward.c1)?.x0;
    check.record("predicted_x0_forward_minus_initial", forward.predicted.x0 - fwd_x0);
    check.record("predicted_x0_backward_minus_initial", backward.predicted.x0 - fwd_x0);
    record_stability(&mut check, "backward", &backward);
    check.within("prefactor_ratio_backward_over_forward", backward.prefactor / forward.prefactor, 1.0 / 1.5, 1.5);
    check.record("left_weight", forward.left_weight);
    Ok(check.finish("A9", title("A9")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        let report = run_selected(&["A5", "A7"]);
        for c in &report.criteria {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn a8_without_runs_fails() {
        assert!(!a8(&Diagnostics::default()).passed);
    }
}
