//! Closed-form long-time objects: the scalar function `delta`, the model
//! problem, the leading radiation term and the asymptotic soliton.

mod cut;
mod model;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::backlund::soliton_closed_form;
use crate::error::{Error, Result};
use crate::types::{Mat2, SpectralData};
use crate::C64;
use cut::{check_off_cut, CutDensity, Subtraction};

pub use model::{k_pair, model_p, nu_of, RAY_TOLERANCE};
pub use special::{gamma, parabolic_cylinder, parabolic_cylinder_with_derivative, recip_gamma};

/// How the soliton position responds to the radiation.
///
/// The modified soliton is the pure soliton with `c_1` replaced by
/// `c_1 e^{-2 i arg D} |D|^{-k}` where `D` is `Delta(z_1)` or `Lambda(z_1)`.
/// `TwiceLogModulus` (`k = 2`, i.e. `c_1 / D^2`) is what the algebra of the
/// dominant-term reduction gives; `LogModulus` (`k = 1`) is kept for
/// comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionShift {
    #[default]
    TwiceLogModulus,
    LogModulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AsymptoticConfig {
    /// Smallest time treated as asymptotic without a warning.
    pub t_min: f64,
    /// Smallest accepted `|z_1 - z_0|` in [`approx_m_at_eigenvalue`].
    pub collision_margin: f64,
    pub position_shift: PositionShift,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self { t_min: 10.0, collision_margin: 0.1, position_shift: PositionShift::default() }
    }
}

/// A leading-order value with an optional regime warning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Asymptotic {
    pub value: C64,
    pub warning: Option<String>,
}

/// Which end of the time axis the asymptotic soliton describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeDirection {
    Forward,
    Backward,
}

/// Stationary-point data at `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseData {
    /// `-x / (4t)`.
    pub z0: f64,
    /// `-(1/2 pi) log(1 + |r(z0)|^2)`.
    pub nu0: f64,
    pub r_at_z0: C64,
    /// `beta(z0, z0)`.
    pub beta00: C64,
    /// `r(z0) e^{-2 i nu0 - 2 beta(z0, z0)}`.
    pub r0_hat: C64,
    /// `r0_hat e^{i nu0 log(8t) - 4 i t z0^2}`.
    pub r0: C64,
    pub t: f64,
}

/// `delta(z) = exp((1/2 pi i) int_{-inf}^{z0} log(1 + |r|^2) / (s - z) ds)`.
pub fn delta_function(data: &SpectralData, z0: f64, z: C64) -> Result<C64> {
    let density = CutDensity::new(data);
    check_off_cut(&density, z, z0, false)?;
    Ok(density.integral(f64::NEG_INFINITY, z0, z, None).exp())
}

/// `beta(z, z0)`: the cut integral with `log(1 + |r(z0)|^2) chi` removed,
/// `chi(s) = s - z0 + 1` on `[z0 - 1, z0]`. Finite at `z = z0`.
pub fn beta_remainder(data: &SpectralData, z0: f64, z: C64) -> Result<C64> {
    let density = CutDensity::new(data);
    beta_with(&density, z0, z)
}

fn beta_with(density: &CutDensity, z0: f64, z: C64) -> Result<C64> {
    if z != C64::new(z0, 0.0) {
        check_off_cut(density, z, z0, false)?;
    } else if !z0.is_finite() {
        return Err(Error::NonFinite("z0".into()));
    }
    let sub = Subtraction { z0, g0: density.density_at(z0) };
    Ok(density.integral(f64::NEG_INFINITY, z0, z, Some(sub)))
}

/// The explicit part of the cut integral removed in `beta`:
/// `i nu (1 + log(z - z0) + (z - z0) log(z - z0) - (z - z0 + 1) log(z - z0 + 1))`.
pub fn gamma_explicit_part(nu: f64, z0: f64, z: C64) -> C64 {
    let w = z - z0;
    let i = C64::new(0.0, 1.0);
    i * nu * (1.0 + w.ln() + w * w.ln() - (w + 1.0) * (w + 1.0).ln())
}

fn check_time(t: f64, x: f64) -> Result<()> {
    if !t.is_finite() || !x.is_finite() {
        return Err(Error::NonFinite("(t, x)".into()));
    }
    if t <= 0.0 {
        return Err(Error::Domain(format!("stationary-point data need t > 0, got {t}")));
    }
    Ok(())
}

/// Stationary point, `nu0`, `beta(z0, z0)` and the rescaled reflection `r0`.
pub fn phase_data(data: &SpectralData, t: f64, x: f64) -> Result<PhaseData> {
    check_time(t, x)?;
    let density = CutDensity::new(data);
    phase_with(&density, t, x)
}

fn phase_with(density: &CutDensity, t: f64, x: f64) -> Result<PhaseData> {
    let z0 = -x / (4.0 * t);
    let r_at_z0 = density.reflection_at(z0);
    let nu0 = nu_of(r_at_z0);
    let beta00 = beta_with(density, z0, C64::new(z0, 0.0))?;
    let i = C64::new(0.0, 1.0);
    let r0_hat = r_at_z0 * (-2.0 * i * nu0 - 2.0 * beta00).exp();
    let r0 = r0_hat * (i * nu0 * (8.0 * t).ln() - 4.0 * i * t * z0 * z0).exp();
    Ok(PhaseData { z0, nu0, r_at_z0, beta00, r0_hat, r0, t })
}

/// `(k1, k2)` of the model problem at the stationary point.
pub fn k_constants(phase: &PhaseData) -> Result<(C64, C64)> {
    if phase.r_at_z0.norm() == 0.0 || phase.r0.norm() == 0.0 {
        return Err(Error::VanishingReflection(phase.z0));
    }
    Ok(k_pair(phase.nu0, phase.r0))
}

fn regime_warning(t: f64, cfg: &AsymptoticConfig) -> Option<String> {
    (t.abs() < cfg.t_min).then(|| format!("|t| = {t} is below the asymptotic threshold {}", cfg.t_min))
}

/// Leading radiation term `2 i k1 / sqrt(8t)` at `z0 = -x/(4t)`; zero where
/// `r(z0)` vanishes.
pub fn radiation_profile(data: &SpectralData, t: f64, x: f64, cfg: &AsymptoticConfig) -> Result<Asymptotic> {
    check_time(t, x)?;
    let density = CutDensity::new(data);
    let warning = regime_warning(t, cfg);
    if density.is_zero() {
        return Ok(Asymptotic { value: C64::new(0.0, 0.0), warning });
    }
    let phase = phase_with(&density, t, x)?;
    let value = match k_constants(&phase) {
        Ok((k1, _)) => C64::new(0.0, 2.0) * k1 / (8.0 * t).sqrt(),
        Err(Error::VanishingReflection(_)) => C64::new(0.0, 0.0),
        Err(e) => return Err(e),
    };
    Ok(Asymptotic { value, warning })
}

fn single_pole(data: &SpectralData) -> Result<(C64, C64)> {
    match data.discrete() {
        [e] => Ok((e.z, e.c)),
        other => Err(Error::Arity(other.len())),
    }
}

/// `Delta(z1)` (forward, integral over `(-inf, Re z1]`) or `Lambda(z1)`
/// (backward, over `[Re z1, inf)`).
pub fn soliton_shift(data: &SpectralData, direction: TimeDirection) -> Result<C64> {
    let (z1, _) = single_pole(data)?;
    let density = CutDensity::new(data);
    let value = match direction {
        TimeDirection::Forward => density.integral(f64::NEG_INFINITY, z1.re, z1, None),
        TimeDirection::Backward => density.integral(z1.re, f64::INFINITY, z1, None),
    };
    Ok(value.exp())
}

/// `c_1 e^{-2 i arg D} |D|^{-k}`: the norming constant of the pure soliton
/// that `u` approaches as `t -> +-inf`, with `k` set by [`PositionShift`].
pub fn asymptotic_norming_constant(data: &SpectralData, direction: TimeDirection, cfg: &AsymptoticConfig) -> Result<C64> {
    let (_, c1) = single_pole(data)?;
    let shift = soliton_shift(data, direction)?;
    let k = match cfg.position_shift {
        PositionShift::TwiceLogModulus => 2.0,
        PositionShift::LogModulus => 1.0,
    };
    Ok(c1 * C64::from_polar(shift.norm().powf(-k), -2.0 * shift.arg()))
}

/// The soliton that `u` approaches as `t -> +-inf`: the pure soliton of
/// `(z1, c1)` with its phase shifted by `2 arg D` and its position by
/// `log|D|` (scaled per [`PositionShift`]).
pub fn asymptotic_soliton(data: &SpectralData, direction: TimeDirection, t: f64, x: f64, cfg: &AsymptoticConfig) -> Result<C64> {
    let (z1, _) = single_pole(data)?;
    soliton_closed_form(z1, asymptotic_norming_constant(data, direction, cfg)?, t, x)
}

/// Leading-order `m(t, x, z1)` of the radiation problem:
/// `[[delta, delta^{-1} k1 / s], [delta k2 / s, delta^{-1}]]` with
/// `s = sqrt(8t)(z1 - z0)`.
pub fn approx_m_at_eigenvalue(data: &SpectralData, t: f64, x: f64, z1: C64, cfg: &AsymptoticConfig) -> Result<Mat2> {
    check_time(t, x)?;
    let density = CutDensity::new(data);
    let z0 = -x / (4.0 * t);
    let distance = (z1 - z0).norm();
    if distance < cfg.collision_margin {
        return Err(Error::StationaryCollision { z0, distance });
    }
    check_off_cut(&density, z1, z0, false)?;
    let delta = density.integral(f64::NEG_INFINITY, z0, z1, None).exp();
    let phase = phase_with(&density, t, x)?;
    let (off12, off21) = match k_constants(&phase) {
        Ok((k1, k2)) => {
            let s = (8.0 * t).sqrt() * (z1 - z0);
            (k1 / (delta * s), delta * k2 / s)
        }
        Err(Error::VanishingReflection(_)) => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        Err(e) => return Err(e),
    };
    Ok(Mat2::new(delta, off12, off21, 1.0 / delta))
}

/// `sqrt(-nu0 / (2t))`, the modulus of the leading radiation term.
pub fn radiation_modulus(nu0: f64, t: f64) -> f64 {
    (-nu0 / (2.0 * t)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Eigenpair, RealGrid};
    use std::f64::consts::PI;
    use proptest::prelude::*;

    fn radiation(f: impl Fn(f64) -> C64, half: f64, n: usize) -> SpectralData {
        let grid = RealGrid::symmetric(half, n).unwrap();
        SpectralData::radiation(grid, grid.nodes().into_iter().map(f).collect()).unwrap()
    }

    fn bump(s: f64) -> C64 {
        C64::from_polar(0.4 * (-(s - 0.3) * (s - 0.3)).exp(), 0.7 * s)
    }

    #[test]
    fn zero_reflection_reductions() {
        let data = radiation(|_| C64::new(0.0, 0.0), 8.0, 161);
        let cfg = AsymptoticConfig::default();
        assert_eq!(delta_function(&data, 0.3, C64::new(1.0, 1.0)).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(beta_remainder(&data, 0.3, C64::new(0.3, 0.0)).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(radiation_profile(&data, 20.0, 3.0, &cfg).unwrap().value, C64::new(0.0, 0.0));
        let m = approx_m_at_eigenvalue(&data, 20.0, 3.0, C64::new(0.2, 0.5), &cfg).unwrap();
        assert_eq!(m, Mat2::IDENTITY);
        let phase = phase_data(&data, 20.0, 3.0).unwrap();
        assert_eq!(phase.nu0, 0.0);
        assert!(matches!(k_constants(&phase), Err(Error::VanishingReflection(_))));
    }

    #[test]
    fn delta_bounds() {
        let data = radiation(bump, 8.0, 321);
        let rho = data.sup_r();
        let bracket = (1.0 + rho * rho).sqrt();
        for z in [C64::new(0.1, 0.4), C64::new(-2.0, 1.5), C64::new(1.0, -0.3), C64::new(-0.5, -2.0), C64::new(2.0, 0.01)] {
            let d = delta_function(&data, 0.6, z).unwrap();
            assert!(d.norm() <= bracket * (1.0 + 1e-12) && d.norm() >= 1.0 / bracket * (1.0 - 1e-12), "{z}");
            if z.im > 0.0 {
                assert!(1.0 / d.norm() <= 1.0 + 1e-12, "{z}");
            } else {
                assert!(d.norm() <= 1.0 + 1e-12, "{z}");
            }
        }
    }

    #[test]
    fn cut_proximity_is_an_accuracy_error() {
        let data = radiation(bump, 8.0, 161);
        assert!(matches!(delta_function(&data, 0.6, C64::new(0.0, 0.01)), Err(Error::Accuracy(_))));
        assert!(delta_function(&data, 0.6, C64::new(0.9, 0.0)).is_ok());
    }

    #[test]
    fn gamma_recomposition() {
        let data = radiation(bump, 8.0, 321);
        let z0 = 0.45;
        let density = CutDensity::new(&data);
        let nu = -density.density_at(z0) / (2.0 * PI);
        for z in [C64::new(0.1, 0.4), C64::new(-3.0, 0.7), C64::new(1.2, -0.5), C64::new(0.45, -1.0), C64::new(2.5, 0.0)] {
            let direct = delta_function(&data, z0, z).unwrap().ln();
            let recomposed = gamma_explicit_part(nu, z0, z) + beta_remainder(&data, z0, z).unwrap();
            // compare modulo 2 pi i
            let diff = direct - recomposed;
            let wrapped = C64::new(diff.re, (diff.im + PI).rem_euclid(2.0 * PI) - PI);
            assert!(wrapped.norm() < 1e-6, "z = {z}: {direct} vs {recomposed}");
        }
    }

    #[test]
    fn beta_at_the_stationary_point_for_constant_modulus() {
        // |r|^2 = 0.25 on [-10, 10]: beta(z0, z0) = g/(2 pi i) (-log(z0 + 10) - 1)
        let data = radiation(|s| C64::from_polar(0.5, s), 10.0, 401);
        let g = 1.25f64.ln();
        for z0 in [-2.3, 0.0, 0.37, 6.0] {
            let beta = beta_remainder(&data, z0, C64::new(z0, 0.0)).unwrap();
            let exact = g * (-(z0 + 10.0f64).ln() - 1.0) / C64::new(0.0, 2.0 * PI);
            assert!((beta - exact).norm() < 1e-12, "z0 = {z0}: {beta} vs {exact}");
            // an independent fine trapezoid of the subtracted integrand
            let n = 2_000_000;
            let h = (z0 + 10.0) / n as f64;
            let mut acc = 0.0;
            for k in 0..n {
                let s = -10.0 + (k as f64 + 0.5) * h;
                let chi = if s >= z0 - 1.0 { s - z0 + 1.0 } else { 0.0 };
                acc += (g - g * chi) / (s - z0);
            }
            let reference = acc * h / C64::new(0.0, 2.0 * PI);
            assert!((beta - reference).norm() < 1e-8, "z0 = {z0}: {beta} vs {reference}");
            assert!(beta.re.abs() < 1e-14);
        }
    }

    #[test]
    fn k1_modulus_from_phase_data() {
        let data = radiation(|_| C64::new(0.5, 0.0), 6.0, 121);
        let phase = phase_data(&data, 100.0, 0.0).unwrap();
        assert_eq!(phase.z0, 0.0);
        let (k1, k2) = k_constants(&phase).unwrap();
        assert!((k1.norm() - (1.25f64.ln() / (2.0 * PI)).sqrt()).abs() < 1e-10);
        assert!((k1 * k2 - phase.nu0).norm() < 1e-15);
        assert!((phase.r0.norm() - phase.r_at_z0.norm()).abs() < 1e-12);
    }

    #[test]
    fn radiation_modulus_identity() {
        let data = radiation(bump, 8.0, 321);
        let cfg = AsymptoticConfig::default();
        for (t, x) in [(20.0, -5.0), (50.0, 30.0), (100.0, -80.0)] {
            let u = radiation_profile(&data, t, x, &cfg).unwrap();
            assert!(u.warning.is_none());
            let phase = phase_data(&data, t, x).unwrap();
            assert!((u.value.norm() - radiation_modulus(phase.nu0, t)).abs() < 1e-12);
        }
        assert!(radiation_profile(&data, 2.0, 0.0, &cfg).unwrap().warning.is_some());
    }

    fn with_soliton(r: SpectralData, z1: C64, c1: C64) -> SpectralData {
        r.with_discrete(vec![Eigenpair { z: z1, c: c1 }]).unwrap()
    }

    #[test]
    fn reflectionless_soliton_is_unchanged() {
        let z1 = C64::new(0.2, 0.6);
        let c1 = C64::new(0.3, -1.1);
        let data = with_soliton(radiation(|_| C64::new(0.0, 0.0), 6.0, 61), z1, c1);
        let cfg = AsymptoticConfig::default();
        for dir in [TimeDirection::Forward, TimeDirection::Backward] {
            assert_eq!(soliton_shift(&data, dir).unwrap(), C64::new(1.0, 0.0));
            for (t, x) in [(10.0, -8.0), (-5.0, 2.0)] {
                assert_eq!(asymptotic_soliton(&data, dir, t, x, &cfg).unwrap(), soliton_closed_form(z1, c1, t, x).unwrap());
            }
        }
    }

    #[test]
    fn forward_and_backward_shifts_differ() {
        let z1 = C64::new(1.0, 0.5);
        let left = radiation(|s| if s < -1.0 { C64::from_polar(0.3 * (-(s + 3.0) * (s + 3.0)).exp(), s) } else { C64::new(0.0, 0.0) }, 8.0, 321);
        let data = with_soliton(left, z1, C64::new(0.0, -1.0));
        let forward = soliton_shift(&data, TimeDirection::Forward).unwrap();
        let backward = soliton_shift(&data, TimeDirection::Backward).unwrap();
        assert_eq!(backward, C64::new(1.0, 0.0));
        assert!((forward - 1.0).norm() > 1e-3);
    }

    #[test]
    fn position_shift_matches_the_explicit_formula() {
        // u = -2 i b e^{-2 i a x - 4 i t (a^2 - b^2) - i arg c + 2 i arg D} sech(2 b x + 8 t a b - d + k log|D|)
        let z1 = C64::new(-0.3, 0.45);
        let c1 = C64::from_polar(0.8, 0.4);
        let data = with_soliton(radiation(bump, 8.0, 321), z1, c1);
        let shift = soliton_shift(&data, TimeDirection::Forward).unwrap();
        for (policy, k) in [(PositionShift::TwiceLogModulus, 2.0), (PositionShift::LogModulus, 1.0)] {
            let cfg = AsymptoticConfig { position_shift: policy, ..Default::default() };
            for (t, x) in [(12.0, 13.0), (30.0, 40.0)] {
                let (a, b) = (z1.re, z1.im);
                let d = (c1.norm() / (2.0 * b)).ln();
                let phase = -2.0 * a * x - 4.0 * t * (a * a - b * b) - c1.arg() + 2.0 * shift.arg();
                let env = 1.0 / (2.0 * b * x + 8.0 * t * a * b - d + k * shift.norm().ln()).cosh();
                let expected = C64::new(0.0, -2.0 * b) * C64::from_polar(env, phase);
                let got = asymptotic_soliton(&data, TimeDirection::Forward, t, x, &cfg).unwrap();
                assert!((got - expected).norm() < 1e-12, "{policy:?}");
            }
        }
    }

    #[test]
    fn arity_and_collision_errors() {
        let data = radiation(bump, 8.0, 161);
        let cfg = AsymptoticConfig::default();
        assert!(matches!(asymptotic_soliton(&data, TimeDirection::Forward, 1.0, 0.0, &cfg), Err(Error::Arity(0))));
        let two = data
            .with_discrete(vec![Eigenpair { z: C64::new(0.0, 0.5), c: C64::new(1.0, 0.0) }, Eigenpair { z: C64::new(0.5, 0.5), c: C64::new(1.0, 0.0) }])
            .unwrap();
        assert!(matches!(soliton_shift(&two, TimeDirection::Backward), Err(Error::Arity(2))));
        // z0 = -x/(4t) = 0.2 right under z1
        let err = approx_m_at_eigenvalue(&data, 20.0, -16.0, C64::new(0.2, 0.05), &cfg);
        assert!(matches!(err, Err(Error::StationaryCollision { .. })));
    }

    #[test]
    fn approximate_m_has_unit_diagonal_product() {
        let data = radiation(bump, 8.0, 321);
        let cfg = AsymptoticConfig::default();
        let m = approx_m_at_eigenvalue(&data, 50.0, 10.0, C64::new(0.5, 0.6), &cfg).unwrap();
        assert!((m.get(0, 0) * m.get(1, 1) - 1.0).norm() < 1e-14);
        assert!(m.get(0, 1).norm() > 0.0 && m.get(1, 0).norm() > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn nu_is_nonpositive_and_k1_identity_holds(amp in 0.01f64..2.0, shift in -2.0f64..2.0, t in 10.0f64..200.0, x in -100.0f64..100.0) {
            let data = radiation(|s| C64::from_polar(amp * (-(s - shift) * (s - shift) / 4.0).exp(), s), 10.0, 201);
            let phase = phase_data(&data, t, x).unwrap();
            prop_assert!(phase.nu0 <= 0.0);
            if let Ok((k1, _)) = k_constants(&phase) {
                prop_assert!((k1.norm_sqr() + phase.nu0).abs() < 1e-10);
            }
        }

        #[test]
        fn delta_half_plane_bounds(amp in 0.01f64..1.5, z0 in -3.0f64..3.0, re in -4.0f64..4.0, im in 0.2f64..3.0, below in any::<bool>()) {
            let data = radiation(|s| C64::from_polar(amp / (1.0 + s * s), 2.0 * s), 10.0, 201);
            let z = C64::new(re, if below { -im } else { im });
            let d = delta_function(&data, z0, z).unwrap();
            let rho = data.sup_r();
            let bracket = (1.0 + rho * rho).sqrt();
            prop_assert!(d.norm() <= bracket * (1.0 + 1e-12));
            prop_assert!(d.norm() >= (1.0 - 1e-12) / bracket);
            if below { prop_assert!(d.norm() <= 1.0 + 1e-12); } else { prop_assert!(1.0 / d.norm() <= 1.0 + 1e-12); }
        }
    }
}
