//! Adding and removing a single soliton: the Blaschke factor on the
//! reflection coefficient and the auto-Backlund formula on the potential.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ComplexField1D, Mat2, SolitonParams};
use crate::C64;

/// `gamma = PHASE_OFFSET - arg c_1` relates the soliton phase `gamma` to the
/// argument of the norming constant.
pub const PHASE_OFFSET: f64 = -FRAC_PI_2;

/// Everything the Backlund formula needs at one `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacklundInputs {
    pub z1: C64,
    pub c1: C64,
    pub t: f64,
    pub x: f64,
    /// Background RH solution `m(t, x, z_1)`.
    pub m_at_z1: Mat2,
}

impl BacklundInputs {
    pub fn new(z1: C64, c1: C64, t: f64, x: f64, m_at_z1: Mat2) -> Result<Self> {
        check_pair(z1, c1)?;
        if !(t.is_finite() && x.is_finite() && m_at_z1.is_finite()) {
            return Err(Error::NonFinite("Backlund inputs".into()));
        }
        Ok(Self { z1, c1, t, x, m_at_z1 })
    }

    /// `(b_1, b_2)`, the background Jost vector at `z_1` carrying the new bound state.
    pub fn vector(&self) -> (C64, C64) {
        let i = C64::new(0.0, 1.0);
        let z = self.z1;
        let left = (-i * self.x * z).exp();
        let right = self.c1 * (i * self.x * z + 4.0 * i * self.t * z * z).exp() / (2.0 * i * z.im);
        let m = &self.m_at_z1;
        (left * m.get(0, 0) - right * m.get(0, 1), left * m.get(1, 0) - right * m.get(1, 1))
    }
}

fn check_pair(z1: C64, c1: C64) -> Result<()> {
    if !(z1.is_finite() && c1.is_finite()) {
        return Err(Error::NonFinite("soliton spectral parameters".into()));
    }
    if z1.im <= 0.0 {
        return Err(Error::Domain(format!("eigenvalue must lie in the upper half-plane, got {z1}")));
    }
    if c1.norm() == 0.0 {
        return Err(Error::Domain("norming constant must be nonzero".into()));
    }
    Ok(())
}

/// `r(z) (z - z_1) / (z - zbar_1)`: removes the bound state at `z_1` while
/// keeping `|r|` unchanged on the real line.
pub fn strip_reflection(r: &ComplexField1D, z1: C64) -> Result<ComplexField1D> {
    check_pair(z1, C64::new(1.0, 0.0))?;
    r.map(|z, v| v * (z - z1) / (z - z1.conj()))
}

/// `u = u_tilde + 4 Im z_1 b_1 conj(b_2) / (|b_1|^2 + |b_2|^2)`.
pub fn backlund_combine(inputs: &BacklundInputs, u_tilde_at_x: C64) -> Result<C64> {
    let (b1, b2) = inputs.vector();
    let den = b1.norm_sqr() + b2.norm_sqr();
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateBacklund);
    }
    let bump = 4.0 * inputs.z1.im * b1 * b2.conj() / den;
    debug_assert!(bump.norm() <= 2.0 * inputs.z1.im * (1.0 + 1e-12));
    Ok(u_tilde_at_x + bump)
}

/// Reflectionless one-soliton potential with data `(z_1, c_1)` at `(t, x)`.
pub fn soliton_closed_form(z1: C64, c1: C64, t: f64, x: f64) -> Result<C64> {
    check_pair(z1, c1)?;
    let (alpha, beta) = (z1.re, z1.im);
    let delta0 = (c1.norm() / (2.0 * beta)).ln();
    let phase = -2.0 * alpha * x - 4.0 * t * (alpha * alpha - beta * beta) - c1.arg();
    let envelope = 1.0 / (2.0 * beta * x + 8.0 * t * alpha * beta - delta0).cosh();
    Ok(C64::new(0.0, -2.0 * beta) * C64::from_polar(envelope, phase))
}

/// `(z_1, c_1)` for a soliton given by its physical parameters.
pub fn params_to_spectrum(p: &SolitonParams) -> (C64, C64) {
    let z1 = C64::new(-p.v / 2.0, p.omega / 2.0);
    let c1 = C64::from_polar(p.omega * (p.omega * p.x0).exp(), PHASE_OFFSET - p.gamma);
    (z1, c1)
}

/// Physical parameters of the soliton with data `(z_1, c_1)`; `gamma` is
/// reduced to `(-pi, pi]`.
pub fn spectrum_to_params(z1: C64, c1: C64) -> Result<SolitonParams> {
    check_pair(z1, c1)?;
    let omega = 2.0 * z1.im;
    let gamma = C64::from_polar(1.0, PHASE_OFFSET - c1.arg()).arg();
    SolitonParams::new(omega, gamma, -2.0 * z1.re, (c1.norm() / omega).ln() / omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::RealGrid;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn stripping_zero_is_zero() {
        let g = RealGrid::symmetric(3.0, 7).unwrap();
        let r = strip_reflection(&ComplexField1D::zeros(g), c(0.0, 1.0)).unwrap();
        assert!(r.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn blaschke_factor_at_origin() {
        let g = RealGrid::symmetric(1.0, 3).unwrap();
        let r = ComplexField1D::new(g, vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        let s = strip_reflection(&r, c(0.0, 1.0)).unwrap();
        assert!((s.values()[1] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!(strip_reflection(&r, c(0.0, -1.0)).is_err());
    }

    #[test]
    fn unit_soliton_from_identity_background() {
        let inputs = BacklundInputs::new(c(0.0, 0.5), c(1.0, 0.0), 0.0, 0.0, Mat2::IDENTITY).unwrap();
        let (b1, b2) = inputs.vector();
        assert!((b1 - 1.0).norm() < 1e-15);
        assert!((b2 - c(0.0, 1.0)).norm() < 1e-15);
        assert!((backlund_combine(&inputs, c(0.0, 0.0)).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        assert!((soliton_closed_form(c(0.0, 0.5), c(1.0, 0.0), 0.0, 0.0).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn closed_form_decays_and_travels() {
        let (z1, c1) = (c(0.0, 0.5), c(1.0, 0.0));
        for x in [-40.0, 40.0] {
            assert!(soliton_closed_form(z1, c1, 0.0, x).unwrap().norm() < 1e-16);
        }
        // peak where 2 beta x + 8 t alpha beta = delta0
        let (z1, c1, t) = (c(0.3, 0.8), c(0.7, 2.0), 1.5);
        let delta0 = (c1.norm() / 1.6).ln();
        let peak = (delta0 - 8.0 * t * 0.3 * 0.8) / 1.6;
        let at = |x: f64| soliton_closed_form(z1, c1, t, x).unwrap().norm();
        assert!((at(peak) - 1.6).abs() < 1e-14);
        assert!(at(peak + 1e-3) < at(peak) && at(peak - 1e-3) < at(peak));
    }

    #[test]
    fn parameter_examples() {
        let (z1, c1) = params_to_spectrum(&SolitonParams::new(1.0, 0.0, 0.0, 0.0).unwrap());
        assert!((z1 - c(0.0, 0.5)).norm() < 1e-15);
        assert!((c1.norm() - 1.0).abs() < 1e-15);
        let (z1, _) = params_to_spectrum(&SolitonParams::new(2.0, 0.0, 1.0, 0.0).unwrap());
        assert!((z1 - c(-0.5, 1.0)).norm() < 1e-15);
        let p = spectrum_to_params(c(-0.5, 1.0), c(2.0 * 1f64.exp(), 0.0)).unwrap();
        assert!((p.omega - 2.0).abs() < 1e-15 && (p.v - 1.0).abs() < 1e-15 && (p.x0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phase_offset_matches_profiles_pointwise() {
        // the two soliton parameterizations agree on a (t, x) grid
        for &(z1, c1) in &[(c(0.0, 0.5), c(1.0, 0.0)), (c(-0.4, 0.9), c(-1.3, 0.6)), (c(0.7, 0.3), c(0.2, -0.05))] {
            let p = spectrum_to_params(z1, c1).unwrap();
            for t in [-1.0, 0.0, 0.6] {
                for k in 0..41 {
                    let x = -10.0 + 0.5 * k as f64;
                    let err = (p.evaluate(t, x) - soliton_closed_form(z1, c1, t, x).unwrap()).norm();
                    assert!(err < 1e-10, "{z1} {c1} t={t} x={x}: {err}");
                }
            }
        }
        // the unit sech has c = -i and gamma = 0
        let p = spectrum_to_params(c(0.0, 0.5), c(0.0, -1.0)).unwrap();
        assert!(p.gamma.abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn identity_background_reproduces_closed_form(
            a in -1.0..1.0f64, b in 0.1..1.5f64, cr in -2.0..2.0f64, ci in -2.0..2.0f64,
            t in -1.0..1.0f64, x in -6.0..6.0f64,
        ) {
            let (z1, c1) = (c(a, b), c(cr, ci));
            prop_assume!(c1.norm() > 1e-2);
            let u = backlund_combine(&BacklundInputs::new(z1, c1, t, x, Mat2::IDENTITY).unwrap(), c(0.0, 0.0)).unwrap();
            let v = soliton_closed_form(z1, c1, t, x).unwrap();
            prop_assert!((u - v).norm() < 1e-12 * (1.0 + v.norm()));
        }

        #[test]
        fn bump_is_bounded(
            b in 0.05..2.0f64, entries in prop::collection::vec(-3.0..3.0f64, 8), t in -2.0..2.0f64, x in -3.0..3.0f64,
        ) {
            let e: Vec<C64> = entries.chunks(2).map(|p| c(p[0], p[1])).collect();
            let m = Mat2::new(e[0], e[1], e[2], e[3]);
            if let Ok(u) = backlund_combine(&BacklundInputs::new(c(0.2, b), c(1.0, 0.5), t, x, m).unwrap(), c(0.0, 0.0)) {
                prop_assert!(u.norm() <= 2.0 * b * (1.0 + 1e-12));
            }
        }

        #[test]
        fn parameter_round_trip(omega in 0.1..4.0f64, gamma in -3.0..3.0f64, v in -3.0..3.0f64, x0 in -3.0..3.0f64) {
            let p = SolitonParams::new(omega, gamma, v, x0).unwrap();
            let (z1, c1) = params_to_spectrum(&p);
            let q = spectrum_to_params(z1, c1).unwrap();
            prop_assert!((q.omega - omega).abs() < 1e-12 && (q.v - v).abs() < 1e-12 && (q.x0 - x0).abs() < 1e-12);
            prop_assert!(C64::from_polar(1.0, q.gamma - gamma).re > 1.0 - 1e-12);
        }

        #[test]
        fn rotating_c_shifts_gamma(phi in -3.0..3.0f64, cr in 0.2..2.0f64) {
            let z1 = c(0.1, 0.6);
            let p = spectrum_to_params(z1, c(cr, 0.3)).unwrap();
            let q = spectrum_to_params(z1, c(cr, 0.3) * C64::from_polar(1.0, phi)).unwrap();
            prop_assert!(C64::from_polar(1.0, q.gamma - p.gamma + phi).re > 1.0 - 1e-12);
            prop_assert!((q.x0 - p.x0).abs() < 1e-12 && q.omega == p.omega && q.v == p.v);
        }

        #[test]
        fn stripping_preserves_modulus(vals in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 9)) {
            let g = RealGrid::symmetric(4.0, 9).unwrap();
            let r = ComplexField1D::new(g, vals.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
            let s = strip_reflection(&r, c(0.0, 1.0)).unwrap();
            for (p, q) in r.values().iter().zip(s.values()) {
                prop_assert!((p.norm() - q.norm()).abs() <= 1e-15 * (1.0 + p.norm()));
            }
        }
    }
}
