//! The parabolic-cylinder model problem on the six-ray cross.

use std::f64::consts::{FRAC_PI_4, PI};

use super::special::{eval_with_derivative, gamma, ARGUMENT_LIMIT};
use crate::error::{Error, Result};
use crate::types::Mat2;
use crate::C64;

/// Angular distance from a ray below which [`model_p`] refuses to pick a sector.
pub const RAY_TOLERANCE: f64 = 1e-12;

/// `(k1, k2)` for given `nu` and `r0`:
/// `k1 = -i sqrt(2 pi) e^{i pi/4} e^{-pi nu/2} / (r0 Gamma(-i nu))`, `k2 = nu / k1`.
pub fn k_pair(nu: f64, r0: C64) -> (C64, C64) {
    let i = C64::new(0.0, 1.0);
    let k1 = -i * (2.0 * PI).sqrt() * C64::from_polar(1.0, FRAC_PI_4) * (-PI * nu / 2.0).exp() / (r0 * gamma(-i * nu));
    (k1, nu / k1)
}

/// Sectors `Omega_1..Omega_6` counted anticlockwise from the positive axis,
/// the lower half-plane ones by principal argument in `(-pi, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sector {
    One,
    Two,
    Three,
    Four,
    Five,
    Six,
}

impl Sector {
    fn of(zeta: C64) -> Result<Self> {
        if zeta.norm() == 0.0 {
            return Err(Error::RayAmbiguity(zeta));
        }
        let theta = zeta.arg();
        for ray in [FRAC_PI_4, 3.0 * FRAC_PI_4, -FRAC_PI_4, -3.0 * FRAC_PI_4] {
            if (theta - ray).abs() < RAY_TOLERANCE {
                return Err(Error::RayAmbiguity(zeta));
            }
        }
        Ok(match theta {
            t if (0.0..FRAC_PI_4).contains(&t) => Sector::One,
            t if (FRAC_PI_4..3.0 * FRAC_PI_4).contains(&t) => Sector::Two,
            t if t >= 3.0 * FRAC_PI_4 => Sector::Three,
            t if t < -3.0 * FRAC_PI_4 => Sector::Four,
            t if t < -FRAC_PI_4 => Sector::Five,
            _ => Sector::Six,
        })
    }
}

struct Model {
    nu: f64,
    r0: C64,
    k1: C64,
    k2: C64,
}

impl Model {
    fn new(nu: f64, r0: C64) -> Self {
        let (k1, k2) = k_pair(nu, r0);
        Self { nu, r0, k1, k2 }
    }

    /// `D_a(c zeta)` and its `zeta`-derivative.
    fn rotated(a: C64, c: C64, zeta: C64) -> (C64, C64) {
        let (d, dd) = eval_with_derivative(a, c * zeta);
        (d, c * dd)
    }

    fn psi(&self, zeta: C64, upper: bool) -> Mat2 {
        let i = C64::new(0.0, 1.0);
        let a = i * self.nu;
        let (e_big, e_small) = ((-3.0 * PI * self.nu / 4.0).exp(), (PI * self.nu / 4.0).exp());
        let (c1, c2, f1, f2) = if upper {
            (C64::from_polar(1.0, -3.0 * FRAC_PI_4), C64::from_polar(1.0, -FRAC_PI_4), e_big, e_small)
        } else {
            (C64::from_polar(1.0, FRAC_PI_4), C64::from_polar(1.0, 3.0 * FRAC_PI_4), e_small, e_big)
        };
        let (d1, d1p) = Self::rotated(a, c1, zeta);
        let (d2, d2p) = Self::rotated(-a, c2, zeta);
        let half = 0.5 * i * zeta;
        Mat2::new(
            f1 * d1,
            f2 / (-i * self.k2) * (d2p - half * d2),
            f1 / (i * self.k1) * (d1p + half * d1),
            f2 * d2,
        )
    }

    /// `zeta^{-i nu sigma_3} e^{i zeta^2 sigma_3 / 4}`, principal branch.
    fn normaliser(&self, zeta: C64) -> Mat2 {
        let i = C64::new(0.0, 1.0);
        let e = (-i * self.nu * zeta.ln() + 0.25 * i * zeta * zeta).exp();
        Mat2::diag(e, 1.0 / e)
    }

    fn in_sector(&self, zeta: C64, sector: Sector) -> Mat2 {
        let rb = self.r0.conj();
        let damp = 1.0 + self.r0.norm_sqr();
        let (upper, tri) = match sector {
            Sector::One => (true, Mat2::lower(-self.r0)),
            Sector::Two => (true, Mat2::IDENTITY),
            Sector::Three => (true, Mat2::upper(-rb / damp)),
            Sector::Four => (false, Mat2::lower(self.r0 / damp)),
            Sector::Five => (false, Mat2::IDENTITY),
            Sector::Six => (false, Mat2::upper(rb)),
        };
        self.psi(zeta, upper) * tri * self.normaliser(zeta)
    }
}

/// The model matrix `P(zeta)` for the parameters `(nu, r0)`; the identity
/// when `r0 = 0`.
pub fn model_p(zeta: C64, nu: f64, r0: C64) -> Result<Mat2> {
    if !zeta.is_finite() || !nu.is_finite() || !r0.is_finite() {
        return Err(Error::NonFinite("model problem arguments".into()));
    }
    if zeta.norm() > ARGUMENT_LIMIT {
        return Err(Error::UnsupportedRange(format!("|zeta| = {} exceeds {ARGUMENT_LIMIT}", zeta.norm())));
    }
    let sector = Sector::of(zeta)?;
    if r0.norm() == 0.0 {
        return Ok(Mat2::IDENTITY);
    }
    Ok(Model::new(nu, r0).in_sector(zeta, sector))
}

/// `nu = -(1/2 pi) log(1 + |r0|^2)`.
pub fn nu_of(r0: C64) -> f64 {
    -r0.norm_sqr().ln_1p() / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> C64 {
        C64::new(0.0, 1.0)
    }

    fn params() -> Vec<C64> {
        vec![C64::new(0.5, 0.0), C64::new(0.3, -0.4), C64::from_polar(1.2, 2.0)]
    }

    #[test]
    fn k1_modulus_identity() {
        for r0 in params() {
            let nu = nu_of(r0);
            let (k1, k2) = k_pair(nu, r0);
            assert!((k1.norm_sqr() + nu).abs() < 1e-12, "{}", k1.norm_sqr() + nu);
            assert!((k1 * k2 - nu).norm() < 1e-15);
        }
    }

    #[test]
    fn unimodular_in_every_sector() {
        for r0 in params() {
            let nu = nu_of(r0);
            for rho in [0.3, 2.0, 5.0, 9.0, 15.0] {
                for k in 0..12 {
                    let zeta = C64::from_polar(rho, -PI + (k as f64 + 0.37) * PI / 6.0);
                    let p = model_p(zeta, nu, r0).unwrap();
                    assert!((p.det() - 1.0).norm() < 1e-8, "r0 = {r0}, zeta = {zeta}: det {}", p.det());
                }
            }
        }
    }

    #[test]
    fn jumps_on_the_four_rays() {
        for r0 in params() {
            let nu = nu_of(r0);
            let m = Model::new(nu, r0);
            let damp = 1.0 + r0.norm_sqr();
            let e = |z: C64| (-2.0 * i() * nu * z.ln() + 0.5 * i() * z * z).exp();
            for rho in [0.5, 1.7, 4.4, 8.0] {
                let z1 = C64::from_polar(rho, FRAC_PI_4);
                let v1 = Mat2::lower(r0 * e(z1));
                let z2 = C64::from_polar(rho, 3.0 * FRAC_PI_4);
                let v2 = Mat2::upper(r0.conj() / damp / e(z2));
                let z3 = C64::from_polar(rho, -3.0 * FRAC_PI_4);
                let v3 = Mat2::lower(r0 / damp * e(z3));
                let z4 = C64::from_polar(rho, -FRAC_PI_4);
                let v4 = Mat2::upper(r0.conj() / e(z4));
                let cases = [
                    (z1, Sector::Two, Sector::One, v1),
                    (z2, Sector::Two, Sector::Three, v2),
                    (z3, Sector::Four, Sector::Five, v3),
                    (z4, Sector::Six, Sector::Five, v4),
                ];
                for (z, plus, minus, v) in cases {
                    let lhs = m.in_sector(z, plus);
                    let rhs = m.in_sector(z, minus) * v;
                    let err = (lhs - rhs).max_abs() / lhs.max_abs();
                    assert!(err < 1e-7, "r0 = {r0}, zeta = {z}: {err}");
                }
            }
        }
    }

    #[test]
    fn continuous_across_the_real_axis() {
        for r0 in params() {
            let nu = nu_of(r0);
            for x in [-6.0, -1.3, 0.7, 3.0] {
                let above = model_p(C64::new(x, 1e-10), nu, r0).unwrap();
                let below = model_p(C64::new(x, -1e-10), nu, r0).unwrap();
                assert!((above - below).max_abs() < 1e-8 * above.max_abs(), "x = {x}");
            }
        }
    }

    #[test]
    fn psi_halves_are_related_on_the_line() {
        let r0 = C64::new(0.3, -0.4);
        let m = Model::new(nu_of(r0), r0);
        let v = Mat2::new(C64::new(1.0 + r0.norm_sqr(), 0.0), r0.conj(), r0, C64::new(1.0, 0.0));
        for x in [-3.0, -0.5, 1.0, 2.5] {
            let z = C64::new(x, 0.0);
            let err = (m.psi(z, true) - m.psi(z, false) * v).max_abs();
            assert!(err < 1e-9, "x = {x}: {err}");
        }
    }

    #[test]
    fn expansion_at_infinity() {
        for r0 in params() {
            let nu = nu_of(r0);
            let (k1, k2) = k_pair(nu, r0);
            let p1 = Mat2::new(C64::new(0.0, 0.0), k1, k2, C64::new(0.0, 0.0));
            let mut prev = f64::INFINITY;
            for rho in [10.0, 20.0, 40.0] {
                for theta in [PI / 2.0, 0.1, -PI / 2.0, 2.9] {
                    let zeta = C64::from_polar(rho, theta);
                    let p = model_p(zeta, nu, r0).unwrap();
                    let err = ((p - Mat2::IDENTITY).scale(zeta) - p1).max_abs();
                    assert!(err < 3.0 / rho, "r0 = {r0}, zeta = {zeta}: {err}");
                    if theta == PI / 2.0 {
                        assert!(err < prev);
                        prev = err;
                    }
                }
            }
        }
    }

    #[test]
    fn rays_and_origin_are_rejected() {
        let r0 = C64::new(0.5, 0.0);
        let nu = nu_of(r0);
        assert!(matches!(model_p(C64::from_polar(2.0, FRAC_PI_4), nu, r0), Err(Error::RayAmbiguity(_))));
        assert!(matches!(model_p(C64::from_polar(2.0, -3.0 * FRAC_PI_4), nu, r0), Err(Error::RayAmbiguity(_))));
        assert!(matches!(model_p(C64::new(0.0, 0.0), nu, r0), Err(Error::RayAmbiguity(_))));
    }

    #[test]
    fn vanishing_reflection_gives_identity() {
        assert_eq!(model_p(C64::new(1.0, 2.0), 0.0, C64::new(0.0, 0.0)).unwrap(), Mat2::IDENTITY);
    }
}
