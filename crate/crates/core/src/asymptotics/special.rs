//! Complex Gamma and parabolic cylinder functions.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::C64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest `|a|` accepted by [`parabolic_cylinder`].
pub const ORDER_LIMIT: f64 = 2.0;
/// Largest `|zeta|` accepted by [`parabolic_cylinder`].
pub const ARGUMENT_LIMIT: f64 = 50.0;

/// Below this radius the Maclaurin series is summed directly.
const SERIES_RADIUS: f64 = 4.0;
/// Above this radius (and for `|arg zeta| <= 5 pi / 8`) the asymptotic series is used.
const ASYMPTOTIC_RADIUS: f64 = 12.0;
const ASYMPTOTIC_SECTOR: f64 = 5.0 * PI / 8.0;
const ODE_STEP: f64 = 0.5;

/// `Gamma(z)` by the Lanczos approximation with reflection for `Re z < 1/2`.
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        PI / ((PI * z).sin() * gamma(1.0 - z))
    } else {
        let z = z - 1.0;
        let mut acc = C64::new(LANCZOS[0], 0.0);
        for (k, &p) in LANCZOS.iter().enumerate().skip(1) {
            acc += p / (z + k as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * acc
    }
}

/// `1 / Gamma(z)`, entire; exactly zero at `z = 0`.
pub fn recip_gamma(z: C64) -> C64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        gamma(1.0 - z) * (PI * z).sin() / PI
    } else {
        1.0 / gamma(z)
    }
}

/// `D_a(zeta)` normalised by `D_a(zeta) ~ e^{-zeta^2/4} zeta^a` as
/// `zeta -> infinity` in `|arg zeta| < 3 pi / 4`.
pub fn parabolic_cylinder(a: C64, zeta: C64) -> Result<C64> {
    check_envelope(a, zeta)?;
    Ok(eval(a, zeta))
}

/// `(D_a(zeta), D_a'(zeta))`, the derivative from `D_a' = -(zeta/2) D_a + a D_{a-1}`.
pub fn parabolic_cylinder_with_derivative(a: C64, zeta: C64) -> Result<(C64, C64)> {
    check_envelope(a, zeta)?;
    Ok(eval_with_derivative(a, zeta))
}

fn check_envelope(a: C64, zeta: C64) -> Result<()> {
    if !a.is_finite() || !zeta.is_finite() {
        return Err(Error::NonFinite("parabolic cylinder arguments".into()));
    }
    if a.norm() > ORDER_LIMIT || zeta.norm() > ARGUMENT_LIMIT {
        return Err(Error::UnsupportedRange(format!(
            "D_a(zeta) validated for |a| <= {ORDER_LIMIT}, |zeta| <= {ARGUMENT_LIMIT}; got a = {a}, zeta = {zeta}"
        )));
    }
    Ok(())
}

pub(crate) fn eval_with_derivative(a: C64, zeta: C64) -> (C64, C64) {
    let d = eval(a, zeta);
    let lower = if a == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { a * eval(a - 1.0, zeta) };
    (d, -0.5 * zeta * d + lower)
}

pub(crate) fn eval(a: C64, zeta: C64) -> C64 {
    let rho = zeta.norm();
    if rho <= SERIES_RADIUS {
        return maclaurin(a, zeta);
    }
    let theta = zeta.arg();
    if theta.abs() > ASYMPTOTIC_SECTOR {
        return connection(a, zeta);
    }
    if rho >= ASYMPTOTIC_RADIUS {
        return asymptotic(a, zeta).0;
    }
    let dir = C64::from_polar(1.0, theta);
    if theta.abs() < FRAC_PI_4 {
        // D is recessive here: march inward from the asymptotic radius.
        let start = ASYMPTOTIC_RADIUS * dir;
        let (d, dd) = asymptotic_with_derivative(a, start);
        march(a, start, d, dd, zeta).0
    } else {
        let start = SERIES_RADIUS * dir;
        let d = maclaurin(a, start);
        let dd = -0.5 * start * d + if a == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { a * maclaurin(a - 1.0, start) };
        march(a, start, d, dd, zeta).0
    }
}

/// Maclaurin form through Kummer's function.
fn maclaurin(a: C64, zeta: C64) -> C64 {
    let w = 0.5 * zeta * zeta;
    let pre = (-0.25 * zeta * zeta).exp() * C64::new(2.0, 0.0).powc(0.5 * a) * PI.sqrt();
    let even = recip_gamma(0.5 * (1.0 - a)) * kummer(-0.5 * a, C64::new(0.5, 0.0), w);
    let odd = recip_gamma(-0.5 * a) * 2f64.sqrt() * zeta * kummer(0.5 * (1.0 - a), C64::new(1.5, 0.0), w);
    pre * (even - odd)
}

fn kummer(alpha: C64, b: C64, w: C64) -> C64 {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..400 {
        let nf = n as f64;
        term *= (alpha + nf) / (b + nf) * w / (nf + 1.0);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && n > 4 {
            break;
        }
    }
    sum
}

/// Asymptotic series, summed to its smallest term; also returns that term.
fn asymptotic(a: C64, zeta: C64) -> (C64, f64) {
    let inv = 1.0 / (zeta * zeta);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for n in 1..200 {
        let nf = n as f64;
        let next = term * (-(a - 2.0 * nf + 2.0) * (a - 2.0 * nf + 1.0) / (2.0 * nf)) * inv;
        let size = next.norm();
        if size >= last {
            break;
        }
        sum += next;
        term = next;
        last = size;
        if size <= 1e-17 * sum.norm() {
            break;
        }
    }
    ((-0.25 * zeta * zeta).exp() * zeta.powc(a) * sum, last)
}

fn asymptotic_with_derivative(a: C64, zeta: C64) -> (C64, C64) {
    let d = asymptotic(a, zeta).0;
    let lower = if a == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { a * asymptotic(a - 1.0, zeta).0 };
    (d, -0.5 * zeta * d + lower)
}

/// Reduce `|arg zeta| > 5 pi / 8` to arguments in the asymptotic sector:
/// `D_a(z) = e^{-+ i pi a} D_a(-z) + sqrt(2 pi)/Gamma(-a) e^{-+ i pi (a+1)/2} D_{-a-1}(+- i z)`,
/// upper signs for `Im z < 0`.
fn connection(a: C64, zeta: C64) -> C64 {
    let s = if zeta.im < 0.0 { 1.0 } else { -1.0 };
    let i = C64::new(0.0, 1.0);
    let first = (-s * i * PI * a).exp() * eval(a, -zeta);
    let second = (2.0 * PI).sqrt()
        * recip_gamma(-a)
        * (-s * i * PI * (a + 1.0) / 2.0).exp()
        * eval(-a - 1.0, s * i * zeta);
    first + second
}

/// Integrate `y'' = (zeta^2/4 - a - 1/2) y` by local Taylor series along
/// the straight segment from `from` to `to`.
fn march(a: C64, from: C64, mut y: C64, mut dy: C64, to: C64) -> (C64, C64) {
    let span = to - from;
    let steps = (span.norm() / ODE_STEP).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut centre = from;
    for _ in 0..steps {
        let q0 = 0.25 * centre * centre - a - 0.5;
        let q1 = 0.5 * centre;
        let q2 = C64::new(0.25, 0.0);
        let mut c = vec![y, dy];
        let (mut val, mut der) = (y + dy * h, dy);
        let mut hk = h;
        for k in 0..120usize {
            let mut rhs = q0 * c[k];
            if k >= 1 {
                rhs += q1 * c[k - 1];
            }
            if k >= 2 {
                rhs += q2 * c[k - 2];
            }
            let next = rhs / ((k + 2) as f64 * (k + 1) as f64);
            c.push(next);
            // hk = h^{k+1} here
            der += (k + 2) as f64 * next * hk;
            hk *= h;
            let add = next * hk;
            val += add;
            if k > 6 && add.norm() <= 1e-18 * val.norm() && c[k + 1].norm() * hk.norm() <= 1e-18 * val.norm() {
                break;
            }
        }
        y = val;
        dy = der;
        centre += h;
    }
    (y, dy)
}

/// Largest relative disagreement between the evaluation branches at their
/// seams (series against marched values at the inner radius, asymptotic
/// against marched values at the outer radius), over a lattice of orders
/// and angles.
pub fn seam_discrepancy() -> f64 {
    let orders = [
        C64::new(0.0, 0.0),
        C64::new(0.0, -0.3),
        C64::new(0.0, 0.3),
        C64::new(0.0, -1.0),
        C64::new(-1.0, 0.2),
        C64::new(0.5, -0.5),
    ];
    let mut worst = 0.0f64;
    for &a in &orders {
        for k in 0..24 {
            let theta = -ASYMPTOTIC_SECTOR + (2.0 * ASYMPTOTIC_SECTOR) * k as f64 / 23.0;
            let dir = C64::from_polar(1.0, theta);
            let (inner, outer) = (SERIES_RADIUS * dir, ASYMPTOTIC_RADIUS * dir);
            let (lhs, rhs) = if theta.abs() < FRAC_PI_4 {
                let (d, dd) = asymptotic_with_derivative(a, outer);
                (maclaurin(a, inner), march(a, outer, d, dd, inner).0)
            } else {
                let d = maclaurin(a, inner);
                let dd = -0.5 * inner * d + a * maclaurin(a - 1.0, inner);
                (asymptotic(a, outer).0, march(a, inner, d, dd, outer).0)
            };
            let scale = lhs.norm().max(rhs.norm());
            if scale > 0.0 {
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
    }
    worst
}

/// Startup check that the evaluation branches agree to `1e-9` at their seams.
pub fn self_test() -> Result<f64> {
    let worst = seam_discrepancy();
    if worst > 1e-9 {
        return Err(Error::Accuracy(format!("parabolic cylinder branches disagree by {worst:.3e}")));
    }
    Ok(worst)
}
