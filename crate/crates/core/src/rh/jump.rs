use crate::types::{Mat2, RealGrid, SpectralData};
use crate::C64;

/// Residue data at one eigenvalue and its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleJump {
    pub z: C64,
    /// `[[0, 0], [e^{2ixz} c, 0]]`
    pub v_at_z: Mat2,
    pub z_conj: C64,
    /// `[[0, -e^{-2ix zbar} cbar], [0, 0]]`
    pub v_at_z_conj: Mat2,
}

impl PoleJump {
    /// `e^{2ixz_k} c_k`, the residue weight at `z_k`.
    pub fn upper_weight(&self) -> C64 {
        self.v_at_z.get(1, 0)
    }

    /// `-e^{-2ix zbar_k} cbar_k`, the residue weight at `zbar_k`.
    pub fn lower_weight(&self) -> C64 {
        self.v_at_z_conj.get(0, 1)
    }
}

/// Jump matrix on the real grid and residue matrices at the poles, for one `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpData {
    pub x: f64,
    pub z_grid: RealGrid,
    pub v_values: Vec<Mat2>,
    pub poles: Vec<PoleJump>,
}

/// `V_x(z) = [[1 + |r|^2, e^{-2ixz} rbar], [e^{2ixz} r, 1]]` plus the nilpotent
/// residue matrices.
pub fn build_jump(data: &SpectralData, x: f64) -> JumpData {
    let v_values = data
        .z_grid()
        .nodes()
        .into_iter()
        .zip(data.r_values())
        .map(|(z, &r)| {
            let e = C64::from_polar(1.0, 2.0 * x * z);
            Mat2::new(C64::new(1.0 + r.norm_sqr(), 0.0), e.conj() * r.conj(), e * r, C64::new(1.0, 0.0))
        })
        .collect();
    let i = C64::new(0.0, 1.0);
    let zero = C64::new(0.0, 0.0);
    let poles = data
        .discrete()
        .iter()
        .map(|p| {
            let a = (2.0 * i * x * p.z).exp() * p.c;
            let b = -(-2.0 * i * x * p.z.conj()).exp() * p.c.conj();
            PoleJump {
                z: p.z,
                v_at_z: Mat2::new(zero, zero, a, zero),
                z_conj: p.z.conj(),
                v_at_z_conj: Mat2::new(zero, b, zero, zero),
            }
        })
        .collect();
    JumpData { x, z_grid: *data.z_grid(), v_values, poles }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Eigenpair;
    use proptest::prelude::*;

    #[test]
    fn no_reflection_no_poles_is_identity() {
        let g = RealGrid::symmetric(3.0, 7).unwrap();
        let j = build_jump(&SpectralData::reflectionless(g, vec![]).unwrap(), 1.3);
        assert!(j.v_values.iter().all(|v| *v == Mat2::IDENTITY));
        assert!(j.poles.is_empty());
    }

    #[test]
    fn direct_substitution_at_x_zero() {
        let g = RealGrid::new(0.0, 1.0, 2).unwrap();
        let d = SpectralData::radiation(g, vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let v = build_jump(&d, 0.0).v_values[0];
        let expected = Mat2::new(C64::new(1.36, 0.0), C64::new(0.6, 0.0), C64::new(0.6, 0.0), C64::new(1.0, 0.0));
        assert!((v - expected).max_abs() < 1e-15);
    }

    #[test]
    fn residue_matrices_are_nilpotent() {
        let g = RealGrid::symmetric(3.0, 7).unwrap();
        let d = SpectralData::reflectionless(g, vec![Eigenpair { z: C64::new(0.2, 0.7), c: C64::new(-1.0, 2.0) }]).unwrap();
        let p = build_jump(&d, -0.8).poles[0];
        assert_eq!(p.v_at_z * p.v_at_z, Mat2::ZERO);
        assert_eq!(p.v_at_z_conj * p.v_at_z_conj, Mat2::ZERO);
        // V(zbar) = -V(z)^*
        assert!((p.v_at_z_conj + p.v_at_z.conj_transpose()).max_abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn jump_is_unimodular(vals in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 5), x in -20.0..20.0f64) {
            let g = RealGrid::symmetric(2.0, 5).unwrap();
            let r = vals.iter().map(|&(a, b)| C64::new(a, b)).collect();
            let j = build_jump(&SpectralData::radiation(g, r).unwrap(), x);
            for v in &j.v_values {
                prop_assert!((v.det() - 1.0).norm() < 1e-12);
            }
        }
    }
}
