//! Kelvin notation for symmetric tensors, the √2-scaled rotation vector for
//! skew tensors, and the isotropic material law.
//!
//! 3D: `[a11, a22, a33, √2 a23, √2 a13, √2 a12]`; 2D: `[a11, a22, √2 a12]`.
//! With this scaling `A:B = â·b̂`.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Length of a Kelvin vector in dimension `dim`.
pub fn kelvin_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Length of a rotation vector in dimension `dim`.
pub fn rotation_len(dim: usize) -> usize {
    dim * (dim - 1) / 2
}

/// Index pairs `(i, j)` of the Kelvin components, diagonal entries first.
pub fn kelvin_pairs(dim: usize) -> &'static [(usize, usize)] {
    match dim {
        2 => &[(0, 0), (1, 1), (0, 1)],
        _ => &[(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)],
    }
}

fn check_square(a: &DMatrix<f64>) -> Result<usize> {
    let d = a.nrows();
    if d != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: a.ncols(),
        });
    }
    if d != 2 && d != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: d });
    }
    Ok(d)
}

/// Symmetric `d×d` tensor to Kelvin vector. Rejects asymmetry above
/// `1e-12` relative to the largest entry.
pub fn kelvin_of_sym(s: &DMatrix<f64>) -> Result<DVector<f64>> {
    let d = check_square(s)?;
    let asym = (s - s.transpose()).amax();
    if asym > 1e-12 * s.amax().max(f64::MIN_POSITIVE) {
        return Err(Error::NonSymmetric(asym));
    }
    Ok(DVector::from_iterator(
        kelvin_len(d),
        kelvin_pairs(d).iter().map(|&(i, j)| {
            if i == j {
                s[(i, i)]
            } else {
                SQRT_2 * 0.5 * (s[(i, j)] + s[(j, i)])
            }
        }),
    ))
}

/// Inverse of [`kelvin_of_sym`].
pub fn sym_of_kelvin(v: &DVector<f64>) -> Result<DMatrix<f64>> {
    let d = match v.len() {
        3 => 2,
        6 => 3,
        n => return Err(Error::DimensionMismatch { expected: 6, got: n }),
    };
    let mut s = DMatrix::zeros(d, d);
    for (k, &(i, j)) in kelvin_pairs(d).iter().enumerate() {
        if i == j {
            s[(i, i)] = v[k];
        } else {
            s[(i, j)] = v[k] / SQRT_2;
            s[(j, i)] = v[k] / SQRT_2;
        }
    }
    Ok(s)
}

/// Skew tensor to rotation vector `√2 (a32, a13, a21)`; in 2D the single
/// entry `√2 a21`. Then `a x = (1/√2) â × x` and `A:B = â·b̂`.
pub fn rotation_of_skew(a: &DMatrix<f64>) -> Result<DVector<f64>> {
    let d = check_square(a)?;
    let sym = (a + a.transpose()).amax();
    if sym > 1e-12 * a.amax().max(f64::MIN_POSITIVE) {
        return Err(Error::NonSymmetric(sym));
    }
    Ok(if d == 2 {
        DVector::from_element(1, SQRT_2 * a[(1, 0)])
    } else {
        DVector::from_vec(vec![SQRT_2 * a[(2, 1)], SQRT_2 * a[(0, 2)], SQRT_2 * a[(1, 0)]])
    })
}

/// Inverse of [`rotation_of_skew`].
pub fn skew_of_rotation(v: &DVector<f64>) -> Result<DMatrix<f64>> {
    let w = v / SQRT_2;
    match v.len() {
        1 => Ok(DMatrix::from_row_slice(2, 2, &[0.0, -w[0], w[0], 0.0])),
        3 => Ok(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0],
        )),
        n => Err(Error::DimensionMismatch { expected: 3, got: n }),
    }
}

/// `(λ, μ)` from Young's modulus and Poisson's ratio.
pub fn lame_from_young(e: f64, nu: f64) -> (f64, f64) {
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let mu = e / (2.0 * (1.0 + nu));
    (lambda, mu)
}

/// Stiffness tensor `Ĉ` in Kelvin form, so that `â·Ĉb̂ = A:CB`.
#[derive(Debug, Clone, PartialEq)]
pub struct KelvinMaterial {
    c: DMatrix<f64>,
    lame: Option<(f64, f64)>,
}

impl KelvinMaterial {
    /// Checks symmetry and positive definiteness (ellipticity).
    pub fn new(c: DMatrix<f64>) -> Result<Self> {
        let k = c.nrows();
        if k != c.ncols() || (k != 3 && k != 6) {
            return Err(Error::DimensionMismatch { expected: 6, got: k });
        }
        let scale = c.amax();
        let asym = (&c - c.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::NonSymmetric(asym));
        }
        let eig = SymmetricEigen::new(c.clone());
        let min = eig.eigenvalues.min();
        if !(min > 1e-14 * scale) {
            return Err(Error::NonElliptic(format!("smallest eigenvalue {min:e}")));
        }
        Ok(Self { c, lame: None })
    }

    /// Isotropic law; 2D is plane strain.
    pub fn isotropic(lambda: f64, mu: f64, dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: dim });
        }
        if !(mu > 0.0) || !(lambda > -2.0 * mu / dim as f64) {
            return Err(Error::NonElliptic(format!("λ = {lambda}, μ = {mu}")));
        }
        let k = kelvin_len(dim);
        let mut c = DMatrix::zeros(k, k);
        for i in 0..dim {
            for j in 0..dim {
                c[(i, j)] = lambda;
            }
        }
        for i in 0..k {
            c[(i, i)] += 2.0 * mu;
        }
        let mut m = Self::new(c)?;
        m.lame = Some((lambda, mu));
        Ok(m)
    }

    pub fn from_young(e: f64, nu: f64, dim: usize) -> Result<Self> {
        if !(e > 0.0) || !(nu > -1.0 && nu < 0.5) {
            return Err(Error::NonElliptic(format!("E = {e}, ν = {nu}")));
        }
        let (lambda, mu) = lame_from_young(e, nu);
        Self::isotropic(lambda, mu, dim)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn dim(&self) -> usize {
        if self.c.nrows() == 3 {
            2
        } else {
            3
        }
    }

    /// `(λ, μ)` if the material was built from isotropic parameters.
    pub fn lame(&self) -> Option<(f64, f64)> {
        self.lame
    }

    pub fn trace(&self) -> f64 {
        self.c.trace()
    }

    /// Uniaxial-strain modulus along a coordinate axis, `Ĉ_{aa}`
    /// (`λ + 2μ` for isotropic materials).
    pub fn axial_modulus(&self, axis: usize) -> f64 {
        self.c[(axis, axis)]
    }

    /// `ε̂ᵀ Ĉ ε̂`.
    pub fn energy_density(&self, eps: &DVector<f64>) -> Result<f64> {
        if eps.len() != self.c.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.c.nrows(),
                got: eps.len(),
            });
        }
        Ok(eps.dot(&(&self.c * eps)))
    }

    /// `Ĉ ε̂`, the Kelvin stress.
    pub fn stress(&self, eps: &DVector<f64>) -> DVector<f64> {
        &self.c * eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn contract(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a.transpose() * b).trace()
    }

    #[test]
    fn identity_and_shear_entry() {
        let v = kelvin_of_sym(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let mut s = DMatrix::zeros(3, 3);
        s[(1, 2)] = 1.0;
        s[(2, 1)] = 1.0;
        let v = kelvin_of_sym(&s).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 0.0, 0.0, SQRT_2, 0.0, 0.0]);
        assert!((v.dot(&v) - 2.0).abs() < 1e-15);
        assert!((contract(&s, &s) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_is_rejected() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(kelvin_of_sym(&s), Err(Error::NonSymmetric(_))));
    }

    #[test]
    fn isotropic_3d_lambda_zero() {
        let m = KelvinMaterial::isotropic(0.0, 1.0, 3).unwrap();
        assert_eq!(m.matrix(), &(DMatrix::identity(6, 6) * 2.0));
        assert_eq!(m.trace(), 12.0);
    }

    #[test]
    fn plane_strain_trace_and_entries() {
        let (l, mu) = (1.7, 0.6);
        let m = KelvinMaterial::isotropic(l, mu, 2).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[l + 2.0 * mu, l, 0.0, l, l + 2.0 * mu, 0.0, 0.0, 0.0, 2.0 * mu]);
        assert_eq!(m.matrix(), &expect);
        assert!((m.trace() - (2.0 * l + 6.0 * mu)).abs() < 1e-15);
        let m3 = KelvinMaterial::isotropic(l, mu, 3).unwrap();
        assert!((m3.trace() - (3.0 * l + 12.0 * mu)).abs() < 1e-14);
    }

    #[test]
    fn young_conversion() {
        let (e, nu) = (3e8, 0.3);
        let (l, mu) = lame_from_young(e, nu);
        // independent evaluation through bulk and shear moduli
        let k = e / (3.0 * (1.0 - 2.0 * nu));
        let g = e / (2.0 + 2.0 * nu);
        assert!((mu - g).abs() < 1e-6);
        assert!((l - (k - 2.0 * g / 3.0)).abs() < 1e-6);
        let m = KelvinMaterial::from_young(e, nu, 2).unwrap();
        assert!((m.axial_modulus(1) - (l + 2.0 * mu)).abs() < 1e-6);
        // λ + 2μ = E(1−ν)/((1+ν)(1−2ν))
        let p = e * (1.0 - nu) / ((1.0 + nu) * (1.0 - 2.0 * nu));
        assert!((m.axial_modulus(1) / p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_elliptic_rejected() {
        assert!(KelvinMaterial::isotropic(1.0, 0.0, 3).is_err());
        assert!(KelvinMaterial::isotropic(-1.0, 1.0, 2).is_err());
        assert!(KelvinMaterial::from_young(1.0, 0.5, 3).is_err());
    }

    #[test]
    fn energy_density_values() {
        let m = KelvinMaterial::isotropic(1.0, 1.0, 3).unwrap();
        assert_eq!(m.energy_density(&DVector::zeros(6)).unwrap(), 0.0);
        let eps = kelvin_of_sym(&DMatrix::identity(3, 3)).unwrap();
        // λ tr(ε)² + 2μ ε:ε = 9 + 6
        assert!((m.energy_density(&eps).unwrap() - 15.0).abs() < 1e-13);
        assert!(m.energy_density(&DVector::zeros(3)).is_err());
    }

    #[test]
    fn isotropic_eigenvalues() {
        for dim in [2, 3] {
            let (l, mu) = (2.3, 0.7);
            let m = KelvinMaterial::isotropic(l, mu, dim).unwrap();
            let mut ev: Vec<f64> = SymmetricEigen::new(m.matrix().clone()).eigenvalues.iter().copied().collect();
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let top = dim as f64 * l + 2.0 * mu;
            assert!((ev[ev.len() - 1] - top).abs() < 1e-12);
            for v in &ev[..ev.len() - 1] {
                assert!((v - 2.0 * mu).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn plane_strain_is_restriction_of_3d() {
        let (l, mu) = (1.3, 0.9);
        let c3 = KelvinMaterial::isotropic(l, mu, 3).unwrap();
        let c2 = KelvinMaterial::isotropic(l, mu, 2).unwrap();
        let idx = [0, 1, 5];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                assert_eq!(c2.matrix()[(a, b)], c3.matrix()[(i, j)]);
            }
        }
    }

    #[test]
    fn rotation_vector_cross_product() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -0.3, 0.2, 0.3, 0.0, -0.7, -0.2, 0.7, 0.0]);
        let r = rotation_of_skew(&a).unwrap();
        let rv = nalgebra::Vector3::new(r[0], r[1], r[2]);
        let x = nalgebra::Vector3::new(0.4, -1.1, 2.5);
        let ax = &a * DVector::from_column_slice(x.as_slice());
        let cx = rv.cross(&x) / SQRT_2;
        for i in 0..3 {
            assert!((ax[i] - cx[i]).abs() < 1e-15);
        }
        assert!((r.dot(&r) - contract(&a, &a)).abs() < 1e-14);
        assert_eq!(skew_of_rotation(&r).unwrap(), a);
    }

    fn sym_from(d: usize, v: &[f64]) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(d, d);
        let mut k = 0;
        for i in 0..d {
            for j in i..d {
                s[(i, j)] = v[k];
                s[(j, i)] = v[k];
                k += 1;
            }
        }
        s
    }

    proptest! {
        #[test]
        fn kelvin_isometry(d in 2usize..4, a in prop::collection::vec(-10.0f64..10.0, 6), b in prop::collection::vec(-10.0f64..10.0, 6)) {
            let sa = sym_from(d, &a);
            let sb = sym_from(d, &b);
            let ka = kelvin_of_sym(&sa).unwrap();
            let kb = kelvin_of_sym(&sb).unwrap();
            let direct = contract(&sa, &sb);
            prop_assert!((ka.dot(&kb) - direct).abs() <= 1e-13 * (1.0 + direct.abs()));
            let back = sym_of_kelvin(&ka).unwrap();
            prop_assert!((back - sa).amax() <= 1e-14 * 10.0);
        }

        #[test]
        fn stiffness_identity(d in 2usize..4, a in prop::collection::vec(-1.0f64..1.0, 6), b in prop::collection::vec(-1.0f64..1.0, 6), l in 0.0f64..5.0, mu in 0.1f64..5.0) {
            let sa = sym_from(d, &a);
            let sb = sym_from(d, &b);
            let m = KelvinMaterial::isotropic(l, mu, d).unwrap();
            let ka = kelvin_of_sym(&sa).unwrap();
            let kb = kelvin_of_sym(&sb).unwrap();
            let cb = DMatrix::identity(d, d) * (l * sb.trace()) + &sb * (2.0 * mu);
            let direct = contract(&sa, &cb);
            prop_assert!((ka.dot(&m.stress(&kb)) - direct).abs() <= 1e-13 * (1.0 + direct.abs()));
        }
    }
}
