//! Bilinear (Q1) finite element reference on quadrilaterals.

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::kelvin::KelvinMaterial;

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Reference-square shape function gradients at `(ξ, η)`.
fn ref_gradients(xi: f64, eta: f64) -> [[f64; 2]; 4] {
    [
        [-0.25 * (1.0 - eta), -0.25 * (1.0 - xi)],
        [0.25 * (1.0 - eta), -0.25 * (1.0 + xi)],
        [0.25 * (1.0 + eta), 0.25 * (1.0 + xi)],
        [-0.25 * (1.0 + eta), 0.25 * (1.0 - xi)],
    ]
}

/// Exact 8×8 Q1 stiffness (node-major dofs) of a convex quadrilateral with
/// counter-clockwise corners, by 3×3 Gauss quadrature.
pub fn q1_stiffness(corners: &[[f64; 2]; 4], material: &KelvinMaterial) -> Result<DMatrix<f64>> {
    if material.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: material.dim(),
        });
    }
    let c = material.matrix();
    let mut k = DMatrix::zeros(8, 8);
    for &(xi, wx) in &GAUSS3 {
        for &(eta, wy) in &GAUSS3 {
            let g = ref_gradients(xi, eta);
            let mut jac = Matrix2::zeros();
            for (a, p) in corners.iter().enumerate() {
                for r in 0..2 {
                    for s in 0..2 {
                        jac[(r, s)] += p[r] * g[a][s];
                    }
                }
            }
            let det = jac.determinant();
            if !(det > 0.0) {
                return Err(Error::InvalidMesh(format!("degenerate or non-convex quadrilateral (det J = {det:e})")));
            }
            let jinv_t = jac.try_inverse().expect("det > 0").transpose();
            let mut b = DMatrix::zeros(3, 8);
            for a in 0..4 {
                let dn = jinv_t * Vector2::new(g[a][0], g[a][1]);
                b[(0, 2 * a)] = dn.x;
                b[(1, 2 * a + 1)] = dn.y;
                b[(2, 2 * a)] = dn.y / std::f64::consts::SQRT_2;
                b[(2, 2 * a + 1)] = dn.x / std::f64::consts::SQRT_2;
            }
            k += b.transpose() * c * &b * (wx * wy * det);
        }
    }
    Ok(k)
}

/// Scalar integrals `(∫|∂φ/∂x₁|², ∫|∂φ/∂x₂|²)` of the bubble
/// `φ = x₁x₂/(h₁h₂)` on `[−h₁,h₁]×[−h₂,h₂]`, by the same quadrature.
pub fn bubble_gradient_integrals(h1: f64, h2: f64) -> (f64, f64) {
    let mut ix = 0.0;
    let mut iy = 0.0;
    for &(s, ws) in &GAUSS3 {
        for &(t, wt) in &GAUSS3 {
            let (x, y) = (s * h1, t * h2);
            let w = ws * wt * h1 * h2;
            ix += w * (y / (h1 * h2)).powi(2);
            iy += w * (x / (h1 * h2)).powi(2);
        }
    }
    (ix, iy)
}
