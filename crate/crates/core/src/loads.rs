//! Load vectors: projection, nodal quadrature, and the discrete
//! divergence/gradient pair with its face-force forms.
//!
//! Nodal fields are flat vectors with node-major dofs, cell fields have one
//! entry per cell.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::mesh::{GeometryCache, Point, PolyMesh};
use crate::sparse::CsrMatrix;
use crate::vem::ElementOperators;

pub type NodalField = DVector<f64>;
pub type CellField = DVector<f64>;

/// Which load assembly to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMethod {
    Projection,
    Nodal,
    DiscreteGradient,
}

impl LoadMethod {
    pub fn name(&self) -> &'static str {
        match self {
            LoadMethod::Projection => "projection",
            LoadMethod::Nodal => "nodal",
            LoadMethod::DiscreteGradient => "dgrad",
        }
    }
}

impl std::str::FromStr for LoadMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projection" => Ok(LoadMethod::Projection),
            "nodal" => Ok(LoadMethod::Nodal),
            "dgrad" => Ok(LoadMethod::DiscreteGradient),
            other => Err(Error::Config(format!("unknown load method '{other}'"))),
        }
    }
}

fn add_force(field: &mut NodalField, dim: usize, node: usize, w: f64, f: &Point) {
    for k in 0..dim {
        field[node * dim + k] += w * f[k];
    }
}

/// Weights `m_i^η = e_k·∫_E Π∇(φ_k^η)` for each node of the cell, in
/// `ops.nodes` order. They do not depend on `k`.
pub fn projection_weights(ops: &ElementOperators, centroid: &Point) -> Vec<f64> {
    let d = ops.dim;
    let r: Vec<f64> = (0..d).map(|a| centroid[a] - ops.node_mean[a]).collect();
    let kc = ops.nc.ncols();
    let kr = ops.nr.ncols();
    // first component of the projected field at the centroid
    let nc_row = affine_row_c(d, &r, kc);
    let nr_row = affine_row_r(d, &r, kr);
    (0..ops.n_nodes())
        .map(|i| {
            let col = i * d;
            let vc: f64 = (0..kc).map(|j| nc_row[j] * ops.wc[(j, col)]).sum();
            let vr: f64 = (0..kr).map(|j| nr_row[j] * ops.wr[(j, col)]).sum();
            ops.volume * (vc + vr)
        })
        .collect()
}

/// First-direction row of `N_c` evaluated at offset `r` from the node mean.
fn affine_row_c(d: usize, r: &[f64], kc: usize) -> Vec<f64> {
    let mut row = vec![0.0; kc];
    for (j, &(a, b)) in crate::kelvin::kelvin_pairs(d).iter().enumerate() {
        row[j] = if a == b {
            if a == 0 {
                r[0]
            } else {
                0.0
            }
        } else if a == 0 {
            r[b] / std::f64::consts::SQRT_2
        } else if b == 0 {
            r[a] / std::f64::consts::SQRT_2
        } else {
            0.0
        };
    }
    row
}

fn affine_row_r(d: usize, r: &[f64], kr: usize) -> Vec<f64> {
    let mut row = vec![0.0; kr];
    row[0] = 1.0;
    let s = std::f64::consts::SQRT_2;
    if d == 2 {
        row[2] = -r[1] / s;
    } else {
        // x-component of (e_m × r)/√2
        row[4] = r[2] / s;
        row[5] = -r[1] / s;
    }
    row
}

/// Load by projection: `f̂_η = Σ_E m_E^η Π⁰_E f`, with `Π⁰` the value at the
/// cell centroid.
pub fn load_projection<F>(f: F, mesh: &PolyMesh, geom: &GeometryCache, ops: &[ElementOperators]) -> NodalField
where
    F: Fn(&Point) -> Point,
{
    let d = mesh.dim();
    let mut out = DVector::zeros(mesh.n_dofs());
    for o in ops {
        let c = geom.cells[o.cell].centroid;
        let fc = f(&c);
        for (w, &node) in projection_weights(o, &c).iter().zip(&o.nodes) {
            add_force(&mut out, d, node, *w, &fc);
        }
    }
    out
}

/// Load by nodal quadrature: `f̂_η = (Σ_E |E|/n_E) f(x_η)`.
pub fn load_nodal_quadrature<F>(f: F, mesh: &PolyMesh, geom: &GeometryCache) -> NodalField
where
    F: Fn(&Point) -> Point,
{
    let d = mesh.dim();
    let mut weight = vec![0.0; mesh.n_nodes()];
    for c in 0..mesh.n_cells() {
        let nodes = mesh.cell_nodes(c);
        let w = geom.cells[c].volume / nodes.len() as f64;
        for &n in nodes {
            weight[n] += w;
        }
    }
    let mut out = DVector::zeros(mesh.n_dofs());
    for (n, w) in weight.iter().enumerate() {
        add_force(&mut out, d, n, *w, &f(mesh.node(n)));
    }
    out
}

/// `D` with `(D u)_E = Σ_{f∈F(E)} Σ_{η∈f} (u_η·n_f) ∫_f φ_η`, outward normals.
/// `ddiv = diag(1/|E|) D`. With `interior_only` boundary faces are skipped.
fn divergence_matrix(mesh: &PolyMesh, geom: &GeometryCache, interior_only: bool) -> CsrMatrix {
    let d = mesh.dim();
    let mut trip = Vec::new();
    for c in 0..mesh.n_cells() {
        for cf in mesh.cell(c) {
            if interior_only && mesh.is_boundary_face(cf.face) {
                continue;
            }
            let fg = &geom.faces[cf.face];
            let n = cf.sign() * fg.flux_normal();
            for (k, &node) in mesh.face(cf.face).iter().enumerate() {
                for a in 0..d {
                    trip.push((c, node * d + a, fg.node_integrals[k] * n[a]));
                }
            }
        }
    }
    CsrMatrix::from_triplets(mesh.n_cells(), mesh.n_dofs(), &trip)
}

/// Volume-weighted discrete divergence `|E| ddiv`.
pub fn weighted_divergence(mesh: &PolyMesh, geom: &GeometryCache) -> CsrMatrix {
    divergence_matrix(mesh, geom, false)
}

/// Discrete divergence, the cell average of `div u` for virtual fields.
pub fn discrete_divergence(mesh: &PolyMesh, geom: &GeometryCache) -> CsrMatrix {
    let dw = weighted_divergence(mesh, geom);
    let mut trip = Vec::new();
    for c in 0..mesh.n_cells() {
        let inv = 1.0 / geom.cells[c].volume;
        trip.extend(dw.row(c).map(|(j, v)| (c, j, v * inv)));
    }
    CsrMatrix::from_triplets(dw.nrows(), dw.ncols(), &trip)
}

/// How the discrete gradient treats boundary faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPotential {
    /// Only interior faces contribute.
    InteriorOnly,
    /// The potential outside the domain is zero, so boundary faces carry the
    /// jump `0 − ψ_E`.
    ExteriorZero,
}

/// Discrete gradient as a matrix (dofs × cells): `−Dᵀ`, restricted to
/// interior faces for [`BoundaryPotential::InteriorOnly`].
pub fn discrete_gradient_matrix(mesh: &PolyMesh, geom: &GeometryCache, boundary: BoundaryPotential) -> CsrMatrix {
    divergence_matrix(mesh, geom, boundary == BoundaryPotential::InteriorOnly)
        .transpose()
        .scale(-1.0)
}

/// Nodal forces `f̂_{η,k} = Σ_f (ψ_{E_f^+} − ψ_{E_f^-})(e_k·n_f)∫_f φ_η`.
pub fn discrete_gradient(
    psi: &CellField,
    mesh: &PolyMesh,
    geom: &GeometryCache,
    boundary: BoundaryPotential,
) -> Result<NodalField> {
    if psi.len() != mesh.n_cells() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_cells(),
            got: psi.len(),
        });
    }
    let mut jumps = FaceLoad::jumps_from_potential(psi, mesh)?;
    if boundary == BoundaryPotential::ExteriorZero {
        if let FaceLoad::Jumps(g) = &mut jumps {
            for f in mesh.boundary_faces() {
                g[f] = -psi[mesh.face_neighbors(f).0];
            }
        }
    }
    face_supported_load(&jumps, mesh, geom)
}

/// Per-face load data. Entries are indexed by face; only interior faces are
/// used unless a boundary value is set explicitly.
#[derive(Debug, Clone, PartialEq)]
pub enum FaceLoad {
    /// Scalar potential jump `g_f` across each face, applied along `n_f`.
    Jumps(Vec<f64>),
    /// Constant force density vector `f̊_f` on each face.
    Vectors(Vec<Point>),
}

impl FaceLoad {
    /// `g_f = ψ_{E_f^+} − ψ_{E_f^-}`; zero on boundary faces.
    pub fn jumps_from_potential(psi: &CellField, mesh: &PolyMesh) -> Result<Self> {
        if psi.len() != mesh.n_cells() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_cells(),
                got: psi.len(),
            });
        }
        Ok(FaceLoad::Jumps(
            (0..mesh.n_faces())
                .map(|f| match mesh.face_neighbors(f) {
                    (m, Some(p)) => psi[p] - psi[m],
                    _ => 0.0,
                })
                .collect(),
        ))
    }

    /// `g_f = f̂_f·dr_f` from a force density per face, with `dr_f` the vector
    /// from the minus to the plus cell centroid; zero on boundary faces.
    pub fn jumps_from_face_forces(forces: &[Point], mesh: &PolyMesh, geom: &GeometryCache) -> Result<Self> {
        if forces.len() != mesh.n_faces() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_faces(),
                got: forces.len(),
            });
        }
        Ok(FaceLoad::Jumps(
            (0..mesh.n_faces())
                .map(|f| match mesh.face_neighbors(f) {
                    (m, Some(p)) => forces[f].dot(&(geom.cells[p].centroid - geom.cells[m].centroid)),
                    _ => 0.0,
                })
                .collect(),
        ))
    }

    /// Equivalent vector form `f̊_f = g_f n_f`.
    pub fn to_vectors(&self, geom: &GeometryCache) -> Vec<Point> {
        match self {
            FaceLoad::Jumps(g) => g.iter().zip(&geom.faces).map(|(g, fg)| *g * fg.flux_normal()).collect(),
            FaceLoad::Vectors(v) => v.clone(),
        }
    }
}

/// `f̂_{η,k} = Σ_f f̊_f·e_k ∫_f φ_η`.
pub fn face_supported_load(load: &FaceLoad, mesh: &PolyMesh, geom: &GeometryCache) -> Result<NodalField> {
    let n = match load {
        FaceLoad::Jumps(g) => g.len(),
        FaceLoad::Vectors(v) => v.len(),
    };
    if n != mesh.n_faces() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_faces(),
            got: n,
        });
    }
    let vectors = load.to_vectors(geom);
    let d = mesh.dim();
    let mut out = DVector::zeros(mesh.n_dofs());
    for (f, v) in vectors.iter().enumerate() {
        if *v == Point::zeros() {
            continue;
        }
        for (k, &node) in mesh.face(f).iter().enumerate() {
            add_force(&mut out, d, node, geom.faces[f].node_integrals[k], v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_gen::{cartesian, insert_edge_midnodes, twisted_cartesian};
    use crate::mesh::{compute_geometry, polygon};
    use crate::vem::element_projections;

    fn ops_for(mesh: &PolyMesh, geom: &GeometryCache) -> Vec<ElementOperators> {
        (0..mesh.n_cells()).map(|c| element_projections(mesh, geom, c).unwrap()).collect()
    }

    fn gravity(_: &Point) -> Point {
        Point::new(0.0, -3.0, 0.0)
    }

    #[test]
    fn projection_weights_closed_form() {
        let m = polygon(&[[0.0, 0.0], [3.0, 0.2], [3.5, 2.0], [1.0, 2.5], [-0.4, 1.1]]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let o = element_projections(&m, &g, 0).unwrap();
        let c = g.cells[0].centroid;
        let w = projection_weights(&o, &c);
        let n = o.n_nodes() as f64;
        for i in 0..o.n_nodes() {
            let expect = o.volume / n + o.q[(i, 0)] * (c.x - o.node_mean.x) + o.q[(i, 1)] * (c.y - o.node_mean.y);
            assert!((w[i] - expect).abs() < 1e-13);
        }
        assert!((w.iter().sum::<f64>() - o.volume).abs() < 1e-13);
    }

    #[test]
    fn projection_weights_direction_independent_3d() {
        let m = crate::grid_gen::triangulate_faces(&twisted_cartesian(&[2, 2, 2], &[1.0, 1.0, 1.0], 0.1).unwrap()).unwrap();
        let g = compute_geometry(&m).unwrap();
        let o = element_projections(&m, &g, 0).unwrap();
        let c = g.cells[0].centroid;
        let w = projection_weights(&o, &c);
        for k in 0..3 {
            // e_k·∫Π∇φ^η_k = |E| (e_k · P column value at the centroid)
            for i in 0..o.n_nodes() {
                let col = 3 * i + k;
                let mut u = nalgebra::DVector::zeros(o.n_dofs());
                u[col] = 1.0;
                let pu = &o.p * u;
                // the projected field is affine: recover it from two nodal values via least squares
                let mut a = nalgebra::DMatrix::zeros(o.n_nodes(), 4);
                let mut b = nalgebra::DVector::zeros(o.n_nodes());
                for (j, x) in o.coords.iter().enumerate() {
                    a[(j, 0)] = 1.0;
                    a[(j, 1)] = x.x;
                    a[(j, 2)] = x.y;
                    a[(j, 3)] = x.z;
                    b[j] = pu[3 * j + k];
                }
                let coef = a.clone().svd(true, true).solve(&b, 1e-14).unwrap();
                let val = coef[0] + coef[1] * c.x + coef[2] * c.y + coef[3] * c.z;
                assert!((o.volume * val - w[i]).abs() < 1e-12, "k {k} node {i}");
            }
        }
    }

    #[test]
    fn constant_load_balances() {
        let m = insert_edge_midnodes(&twisted_cartesian(&[4, 3], &[2.0, 1.0], 0.03).unwrap(), |f| f.normal.y.abs() > 0.5).unwrap();
        let g = compute_geometry(&m).unwrap();
        let ops = ops_for(&m, &g);
        let vol: f64 = g.cells.iter().map(|c| c.volume).sum();
        for f in [load_projection(gravity, &m, &g, &ops), load_nodal_quadrature(gravity, &m, &g)] {
            let fy: f64 = f.iter().skip(1).step_by(2).sum();
            let fx: f64 = f.iter().step_by(2).sum();
            assert!((fy + 3.0 * vol).abs() < 1e-12 * 3.0 * vol);
            assert!(fx.abs() < 1e-14);
        }
        let zero = load_projection(|_| Point::zeros(), &m, &g, &ops);
        assert!(zero.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn nodal_weights_on_cubes() {
        let m = cartesian(&[1, 1, 1], &[1.0, 1.0, 1.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let f = load_nodal_quadrature(|_| Point::new(0.0, 0.0, 8.0), &m, &g);
        assert!((0..8).all(|n| (f[3 * n + 2] - 1.0).abs() < 1e-15));
        let m = cartesian(&[1, 1, 2], &[1.0, 1.0, 2.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let f = load_nodal_quadrature(|_| Point::new(0.0, 0.0, 8.0), &m, &g);
        let shared = (0..12).filter(|&n| m.node(n).z == 1.0).collect::<Vec<_>>();
        assert_eq!(shared.len(), 4);
        for n in 0..12 {
            let expect = if shared.contains(&n) { 2.0 } else { 1.0 };
            assert!((f[3 * n + 2] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn divergence_values() {
        let m = cartesian(&[1, 1, 1], &[1.0, 1.0, 1.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let d = discrete_divergence(&m, &g);
        let u = DVector::from_iterator(24, m.nodes().iter().flat_map(|p| [p.x, 0.0, 0.0]));
        assert!((d.mul_vec(&u)[0] - 1.0).abs() < 1e-15);
        let t = DVector::from_iterator(24, (0..8).flat_map(|_| [0.3, -1.0, 2.0]));
        assert!(d.mul_vec(&t)[0].abs() < 1e-15);
    }

    #[test]
    fn gradient_is_negative_divergence_transpose() {
        let m = twisted_cartesian(&[3, 4], &[1.0, 2.0], 0.05).unwrap();
        let g = compute_geometry(&m).unwrap();
        let psi = DVector::from_fn(m.n_cells(), |c, _| (c as f64 * 0.7).sin());
        for bp in [BoundaryPotential::InteriorOnly, BoundaryPotential::ExteriorZero] {
            let gm = discrete_gradient_matrix(&m, &g, bp);
            let f1 = gm.mul_vec(&psi);
            let f2 = discrete_gradient(&psi, &m, &g, bp).unwrap();
            assert!((f1 - f2).amax() < 1e-14);
        }
        let full = weighted_divergence(&m, &g).to_dense().transpose() * -1.0;
        assert!((discrete_gradient_matrix(&m, &g, BoundaryPotential::ExteriorZero).to_dense() - full).amax() < 1e-14);
        let ones = DVector::from_element(m.n_cells(), 4.0);
        assert!(discrete_gradient(&ones, &m, &g, BoundaryPotential::InteriorOnly).unwrap().amax() < 1e-14);
    }

    #[test]
    fn stacked_cubes_gradient_by_hand() {
        let m = cartesian(&[1, 1, 2], &[1.0, 1.0, 2.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let psi = DVector::from_vec(vec![0.0, 1.0]);
        let f = discrete_gradient(&psi, &m, &g, BoundaryPotential::InteriorOnly).unwrap();
        for n in 0..12 {
            let expect = if m.node(n).z == 1.0 { 0.25 } else { 0.0 };
            assert!((f[3 * n + 2] - expect).abs() < 1e-15);
            assert_eq!(f[3 * n], 0.0);
        }
    }

    #[test]
    fn face_load_forms_agree() {
        let m = twisted_cartesian(&[3, 3, 2], &[1.0, 1.0, 1.0], 0.05).unwrap();
        let g = compute_geometry(&m).unwrap();
        let psi = DVector::from_fn(m.n_cells(), |c, _| c as f64);
        let jumps = FaceLoad::jumps_from_potential(&psi, &m).unwrap();
        let a = face_supported_load(&jumps, &m, &g).unwrap();
        let b = face_supported_load(&FaceLoad::Vectors(jumps.to_vectors(&g)), &m, &g).unwrap();
        assert!((a - b).amax() < 1e-15);
        let zero = face_supported_load(&FaceLoad::Vectors(vec![Point::zeros(); m.n_faces()]), &m, &g).unwrap();
        assert!(zero.amax() == 0.0);
        let f0 = (0..m.n_faces()).find(|&f| !m.is_boundary_face(f)).unwrap();
        let mut v = vec![Point::zeros(); m.n_faces()];
        v[f0] = Point::z();
        let s = face_supported_load(&FaceLoad::Vectors(v), &m, &g).unwrap();
        let sz: f64 = s.iter().skip(2).step_by(3).sum();
        assert!((sz - g.faces[f0].area).abs() < 1e-14);
    }

    #[test]
    fn linear_potential_from_face_forces() {
        // ψ = c·x gives jumps c·dr for the constant force density c
        let m = twisted_cartesian(&[4, 4], &[1.0, 1.0], 0.03).unwrap();
        let g = compute_geometry(&m).unwrap();
        let c = Point::new(0.0, -2.0, 0.0);
        let psi = DVector::from_fn(m.n_cells(), |e, _| c.dot(&g.cells[e].centroid));
        let a = FaceLoad::jumps_from_potential(&psi, &m).unwrap();
        let b = FaceLoad::jumps_from_face_forces(&vec![c; m.n_faces()], &m, &g).unwrap();
        match (a, b) {
            (FaceLoad::Jumps(a), FaceLoad::Jumps(b)) => {
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-14);
                }
            }
            _ => unreachable!(),
        }
    }
}
