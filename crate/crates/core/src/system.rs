//! Global assembly, boundary conditions and the linear solve.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kelvin::KelvinMaterial;
use crate::loads::NodalField;
use crate::mesh::{GeometryCache, Point, PolyMesh};
use crate::sparse::{solve_spd, CsrMatrix, SolveInfo};
use crate::vem::{element_projections, element_stiffness, ElementOperators, Stabilization};

/// Material per cell.
#[derive(Debug, Clone)]
pub enum Materials {
    Uniform(KelvinMaterial),
    PerCell(Vec<KelvinMaterial>),
}

impl Materials {
    pub fn get(&self, cell: usize) -> &KelvinMaterial {
        match self {
            Materials::Uniform(m) => m,
            Materials::PerCell(v) => &v[cell],
        }
    }
}

/// Global stiffness together with the element operators it was built from.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub k: CsrMatrix,
    pub ops: Vec<ElementOperators>,
}

/// Assembles `K = Σ_E K_E`. Elements are computed in parallel and scattered
/// in cell order, so the result does not depend on the thread count.
pub fn assemble_global(
    mesh: &PolyMesh,
    geom: &GeometryCache,
    materials: &Materials,
    stab: Stabilization,
) -> Result<Assembly> {
    if let Materials::PerCell(v) = materials {
        if v.len() != mesh.n_cells() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_cells(),
                got: v.len(),
            });
        }
    }
    let elements: Vec<(ElementOperators, nalgebra::DMatrix<f64>)> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let ops = element_projections(mesh, geom, c)?;
            let ke = element_stiffness(&ops, materials.get(c), stab)?;
            Ok((ops, ke))
        })
        .collect::<Result<_>>()?;
    let nnz: usize = elements.iter().map(|(_, ke)| ke.len()).sum();
    let mut trip = Vec::with_capacity(nnz);
    for (ops, ke) in &elements {
        let dofs = ops.dofs();
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                trip.push((i, j, ke[(a, b)]));
            }
        }
    }
    let n = mesh.n_dofs();
    Ok(Assembly {
        k: CsrMatrix::from_triplets(n, n, &trip),
        ops: elements.into_iter().map(|(o, _)| o).collect(),
    })
}

/// Boundary conditions: prescribed dof values, rolling (zero normal
/// displacement along a coordinate axis) and constant face tractions.
#[derive(Debug, Clone, Default)]
pub struct BoundarySpec {
    pub dirichlet: BTreeMap<usize, f64>,
    /// `(nodes, axis)`: the `axis` component of each node is held at zero.
    pub rolling: Vec<(Vec<usize>, usize)>,
    /// `(boundary face, traction vector in Pa)`.
    pub tractions: Vec<(usize, Point)>,
}

impl BoundarySpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Prescribes one dof. Repeating an identical value is allowed.
    pub fn fix_dof(&mut self, dof: usize, value: f64) -> Result<()> {
        match self.dirichlet.insert(dof, value) {
            Some(old) if old != value => Err(Error::ConflictingConstraint(dof)),
            _ => Ok(()),
        }
    }

    /// Prescribes all components of a node.
    pub fn fix_node(&mut self, node: usize, dim: usize, value: &Point) -> Result<()> {
        for k in 0..dim {
            self.fix_dof(node * dim + k, value[k])?;
        }
        Ok(())
    }

    pub fn roll(&mut self, nodes: Vec<usize>, axis: usize) {
        self.rolling.push((nodes, axis));
    }

    pub fn traction(&mut self, face: usize, t: Point) {
        self.tractions.push((face, t));
    }

    /// All prescribed dof values, rolling sets included.
    pub fn constraints(&self, dim: usize) -> Result<BTreeMap<usize, f64>> {
        if let Some((_, axis)) = self.rolling.iter().find(|(_, a)| *a >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: axis + 1,
            });
        }
        let mut out = self.dirichlet.clone();
        for (nodes, axis) in &self.rolling {
            for &n in nodes {
                let dof = n * dim + axis;
                match out.insert(dof, 0.0) {
                    Some(v) if v != 0.0 => return Err(Error::ConflictingConstraint(dof)),
                    _ => {}
                }
            }
        }
        Ok(out)
    }

    /// Nodal forces of the face tractions: `t·e_k ∫_f φ_η`.
    pub fn traction_load(&self, mesh: &PolyMesh, geom: &GeometryCache) -> Result<NodalField> {
        let d = mesh.dim();
        let mut out = DVector::zeros(mesh.n_dofs());
        for (f, t) in &self.tractions {
            if *f >= mesh.n_faces() {
                return Err(Error::DanglingIndex(format!("traction on face {f}")));
            }
            if !mesh.is_boundary_face(*f) {
                return Err(Error::InvalidMesh(format!("traction on interior face {f}")));
            }
            for (k, &n) in mesh.face(*f).iter().enumerate() {
                let w = geom.faces[*f].node_integrals[k];
                for a in 0..d {
                    out[n * d + a] += w * t[a];
                }
            }
        }
        Ok(out)
    }
}

/// Reduced system on the free dofs.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub k: CsrMatrix,
    pub b: DVector<f64>,
    pub free: Vec<usize>,
    pub fixed: BTreeMap<usize, f64>,
    pub n_dofs: usize,
    /// Full load vector, tractions included.
    pub load: NodalField,
}

/// Eliminates prescribed dofs and adds traction loads.
pub fn apply_bcs(
    k: &CsrMatrix,
    load: &NodalField,
    bcs: &BoundarySpec,
    mesh: &PolyMesh,
    geom: &GeometryCache,
) -> Result<LinearSystem> {
    let n = mesh.n_dofs();
    if k.nrows() != n || load.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: k.nrows().max(load.len()),
        });
    }
    let fixed = bcs.constraints(mesh.dim())?;
    if let Some((&dof, _)) = fixed.iter().find(|(&d, _)| d >= n) {
        return Err(Error::DanglingIndex(format!("constraint on dof {dof}")));
    }
    let full = load + bcs.traction_load(mesh, geom)?;
    let free: Vec<usize> = (0..n).filter(|d| !fixed.contains_key(d)).collect();
    let mut values = DVector::zeros(n);
    for (&d, &v) in &fixed {
        values[d] = v;
    }
    let kv = k.mul_vec(&values);
    let b = DVector::from_iterator(free.len(), free.iter().map(|&d| full[d] - kv[d]));
    Ok(LinearSystem {
        k: k.select(&free, &free),
        b,
        free,
        fixed,
        n_dofs: n,
        load: full,
    })
}

/// Solves the reduced system and returns the full displacement field.
pub fn solve(system: &LinearSystem, tol: f64) -> Result<(NodalField, SolveInfo)> {
    if system.fixed.is_empty() {
        return Err(Error::Singular("rigid modes unconstrained".into()));
    }
    let mut u = DVector::zeros(system.n_dofs);
    for (&d, &v) in &system.fixed {
        u[d] = v;
    }
    let (x, info) = if system.free.is_empty() {
        (
            DVector::zeros(0),
            SolveInfo {
                kind: crate::sparse::SolverKind::Cholesky,
                relative_residual: 0.0,
                iterations: 0,
            },
        )
    } else {
        solve_spd(&system.k, &system.b, tol)?
    };
    for (i, &d) in system.free.iter().enumerate() {
        u[d] = x[i];
    }
    Ok((u, info))
}

/// `K u − f` on every dof; non-zero only at constrained dofs after a solve.
pub fn reactions(k: &CsrMatrix, u: &NodalField, load: &NodalField) -> NodalField {
    k.mul_vec(u) - load
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_gen::{cartesian, twisted_cartesian};
    use crate::mesh::{compute_geometry, polygon};

    fn mat2() -> Materials {
        Materials::Uniform(KelvinMaterial::isotropic(1.0, 1.0, 2).unwrap())
    }

    #[test]
    fn one_cell_matches_element() {
        let m = polygon(&[[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [0.0, 1.5]]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let a = assemble_global(&m, &g, &mat2(), Stabilization::AlphaG).unwrap();
        let ops = element_projections(&m, &g, 0).unwrap();
        let ke = element_stiffness(&ops, mat2().get(0), Stabilization::AlphaG).unwrap();
        // cell nodes are 0..4 in order, so local and global dofs coincide
        assert_eq!(ops.nodes, vec![0, 1, 2, 3]);
        assert!((a.k.to_dense() - ke).amax() < 1e-15);
    }

    #[test]
    fn row_sums_vanish() {
        let m = cartesian(&[2, 1], &[2.0, 1.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let a = assemble_global(&m, &g, &mat2(), Stabilization::AlphaN).unwrap();
        let k = a.k.to_dense();
        for i in 0..k.nrows() {
            let s: f64 = (0..k.ncols()).step_by(2).map(|j| k[(i, j)]).sum();
            assert!(s.abs() < 1e-13, "row {i}: {s}");
        }
    }

    #[test]
    fn twisted_mesh_stiffness_is_symmetric_psd() {
        let m = twisted_cartesian(&[3, 3], &[1.0, 1.0], 0.03).unwrap();
        let g = compute_geometry(&m).unwrap();
        let a = assemble_global(&m, &g, &mat2(), Stabilization::AlphaG).unwrap();
        let k = a.k.to_dense();
        assert!(a.k.asymmetry() <= 1e-12 * a.k.max_abs());
        let ev = nalgebra::SymmetricEigen::new(k.clone()).eigenvalues;
        assert!(ev.min() >= -1e-10 * k.amax());
        assert_eq!(ev.iter().filter(|v| v.abs() < 1e-10 * k.amax()).count(), 3);
    }

    #[test]
    fn traction_sums_to_force() {
        let m = cartesian(&[3, 3, 1], &[1.0, 1.0, 1.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let mut bc = BoundarySpec::new();
        let t = Point::new(0.0, 0.5, -2.0);
        let top: Vec<usize> = m.boundary_faces().filter(|&f| g.faces[f].normal.z > 0.5).collect();
        for &f in &top {
            bc.traction(f, t);
        }
        let f = bc.traction_load(&m, &g).unwrap();
        let total: f64 = (0..m.n_nodes()).map(|n| f[3 * n + 2]).sum();
        assert!((total - (-2.0)).abs() < 1e-14);
    }

    #[test]
    fn conflicting_constraints() {
        let mut bc = BoundarySpec::new();
        bc.fix_dof(3, 1.0).unwrap();
        bc.fix_dof(3, 1.0).unwrap();
        assert!(matches!(bc.fix_dof(3, 2.0), Err(Error::ConflictingConstraint(3))));
        bc.roll(vec![1], 1);
        assert!(matches!(bc.constraints(2), Err(Error::ConflictingConstraint(3))));
    }

    #[test]
    fn all_dirichlet_and_unconstrained() {
        let m = cartesian(&[1, 1], &[1.0, 1.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let a = assemble_global(&m, &g, &mat2(), Stabilization::AlphaG).unwrap();
        let mut bc = BoundarySpec::new();
        for n in 0..4 {
            bc.fix_node(n, 2, &Point::new(n as f64, 1.0, 0.0)).unwrap();
        }
        let f = DVector::zeros(8);
        let sys = apply_bcs(&a.k, &f, &bc, &m, &g).unwrap();
        assert_eq!(sys.k.nrows(), 0);
        let (u, _) = solve(&sys, 1e-10).unwrap();
        assert_eq!(u[6], 3.0);
        let sys = apply_bcs(&a.k, &DVector::from_element(8, 1.0), &BoundarySpec::new(), &m, &g).unwrap();
        let e = solve(&sys, 1e-10).unwrap_err();
        assert_eq!(e.to_string(), "singular system: rigid modes unconstrained");
    }

    #[test]
    fn patch_test_twisted() {
        let m = twisted_cartesian(&[5, 5], &[1.0, 1.0], 0.04).unwrap();
        let g = compute_geometry(&m).unwrap();
        let a = assemble_global(&m, &g, &mat2(), Stabilization::AlphaG).unwrap();
        let affine = |p: &Point| Point::new(0.1 + 0.3 * p.x - 0.2 * p.y, -0.05 + 0.4 * p.x + 0.25 * p.y, 0.0);
        let mut bc = BoundarySpec::new();
        for n in m.boundary_nodes() {
            bc.fix_node(n, 2, &affine(m.node(n))).unwrap();
        }
        let sys = apply_bcs(&a.k, &DVector::zeros(m.n_dofs()), &bc, &m, &g).unwrap();
        let (u, info) = solve(&sys, 1e-12).unwrap();
        assert!(info.relative_residual <= 1e-12);
        for n in 0..m.n_nodes() {
            let e = affine(m.node(n));
            assert!((u[2 * n] - e.x).abs() < 1e-10 && (u[2 * n + 1] - e.y).abs() < 1e-10);
        }
        // reactions balance (no applied load)
        let r = reactions(&a.k, &u, &sys.load);
        assert!(r.iter().step_by(2).sum::<f64>().abs() < 1e-10);
    }
}
