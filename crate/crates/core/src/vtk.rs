//! Legacy ASCII VTK output. 2D cells are written as polygons, 3D cells as
//! polyhedra given by their outward face streams.

use std::fmt::Write as _;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::kelvin::sym_of_kelvin;
use crate::loads::NodalField;
use crate::mesh::PolyMesh;
use crate::vem::ElementOperators;

const VTK_POLYGON: u8 = 7;
const VTK_POLYHEDRON: u8 = 42;

/// Largest principal strain magnitude of the projected (constant) strain
/// `W_c u_E` of each cell.
pub fn cell_max_strain(ops: &[ElementOperators], u: &NodalField) -> Result<Vec<f64>> {
    ops.iter()
        .map(|op| {
            let ue = nalgebra::DVector::from_iterator(op.n_dofs(), op.dofs().into_iter().map(|i| u[i]));
            let eps = sym_of_kelvin(&(&op.wc * ue))?;
            let ev = SymmetricEigen::new(eps).eigenvalues;
            Ok(ev.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        })
        .collect()
}

fn cell_stream(mesh: &PolyMesh, c: usize) -> Vec<usize> {
    if mesh.dim() == 2 {
        let nodes = mesh.cell_nodes(c);
        let mut s = Vec::with_capacity(nodes.len() + 1);
        s.push(nodes.len());
        s.extend_from_slice(nodes);
        return s;
    }
    let faces = mesh.cell(c);
    let mut s = vec![0, faces.len()];
    for cf in faces {
        let f = mesh.face(cf.face);
        s.push(f.len());
        if cf.outward {
            s.extend_from_slice(f);
        } else {
            s.extend(f.iter().rev());
        }
    }
    s[0] = s.len() - 1;
    s
}

/// Renders the mesh with optional point displacements and per-cell scalars.
pub fn to_vtk(
    mesh: &PolyMesh,
    title: &str,
    displacement: Option<&NodalField>,
    cell_scalars: &[(&str, &[f64])],
) -> Result<String> {
    let d = mesh.dim();
    if let Some(u) = displacement {
        if u.len() != mesh.n_dofs() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_dofs(),
                got: u.len(),
            });
        }
    }
    let mut s = String::new();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.n_nodes());
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:e} {:e} {:e}", p.x, p.y, p.z);
    }
    let streams: Vec<Vec<usize>> = (0..mesh.n_cells()).map(|c| cell_stream(mesh, c)).collect();
    let size: usize = streams.iter().map(|v| v.len()).sum();
    let _ = writeln!(s, "CELLS {} {}", mesh.n_cells(), size);
    for st in &streams {
        let line: Vec<String> = st.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    let _ = writeln!(s, "CELL_TYPES {}", mesh.n_cells());
    let ty = if d == 2 { VTK_POLYGON } else { VTK_POLYHEDRON };
    for _ in 0..mesh.n_cells() {
        let _ = writeln!(s, "{ty}");
    }
    if let Some(u) = displacement {
        let _ = writeln!(s, "POINT_DATA {}\nVECTORS displacement double", mesh.n_nodes());
        for n in 0..mesh.n_nodes() {
            let z = if d == 3 { u[3 * n + 2] } else { 0.0 };
            let _ = writeln!(s, "{:e} {:e} {:e}", u[d * n], u[d * n + 1], z);
        }
    }
    if !cell_scalars.is_empty() {
        let _ = writeln!(s, "CELL_DATA {}", mesh.n_cells());
        for (name, values) in cell_scalars {
            if values.len() != mesh.n_cells() {
                return Err(Error::DimensionMismatch {
                    expected: mesh.n_cells(),
                    got: values.len(),
                });
            }
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for v in *values {
                let _ = writeln!(s, "{v:e}");
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_gen::{build_cornerpoint, box_spec, twisted_cartesian};
    use crate::mesh::{compute_geometry, unit_cube};
    use crate::vem::element_projections;
    use nalgebra::DVector;

    fn section<'a>(text: &'a str, key: &str) -> &'a str {
        text.lines().find(|l| l.starts_with(key)).unwrap()
    }

    #[test]
    fn twisted_grid_points() {
        let m = twisted_cartesian(&[10, 10], &[1.0, 1.0], 0.02).unwrap();
        let v = to_vtk(&m, "t", None, &[]).unwrap();
        assert_eq!(section(&v, "POINTS"), "POINTS 121 double");
        assert_eq!(section(&v, "CELLS"), "CELLS 100 500");
        assert_eq!(v.lines().filter(|l| *l == "7").count(), 100);
    }

    #[test]
    fn cube_face_stream() {
        let m = unit_cube();
        let v = to_vtk(&m, "cube", None, &[]).unwrap();
        // 1 count + 1 face count + 6 × (1 + 4)
        assert_eq!(section(&v, "CELLS"), "CELLS 1 32");
        let stream: Vec<usize> = v
            .lines()
            .skip_while(|l| !l.starts_with("CELLS"))
            .nth(1)
            .unwrap()
            .split(' ')
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(stream[0], 31);
        assert_eq!(stream[1], 6);
        assert_eq!(section(&v, "CELL_TYPES"), "CELL_TYPES 1");
        assert!(v.trim_end().ends_with("42"));
    }

    #[test]
    fn grdecl_cell_points() {
        let m = build_cornerpoint(&box_spec([1, 1, 1], [1.0, 1.0, 1.0]).unwrap()).unwrap();
        let v = to_vtk(&m, "g", None, &[]).unwrap();
        assert_eq!(section(&v, "POINTS"), "POINTS 8 double");
    }

    #[test]
    fn data_sections() {
        let m = twisted_cartesian(&[2, 2], &[1.0, 1.0], 0.0).unwrap();
        let g = compute_geometry(&m).unwrap();
        let ops: Vec<_> = (0..4).map(|c| element_projections(&m, &g, c).unwrap()).collect();
        // u = (0.01 x, 0): strain 0.01 everywhere
        let u = DVector::from_iterator(18, m.nodes().iter().flat_map(|p| [0.01 * p.x, 0.0]));
        let strain = cell_max_strain(&ops, &u).unwrap();
        assert!(strain.iter().all(|s| (s - 0.01).abs() < 1e-15));
        let v = to_vtk(&m, "d", Some(&u), &[("max_strain", &strain)]).unwrap();
        assert!(v.contains("POINT_DATA 9\nVECTORS displacement double\n"));
        assert!(v.contains("CELL_DATA 4\nSCALARS max_strain double 1\nLOOKUP_TABLE default\n1e-2\n"));
        assert!(to_vtk(&m, "d", Some(&DVector::zeros(3)), &[]).is_err());
    }
}
