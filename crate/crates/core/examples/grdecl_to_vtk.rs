//! Reads a GRDECL file (SPECGRID/DIMENS, COORD, ZCORN, ACTNUM), builds the
//! polyhedral mesh and writes it as VTK next to the input.
//!
//! ```text
//! cargo run --example grdecl_to_vtk -- model.grdecl [padding]
//! ```

use std::path::PathBuf;

use polyvem::grid_gen::{build_cornerpoint, pad_embed, parse_grdecl};
use polyvem::mesh::compute_geometry;
use polyvem::vtk::to_vtk;

fn main() -> polyvem::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/faulted_two_cell.grdecl")
    });
    let pad: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut spec = parse_grdecl(&std::fs::read_to_string(&path)?)?;
    if pad > 0 {
        spec = pad_embed(&spec, pad)?;
    }
    let mesh = build_cornerpoint(&spec)?;
    let geom = compute_geometry(&mesh)?;
    let volume: f64 = geom.cells.iter().map(|c| c.volume).sum();
    let boundary = mesh.boundary_faces().count();
    println!(
        "{}: dims {:?}, {} nodes, {} faces ({} boundary), {} cells, volume {:.4}",
        path.display(),
        spec.dims(),
        mesh.n_nodes(),
        mesh.n_faces(),
        boundary,
        mesh.n_cells(),
        volume
    );
    let out = std::env::temp_dir().join(path.with_extension("vtk").file_name().unwrap());
    std::fs::write(&out, to_vtk(&mesh, "grdecl", None, &[])?)?;
    println!("wrote {}", out.display());
    Ok(())
}
