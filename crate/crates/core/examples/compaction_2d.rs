//! 2D compaction under gravity on a twisted grid, with and without extra
//! edge nodes, for each load assembly. Writes a VTK file per run into the
//! directory given as the first argument (default: the system temp dir).

use std::path::PathBuf;

use polyvem::grid_gen::{insert_edge_midnodes, twisted_cartesian};
use polyvem::loads::LoadMethod;
use polyvem::mesh::compute_geometry;
use polyvem::system::{assemble_global, Materials};
use polyvem::vem::Stabilization;
use polyvem::verify::compaction::{solve_compaction, CompactionCase, VerticalFrame, DEFAULT_HEIGHT};
use polyvem::vtk::{cell_max_strain, to_vtk};

fn main() -> polyvem::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let case = CompactionCase::default();
    let base = twisted_cartesian(&[10, 10], &[DEFAULT_HEIGHT, DEFAULT_HEIGHT], 0.45)?;
    let extra = insert_edge_midnodes(&base, |f| f.normal.y.abs() > f.normal.x.abs())?;

    println!("gamma = {:.6e} 1/m", case.gamma(2, &VerticalFrame::of_mesh(&base, 1, true))?);
    println!("{:<8} {:<11} {:>12} {:>12}", "grid", "load", "max err [m]", "rel err");
    for (name, mesh) in [("twisted", &base), ("extra", &extra)] {
        let geom = compute_geometry(mesh)?;
        let frame = VerticalFrame::of_mesh(mesh, 1, true);
        for method in [LoadMethod::Projection, LoadMethod::Nodal, LoadMethod::DiscreteGradient] {
            let run = solve_compaction(mesh, &geom, &frame, &case, method, Stabilization::AlphaG, 1e-10)?;
            println!(
                "{:<8} {:<11} {:>12.3e} {:>12.3e}",
                name,
                method.name(),
                run.metrics.vert_max_abs,
                run.metrics.vert_rel_max
            );
            let asm = assemble_global(mesh, &geom, &Materials::Uniform(case.material(2)?), Stabilization::AlphaG)?;
            let strain = cell_max_strain(&asm.ops, &run.u)?;
            let path = out.join(format!("compaction_{name}_{}.vtk", method.name()));
            std::fs::write(&path, to_vtk(mesh, "compaction", Some(&run.u), &[("max_strain", &strain)])?)?;
        }
    }
    println!("VTK files in {}", out.display());
    Ok(())
}
