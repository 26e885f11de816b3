//! Layered corner-point model with tilted pillars, an eroded layer and a
//! fault. Compares curved and triangulated faces under a top load, and the
//! three load assemblies under gravity.

use std::path::PathBuf;

use polyvem::grid_gen::{build_cornerpoint, triangulate_faces, LayeredModel};
use polyvem::loads::LoadMethod;
use polyvem::mesh::compute_geometry;
use polyvem::vem::Stabilization;
use polyvem::verify::compaction::{solve_compaction, CompactionCase, CompactionLoad, VerticalFrame};
use polyvem::vtk::to_vtk;

fn main() -> polyvem::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let mut model = LayeredModel::new([8, 8, 8], [800.0, 800.0, 80.0]);
    model.pillar_tilt = 0.3;
    model.horizon_amplitude = 0.2;
    model.eroded_layer = Some(3);
    let spec = model.spec()?;
    let curved = build_cornerpoint(&spec)?;
    let flat = triangulate_faces(&curved)?;
    println!(
        "{} active cells of {}, {} nodes, {} faces ({} after triangulation)",
        curved.n_cells(),
        spec.n_cells(),
        curved.n_nodes(),
        curved.n_faces(),
        flat.n_faces()
    );

    let top = CompactionCase {
        load: CompactionLoad::TopTraction(-1e6),
        ..CompactionCase::default()
    };
    for (name, mesh) in [("curved", &curved), ("triangulated", &flat)] {
        let geom = compute_geometry(mesh)?;
        let frame = VerticalFrame::of_mesh(mesh, 2, false);
        let run = solve_compaction(mesh, &geom, &frame, &top, LoadMethod::Projection, Stabilization::AlphaG, 1e-12)?;
        println!("top load, {name:<12} rel err {:.2e}", run.metrics.rel_max);
    }

    let geom = compute_geometry(&flat)?;
    let frame = VerticalFrame::of_mesh(&flat, 2, false);
    for method in [LoadMethod::Projection, LoadMethod::Nodal, LoadMethod::DiscreteGradient] {
        let run = solve_compaction(&flat, &geom, &frame, &CompactionCase::default(), method, Stabilization::AlphaG, 1e-12)?;
        println!("gravity, {:<11} rel err {:.2e}", method.name(), run.metrics.vert_rel_max);
        if method == LoadMethod::DiscreteGradient {
            let path = out.join("cornerpoint_gravity.vtk");
            std::fs::write(&path, to_vtk(&flat, "gravity", Some(&run.u), &[])?)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
