//! Affine displacements are reproduced exactly on any mesh with planar
//! faces: a twisted 2D grid and a triangulated corner-point model.

use polyvem::grid_gen::{build_cornerpoint, triangulate_faces, twisted_cartesian, LayeredModel};
use polyvem::mesh::compute_geometry;
use polyvem::verify::acceptance::patch_error;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() -> polyvem::Result<()> {
    let mut rng = StdRng::seed_from_u64(7);
    let twisted = twisted_cartesian(&[10, 10], &[15.0, 15.0], 0.45)?;
    let mut model = LayeredModel::new([4, 4, 4], [400.0, 400.0, 40.0]);
    model.pillar_tilt = 0.3;
    model.horizon_amplitude = 0.2;
    let curved = build_cornerpoint(&model.spec()?)?;
    let flat = triangulate_faces(&curved)?;
    for (name, mesh) in [("twisted 2D", &twisted), ("corner-point, curved", &curved), ("corner-point, triangulated", &flat)] {
        let e = patch_error(mesh, &compute_geometry(mesh)?, &mut rng)?;
        println!("{name:<28} interior rel error {e:.2e}");
    }
    Ok(())
}
