//! The three load assemblies side by side. On a plain Cartesian grid they
//! agree at interior nodes; with extra edge nodes they do not. The discrete
//! gradient also carries the jump to the zero exterior potential on the
//! boundary, which the constrained nodes absorb.

use polyvem::grid_gen::{cartesian, insert_edge_midnodes};
use polyvem::loads::{
    discrete_gradient, load_nodal_quadrature, load_projection, BoundaryPotential,
};
use polyvem::mesh::{compute_geometry, Point, PolyMesh};
use polyvem::vem::element_projections;
use nalgebra::DVector;

fn loads(mesh: &PolyMesh) -> polyvem::Result<[DVector<f64>; 3]> {
    let geom = compute_geometry(mesh)?;
    let ops = (0..mesh.n_cells())
        .map(|c| element_projections(mesh, &geom, c))
        .collect::<polyvem::Result<Vec<_>>>()?;
    let f = Point::new(0.0, -1.0, 0.0);
    // ψ = H − y gives f = ∇ψ = (0, −1)
    let psi = DVector::from_iterator(mesh.n_cells(), geom.cells.iter().map(|c| 2.0 - c.centroid.y));
    Ok([
        load_projection(|_| f, mesh, &geom, &ops),
        load_nodal_quadrature(|_| f, mesh, &geom),
        discrete_gradient(&psi, mesh, &geom, BoundaryPotential::ExteriorZero)?,
    ])
}

fn main() -> polyvem::Result<()> {
    let plain = cartesian(&[2, 2], &[2.0, 2.0])?;
    let extra = insert_edge_midnodes(&plain, |f| f.normal.y.abs() > 0.5)?;
    for (name, mesh) in [("cartesian", plain), ("extra nodes", extra)] {
        let [p, n, g] = loads(&mesh)?;
        println!("{name}: total vertical force {:.3} / {:.3} / {:.3}", sum_y(&p), sum_y(&n), sum_y(&g));
        println!("  {:>4} {:>8} {:>8} {:>8}", "node", "proj", "nodal", "dgrad");
        for i in 0..mesh.n_nodes() {
            println!("  {i:>4} {:>8.4} {:>8.4} {:>8.4}", p[2 * i + 1], n[2 * i + 1], g[2 * i + 1]);
        }
    }
    Ok(())
}

fn sum_y(v: &DVector<f64>) -> f64 {
    v.iter().skip(1).step_by(2).sum()
}
