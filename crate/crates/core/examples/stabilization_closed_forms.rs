//! Stabilization scalings on a rectangle `[−ε, ε] × [−1, 1]`: the closed
//! forms of `N_cᵀN_c` and `α_G`, and how well each scaling matches the
//! energy of the two hourglass modes as `ε` grows.

use polyvem::mesh::{compute_geometry, polygon};
use polyvem::vem::{element_projections, singular_value_means, stabilization_alpha, Stabilization};
use polyvem::verify::acceptance::kernel_rayleigh_quotients;
use polyvem::verify::compaction::CompactionCase;

fn main() -> polyvem::Result<()> {
    let mat = CompactionCase::default().material(2)?;
    println!("tr C = {:.4e} Pa", mat.trace());
    println!(
        "{:>7} {:>11} {:>11} {:>11} {:>11} {:>19} {:>19}",
        "eps", "alpha_G", "closed", "alpha_N", "sigma_harm", "a/s alpha_G", "a/s alpha_N"
    );
    for eps in [1e-2, 0.1, 1.0, 2.0, 10.0, 100.0] {
        let m = polygon(&[[-eps, -1.0], [eps, -1.0], [eps, 1.0], [-eps, 1.0]])?;
        let ops = element_projections(&m, &compute_geometry(&m)?, 0)?;
        let ntn = ops.nc.transpose() * &ops.nc;
        assert!((ntn[(0, 0)] - 4.0 * eps * eps).abs() < 1e-12 * ntn[(0, 0)]);
        let ag = stabilization_alpha(&ops, &mat, Stabilization::AlphaG)?;
        let an = stabilization_alpha(&ops, &mat, Stabilization::AlphaN)?;
        let closed = 2.0 / 3.0 * mat.trace() / (eps + 1.0 / eps);
        let (_, harm) = singular_value_means(&ops);
        let (g0, g1) = kernel_rayleigh_quotients(eps, &mat, Stabilization::AlphaG)?;
        let (n0, n1) = kernel_rayleigh_quotients(eps, &mat, Stabilization::AlphaN)?;
        println!(
            "{eps:>7} {ag:>11.4e} {closed:>11.4e} {an:>11.4e} {harm:>11.4e} {:>9.2e}..{:<8.2e} {:>9.3}..{:<8.3}",
            g0, g1, n0, n1
        );
    }
    Ok(())
}
