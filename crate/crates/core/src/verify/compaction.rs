//! Compaction of a column under gravity or a top load, with rolling sides
//! and a clamped bottom, and its one-dimensional exact solution.

use nalgebra::DVector;

use super::metrics::{error_metrics, ErrorMetrics};
use crate::error::{Error, Result};
use crate::kelvin::KelvinMaterial;
use crate::loads::{
    discrete_gradient, load_nodal_quadrature, load_projection, BoundaryPotential, LoadMethod, NodalField,
};
use crate::mesh::{GeometryCache, Point, PolyMesh};
use crate::sparse::SolveInfo;
use crate::system::{apply_bcs, assemble_global, solve, BoundarySpec, Materials};
use crate::vem::Stabilization;

pub const DEFAULT_DENSITY: f64 = 3e3;
pub const DEFAULT_YOUNG: f64 = 3e8;
pub const DEFAULT_POISSON: f64 = 0.3;
pub const DEFAULT_HEIGHT: f64 = 15.0;
pub const DEFAULT_GRAVITY: f64 = 9.8;

/// Vertical direction of a mesh: coordinate `axis`, pointing up when `up`
/// is `+1` and down (depth) when it is `−1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalFrame {
    pub axis: usize,
    pub up: f64,
    /// Coordinate of the bottom surface.
    pub bottom: f64,
    pub height: f64,
}

impl VerticalFrame {
    /// Frame spanning the bounding box of `mesh`.
    pub fn of_mesh(mesh: &PolyMesh, axis: usize, up: bool) -> Self {
        let (lo, hi) = mesh.bounding_box();
        let (bottom, sign) = if up { (lo[axis], 1.0) } else { (hi[axis], -1.0) };
        Self {
            axis,
            up: sign,
            bottom,
            height: hi[axis] - lo[axis],
        }
    }

    /// Height above the bottom.
    pub fn height_of(&self, x: &Point) -> f64 {
        self.up * (x[self.axis] - self.bottom)
    }

    /// Unit vector pointing up.
    pub fn up_vector(&self) -> Point {
        Point::ith(self.axis, self.up)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompactionLoad {
    Gravity,
    /// Normal stress `σ` on the top surface; the traction is `σ n` with `n`
    /// the outward (upward) normal, so compression is negative.
    TopTraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactionCase {
    pub density: f64,
    pub gravity: f64,
    pub young: f64,
    pub poisson: f64,
    pub load: CompactionLoad,
}

impl Default for CompactionCase {
    fn default() -> Self {
        Self {
            density: DEFAULT_DENSITY,
            gravity: DEFAULT_GRAVITY,
            young: DEFAULT_YOUNG,
            poisson: DEFAULT_POISSON,
            load: CompactionLoad::Gravity,
        }
    }
}

impl CompactionCase {
    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0 && self.gravity > 0.0 && self.young > 0.0) {
            return Err(Error::Config("density, gravity and Young's modulus must be positive".into()));
        }
        Ok(())
    }

    pub fn material(&self, dim: usize) -> Result<KelvinMaterial> {
        KelvinMaterial::from_young(self.young, self.poisson, dim)
    }

    /// `γ = ρ g / (2 C_vv)`.
    pub fn gamma(&self, dim: usize, frame: &VerticalFrame) -> Result<f64> {
        let c = self.material(dim)?.axial_modulus(frame.axis);
        Ok(self.density * self.gravity / (2.0 * c))
    }

    /// Exact displacement at `x`. Under gravity the upward component is
    /// `−γ(L² − (s − L)²)` with `s` the height above the bottom; under a top
    /// load it is `(σ / C_vv) s`. Horizontal components vanish.
    pub fn exact(&self, dim: usize, frame: &VerticalFrame, x: &Point) -> Result<Point> {
        let s = frame.height_of(x);
        let l = frame.height;
        let c = self.material(dim)?.axial_modulus(frame.axis);
        let up = match self.load {
            CompactionLoad::Gravity => -self.gamma(dim, frame)? * (l * l - (s - l) * (s - l)),
            CompactionLoad::TopTraction(sigma) => sigma / c * s,
        };
        Ok(frame.up_vector() * up)
    }

    pub fn exact_field(&self, mesh: &PolyMesh, frame: &VerticalFrame) -> Result<NodalField> {
        let d = mesh.dim();
        let mut u = DVector::zeros(mesh.n_dofs());
        for (n, x) in mesh.nodes().iter().enumerate() {
            let e = self.exact(d, frame, x)?;
            for k in 0..d {
                u[n * d + k] = e[k];
            }
        }
        Ok(u)
    }
}

/// Clamped bottom, rolling sides, and (for a top load) the top traction.
pub fn compaction_bcs(mesh: &PolyMesh, frame: &VerticalFrame, case: &CompactionCase) -> Result<BoundarySpec> {
    let d = mesh.dim();
    let (lo, hi) = mesh.bounding_box();
    let tol = 1e-9 * mesh.diameter();
    let mut bc = BoundarySpec::new();
    let boundary = mesh.boundary_nodes();
    for &n in &boundary {
        if frame.height_of(mesh.node(n)).abs() <= tol {
            bc.fix_node(n, d, &Point::zeros())?;
        }
    }
    for a in (0..d).filter(|&a| a != frame.axis) {
        let side: Vec<usize> = boundary
            .iter()
            .copied()
            .filter(|&n| {
                let x = mesh.node(n)[a];
                (x - lo[a]).abs() <= tol || (x - hi[a]).abs() <= tol
            })
            .collect();
        bc.roll(side, a);
    }
    if let CompactionLoad::TopTraction(sigma) = case.load {
        let t = frame.up_vector() * sigma;
        for f in mesh.boundary_faces() {
            let top = mesh
                .face(f)
                .iter()
                .all(|&n| (frame.height_of(mesh.node(n)) - frame.height).abs() <= tol);
            if top {
                bc.traction(f, t);
            }
        }
        if bc.tractions.is_empty() {
            return Err(Error::InvalidMesh("no boundary faces on the top surface".into()));
        }
    }
    Ok(bc)
}

/// Body-force load for the chosen assembly.
pub fn compaction_load(
    mesh: &PolyMesh,
    geom: &GeometryCache,
    ops: &[crate::vem::ElementOperators],
    frame: &VerticalFrame,
    case: &CompactionCase,
    method: LoadMethod,
) -> Result<NodalField> {
    if case.load != CompactionLoad::Gravity {
        return Ok(DVector::zeros(mesh.n_dofs()));
    }
    let weight = case.density * case.gravity;
    let f = frame.up_vector() * -weight;
    Ok(match method {
        LoadMethod::Projection => load_projection(|_| f, mesh, geom, ops),
        LoadMethod::Nodal => load_nodal_quadrature(|_| f, mesh, geom),
        LoadMethod::DiscreteGradient => {
            // potential with f = ∇ψ, zero on the free surface
            let psi = DVector::from_iterator(
                mesh.n_cells(),
                geom.cells.iter().map(|c| weight * (frame.height - frame.height_of(&c.centroid))),
            );
            discrete_gradient(&psi, mesh, geom, BoundaryPotential::ExteriorZero)?
        }
    })
}

#[derive(Debug, Clone)]
pub struct CompactionRun {
    pub u: NodalField,
    pub exact: NodalField,
    pub metrics: ErrorMetrics,
    pub info: SolveInfo,
    pub n_free: usize,
}

/// Full pipeline: assemble, load, constrain, solve and compare.
pub fn solve_compaction(
    mesh: &PolyMesh,
    geom: &GeometryCache,
    frame: &VerticalFrame,
    case: &CompactionCase,
    method: LoadMethod,
    stab: Stabilization,
    tol: f64,
) -> Result<CompactionRun> {
    case.validate()?;
    let material = case.material(mesh.dim())?;
    let asm = assemble_global(mesh, geom, &Materials::Uniform(material), stab)?;
    let load = compaction_load(mesh, geom, &asm.ops, frame, case, method)?;
    let bc = compaction_bcs(mesh, frame, case)?;
    let sys = apply_bcs(&asm.k, &load, &bc, mesh, geom)?;
    let (u, info) = solve(&sys, tol)?;
    let exact = case.exact_field(mesh, frame)?;
    let metrics = error_metrics(&u, &exact, mesh.dim(), Some(frame.axis))?;
    Ok(CompactionRun {
        u,
        exact,
        metrics,
        info,
        n_free: sys.free.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_gen::cartesian;
    use crate::kelvin::lame_from_young;
    use crate::mesh::compute_geometry;

    fn frame2() -> VerticalFrame {
        VerticalFrame {
            axis: 1,
            up: 1.0,
            bottom: 0.0,
            height: DEFAULT_HEIGHT,
        }
    }

    #[test]
    fn exact_solution_values() {
        let case = CompactionCase::default();
        let f = frame2();
        assert_eq!(case.exact(2, &f, &Point::new(3.0, 0.0, 0.0)).unwrap(), Point::zeros());
        let g = case.gamma(2, &f).unwrap();
        let mid = case.exact(2, &f, &Point::new(0.0, 7.5, 0.0)).unwrap();
        assert!((mid.y + 0.75 * g * 15.0 * 15.0).abs() < 1e-15);
        // γ with the default parameters: λ + 2μ = E(1−ν)/((1+ν)(1−2ν))
        let (l, mu) = lame_from_young(3e8, 0.3);
        let expect = 9.8 * 3e3 / (2.0 * (l + 2.0 * mu));
        assert!((g - expect).abs() < 1e-20);
        assert!((g - 3.64e-5).abs() < 1e-18, "{g:e}");
    }

    #[test]
    fn depth_frame_matches_height_frame() {
        let case = CompactionCase::default();
        let up = frame2();
        let down = VerticalFrame {
            axis: 1,
            up: -1.0,
            bottom: 15.0,
            height: 15.0,
        };
        // depth 5 corresponds to height 10
        let a = case.exact(2, &up, &Point::new(0.0, 10.0, 0.0)).unwrap();
        let b = case.exact(2, &down, &Point::new(0.0, 5.0, 0.0)).unwrap();
        assert!((a.y + b.y).abs() < 1e-18);
    }

    #[test]
    fn single_cube_gravity_solves() {
        let m = cartesian(&[1, 1, 1], &[1.0, 1.0, 1.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let frame = VerticalFrame::of_mesh(&m, 2, true);
        let run = solve_compaction(&m, &g, &frame, &CompactionCase::default(), LoadMethod::Projection, Stabilization::AlphaG, 1e-10).unwrap();
        assert!(run.info.relative_residual <= 1e-10);
        assert!(run.u.iter().all(|v| v.is_finite()));
        assert!(run.u[3 * 7 + 2] < 0.0);
    }

    #[test]
    fn one_dimensional_column_is_nodally_exact() {
        let m = cartesian(&[2, 6], &[15.0, 15.0]).unwrap();
        let g = compute_geometry(&m).unwrap();
        let frame = VerticalFrame::of_mesh(&m, 1, true);
        for method in [LoadMethod::Projection, LoadMethod::DiscreteGradient] {
            let run = solve_compaction(&m, &g, &frame, &CompactionCase::default(), method, Stabilization::AlphaG, 1e-12).unwrap();
            assert!(run.metrics.rel_max < 1e-10, "{method:?} {:?}", run.metrics);
        }
    }
}
