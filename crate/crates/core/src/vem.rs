//! First-order virtual element operators for one cell.
//!
//! Degrees of freedom are node-major: `(node0, x), (node0, y), ...`, with the
//! nodes in [`PolyMesh::cell_nodes`] order. The affine displacements are
//! split into a strain part (`N_c`, Kelvin coordinates of the symmetric
//! gradient) and a rigid part (`N_r`, translations then rotation vector).

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::kelvin::{kelvin_len, kelvin_pairs, rotation_len, KelvinMaterial};
use crate::mesh::{GeometryCache, Point, PolyMesh};

/// Scaling of the stabilization `S = α I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stabilization {
    /// `α = |E| tr Ĉ / tr(N_cᵀN_c)`.
    AlphaG,
    /// `α = |E| tr Ĉ tr((N_cᵀN_c)⁻¹) / 9`.
    AlphaN,
    /// Kernel energy taken from bilinear finite elements; 2D quadrilaterals only.
    FemExact,
    Custom(f64),
}

impl Stabilization {
    pub fn name(&self) -> &'static str {
        match self {
            Stabilization::AlphaG => "alpha_g",
            Stabilization::AlphaN => "alpha_n",
            Stabilization::FemExact => "fem2d",
            Stabilization::Custom(_) => "custom",
        }
    }
}

impl std::str::FromStr for Stabilization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha_g" => Ok(Stabilization::AlphaG),
            "alpha_n" => Ok(Stabilization::AlphaN),
            "fem2d" => Ok(Stabilization::FemExact),
            other => other
                .strip_prefix("custom:")
                .and_then(|v| v.parse().ok())
                .map(Stabilization::Custom)
                .ok_or_else(|| Error::Config(format!("unknown stabilization '{other}'"))),
        }
    }
}

/// Projection matrices of one cell.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub cell: usize,
    pub dim: usize,
    pub nodes: Vec<usize>,
    pub coords: Vec<Point>,
    pub volume: f64,
    pub node_mean: Point,
    /// `q^i = ∫_E ∇φ_i`, one row per node (m^{d−1}).
    pub q: DMatrix<f64>,
    /// `r^i = x_i − x̄_E`, one row per node.
    pub r: DMatrix<f64>,
    pub wc: DMatrix<f64>,
    pub wr: DMatrix<f64>,
    pub nc: DMatrix<f64>,
    pub nr: DMatrix<f64>,
    pub p: DMatrix<f64>,
}

impl ElementOperators {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.dim * self.nodes.len()
    }

    /// Global dof indices in local order.
    pub fn dofs(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .flat_map(|&n| (0..self.dim).map(move |k| n * self.dim + k))
            .collect()
    }

    pub fn pc(&self) -> DMatrix<f64> {
        &self.nc * &self.wc
    }

    pub fn pr(&self) -> DMatrix<f64> {
        &self.nr * &self.wr
    }
}

/// `q^i = Σ_{f∋i} ∫_f φ_i n_f` over the cell's faces, outward normals.
/// Rows follow `mesh.cell_nodes(cell)`.
pub fn q_vectors(mesh: &PolyMesh, geom: &GeometryCache, cell: usize) -> DMatrix<f64> {
    let d = mesh.dim();
    let nodes = mesh.cell_nodes(cell);
    let mut q = DMatrix::zeros(nodes.len(), d);
    for cf in mesh.cell(cell) {
        let fg = &geom.faces[cf.face];
        let n = cf.sign() * fg.flux_normal();
        for (k, &node) in mesh.face(cf.face).iter().enumerate() {
            let i = nodes.iter().position(|&x| x == node).expect("face node belongs to cell");
            let w = fg.node_integrals[k];
            for a in 0..d {
                q[(i, a)] += w * n[a];
            }
        }
    }
    q
}

/// Kelvin coordinates of `sym(e_k ⊗ v)`.
fn sym_dyad(d: usize, k: usize, v: &[f64], out: &mut [f64]) {
    for (j, &(a, b)) in kelvin_pairs(d).iter().enumerate() {
        out[j] = if a == b {
            if k == a {
                v[a]
            } else {
                0.0
            }
        } else {
            let mut s = 0.0;
            if k == a {
                s += v[b];
            }
            if k == b {
                s += v[a];
            }
            s / SQRT_2
        };
    }
}

/// Rotation-vector coordinates of `skew(e_k ⊗ v)`.
fn skew_dyad(d: usize, k: usize, v: &[f64], out: &mut [f64]) {
    if d == 2 {
        // √2 · ½(u2 q1 − u1 q2)
        out[0] = match k {
            0 => -v[1],
            _ => v[0],
        } / SQRT_2;
    } else {
        // (q × e_k) / √2
        let e = Point::ith(k, 1.0);
        let c = Point::new(v[0], v[1], v[2]).cross(&e) / SQRT_2;
        out.copy_from_slice(c.as_slice());
    }
}

/// Displacement of the unit rotation mode `m` at offset `r`.
fn rotation_mode(d: usize, m: usize, r: &[f64]) -> Point {
    if d == 2 {
        Point::new(-r[1], r[0], 0.0) / SQRT_2
    } else {
        Point::ith(m, 1.0).cross(&Point::new(r[0], r[1], r[2])) / SQRT_2
    }
}

/// `W_c, W_r, N_c, N_r` and `P = N_c W_c + N_r W_r` for one cell.
pub fn element_projections(mesh: &PolyMesh, geom: &GeometryCache, cell: usize) -> Result<ElementOperators> {
    let d = mesh.dim();
    let cg = &geom.cells[cell];
    if !(cg.volume > 0.0) {
        return Err(Error::DegenerateCell(cell).in_cell(cell));
    }
    let nodes = mesh.cell_nodes(cell).to_vec();
    let n = nodes.len();
    let coords: Vec<Point> = nodes.iter().map(|&i| *mesh.node(i)).collect();
    let q = q_vectors(mesh, geom, cell);
    let mut r = DMatrix::zeros(n, d);
    for i in 0..n {
        for a in 0..d {
            r[(i, a)] = coords[i][a] - cg.node_mean[a];
        }
    }

    let kc = kelvin_len(d);
    let kr = d + rotation_len(d);
    let nd = n * d;
    let mut wc = DMatrix::zeros(kc, nd);
    let mut nc = DMatrix::zeros(nd, kc);
    let mut wr = DMatrix::zeros(kr, nd);
    let mut nr = DMatrix::zeros(nd, kr);
    let mut buf = vec![0.0; kc];
    let mut rot = vec![0.0; rotation_len(d)];
    for i in 0..n {
        let qi: Vec<f64> = (0..d).map(|a| q[(i, a)] / cg.volume).collect();
        let ri: Vec<f64> = (0..d).map(|a| r[(i, a)]).collect();
        for k in 0..d {
            let col = i * d + k;
            sym_dyad(d, k, &qi, &mut buf);
            for j in 0..kc {
                wc[(j, col)] = buf[j];
            }
            sym_dyad(d, k, &ri, &mut buf);
            for j in 0..kc {
                nc[(col, j)] = buf[j];
            }
            wr[(k, col)] = 1.0 / n as f64;
            nr[(col, k)] = 1.0;
            skew_dyad(d, k, &qi, &mut rot);
            for (m, &v) in rot.iter().enumerate() {
                wr[(d + m, col)] = v;
                nr[(col, d + m)] = rotation_mode(d, m, &ri)[k];
            }
        }
    }
    let p = &nc * &wc + &nr * &wr;
    Ok(ElementOperators {
        cell,
        dim: d,
        nodes,
        coords,
        volume: cg.volume,
        node_mean: cg.node_mean,
        q,
        r,
        wc,
        wr,
        nc,
        nr,
        p,
    })
}

/// Arithmetic and harmonic means of the singular values of `N_c`:
/// `(Σσ²)^{1/2}` and `(Σσ⁻²)^{−1/2}`.
pub fn singular_value_means(ops: &ElementOperators) -> (f64, f64) {
    let ntn = ops.nc.transpose() * &ops.nc;
    let ev = SymmetricEigen::new(ntn).eigenvalues;
    let arithm = ev.iter().sum::<f64>().sqrt();
    let harm = ev.iter().map(|s| 1.0 / s).sum::<f64>().powf(-0.5);
    (arithm, harm)
}

/// Scalar stabilization coefficient. `FemExact` has no scalar; it returns
/// the `AlphaG` value, which is what the kernel energy is compared against.
pub fn stabilization_alpha(ops: &ElementOperators, material: &KelvinMaterial, kind: Stabilization) -> Result<f64> {
    let ntn = ops.nc.transpose() * &ops.nc;
    let tr_c = material.trace();
    let alpha = match kind {
        Stabilization::AlphaG | Stabilization::FemExact => ops.volume * tr_c / ntn.trace(),
        Stabilization::AlphaN => {
            let inv = ntn
                .try_inverse()
                .ok_or_else(|| Error::DegenerateCell(ops.cell).in_cell(ops.cell))?;
            ops.volume * tr_c * inv.trace() / 9.0
        }
        Stabilization::Custom(a) => a,
    };
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::NonElliptic(format!("stabilization coefficient {alpha:e}")).in_cell(ops.cell));
    }
    Ok(alpha)
}

/// `K_E = |E| W_cᵀ Ĉ W_c + (I − P)ᵀ S (I − P)`.
pub fn element_stiffness(ops: &ElementOperators, material: &KelvinMaterial, stab: Stabilization) -> Result<DMatrix<f64>> {
    if material.dim() != ops.dim {
        return Err(Error::DimensionMismatch {
            expected: ops.dim,
            got: material.dim(),
        }
        .in_cell(ops.cell));
    }
    let nd = ops.n_dofs();
    let consistency = ops.wc.transpose() * material.matrix() * &ops.wc * ops.volume;
    let ip = DMatrix::identity(nd, nd) - &ops.p;
    let stab_part = match stab {
        Stabilization::FemExact => {
            if ops.dim != 2 || ops.n_nodes() != 4 {
                return Err(Error::Unsupported(format!(
                    "exact FEM stabilization needs a 2D quadrilateral, cell has {} nodes in {}D",
                    ops.n_nodes(),
                    ops.dim
                ))
                .in_cell(ops.cell));
            }
            let corners = [0, 1, 2, 3].map(|i| [ops.coords[i].x, ops.coords[i].y]);
            let kq = crate::verify::fem::q1_stiffness(&corners, material).map_err(|e| e.in_cell(ops.cell))?;
            ip.transpose() * kq * &ip
        }
        _ => {
            let alpha = stabilization_alpha(ops, material, stab)?;
            ip.transpose() * &ip * alpha
        }
    };
    let k = consistency + stab_part;
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonElliptic("non-finite element stiffness".into()).in_cell(ops.cell));
    }
    Ok((&k + k.transpose()) * 0.5)
}
