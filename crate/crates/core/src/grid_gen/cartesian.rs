use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{compute_geometry, CellFace, Point, PolyMesh};

/// Structured quad/hex topology with coordinates from `place(i, j, k)`.
///
/// Cells list their faces low-x, high-x, low-y, high-y(, low-z, high-z) in
/// 3D and bottom, right, top, left in 2D, so 2D cell nodes start at the
/// lower-left corner and run counter-clockwise.
pub fn structured<F>(counts: &[usize], place: F) -> Result<PolyMesh>
where
    F: Fn(usize, usize, usize) -> Point,
{
    match counts {
        [nx, ny] => structured_2d(*nx, *ny, place),
        [nx, ny, nz] => structured_3d(*nx, *ny, *nz, place),
        _ => Err(Error::DimensionMismatch {
            expected: 3,
            got: counts.len(),
        }),
    }
}

fn structured_2d<F>(nx: usize, ny: usize, place: F) -> Result<PolyMesh>
where
    F: Fn(usize, usize, usize) -> Point,
{
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidMesh("cell counts must be positive".into()));
    }
    let node = |i: usize, j: usize| i + (nx + 1) * j;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let p = place(i, j, 0);
            nodes.push(Point::new(p.x, p.y, 0.0));
        }
    }
    let mut faces = Vec::new();
    // x-faces, normal +x
    for j in 0..ny {
        for i in 0..=nx {
            faces.push(vec![node(i, j), node(i, j + 1)]);
        }
    }
    let n_xf = faces.len();
    // y-faces, normal +y
    for j in 0..=ny {
        for i in 0..nx {
            faces.push(vec![node(i + 1, j), node(i, j)]);
        }
    }
    let xf = |i: usize, j: usize| i + (nx + 1) * j;
    let yf = |i: usize, j: usize| n_xf + i + nx * j;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![
                CellFace::new(yf(i, j), false),
                CellFace::new(xf(i + 1, j), true),
                CellFace::new(yf(i, j + 1), true),
                CellFace::new(xf(i, j), false),
            ]);
        }
    }
    PolyMesh::new(2, nodes, faces, cells)
}

fn structured_3d<F>(nx: usize, ny: usize, nz: usize, place: F) -> Result<PolyMesh>
where
    F: Fn(usize, usize, usize) -> Point,
{
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidMesh("cell counts must be positive".into()));
    }
    let node = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push(place(i, j, k));
            }
        }
    }
    let mut faces = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..=nx {
                faces.push(vec![node(i, j, k), node(i, j + 1, k), node(i, j + 1, k + 1), node(i, j, k + 1)]);
            }
        }
    }
    let n_x = faces.len();
    for k in 0..nz {
        for j in 0..=ny {
            for i in 0..nx {
                faces.push(vec![node(i, j, k), node(i, j, k + 1), node(i + 1, j, k + 1), node(i + 1, j, k)]);
            }
        }
    }
    let n_y = faces.len();
    for k in 0..=nz {
        for j in 0..ny {
            for i in 0..nx {
                faces.push(vec![node(i, j, k), node(i + 1, j, k), node(i + 1, j + 1, k), node(i, j + 1, k)]);
            }
        }
    }
    let xf = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + ny * k);
    let yf = |i: usize, j: usize, k: usize| n_x + i + nx * (j + (ny + 1) * k);
    let zf = |i: usize, j: usize, k: usize| n_y + i + nx * (j + ny * k);
    let mut cells = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                cells.push(vec![
                    CellFace::new(xf(i, j, k), false),
                    CellFace::new(xf(i + 1, j, k), true),
                    CellFace::new(yf(i, j, k), false),
                    CellFace::new(yf(i, j + 1, k), true),
                    CellFace::new(zf(i, j, k), false),
                    CellFace::new(zf(i, j, k + 1), true),
                ]);
            }
        }
    }
    PolyMesh::new(3, nodes, faces, cells)
}

/// Uniform Cartesian grid on `[0, L_1] × ... × [0, L_d]`.
pub fn cartesian(counts: &[usize], lengths: &[f64]) -> Result<PolyMesh> {
    twisted_cartesian(counts, lengths, 0.0)
}

/// Cartesian grid with every node moved by `a Π_i sin(π x_i / L_i)` in each
/// direction. The displacement vanishes on the boundary.
pub fn twisted_cartesian(counts: &[usize], lengths: &[f64], amplitude: f64) -> Result<PolyMesh> {
    if counts.len() != lengths.len() {
        return Err(Error::DimensionMismatch {
            expected: counts.len(),
            got: lengths.len(),
        });
    }
    if lengths.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::InvalidMesh("lengths must be positive".into()));
    }
    let d = counts.len();
    let place = |i: usize, j: usize, k: usize| {
        let idx = [i, j, k];
        let mut x = Point::zeros();
        for a in 0..d {
            x[a] = if idx[a] == counts[a] {
                lengths[a]
            } else {
                lengths[a] * idx[a] as f64 / counts[a] as f64
            };
        }
        let interior = (0..d).all(|a| idx[a] > 0 && idx[a] < counts[a]);
        if interior && amplitude != 0.0 {
            let s: f64 = (0..d).map(|a| (PI * x[a] / lengths[a]).sin()).product();
            for a in 0..d {
                x[a] += amplitude * s;
            }
        }
        x
    };
    let mesh = structured(counts, place)?;
    if amplitude != 0.0 {
        compute_geometry(&mesh)?;
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_twist_is_cartesian() {
        let m = twisted_cartesian(&[4, 3], &[2.0, 1.5], 0.0).unwrap();
        assert_eq!(m.n_nodes(), 20);
        assert_eq!(m.n_cells(), 12);
        assert_eq!(*m.node(6), Point::new(0.5, 0.5, 0.0));
        let g = compute_geometry(&m).unwrap();
        assert!(g.cells.iter().all(|c| (c.volume - 0.25).abs() < 1e-15));
        assert_eq!(m.cell_nodes(0), &[0, 1, 6, 5]);
    }

    #[test]
    fn twisted_volumes_positive() {
        let h = 0.1;
        let m = twisted_cartesian(&[10, 10], &[1.0, 1.0], 0.05 * h).unwrap();
        let g = compute_geometry(&m).unwrap();
        assert!(g.cells.iter().all(|c| c.volume > 0.0));
        let total: f64 = g.cells.iter().map(|c| c.volume).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn boundary_nodes_stay_on_boundary() {
        let m = twisted_cartesian(&[6, 5], &[3.0, 1.0], 0.05).unwrap();
        for n in m.boundary_nodes() {
            let p = m.node(n);
            let on = p.x.abs() < 1e-15 || (p.x - 3.0).abs() < 1e-15 || p.y.abs() < 1e-15 || (p.y - 1.0).abs() < 1e-15;
            assert!(on, "{p:?}");
        }
    }

    #[test]
    fn stretched_lengths_scale_x() {
        let a = twisted_cartesian(&[5, 5], &[1.0, 1.0], 0.0).unwrap();
        let b = twisted_cartesian(&[5, 5], &[10.0, 1.0], 0.0).unwrap();
        assert_eq!(a.faces(), b.faces());
        for (p, q) in a.nodes().iter().zip(b.nodes()) {
            assert!((10.0 * p.x - q.x).abs() < 1e-14);
            assert_eq!(p.y, q.y);
        }
    }

    #[test]
    fn too_much_twist_inverts() {
        let e = twisted_cartesian(&[10, 10], &[1.0, 1.0], -0.5);
        assert!(e.is_err());
    }

    #[test]
    fn cartesian_3d_counts() {
        let m = cartesian(&[2, 3, 4], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(m.n_nodes(), 3 * 4 * 5);
        assert_eq!(m.n_cells(), 24);
        assert_eq!(m.n_faces(), 3 * 3 * 4 + 2 * 4 * 4 + 2 * 3 * 5);
        let g = compute_geometry(&m).unwrap();
        let total: f64 = g.cells.iter().map(|c| c.volume).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}
