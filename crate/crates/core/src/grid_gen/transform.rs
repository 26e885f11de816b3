use crate::error::{Error, Result};
use crate::mesh::{compute_geometry, CellFace, FaceGeometry, GeometryCache, Point, PolyMesh};

/// Splits every 2D edge selected by `filter` at its midpoint.
///
/// `filter` sees the face geometry (unit normal, length, centroid). A
/// horizontal-edge filter is `|f| f.normal.y.abs() > 0.5`.
pub fn insert_edge_midnodes<F>(mesh: &PolyMesh, filter: F) -> Result<PolyMesh>
where
    F: Fn(&FaceGeometry) -> bool,
{
    if mesh.dim() != 2 {
        return Err(Error::Unsupported("edge midnodes need a 2D mesh".into()));
    }
    let geom = compute_geometry(mesh)?;
    let (dim, mut nodes, mut faces, mut cells) = mesh.clone().into_parts();
    let n_faces = faces.len();
    let mut extra: Vec<Option<usize>> = vec![None; n_faces];
    for f in 0..n_faces {
        if !filter(&geom.faces[f]) {
            continue;
        }
        let (a, b) = (faces[f][0], faces[f][1]);
        let m = nodes.len();
        nodes.push(0.5 * (nodes[a] + nodes[b]));
        faces[f] = vec![a, m];
        extra[f] = Some(faces.len());
        faces.push(vec![m, b]);
    }
    for cell in cells.iter_mut() {
        let mut out = Vec::with_capacity(cell.len() + 2);
        for cf in cell.iter() {
            match extra[cf.face] {
                // keep the loop order: outward traversal visits a→m→b
                Some(g) if cf.outward => {
                    out.push(*cf);
                    out.push(CellFace::new(g, true));
                }
                Some(g) => {
                    out.push(CellFace::new(g, false));
                    out.push(*cf);
                }
                None => out.push(*cf),
            }
        }
        *cell = out;
    }
    PolyMesh::new(dim, nodes, faces, cells)
}

/// Replaces every face with more than three nodes by the fan of triangles
/// about its node average, adding one node per such face.
pub fn triangulate_faces(mesh: &PolyMesh) -> Result<PolyMesh> {
    if mesh.dim() != 3 {
        return Err(Error::Unsupported("face triangulation needs a 3D mesh".into()));
    }
    let (dim, mut nodes, faces, cells) = mesh.clone().into_parts();
    let mut new_faces = Vec::new();
    let mut map: Vec<Vec<usize>> = Vec::with_capacity(faces.len());
    for face in &faces {
        if face.len() == 3 {
            map.push(vec![new_faces.len()]);
            new_faces.push(face.clone());
            continue;
        }
        let c = nodes.len();
        nodes.push(face.iter().map(|&n| nodes[n]).sum::<Point>() / face.len() as f64);
        let m = face.len();
        let ids = (0..m)
            .map(|j| {
                new_faces.push(vec![c, face[j], face[(j + 1) % m]]);
                new_faces.len() - 1
            })
            .collect();
        map.push(ids);
    }
    let cells = cells
        .into_iter()
        .map(|cell| {
            cell.into_iter()
                .flat_map(|cf| map[cf.face].iter().map(move |&g| CellFace::new(g, cf.outward)))
                .collect()
        })
        .collect();
    PolyMesh::new(dim, nodes, new_faces, cells)
}

/// Reflects the mesh about the mid-plane of its bounding box along `axis`
/// and reverses every face so volumes stay positive. Applying it twice
/// restores the original mesh.
pub fn flip_vertical(mesh: &PolyMesh, axis: usize) -> Result<PolyMesh> {
    if axis >= mesh.dim() {
        return Err(Error::DimensionMismatch {
            expected: mesh.dim(),
            got: axis + 1,
        });
    }
    let (lo, hi) = mesh.bounding_box();
    let s = lo[axis] + hi[axis];
    let (dim, mut nodes, mut faces, cells) = mesh.clone().into_parts();
    for p in nodes.iter_mut() {
        p[axis] = s - p[axis];
    }
    for f in faces.iter_mut() {
        f.reverse();
    }
    PolyMesh::new(dim, nodes, faces, cells)
}

/// Multiplies coordinates per axis. Negative factors are rejected.
pub fn scale(mesh: &PolyMesh, factors: &[f64]) -> Result<PolyMesh> {
    if factors.len() != mesh.dim() {
        return Err(Error::DimensionMismatch {
            expected: mesh.dim(),
            got: factors.len(),
        });
    }
    if factors.iter().any(|f| !(*f > 0.0)) {
        return Err(Error::InvalidMesh("scale factors must be positive".into()));
    }
    let (dim, mut nodes, faces, cells) = mesh.clone().into_parts();
    for p in nodes.iter_mut() {
        for (a, f) in factors.iter().enumerate() {
            p[a] *= f;
        }
    }
    PolyMesh::new(dim, nodes, faces, cells)
}

/// Checks that the transformed mesh still has positive volumes.
pub fn checked(mesh: PolyMesh) -> Result<(PolyMesh, GeometryCache)> {
    let g = compute_geometry(&mesh)?;
    Ok((mesh, g))
}
