//! Polygonal/polyhedral meshes and the exact geometric quantities needed by
//! the virtual element assembly.
//!
//! A mesh is a list of nodes, a list of oriented faces and, for each cell,
//! the faces that bound it together with an orientation flag. In 2D a face is
//! an edge with exactly two nodes, so both dimensions share one code path.
//! Node coordinates are always stored as 3-vectors; 2D meshes keep `z = 0`.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Point = Vector3<f64>;

/// A face as seen from one of its cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellFace {
    pub face: usize,
    /// `true` when the stored face normal points out of the cell.
    pub outward: bool,
}

impl CellFace {
    pub fn new(face: usize, outward: bool) -> Self {
        Self { face, outward }
    }

    pub fn sign(&self) -> f64 {
        if self.outward {
            1.0
        } else {
            -1.0
        }
    }
}

/// Validated polytopal mesh.
///
/// Faces are oriented so that their normal points from `cell_minus` to
/// `cell_plus`; boundary faces always point out of the domain.
#[derive(Debug, Clone)]
pub struct PolyMesh {
    dim: usize,
    nodes: Vec<Point>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Vec<CellFace>>,
    face_neighbors: Vec<(usize, Option<usize>)>,
    cell_nodes: Vec<Vec<usize>>,
}

impl PolyMesh {
    /// Builds and validates a mesh. Boundary faces listed with an inward
    /// orientation get their node order reversed so that every boundary
    /// normal points outward; everything else that is inconsistent is an
    /// error.
    pub fn new(
        dim: usize,
        nodes: Vec<Point>,
        mut faces: Vec<Vec<usize>>,
        mut cells: Vec<Vec<CellFace>>,
    ) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("dimension {dim} not in {{2, 3}}")));
        }
        for (i, p) in nodes.iter().enumerate() {
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidMesh(format!("node {i} has non-finite coordinates")));
            }
            if dim == 2 && p.z != 0.0 {
                return Err(Error::InvalidMesh(format!("2D node {i} has z = {}", p.z)));
            }
        }
        let n_nodes = nodes.len();
        let mut node_used = vec![false; n_nodes];
        for (f, face) in faces.iter().enumerate() {
            if dim == 2 && face.len() != 2 {
                return Err(Error::InvalidMesh(format!(
                    "2D face {f} has {} nodes, expected 2",
                    face.len()
                )));
            }
            if dim == 3 && face.len() < 3 {
                return Err(Error::InvalidMesh(format!("face {f} has {} nodes", face.len())));
            }
            for (k, &n) in face.iter().enumerate() {
                if n >= n_nodes {
                    return Err(Error::DanglingIndex(format!("face {f} references node {n}")));
                }
                if face[..k].contains(&n) {
                    return Err(Error::InvalidMesh(format!("face {f} repeats node {n}")));
                }
                node_used[n] = true;
            }
        }
        if let Some(n) = node_used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("node {n} belongs to no face")));
        }

        let mut users: Vec<Vec<(usize, usize)>> = vec![Vec::new(); faces.len()];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::EmptyCell(c));
            }
            for (k, cf) in cell.iter().enumerate() {
                if cf.face >= faces.len() {
                    return Err(Error::DanglingIndex(format!(
                        "cell {c} references face {}",
                        cf.face
                    )));
                }
                if cell[..k].iter().any(|o| o.face == cf.face) {
                    return Err(Error::InvalidMesh(format!("cell {c} lists face {} twice", cf.face)));
                }
                users[cf.face].push((c, k));
            }
        }

        let mut face_neighbors = Vec::with_capacity(faces.len());
        for (f, u) in users.iter().enumerate() {
            match u.as_slice() {
                [] => return Err(Error::InvalidMesh(format!("face {f} belongs to no cell"))),
                [(c, k)] => {
                    if !cells[*c][*k].outward {
                        faces[f].reverse();
                        cells[*c][*k].outward = true;
                    }
                    face_neighbors.push((*c, None));
                }
                [(c0, k0), (c1, k1)] => {
                    let o0 = cells[*c0][*k0].outward;
                    let o1 = cells[*c1][*k1].outward;
                    if o0 == o1 {
                        return Err(Error::InvalidMesh(format!(
                            "face {f} has the same orientation in cells {c0} and {c1}"
                        )));
                    }
                    if o0 {
                        face_neighbors.push((*c0, Some(*c1)));
                    } else {
                        face_neighbors.push((*c1, Some(*c0)));
                    }
                }
                _ => {
                    return Err(Error::NonManifoldFace {
                        face: f,
                        count: u.len(),
                    })
                }
            }
        }

        let mut cell_nodes = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            check_closed(dim, &faces, cell).map_err(|e| e.in_cell(c))?;
            cell_nodes.push(ordered_cell_nodes(dim, &faces, cell));
        }

        Ok(Self {
            dim,
            nodes,
            faces,
            cells,
            face_neighbors,
            cell_nodes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.dim * self.nodes.len()
    }

    pub fn node(&self, i: usize) -> &Point {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn cell(&self, c: usize) -> &[CellFace] {
        &self.cells[c]
    }

    pub fn cells(&self) -> &[Vec<CellFace>] {
        &self.cells
    }

    /// `(cell_minus, cell_plus)`; `cell_plus` is `None` on the boundary.
    pub fn face_neighbors(&self, f: usize) -> (usize, Option<usize>) {
        self.face_neighbors[f]
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.face_neighbors[f].1.is_none()
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(|&f| self.is_boundary_face(f))
    }

    /// Nodes of a cell without repetition. In 2D they are listed
    /// counter-clockwise along the boundary; in 3D in order of first
    /// appearance in the face list.
    pub fn cell_nodes(&self, c: usize) -> &[usize] {
        &self.cell_nodes[c]
    }

    /// Boundary nodes (nodes of at least one boundary face), sorted.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut on = vec![false; self.nodes.len()];
        for f in self.boundary_faces() {
            for &n in &self.faces[f] {
                on[n] = true;
            }
        }
        (0..self.nodes.len()).filter(|&n| on[n]).collect()
    }

    /// Axis-aligned bounding box `(min, max)` of all nodes.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::repeat(f64::INFINITY);
        let mut hi = Point::repeat(f64::NEG_INFINITY);
        for p in &self.nodes {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    pub fn into_parts(self) -> (usize, Vec<Point>, Vec<Vec<usize>>, Vec<Vec<CellFace>>) {
        (self.dim, self.nodes, self.faces, self.cells)
    }
}

fn check_closed(dim: usize, faces: &[Vec<usize>], cell: &[CellFace]) -> Result<()> {
    let mut balance: HashMap<(usize, usize), i32> = HashMap::new();
    for cf in cell {
        let face = &faces[cf.face];
        let m = face.len();
        let edges: Box<dyn Iterator<Item = (usize, usize)>> = if dim == 2 {
            Box::new(std::iter::once((face[0], face[1])))
        } else {
            Box::new((0..m).map(|j| (face[j], face[(j + 1) % m])))
        };
        for (a, b) in edges {
            let (a, b) = if cf.outward { (a, b) } else { (b, a) };
            if dim == 2 {
                // node balance: each node is entered as often as it is left
                *balance.entry((a, usize::MAX)).or_default() += 1;
                *balance.entry((b, usize::MAX)).or_default() -= 1;
            } else if a < b {
                *balance.entry((a, b)).or_default() += 1;
            } else {
                *balance.entry((b, a)).or_default() -= 1;
            }
        }
    }
    if let Some(((a, b), _)) = balance.iter().find(|(_, &v)| v != 0) {
        let what = if dim == 2 {
            format!("boundary is open at node {a}")
        } else {
            format!("edge ({a}, {b}) is not matched by an opposite edge")
        };
        return Err(Error::InvalidMesh(what));
    }
    Ok(())
}

fn ordered_cell_nodes(dim: usize, faces: &[Vec<usize>], cell: &[CellFace]) -> Vec<usize> {
    let mut first_seen = Vec::new();
    for cf in cell {
        for &n in &faces[cf.face] {
            if !first_seen.contains(&n) {
                first_seen.push(n);
            }
        }
    }
    if dim == 3 {
        return first_seen;
    }
    let mut next: HashMap<usize, usize> = HashMap::new();
    for cf in cell {
        let (a, b) = (faces[cf.face][0], faces[cf.face][1]);
        let (a, b) = if cf.outward { (a, b) } else { (b, a) };
        if next.insert(a, b).is_some() {
            // pinched polygon: no single boundary loop
            return first_seen;
        }
    }
    let f0 = &faces[cell[0].face];
    let start = if cell[0].outward { f0[0] } else { f0[1] };
    let mut loop_nodes = vec![start];
    let mut cur = start;
    while let Some(&nx) = next.get(&cur) {
        if nx == start {
            break;
        }
        loop_nodes.push(nx);
        cur = nx;
        if loop_nodes.len() > first_seen.len() {
            return first_seen;
        }
    }
    if loop_nodes.len() == first_seen.len() {
        loop_nodes
    } else {
        first_seen
    }
}

/// Geometry of one face.
#[derive(Debug, Clone)]
pub struct FaceGeometry {
    /// Sum of fan-triangle areas (edge length in 2D).
    pub area: f64,
    /// Unit normal, oriented `cell_minus → cell_plus`.
    pub normal: Point,
    /// Vector area: the sum of the fan-triangle area vectors. Equals
    /// `area * normal` for planar faces; for warped faces its norm is
    /// slightly smaller than `area`.
    pub area_vector: Point,
    /// Area-weighted centroid of the fan triangles.
    pub centroid: Point,
    /// Arithmetic mean of the face nodes.
    pub node_mean: Point,
    /// `∫_f φ_i` for each node of the face, in face node order.
    pub node_integrals: Vec<f64>,
}

impl FaceGeometry {
    /// Normal used in all flux-type sums: `area_vector / area`.
    ///
    /// It is the unit normal for planar faces. Using it keeps
    /// `Σ_f |f| n_f = 0` exact for every closed cell, warped faces included.
    pub fn flux_normal(&self) -> Point {
        self.area_vector / self.area
    }
}

/// Geometry of one cell.
#[derive(Debug, Clone)]
pub struct CellGeometry {
    pub volume: f64,
    pub centroid: Point,
    /// Arithmetic mean of the cell nodes (not the centroid).
    pub node_mean: Point,
    pub n_nodes: usize,
    /// Bounding-box diagonal.
    pub diameter: f64,
}

/// Per-face and per-cell geometry of a mesh.
#[derive(Debug, Clone)]
pub struct GeometryCache {
    pub faces: Vec<FaceGeometry>,
    pub cells: Vec<CellGeometry>,
}

struct Facet {
    area_vector: Point,
    points: [Point; 3],
    n_points: usize,
}

fn face_facets(dim: usize, pts: &[Point]) -> (Point, Vec<Facet>) {
    let m = pts.len() as f64;
    let mean = pts.iter().sum::<Point>() / m;
    if dim == 2 {
        let d = pts[1] - pts[0];
        let facet = Facet {
            area_vector: Point::new(d.y, -d.x, 0.0),
            points: [pts[0], pts[1], Point::zeros()],
            n_points: 2,
        };
        return (mean, vec![facet]);
    }
    let facets = (0..pts.len())
        .map(|j| {
            let a = pts[j];
            let b = pts[(j + 1) % pts.len()];
            Facet {
                area_vector: 0.5 * (a - mean).cross(&(b - mean)),
                points: [mean, a, b],
                n_points: 3,
            }
        })
        .collect();
    (mean, facets)
}

fn face_geometry(dim: usize, pts: &[Point]) -> FaceGeometry {
    let m = pts.len();
    let (node_mean, facets) = face_facets(dim, pts);
    if dim == 2 {
        let area_vector = facets[0].area_vector;
        let area = area_vector.norm();
        return FaceGeometry {
            area,
            normal: area_vector / area,
            area_vector,
            centroid: node_mean,
            node_mean,
            node_integrals: vec![0.5 * area; 2],
        };
    }
    let mut area = 0.0;
    let mut area_vector = Point::zeros();
    let mut moment = Point::zeros();
    for t in &facets {
        let a = t.area_vector.norm();
        area += a;
        area_vector += t.area_vector;
        moment += a * (t.points[0] + t.points[1] + t.points[2]) / 3.0;
    }
    let centroid = if area > 0.0 { moment / area } else { node_mean };
    let normal = area_vector.normalize();
    // in-plane outward edge normals scaled by edge length
    let edge_normals: Vec<Point> = (0..m)
        .map(|j| (pts[(j + 1) % m] - pts[j]).cross(&normal))
        .collect();
    let shift = centroid - node_mean;
    let node_integrals = (0..m)
        .map(|i| {
            let prev = edge_normals[(i + m - 1) % m];
            let next = edge_normals[i];
            area / m as f64 + 0.5 * (prev + next).dot(&shift)
        })
        .collect();
    FaceGeometry {
        area,
        normal,
        area_vector,
        centroid,
        node_mean,
        node_integrals,
    }
}

impl GeometryCache {
    pub fn new(mesh: &PolyMesh) -> Result<Self> {
        let dim = mesh.dim();
        let faces: Vec<FaceGeometry> = mesh
            .faces()
            .iter()
            .map(|face| {
                let pts: Vec<Point> = face.iter().map(|&n| *mesh.node(n)).collect();
                face_geometry(dim, &pts)
            })
            .collect();
        for (f, g) in faces.iter().enumerate() {
            if !(g.area > 0.0) {
                return Err(Error::InvalidMesh(format!("face {f} has zero area")));
            }
        }

        let mut cells = Vec::with_capacity(mesh.n_cells());
        for c in 0..mesh.n_cells() {
            let nodes = mesh.cell_nodes(c);
            let node_mean = nodes.iter().map(|&n| mesh.node(n)).sum::<Point>() / nodes.len() as f64;
            let mut lo = Point::repeat(f64::INFINITY);
            let mut hi = Point::repeat(f64::NEG_INFINITY);
            for &n in nodes {
                lo = lo.inf(mesh.node(n));
                hi = hi.sup(mesh.node(n));
            }
            let diameter = (hi - lo).norm();

            let cell = mesh.cell(c);
            let apex = cell.iter().map(|cf| faces[cf.face].centroid).sum::<Point>() / cell.len() as f64;
            let mut volume = 0.0;
            let mut moment = Point::zeros();
            for cf in cell {
                let pts: Vec<Point> = mesh.face(cf.face).iter().map(|&n| *mesh.node(n)).collect();
                let (_, facets) = face_facets(dim, &pts);
                for t in &facets {
                    let v = cf.sign() * t.area_vector.dot(&(t.points[0] - apex)) / dim as f64;
                    let sub_centroid = (apex + t.points[..t.n_points].iter().sum::<Point>())
                        / (t.n_points + 1) as f64;
                    volume += v;
                    moment += v * sub_centroid;
                }
            }
            if volume <= 0.0 {
                return Err(Error::InvertedCell { cell: c, volume });
            }
            if volume < 1e-14 * diameter.powi(dim as i32) {
                return Err(Error::DegenerateCell(c));
            }
            cells.push(CellGeometry {
                volume,
                centroid: moment / volume,
                node_mean,
                n_nodes: nodes.len(),
                diameter,
            });
        }
        Ok(Self { faces, cells })
    }

    /// `∫_f φ_node`: `|f|/2` in 2D; in 3D
    /// `|f|/m + ½(n_{e,i−} + n_{e,i+})·(x^f − x̄^f)` with in-plane edge
    /// normals scaled by edge length.
    pub fn face_node_integral(&self, mesh: &PolyMesh, face: usize, node: usize) -> Result<f64> {
        mesh.face(face)
            .iter()
            .position(|&n| n == node)
            .map(|k| self.faces[face].node_integrals[k])
            .ok_or(Error::NodeNotOnFace { node, face })
    }

    /// `Σ_f sign_f |f| n_f` for a cell; zero up to round-off for a closed cell.
    pub fn closedness_defect(&self, mesh: &PolyMesh, c: usize) -> Point {
        mesh.cell(c)
            .iter()
            .map(|cf| cf.sign() * self.faces[cf.face].area_vector)
            .sum()
    }
}

/// Shorthand for [`GeometryCache::new`].
pub fn compute_geometry(mesh: &PolyMesh) -> Result<GeometryCache> {
    GeometryCache::new(mesh)
}

/// Unit cube `[0,1]^3` as a single hexahedral cell.
pub fn unit_cube() -> PolyMesh {
    let nodes = (0..8)
        .map(|i| Point::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect();
    let faces = vec![
        vec![0, 2, 3, 1], // z = 0
        vec![4, 5, 7, 6], // z = 1
        vec![0, 1, 5, 4], // y = 0
        vec![2, 6, 7, 3], // y = 1
        vec![0, 4, 6, 2], // x = 0
        vec![1, 3, 7, 5], // x = 1
    ];
    let cells = vec![(0..6).map(|f| CellFace::new(f, true)).collect()];
    PolyMesh::new(3, nodes, faces, cells).expect("unit cube is valid")
}

/// Single 2D polygon from counter-clockwise vertices.
pub fn polygon(vertices: &[[f64; 2]]) -> Result<PolyMesh> {
    let n = vertices.len();
    let nodes = vertices.iter().map(|v| Point::new(v[0], v[1], 0.0)).collect();
    let faces = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let cells = vec![(0..n).map(|f| CellFace::new(f, true)).collect()];
    PolyMesh::new(2, nodes, faces, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PolyMesh {
        polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn unit_cube_counts_and_closedness() {
        let m = unit_cube();
        assert_eq!((m.n_nodes(), m.n_faces(), m.n_cells()), (8, 6, 1));
        let g = compute_geometry(&m).unwrap();
        assert!(g.closedness_defect(&m, 0).norm() < 1e-14);
        assert!((g.cells[0].volume - 1.0).abs() < 1e-14);
        assert!((g.cells[0].centroid - Point::repeat(0.5)).norm() < 1e-14);
        assert!((g.cells[0].node_mean - Point::repeat(0.5)).norm() < 1e-15);
        for f in 0..6 {
            for &n in m.face(f) {
                assert!((g.face_node_integral(&m, f, n).unwrap() - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unit_square_as_four_edges() {
        let m = unit_square();
        assert_eq!((m.n_nodes(), m.n_faces()), (4, 4));
        assert_eq!(m.cell_nodes(0), &[0, 1, 2, 3]);
        let g = compute_geometry(&m).unwrap();
        assert!((g.cells[0].volume - 1.0).abs() < 1e-15);
    }

    #[test]
    fn face_listed_by_three_cells_is_rejected() {
        let nodes = vec![Point::new(0.0, 0.0, 0.0), Point::new(1.0, 0.0, 0.0)];
        let faces = vec![vec![0, 1]];
        let cells = vec![
            vec![CellFace::new(0, true)],
            vec![CellFace::new(0, false)],
            vec![CellFace::new(0, true)],
        ];
        let err = PolyMesh::new(2, nodes, faces, cells).unwrap_err();
        assert!(matches!(err, Error::NonManifoldFace { face: 0, count: 3 }));
        assert!(err.to_string().contains("non-manifold face"));
    }

    #[test]
    fn dangling_and_empty_are_rejected() {
        let nodes = vec![Point::zeros(), Point::new(1.0, 0.0, 0.0)];
        let e = PolyMesh::new(2, nodes.clone(), vec![vec![0, 5]], vec![vec![CellFace::new(0, true)]]);
        assert!(matches!(e, Err(Error::DanglingIndex(_))));
        let e = PolyMesh::new(2, nodes, vec![vec![0, 1]], vec![vec![]]);
        assert!(matches!(e, Err(Error::EmptyCell(0))));
    }

    #[test]
    fn open_cell_is_rejected() {
        let e = PolyMesh::new(
            2,
            vec![Point::zeros(), Point::new(1.0, 0.0, 0.0), Point::new(0.0, 1.0, 0.0)],
            vec![vec![0, 1], vec![1, 2]],
            vec![vec![CellFace::new(0, true), CellFace::new(1, true)]],
        );
        assert!(matches!(e, Err(Error::Element { .. })));
    }

    #[test]
    fn inward_boundary_face_is_reoriented() {
        let nodes = vec![
            Point::new(0.0, 0.0, 0.0),
            Point::new(1.0, 0.0, 0.0),
            Point::new(1.0, 1.0, 0.0),
            Point::new(0.0, 1.0, 0.0),
        ];
        let faces = vec![vec![1, 0], vec![1, 2], vec![2, 3], vec![3, 0]];
        let cells = vec![vec![
            CellFace::new(0, false),
            CellFace::new(1, true),
            CellFace::new(2, true),
            CellFace::new(3, true),
        ]];
        let m = PolyMesh::new(2, nodes, faces, cells).unwrap();
        assert_eq!(m.face(0), &[0, 1]);
        assert!(m.cell(0)[0].outward);
        let g = compute_geometry(&m).unwrap();
        assert!((g.faces[0].normal - Point::new(0.0, -1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn clockwise_polygon_is_inverted() {
        let m = polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(matches!(compute_geometry(&m), Err(Error::InvertedCell { cell: 0, .. })));
    }

    #[test]
    fn rectangle_volume_and_node_mean() {
        let (h1, h2) = (5.0, 0.5);
        let m = polygon(&[[-h1, -h2], [h1, -h2], [h1, h2], [-h1, h2]]).unwrap();
        let g = compute_geometry(&m).unwrap();
        assert!((g.cells[0].volume - 4.0 * h1 * h2).abs() < 1e-13);
        assert!(g.cells[0].node_mean.norm() < 1e-15);
    }

    #[test]
    fn node_mean_differs_from_centroid() {
        // extra node on the bottom edge pulls the node mean down
        let m = polygon(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let g = compute_geometry(&m).unwrap();
        assert!((g.cells[0].centroid - Point::new(0.5, 0.5, 0.0)).norm() < 1e-15);
        assert!((g.cells[0].node_mean - Point::new(0.5, 0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn edge_integral_is_half_length() {
        let m = polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]).unwrap();
        let g = compute_geometry(&m).unwrap();
        assert_eq!(g.face_node_integral(&m, 0, 0).unwrap(), 1.0);
        assert_eq!(g.face_node_integral(&m, 0, 1).unwrap(), 1.0);
        assert!(matches!(
            g.face_node_integral(&m, 0, 3),
            Err(Error::NodeNotOnFace { node: 3, face: 0 })
        ));
    }

    #[test]
    fn skew_quad_area_matches_independent_fan_sum() {
        let pts = [
            Point::new(0.0, 0.0, 0.0),
            Point::new(1.0, 0.0, 0.0),
            Point::new(1.0, 1.0, 0.2),
            Point::new(0.0, 1.0, 0.0),
        ];
        // oracle: triangles about the node average, Heron-free cross products
        let c = (pts[0] + pts[1] + pts[2] + pts[3]) / 4.0;
        let mut fan = 0.0;
        for j in 0..4 {
            let (a, b) = (pts[j], pts[(j + 1) % 4]);
            let (u, v) = (a - c, b - c);
            let ux = [u.x, u.y, u.z];
            let vx = [v.x, v.y, v.z];
            let cx = [
                ux[1] * vx[2] - ux[2] * vx[1],
                ux[2] * vx[0] - ux[0] * vx[2],
                ux[0] * vx[1] - ux[1] * vx[0],
            ];
            fan += 0.5 * (cx[0] * cx[0] + cx[1] * cx[1] + cx[2] * cx[2]).sqrt();
        }
        let g = face_geometry(3, &pts);
        assert!((g.area - fan).abs() < 1e-15, "{} vs {}", g.area, fan);
        // warped: the vector area is strictly shorter than the fan area
        assert!(g.area_vector.norm() < g.area);
        let sum: f64 = g.node_integrals.iter().sum();
        assert!((sum - g.area).abs() < 1e-14);
    }

    #[test]
    fn pentagon_partition_of_unity_and_first_moment() {
        let pts: Vec<Point> = [[0.0, 0.0], [3.0, 0.0], [4.0, 2.0], [1.5, 3.5], [-0.5, 1.8]]
            .iter()
            .map(|p| Point::new(p[0], p[1], 0.0))
            .collect();
        let g = face_geometry(3, &pts);
        let sum: f64 = g.node_integrals.iter().sum();
        assert!((sum - g.area).abs() < 1e-13 * g.area);
        // the enhanced integrals reproduce the first moment ∫_f x = |f| x^f
        let moment: Point = pts.iter().zip(&g.node_integrals).map(|(p, w)| *w * p).sum();
        assert!((moment - g.area * g.centroid).norm() < 1e-12 * g.area);
        // shoelace oracle
        let mut shoelace = 0.0;
        for j in 0..5 {
            let (a, b) = (pts[j], pts[(j + 1) % 5]);
            shoelace += 0.5 * (a.x * b.y - b.x * a.y);
        }
        assert!((g.area - shoelace).abs() < 1e-13);
    }
}
