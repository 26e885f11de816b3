//! Corner-point grids: pillars given by two points each, and eight corner
//! depths per cell.
//!
//! Depth (`z`) grows with the layer index `k`. Mesh coordinates are
//! `(x, y, depth)`.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{compute_geometry, CellFace, Point, PolyMesh};

#[derive(Debug, Clone, PartialEq)]
pub struct CornerPointSpec {
    dims: [usize; 3],
    coord: Vec<f64>,
    zcorn: Vec<f64>,
    actnum: Vec<bool>,
}

impl CornerPointSpec {
    /// Checks the item counts of every array.
    pub fn new(dims: [usize; 3], coord: Vec<f64>, zcorn: Vec<f64>, actnum: Vec<bool>) -> Result<Self> {
        let [nx, ny, nz] = dims;
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::Grdecl(format!("cell counts must be positive, got {nx}×{ny}×{nz}")));
        }
        let n_coord = 6 * (nx + 1) * (ny + 1);
        if coord.len() != n_coord {
            return Err(Error::Grdecl(format!("COORD count mismatch ({}≠{n_coord})", coord.len())));
        }
        let n_z = 8 * nx * ny * nz;
        if zcorn.len() != n_z {
            return Err(Error::Grdecl(format!("ZCORN count mismatch ({}≠{n_z})", zcorn.len())));
        }
        if actnum.len() != nx * ny * nz {
            return Err(Error::Grdecl(format!(
                "ACTNUM count mismatch ({}≠{})",
                actnum.len(),
                nx * ny * nz
            )));
        }
        if coord.iter().chain(&zcorn).any(|v| !v.is_finite()) {
            return Err(Error::Grdecl("non-finite coordinate".into()));
        }
        Ok(Self {
            dims,
            coord,
            zcorn,
            actnum,
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn coord(&self) -> &[f64] {
        &self.coord
    }

    pub fn zcorn(&self) -> &[f64] {
        &self.zcorn
    }

    pub fn actnum(&self) -> &[bool] {
        &self.actnum
    }

    pub fn n_cells(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    /// ZCORN position of corner `(di, dj, dk)` of cell `(i, j, k)`.
    pub fn zcorn_index(&self, i: usize, j: usize, k: usize, di: usize, dj: usize, dk: usize) -> usize {
        let [nx, ny, _] = self.dims;
        (2 * i + di) + 2 * nx * ((2 * j + dj) + 2 * ny * (2 * k + dk))
    }

    pub fn depth(&self, i: usize, j: usize, k: usize, di: usize, dj: usize, dk: usize) -> f64 {
        self.zcorn[self.zcorn_index(i, j, k, di, dj, dk)]
    }

    /// `[x_top, y_top, z_top, x_bottom, y_bottom, z_bottom]` of pillar `(i, j)`.
    pub fn pillar(&self, i: usize, j: usize) -> [f64; 6] {
        let p = 6 * (i + (self.dims[0] + 1) * j);
        self.coord[p..p + 6].try_into().unwrap()
    }

    /// Point on pillar `(i, j)` at the given depth.
    pub fn point_on_pillar(&self, i: usize, j: usize, depth: f64) -> Result<Point> {
        let p = self.pillar(i, j);
        let dz = p[5] - p[2];
        if dz == 0.0 {
            return Err(Error::Grdecl(format!("pillar ({i}, {j}) has zero vertical extent")));
        }
        let t = (depth - p[2]) / dz;
        Ok(Point::new(p[0] + t * (p[3] - p[0]), p[1] + t * (p[4] - p[1]), depth))
    }

    fn diameter(&self) -> f64 {
        let mut lo = Point::repeat(f64::INFINITY);
        let mut hi = Point::repeat(f64::NEG_INFINITY);
        for p in self.coord.chunks(6) {
            for q in [Point::new(p[0], p[1], p[2]), Point::new(p[3], p[4], p[5])] {
                lo = lo.inf(&q);
                hi = hi.sup(&q);
            }
        }
        for &z in &self.zcorn {
            lo.z = lo.z.min(z);
            hi.z = hi.z.max(z);
        }
        (hi - lo).norm()
    }
}

fn dedupe_cyclic(face: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(face.len());
    for &n in face {
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn signed_volume(faces: &[Vec<usize>], pts: &[Point]) -> f64 {
    let all: Vec<usize> = faces.iter().flatten().copied().collect();
    let c = all.iter().map(|&n| pts[n]).sum::<Point>() / all.len() as f64;
    let mut v = 0.0;
    for f in faces {
        let m = f.iter().map(|&n| pts[n]).sum::<Point>() / f.len() as f64;
        for j in 0..f.len() {
            let a = pts[f[j]] - c;
            let b = pts[f[(j + 1) % f.len()]] - c;
            v += (m - c).dot(&a.cross(&b)) / 6.0;
        }
    }
    v
}

/// Builds the hexahedral mesh of the active, non-degenerate cells.
///
/// Corner points on a pillar closer than `1e-9 ×` model diameter are merged.
/// Faces are matched by their node sets, so faces across a fault (where
/// corner depths differ) end up on the boundary. Cells whose four corner
/// pairs all coincide are dropped.
pub fn build_cornerpoint(spec: &CornerPointSpec) -> Result<PolyMesh> {
    let [nx, ny, nz] = spec.dims;
    let tol = 1e-9 * spec.diameter();
    let n_pillars = (nx + 1) * (ny + 1);
    let pillar_id = |i: usize, j: usize| i + (nx + 1) * j;

    let mut kept = Vec::new();
    let mut depths: Vec<Vec<f64>> = vec![Vec::new(); n_pillars];
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let c = spec.cell_index(i, j, k);
                if !spec.actnum[c] {
                    continue;
                }
                let mut thick = false;
                for dj in 0..2 {
                    for di in 0..2 {
                        let top = spec.depth(i, j, k, di, dj, 0);
                        let bot = spec.depth(i, j, k, di, dj, 1);
                        if bot < top - tol {
                            return Err(Error::InvertedCell {
                                cell: c,
                                volume: bot - top,
                            });
                        }
                        thick |= bot - top > tol;
                    }
                }
                if !thick {
                    continue;
                }
                kept.push((i, j, k));
                for dk in 0..2 {
                    for dj in 0..2 {
                        for di in 0..2 {
                            depths[pillar_id(i + di, j + dj)].push(spec.depth(i, j, k, di, dj, dk));
                        }
                    }
                }
            }
        }
    }

    // merge depths per pillar
    let mut nodes = Vec::new();
    let mut levels: Vec<Vec<(f64, usize)>> = Vec::with_capacity(n_pillars);
    for (p, d) in depths.iter_mut().enumerate() {
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut lv: Vec<(f64, usize)> = Vec::new();
        for &z in d.iter() {
            if lv.last().map_or(true, |&(z0, _)| z - z0 > tol) {
                let (i, j) = (p % (nx + 1), p / (nx + 1));
                lv.push((z, nodes.len()));
                nodes.push(spec.point_on_pillar(i, j, z)?);
            }
        }
        levels.push(lv);
    }
    let node_at = |i: usize, j: usize, z: f64| -> usize {
        let lv = &levels[pillar_id(i, j)];
        let k = lv.partition_point(|&(z0, _)| z0 < z - tol);
        let k = if k < lv.len() { k } else { lv.len() - 1 };
        // the merged level is the last one not above z + tol
        let mut best = k;
        while best + 1 < lv.len() && lv[best + 1].0 <= z + tol && (lv[best + 1].0 - z).abs() < (lv[best].0 - z).abs() {
            best += 1;
        }
        lv[best].1
    };

    let mut cell_faces: Vec<Vec<Vec<usize>>> = Vec::with_capacity(kept.len());
    let mut volumes = Vec::with_capacity(kept.len());
    for &(i, j, k) in &kept {
        let c = |di: usize, dj: usize, dk: usize| node_at(i + di, j + dj, spec.depth(i, j, k, di, dj, dk));
        let raw = [
            vec![c(0, 0, 1), c(0, 1, 1), c(0, 1, 0), c(0, 0, 0)],
            vec![c(1, 0, 0), c(1, 1, 0), c(1, 1, 1), c(1, 0, 1)],
            vec![c(1, 0, 0), c(1, 0, 1), c(0, 0, 1), c(0, 0, 0)],
            vec![c(0, 1, 0), c(0, 1, 1), c(1, 1, 1), c(1, 1, 0)],
            vec![c(0, 1, 0), c(1, 1, 0), c(1, 0, 0), c(0, 0, 0)],
            vec![c(0, 0, 1), c(1, 0, 1), c(1, 1, 1), c(0, 1, 1)],
        ];
        let faces: Vec<Vec<usize>> = raw.iter().map(|f| dedupe_cyclic(f)).filter(|f| f.len() >= 3).collect();
        volumes.push(signed_volume(&faces, &nodes));
        cell_faces.push(faces);
    }

    // pillar layouts with j running against y flip the handedness of every cell
    let scale = tol.max(f64::MIN_POSITIVE);
    let pos = volumes.iter().filter(|&&v| v > scale).count();
    let neg = volumes.iter().filter(|&&v| v < -scale).count();
    let flip = neg > pos;
    if let Some(bad) = volumes.iter().position(|&v| if flip { v >= -scale } else { v <= scale }) {
        let (i, j, k) = kept[bad];
        return Err(Error::InvertedCell {
            cell: spec.cell_index(i, j, k),
            volume: volumes[bad],
        });
    }
    if flip {
        for f in cell_faces.iter_mut().flatten() {
            f.reverse();
        }
    }

    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut cells = Vec::with_capacity(kept.len());
    for cf in &cell_faces {
        let mut cell = Vec::with_capacity(cf.len());
        for f in cf {
            let mut key = f.clone();
            key.sort_unstable();
            match lookup.get(&key) {
                Some(&id) => cell.push(CellFace::new(id, false)),
                None => {
                    lookup.insert(key, faces.len());
                    cell.push(CellFace::new(faces.len(), true));
                    faces.push(f.clone());
                }
            }
        }
        cells.push(cell);
    }

    // drop nodes that only belonged to removed cells
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut used = Vec::new();
    for f in &faces {
        for &n in f {
            if remap[n] == usize::MAX {
                remap[n] = used.len();
                used.push(nodes[n]);
            }
        }
    }
    for f in faces.iter_mut() {
        for n in f.iter_mut() {
            *n = remap[*n];
        }
    }
    let mesh = PolyMesh::new(3, used, faces, cells)?;
    compute_geometry(&mesh)?;
    Ok(mesh)
}

/// Surrounds the model with `margin` layers of cells on every side so that
/// the hull becomes a rectangular box.
///
/// Side padding copies the depths of the adjacent boundary cells, so it
/// conforms to the model; the outermost pillars lie in the box planes. Top
/// and bottom padding layers blend from the model surface to flat planes.
pub fn pad_embed(spec: &CornerPointSpec, margin: usize) -> Result<CornerPointSpec> {
    if margin == 0 {
        return Ok(spec.clone());
    }
    let [nx, ny, nz] = spec.dims;
    let m = margin;
    let (nxp, nyp, nzp) = (nx + 2 * m, ny + 2 * m, nz + 2 * m);
    let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
    for p in spec.coord.chunks(6) {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]).min(p[a + 3]);
            hi[a] = hi[a].max(p[a]).max(p[a + 3]);
        }
    }
    for &z in &spec.zcorn {
        lo[2] = lo[2].min(z);
        hi[2] = hi[2].max(z);
    }
    let counts = [nx, ny, nz];
    let mut box_lo = [0.0; 3];
    let mut box_hi = [0.0; 3];
    for a in 0..3 {
        let w = m as f64 * (hi[a] - lo[a]) / counts[a] as f64;
        box_lo[a] = lo[a] - w;
        box_hi[a] = hi[a] + w;
    }

    let clamp = |v: usize, n: usize| -> usize { v.saturating_sub(m).min(n) };
    let mut coord = Vec::with_capacity(6 * (nxp + 1) * (nyp + 1));
    for jp in 0..=nyp {
        for ip in 0..=nxp {
            let mut p = spec.pillar(clamp(ip, nx), clamp(jp, ny));
            for (a, (idx, n)) in [(ip, nx), (jp, ny)].into_iter().enumerate() {
                let (s, target) = if idx < m {
                    (idx as f64 / m as f64, box_lo[a])
                } else if idx > n + m {
                    ((n + 2 * m - idx) as f64 / m as f64, box_hi[a])
                } else {
                    continue;
                };
                p[a] = (1.0 - s) * target + s * p[a];
                p[a + 3] = (1.0 - s) * target + s * p[a + 3];
            }
            coord.extend_from_slice(&p);
        }
    }

    let mut zcorn = vec![0.0; 8 * nxp * nyp * nzp];
    let mut actnum = vec![true; nxp * nyp * nzp];
    let padded = CornerPointSpec {
        dims: [nxp, nyp, nzp],
        coord: Vec::new(),
        zcorn: Vec::new(),
        actnum: Vec::new(),
    };
    let side = |idx: usize, n: usize, d: usize| -> (usize, usize) {
        if idx < m {
            (0, 0)
        } else if idx >= n + m {
            (n - 1, 1)
        } else {
            (idx - m, d)
        }
    };
    for kp in 0..nzp {
        for jp in 0..nyp {
            for ip in 0..nxp {
                for dk in 0..2 {
                    for dj in 0..2 {
                        for di in 0..2 {
                            let (ic, dio) = side(ip, nx, di);
                            let (jc, djo) = side(jp, ny, dj);
                            let z = if kp < m {
                                let t = (kp + dk) as f64 / m as f64;
                                (1.0 - t) * box_lo[2] + t * spec.depth(ic, jc, 0, dio, djo, 0)
                            } else if kp >= nz + m {
                                let t = (kp + dk - nz - m) as f64 / m as f64;
                                (1.0 - t) * spec.depth(ic, jc, nz - 1, dio, djo, 1) + t * box_hi[2]
                            } else {
                                spec.depth(ic, jc, kp - m, dio, djo, dk)
                            };
                            zcorn[padded.zcorn_index(ip, jp, kp, di, dj, dk)] = z;
                        }
                    }
                }
                let inside = (m..nx + m).contains(&ip) && (m..ny + m).contains(&jp) && (m..nz + m).contains(&kp);
                if inside {
                    actnum[padded.cell_index(ip, jp, kp)] = spec.actnum[spec.cell_index(ip - m, jp - m, kp - m)];
                }
            }
        }
    }
    CornerPointSpec::new([nxp, nyp, nzp], coord, zcorn, actnum)
}

/// Recipe for a synthetic layered corner-point model on
/// `[0, L_x] × [0, L_y] × [0, L_z]` (depth down).
///
/// Boundary pillars are vertical and the top and bottom surfaces are flat,
/// so the hull is a box; interior pillars lean and interior horizons
/// undulate.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredModel {
    pub counts: [usize; 3],
    pub lengths: [f64; 3],
    /// Horizontal offset of interior pillar ends, in cell widths.
    pub pillar_tilt: f64,
    /// Vertical undulation of interior horizons, in layer thicknesses (< 0.5).
    pub horizon_amplitude: f64,
    /// Layer that thins out towards `x = 0` and vanishes in the columns with
    /// `i < nx / 3`.
    pub eroded_layer: Option<usize>,
    /// Vertical throw applied to columns `i ≥ nx / 2`, in meters.
    pub fault_throw: f64,
}

impl LayeredModel {
    pub fn new(counts: [usize; 3], lengths: [f64; 3]) -> Self {
        Self {
            counts,
            lengths,
            pillar_tilt: 0.0,
            horizon_amplitude: 0.0,
            eroded_layer: None,
            fault_throw: 0.0,
        }
    }

    pub fn spec(&self) -> Result<CornerPointSpec> {
        let [nx, ny, nz] = self.counts;
        let [lx, ly, lz] = self.lengths;
        if nx == 0 || ny == 0 || nz == 0 || !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
            return Err(Error::InvalidMesh("layered model needs positive counts and lengths".into()));
        }
        if !(self.horizon_amplitude.abs() < 0.5) {
            return Err(Error::InvalidMesh("horizon amplitude must stay below half a layer".into()));
        }
        let (hx, hy, hz) = (lx / nx as f64, ly / ny as f64, lz / nz as f64);
        let bump = |x: f64, y: f64| (PI * x / lx).sin() * (PI * y / ly).sin();
        let mut coord = Vec::with_capacity(6 * (nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let (x, y) = (hx * i as f64, hy * j as f64);
                let s = bump(x, y);
                let (dx, dy) = (self.pillar_tilt * hx * s, 0.5 * self.pillar_tilt * hy * s);
                coord.extend_from_slice(&[x + dx, y + dy, 0.0, x - dx, y - dy, lz]);
            }
        }
        let erosion_cut = nx / 3;
        let horizon = |i: usize, j: usize, k: usize| -> f64 {
            let (x, y) = (hx * i as f64, hy * j as f64);
            let base = hz * k as f64;
            if k == 0 || k == nz {
                return base;
            }
            let wave = self.horizon_amplitude * hz * (2.0 * PI * x / lx + 0.7 * k as f64).sin() * (PI * y / ly).sin();
            base + wave
        };
        let depth_at = |i: usize, j: usize, k: usize| -> f64 {
            match self.eroded_layer {
                Some(e) if k == e + 1 && e + 1 < nz + 1 => {
                    let w = if i <= erosion_cut {
                        0.0
                    } else {
                        ((i - erosion_cut) as f64 / (nx - erosion_cut).max(1) as f64).min(1.0)
                    };
                    let top = horizon(i, j, e);
                    top + w * (horizon(i, j, k) - top)
                }
                _ => horizon(i, j, k),
            }
        };
        let shell = CornerPointSpec {
            dims: self.counts,
            coord: Vec::new(),
            zcorn: Vec::new(),
            actnum: Vec::new(),
        };
        let mut zcorn = vec![0.0; 8 * nx * ny * nz];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let throw = if i >= nx / 2 { self.fault_throw } else { 0.0 };
                    for dk in 0..2 {
                        for dj in 0..2 {
                            for di in 0..2 {
                                zcorn[shell.zcorn_index(i, j, k, di, dj, dk)] =
                                    depth_at(i + di, j + dj, k + dk) + throw;
                            }
                        }
                    }
                }
            }
        }
        CornerPointSpec::new(self.counts, coord, zcorn, vec![true; nx * ny * nz])
    }
}

/// Corner-point spec of a uniform box grid with vertical pillars.
pub fn box_spec(counts: [usize; 3], lengths: [f64; 3]) -> Result<CornerPointSpec> {
    LayeredModel::new(counts, lengths).spec()
}
