//! Plain-text mesh format (`.pmesh`).
//!
//! ```text
//! pmesh 1
//! dim 2
//! nodes 4
//! 0e0 0e0 0e0
//! ...
//! faces 4
//! 2 0 1
//! ...
//! cells 1
//! 4 +1 +2 -3 +4
//! ```
//!
//! Face rows give the node count then the nodes; cell rows give the face
//! count then 1-based face indices, negative when the face is listed
//! inward. Coordinates round-trip exactly.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mesh::{CellFace, Point, PolyMesh};

pub fn write_pmesh(mesh: &PolyMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "pmesh 1\ndim {}\nnodes {}", mesh.dim(), mesh.n_nodes());
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:e} {:e} {:e}", p.x, p.y, p.z);
    }
    let _ = writeln!(s, "faces {}", mesh.n_faces());
    for f in mesh.faces() {
        let _ = write!(s, "{}", f.len());
        for n in f {
            let _ = write!(s, " {n}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "cells {}", mesh.n_cells());
    for c in mesh.cells() {
        let _ = write!(s, "{}", c.len());
        for cf in c {
            let _ = write!(s, " {}{}", if cf.outward { '+' } else { '-' }, cf.face + 1);
        }
        s.push('\n');
    }
    s
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        for (i, l) in self.it.by_ref() {
            let l = l.split('#').next().unwrap_or("").trim();
            if !l.is_empty() {
                return Ok((i + 1, l.split_whitespace().collect()));
            }
        }
        Err(Error::InvalidMesh(format!("pmesh: unexpected end of file, expected {what}")))
    }

    fn header(&mut self, key: &str) -> Result<usize> {
        let (ln, t) = self.next(key)?;
        match t.as_slice() {
            [k, v] if *k == key => v
                .parse()
                .map_err(|_| Error::InvalidMesh(format!("pmesh line {ln}: bad count '{v}'"))),
            _ => Err(Error::InvalidMesh(format!("pmesh line {ln}: expected '{key} <n>'"))),
        }
    }
}

fn parse<T: std::str::FromStr>(tok: &str, ln: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::InvalidMesh(format!("pmesh line {ln}: bad token '{tok}'")))
}

/// Counted row: first token is the number of entries that follow.
fn counted<'a>(ln: usize, t: &[&'a str]) -> Result<Vec<&'a str>> {
    let n: usize = parse(t[0], ln)?;
    if t.len() != n + 1 {
        return Err(Error::InvalidMesh(format!(
            "pmesh line {ln}: expected {n} entries, found {}",
            t.len() - 1
        )));
    }
    Ok(t[1..].to_vec())
}

pub fn read_pmesh(text: &str) -> Result<PolyMesh> {
    let mut lines = Lines {
        it: text.lines().enumerate(),
    };
    let (ln, magic) = lines.next("header")?;
    if magic != ["pmesh", "1"] {
        return Err(Error::InvalidMesh(format!("pmesh line {ln}: expected 'pmesh 1'")));
    }
    let dim = lines.header("dim")?;
    let nn = lines.header("nodes")?;
    let mut nodes = Vec::with_capacity(nn);
    for _ in 0..nn {
        let (ln, t) = lines.next("node")?;
        if t.len() != 3 {
            return Err(Error::InvalidMesh(format!("pmesh line {ln}: node needs 3 coordinates")));
        }
        nodes.push(Point::new(parse(t[0], ln)?, parse(t[1], ln)?, parse(t[2], ln)?));
    }
    let nf = lines.header("faces")?;
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, t) = lines.next("face")?;
        faces.push(counted(ln, &t)?.iter().map(|v| parse(v, ln)).collect::<Result<Vec<usize>>>()?);
    }
    let nc = lines.header("cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, t) = lines.next("cell")?;
        let mut cell = Vec::new();
        for v in counted(ln, &t)? {
            let k: i64 = parse(v, ln)?;
            if k == 0 {
                return Err(Error::InvalidMesh(format!("pmesh line {ln}: face indices are 1-based")));
            }
            cell.push(CellFace::new(k.unsigned_abs() as usize - 1, k > 0));
        }
        cells.push(cell);
    }
    if let Ok((ln, _)) = lines.next("") {
        return Err(Error::InvalidMesh(format!("pmesh line {ln}: trailing data")));
    }
    PolyMesh::new(dim, nodes, faces, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_gen::{build_cornerpoint, triangulate_faces, twisted_cartesian, LayeredModel};

    #[test]
    fn round_trip_2d() {
        let m = twisted_cartesian(&[3, 4], &[1.0, 2.0], 0.05).unwrap();
        let back = read_pmesh(&write_pmesh(&m)).unwrap();
        assert_eq!(write_pmesh(&back), write_pmesh(&m));
        assert_eq!(back.nodes(), m.nodes());
    }

    #[test]
    fn round_trip_cornerpoint() {
        let mut lm = LayeredModel::new([2, 2, 2], [10.0, 10.0, 2.0]);
        lm.pillar_tilt = 0.2;
        let m = triangulate_faces(&build_cornerpoint(&lm.spec().unwrap()).unwrap()).unwrap();
        let back = read_pmesh(&write_pmesh(&m)).unwrap();
        assert_eq!(back.nodes(), m.nodes());
        assert_eq!(back.cells(), m.cells());
    }

    #[test]
    fn inward_faces_are_negative() {
        let m = twisted_cartesian(&[2, 1], &[2.0, 1.0], 0.0).unwrap();
        let text = write_pmesh(&m);
        assert!(text.lines().skip_while(|l| !l.starts_with("cells")).any(|l| l.contains('-')));
    }

    #[test]
    fn errors_name_the_line() {
        let e = read_pmesh("pmesh 1\ndim 2\nnodes 1\n0 0\n").unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
        let e = read_pmesh("pmesh 2\n").unwrap_err();
        assert!(e.to_string().contains("pmesh 1"));
        let m = twisted_cartesian(&[1, 1], &[1.0, 1.0], 0.0).unwrap();
        let e = read_pmesh(&(write_pmesh(&m) + "extra\n")).unwrap_err();
        assert!(e.to_string().contains("trailing"));
    }
}
