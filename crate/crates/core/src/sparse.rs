//! Compressed sparse row matrices and a symmetric positive definite solver.
//!
//! The direct path reorders with reverse Cuthill-McKee and factors within the
//! profile (envelope) of the permuted matrix. Very large systems fall back to
//! Jacobi-preconditioned conjugate gradients.

use std::collections::VecDeque;

use nalgebra::DVector;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries in insertion order, so the result only depends
    /// on the order of `triplets`.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&t| (triplets[t].0, triplets[t].1));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &t in &order {
            let (i, j, v) = triplets[t];
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of bounds");
            if last == Some((i, j)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                data.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, &[])
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.data[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.data[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> DVector<f64> {
        DVector::from_iterator(self.nrows.min(self.ncols), (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)))
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.ncols);
        DVector::from_iterator(self.nrows, (0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()))
    }

    pub fn transpose(&self) -> CsrMatrix {
        let trip: Vec<(usize, usize, f64)> = (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v)))
            .collect();
        CsrMatrix::from_triplets(self.ncols, self.nrows, &trip)
    }

    pub fn scale(&self, s: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Submatrix on the given rows and columns (each a list of old indices).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut trip = Vec::new();
        for (ni, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if col_map[j] != usize::MAX {
                    trip.push((ni, col_map[j], v));
                }
            }
        }
        CsrMatrix::from_triplets(rows.len(), cols.len(), &trip)
    }
}

/// Which algorithm [`solve_spd`] used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Cholesky,
    Pcg,
}

#[derive(Debug, Clone)]
pub struct SolveInfo {
    pub kind: SolverKind,
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Largest system the profile factorization is attempted on.
pub const DIRECT_LIMIT: usize = 200_000;
/// Upper bound on profile factorization work (≈ Σ row-width²).
const DIRECT_WORK_LIMIT: f64 = 4e10;

/// Solves `A x = b` for symmetric positive definite `A` to relative
/// residual `tol`.
pub fn solve_spd(a: &CsrMatrix, b: &DVector<f64>, tol: f64) -> Result<(DVector<f64>, SolveInfo)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok((
            DVector::zeros(n),
            SolveInfo {
                kind: SolverKind::Cholesky,
                relative_residual: 0.0,
                iterations: 0,
            },
        ));
    }
    let perm = rcm_ordering(a);
    let work = profile_work(a, &perm);
    if n <= DIRECT_LIMIT && work <= DIRECT_WORK_LIMIT {
        let f = ProfileCholesky::factor(a, perm)?;
        let mut x = f.solve(b);
        let mut res = (b - a.mul_vec(&x)).norm() / bnorm;
        let mut it = 0;
        while res > tol && it < 5 {
            let r = b - a.mul_vec(&x);
            x += f.solve(&r);
            res = (b - a.mul_vec(&x)).norm() / bnorm;
            it += 1;
        }
        if res > tol {
            return Err(Error::NonConvergence {
                residual: res,
                iterations: it,
            });
        }
        log::debug!("profile Cholesky: n = {n}, refinement steps {it}, residual {res:e}");
        Ok((
            x,
            SolveInfo {
                kind: SolverKind::Cholesky,
                relative_residual: res,
                iterations: it,
            },
        ))
    } else {
        pcg(a, b, tol, 20 * n.max(100))
    }
}

/// Jacobi-preconditioned conjugate gradients.
pub fn pcg(a: &CsrMatrix, b: &DVector<f64>, tol: f64, max_iter: usize) -> Result<(DVector<f64>, SolveInfo)> {
    let n = b.len();
    let bnorm = b.norm();
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::NotPositiveDefinite {
            pivot: i,
            value: diag[i],
        });
    }
    let mut x = DVector::zeros(n);
    if bnorm == 0.0 {
        return Ok((
            x,
            SolveInfo {
                kind: SolverKind::Pcg,
                relative_residual: 0.0,
                iterations: 0,
            },
        ));
    }
    let mut r = b.clone();
    let mut z = r.component_div(&diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for it in 1..=max_iter {
        let ap = a.mul_vec(&p);
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: it, value: pap });
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let res = r.norm() / bnorm;
        if res <= tol {
            let true_res = (b - a.mul_vec(&x)).norm() / bnorm;
            if true_res <= tol {
                return Ok((
                    x,
                    SolveInfo {
                        kind: SolverKind::Pcg,
                        relative_residual: true_res,
                        iterations: it,
                    },
                ));
            }
            r = b - a.mul_vec(&x);
        }
        z = r.component_div(&diag);
        let rz_new = r.dot(&z);
        p = &z + &p * (rz_new / rz);
        rz = rz_new;
    }
    Err(Error::NonConvergence {
        residual: (b - a.mul_vec(&x)).norm() / bnorm,
        iterations: max_iter,
    })
}

/// Reverse Cuthill-McKee ordering of the symmetric sparsity pattern;
/// `perm[new] = old`.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut nb: Vec<usize> = a.row(i).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nb.sort_by_key(|&j| (degree[j], j));
            for j in nb {
                if !visited[j] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &CsrMatrix, start: usize) -> Vec<usize> {
    let n = a.nrows();
    let mut level = vec![usize::MAX; n];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for (j, _) in a.row(i) {
            if level[j] == usize::MAX {
                level[j] = level[i] + 1;
                queue.push_back(j);
            }
        }
    }
    level
}

fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize]) -> usize {
    let mut node = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let level = bfs_levels(a, node);
        let max = level.iter().filter(|&&l| l != usize::MAX).max().copied().unwrap_or(0);
        if max <= ecc && node != seed {
            break;
        }
        ecc = max;
        let next = (0..level.len())
            .filter(|&i| level[i] == max)
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        if next == node {
            break;
        }
        node = next;
    }
    node
}

fn first_columns(a: &CsrMatrix, perm: &[usize]) -> Vec<usize> {
    let n = a.nrows();
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut first: Vec<usize> = (0..n).collect();
    for old in 0..n {
        let i = inv[old];
        for (j, _) in a.row(old) {
            let jj = inv[j];
            if jj < i {
                first[i] = first[i].min(jj);
            } else if i < jj {
                first[jj] = first[jj].min(i);
            }
        }
    }
    first
}

fn profile_work(a: &CsrMatrix, perm: &[usize]) -> f64 {
    first_columns(a, perm)
        .iter()
        .enumerate()
        .map(|(i, &f)| ((i - f) as f64).powi(2))
        .sum()
}

/// Cholesky factor stored row-wise within the profile.
struct ProfileCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl ProfileCholesky {
    fn factor(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.nrows();
        let first = first_columns(a, &perm);
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0; start[n]];
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        for old in 0..n {
            let i = inv[old];
            for (j, v) in a.row(old) {
                let jj = inv[j];
                if jj <= i {
                    values[start[i] + jj - first[i]] += v;
                }
            }
        }
        let diag_a: Vec<f64> = (0..n).map(|i| values[start[i] + i - first[i]]).collect();
        for i in 0..n {
            let fi = first[i];
            let (done, row_i) = values.split_at_mut(start[i]);
            let row_i = &mut row_i[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &done[start[j]..start[j] + j - fj + 1];
                let mut s = row_i[j - fi];
                let li = &row_i[k0 - fi..j - fi];
                let lj = &row_j[k0 - fj..j - fj];
                s -= li.iter().zip(lj).map(|(x, y)| x * y).sum::<f64>();
                row_i[j - fi] = s / row_j[j - fj];
            }
            let d = row_i[i - fi] - row_i[..i - fi].iter().map(|x| x * x).sum::<f64>();
            if d < -1e-8 * diag_a[i].abs() {
                return Err(Error::NotPositiveDefinite {
                    pivot: perm[i],
                    value: d,
                });
            }
            if !(d > 1e-13 * diag_a[i]) {
                return Err(Error::Singular("rigid modes unconstrained".into()));
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(Self {
            perm,
            first,
            start,
            values,
        })
    }

    fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut x = DVector::zeros(n);
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = laplacian_1d(5);
        let (x, _) = solve_spd(&a, &DVector::zeros(5), 1e-10).unwrap();
        assert_eq!(x, DVector::zeros(5));
    }

    #[test]
    fn singular_and_indefinite_are_reported() {
        let mut t = vec![];
        for i in 0..4 {
            t.push((i, i, 1.0));
            t.push((i, (i + 1) % 4, -0.5));
            t.push(((i + 1) % 4, i, -0.5));
        }
        let a = CsrMatrix::from_triplets(4, 4, &t);
        let b = DVector::from_vec(vec![1.0, -1.0, 0.0, 0.0]);
        let e = solve_spd(&a, &b, 1e-10).unwrap_err();
        assert!(e.to_string().contains("singular system"), "{e}");
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(solve_spd(&a, &b.rows(0, 2).into(), 1e-10), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn pcg_matches_direct() {
        let a = laplacian_1d(50);
        let b = DVector::from_fn(50, |i, _| (i as f64).sin());
        let (x1, _) = solve_spd(&a, &b, 1e-12).unwrap();
        let (x2, info) = pcg(&a, &b, 1e-12, 1000).unwrap();
        assert_eq!(info.kind, SolverKind::Pcg);
        assert!((x1 - x2).amax() < 1e-9);
    }

    fn random_spd(n: usize, seed: &[f64]) -> CsrMatrix {
        // sparse random B, A = BᵀB + I
        let mut t = Vec::new();
        for (k, v) in seed.iter().enumerate() {
            let i = (k * 7 + 3) % n;
            let j = (k * 13 + 1) % n;
            t.push((i, j, *v));
        }
        let b = CsrMatrix::from_triplets(n, n, &t).to_dense();
        let a = b.transpose() * &b + nalgebra::DMatrix::identity(n, n);
        let mut trip = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if a[(i, j)] != 0.0 {
                    trip.push((i, j, a[(i, j)]));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &trip)
    }

    proptest! {
        #[test]
        fn direct_solve_residual(seed in prop::collection::vec(-2.0f64..2.0, 10..60), rhs in prop::collection::vec(-1.0f64..1.0, 20)) {
            let a = random_spd(20, &seed);
            let b = DVector::from_vec(rhs);
            prop_assume!(b.norm() > 1e-3);
            let (x, info) = solve_spd(&a, &b, 1e-12).unwrap();
            prop_assert!(info.relative_residual <= 1e-12);
            let dense = a.to_dense().lu().solve(&b).unwrap();
            prop_assert!((x - dense).amax() < 1e-9);
        }

        #[test]
        fn rcm_is_permutation(seed in prop::collection::vec(-2.0f64..2.0, 5..40)) {
            let a = random_spd(15, &seed);
            let mut p = rcm_ordering(&a);
            p.sort();
            prop_assert_eq!(p, (0..15).collect::<Vec<_>>());
        }
    }
}
