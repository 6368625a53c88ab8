use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Square sparse matrix in compressed-row form. Both triangles are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix whose pattern couples every DOF of node `a` with every DOF of
    /// each node in `adjacency[a]` (which must include `a` itself).
    pub fn from_node_graph(adjacency: &[Vec<usize>], dofs_per_node: usize) -> Self {
        let n = adjacency.len() * dofs_per_node;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::new();
        row_ptr.push(0);
        for neigh in adjacency {
            let mut sorted = neigh.clone();
            sorted.sort_unstable();
            sorted.dedup();
            for _ in 0..dofs_per_node {
                for &b in &sorted {
                    col.extend((0..dofs_per_node).map(|c| b * dofs_per_node + c));
                }
                row_ptr.push(col.len());
            }
        }
        let nnz = col.len();
        CsrMatrix {
            n,
            row_ptr,
            col,
            val: vec![0.0; nnz],
        }
    }

    /// Builds from (row, col, value) entries; duplicates are summed.
    pub fn from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in entries {
            rows[i].push((j, v));
        }
        let mut row_ptr = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (j, v) in r {
                if col.len() > *row_ptr.last().unwrap() && *col.last().unwrap() == j {
                    *val.last_mut().unwrap() += v;
                } else {
                    col.push(j);
                    val.push(v);
                }
            }
            row_ptr.push(col.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            col,
            val,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col[r.clone()], &self.val[r])
    }

    /// Storage slot of entry (i, j), if it is in the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let lo = self.row_ptr[i];
        let cols = &self.col[lo..self.row_ptr[i + 1]];
        cols.binary_search(&j).ok().map(|k| lo + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.val[p])
    }

    /// Adds `v` at (i, j); panics if the entry is outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside sparsity pattern"));
        self.val[p] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, a)| a * x[j]).sum();
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.val.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest |A_ij - A_ji| over the pattern.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (c, v) = self.row(i);
            for (&j, a) in c.iter().zip(v) {
                worst = worst.max((a - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Rows and columns listed in `keep` (ascending), renumbered in that order.
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut new_of = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            new_of[i] = k;
        }
        let mut row_ptr = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        for &i in keep {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                if new_of[j] != usize::MAX {
                    col.push(new_of[j]);
                    val.push(a);
                }
            }
            row_ptr.push(col.len());
        }
        CsrMatrix {
            n: keep.len(),
            row_ptr,
            col,
            val,
        }
    }

    /// `self + s * other`; both must share one pattern.
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> CsrMatrix {
        assert!(
            self.row_ptr == other.row_ptr && self.col == other.col,
            "add_scaled needs identical sparsity patterns"
        );
        let mut out = self.clone();
        for (a, b) in out.val.iter_mut().zip(&other.val) {
            *a += s * b;
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.val {
            *v *= s;
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                row[j] = a;
            }
        }
        d
    }
}

/// Reverse Cuthill-McKee ordering of the matrix graph; `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs_levels = |start: usize, seen: &mut Vec<bool>| -> Vec<usize> {
        let mut out = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < out.len() {
            let i = out[head];
            head += 1;
            let mut next: Vec<usize> = a.row(i).0.iter().copied().filter(|&j| !seen[j]).collect();
            next.sort_by_key(|&j| (degree[j], j));
            for j in next {
                seen[j] = true;
                out.push(j);
            }
        }
        out
    };
    while let Some(seed) = (0..n)
        .filter(|&i| !visited[i])
        .min_by_key(|&i| (degree[i], i))
    {
        // pseudo-peripheral start: hop to the last vertex reached until depth stops growing
        let mut start = seed;
        let mut best_depth = 0;
        for _ in 0..5 {
            let depth = eccentricity(a, start, &visited);
            if depth.0 <= best_depth {
                break;
            }
            best_depth = depth.0;
            start = depth.1;
        }
        let comp = bfs_levels(start, &mut visited);
        order.extend(comp);
    }
    order.reverse();
    order
}

/// BFS depth from `start` and a minimum-degree vertex of the last level.
fn eccentricity(a: &CsrMatrix, start: usize, blocked: &[bool]) -> (usize, usize) {
    let mut level = vec![usize::MAX; a.n()];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut last = start;
    while let Some(i) = queue.pop_front() {
        for &j in a.row(i).0 {
            if level[j] == usize::MAX && !blocked[j] {
                level[j] = level[i] + 1;
                queue.push_back(j);
            }
        }
        if level[i] > level[last]
            || (level[i] == level[last] && a.row(i).0.len() < a.row(last).0.len())
        {
            last = i;
        }
    }
    (level[last], last)
}

/// Envelope (skyline) Cholesky factor `P A P^T = L L^T` under an RCM permutation.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    /// Factors a symmetric positive definite matrix. Fails if any pivot drops below
    /// `pivot_tol` times the matching diagonal entry of `A`.
    pub fn factor(a: &CsrMatrix, pivot_tol: f64) -> Result<Self> {
        let n = a.n();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first = vec![0; n];
        for (i, &old) in perm.iter().enumerate() {
            first[i] = a
                .row(old)
                .0
                .iter()
                .map(|&j| inv[j])
                .filter(|&j| j <= i)
                .min()
                .unwrap_or(i);
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut data = vec![0.0; start[n]];
        for (i, &old) in perm.iter().enumerate() {
            let (c, v) = a.row(old);
            for (&j, &x) in c.iter().zip(v) {
                let jj = inv[j];
                if jj <= i {
                    data[start[i] + jj - first[i]] = x;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let ri = start[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let rj = start[j];
                let mut s = data[ri + j - fi];
                let li = &data[ri + k0 - fi..ri + j - fi];
                let lj = &data[rj + k0 - fj..rj + j - fj];
                s -= dot(li, lj);
                let ljj = data[rj + j - fj];
                data[ri + j - fi] = s / ljj;
            }
            let aii = data[ri + i - fi];
            let row = &data[ri..ri + i - fi];
            let d = aii - dot(row, row);
            if !(aii > 0.0) || !(d > pivot_tol * aii) {
                return Err(Error::Factorization(format!(
                    "pivot {d:.3e} at permuted row {i} (diagonal {aii:.3e})"
                )));
            }
            data[ri + i - fi] = d.sqrt();
        }
        Ok(SkylineCholesky {
            perm,
            first,
            start,
            data,
        })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let (fi, ri) = (self.first[i], self.start[i]);
            let row = &self.data[ri..ri + i - fi];
            y[i] = (y[i] - dot(row, &y[fi..i])) / self.data[ri + i - fi];
        }
        for i in (0..n).rev() {
            let (fi, ri) = (self.first[i], self.start[i]);
            y[i] /= self.data[ri + i - fi];
            let xi = y[i];
            for (k, l) in (fi..i).zip(&self.data[ri..ri + i - fi]) {
                y[k] -= l * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators; fixed order keeps results reproducible
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for k in 0..4 {
            acc[k] += a[4 * c + k] * b[4 * c + k];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// 1-D Laplacian plus a diagonal shift, with scrambled numbering.
    fn scrambled_laplacian(n: usize, shift: f64) -> CsrMatrix {
        let p: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
        let mut t = Vec::new();
        for i in 0..n {
            t.push((p[i], p[i], 2.0 + shift));
            if i + 1 < n {
                t.push((p[i], p[i + 1], -1.0));
                t.push((p[i + 1], p[i], -1.0));
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn rcm_recovers_narrow_profile() {
        let a = scrambled_laplacian(50, 0.1);
        let f = SkylineCholesky::factor(&a, 1e-12).unwrap();
        // tridiagonal after reordering: two entries per row except the first
        assert_eq!(f.envelope_size(), 2 * 50 - 1);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = scrambled_laplacian(20, 0.0);
        // pure Neumann Laplacian: make it singular by fixing the ends
        let mut t = Vec::new();
        for i in 0..20 {
            let (c, v) = a.row(i);
            for (&j, &x) in c.iter().zip(v) {
                t.push((i, j, x));
            }
        }
        let s = CsrMatrix::from_triplets(20, &t);
        let row_sums: Vec<f64> = (0..20).map(|i| s.row(i).1.iter().sum()).collect();
        let mut fixed = t.clone();
        for (i, rs) in row_sums.iter().enumerate() {
            fixed.push((i, i, -rs));
        }
        let sing = CsrMatrix::from_triplets(20, &fixed);
        assert!(matches!(
            SkylineCholesky::factor(&sing, 1e-12),
            Err(Error::Factorization(_))
        ));
    }

    #[test]
    fn node_graph_pattern_and_submatrix() {
        let adj = vec![vec![0, 1], vec![0, 1, 2], vec![1, 2]];
        let mut m = CsrMatrix::from_node_graph(&adj, 2);
        assert_eq!(m.n(), 6);
        assert_eq!(m.nnz(), 4 * (2 + 3 + 2));
        assert!(m.position(0, 4).is_none());
        m.add(0, 3, 1.5);
        m.add(3, 0, 1.5);
        let s = m.submatrix(&[0, 3, 5]);
        assert_eq!(s.get(0, 1), 1.5);
        assert_eq!(s.get(1, 2), 0.0);
    }

    proptest! {
        #[test]
        fn solves_random_spd(n in 2usize..40, seed in 0u64..1000, bw in 1usize..6) {
            // random banded SPD matrix via diagonal dominance, scrambled numbering
            let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            let mut rnd = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let p: Vec<usize> = (0..n).map(|i| (i * 13 + 5) % n).collect();
            let coprime = (0..n).map(|i| p[i]).collect::<std::collections::HashSet<_>>().len() == n;
            let p: Vec<usize> = if coprime { p } else { (0..n).collect() };
            let mut t = Vec::new();
            let mut rowsum = vec![0.0; n];
            for i in 0..n {
                for j in i + 1..(i + bw + 1).min(n) {
                    let v = rnd();
                    t.push((p[i], p[j], v));
                    t.push((p[j], p[i], v));
                    rowsum[i] += v.abs();
                    rowsum[j] += v.abs();
                }
            }
            for i in 0..n {
                t.push((p[i], p[i], rowsum[i] + 0.5));
            }
            let a = CsrMatrix::from_triplets(n, &t);
            let x: Vec<f64> = (0..n).map(|_| rnd()).collect();
            let mut b = a.mul(&x);
            let f = SkylineCholesky::factor(&a, 1e-12).unwrap();
            f.solve_in_place(&mut b);
            for i in 0..n {
                prop_assert!((b[i] - x[i]).abs() < 1e-10);
            }
        }
    }
}
