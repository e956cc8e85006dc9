//! Sparse symmetric linear algebra: CSR storage, reverse Cuthill-McKee
//! ordering, an envelope (skyline) Cholesky factorisation and a
//! Jacobi-preconditioned conjugate gradient. Everything here is
//! deterministic; two factorisations of the same matrix produce bitwise
//! identical results.

use crate::error::{Error, Result};

/// Compressed sparse row matrix. Symmetric matrices store the full pattern.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_unstable_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut prev: Option<(usize, usize)> = None;
        for &k in &order {
            let (r, c, v) = triplets[k];
            if prev == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                prev = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                s += v * x[*c];
            }
            y[i] = s;
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest |A_ij - A_ji| over the stored pattern.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(*c, i)).abs());
            }
        }
        worst
    }
}

/// Reverse Cuthill-McKee ordering; returns `perm` with `perm[new] = old`.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let degree = |i: usize| a.row_ptr[i + 1] - a.row_ptr[i];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // Start each component from its minimum-degree vertex.
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_unstable_by_key(|&i| (degree(i), i));
    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(seed);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let (cols, _) = a.row(u);
            let mut nbrs: Vec<usize> = cols.iter().copied().filter(|&v| !visited[v]).collect();
            nbrs.sort_unstable_by_key(|&v| (degree(v), v));
            for v in nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope Cholesky factorisation of a symmetric positive definite matrix,
/// with RCM pre-ordering to keep the profile narrow.
pub struct SkylineCholesky {
    n: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    /// first stored column of each row of L
    first: Vec<usize>,
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let perm = rcm_ordering(a);
        let mut inv_perm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv_perm[old] = new;
        }

        // Row profiles in the permuted numbering.
        let mut first: Vec<usize> = (0..n).collect();
        for old_r in 0..n {
            let r = inv_perm[old_r];
            let (cols, _) = a.row(old_r);
            for &old_c in cols {
                let c = inv_perm[old_c];
                if c < first[r] {
                    first[r] = c;
                }
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0f64; offsets[n]];
        for old_r in 0..n {
            let (cols, vals) = a.row(old_r);
            for (&old_c, &v) in cols.iter().zip(vals) {
                let (r, c) = (inv_perm[old_r], inv_perm[old_c]);
                if c <= r {
                    data[offsets[r] + (c - first[r])] = v;
                }
            }
        }

        // In-place LL^T restricted to the envelope.
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let mut s = data[offsets[i] + (j - fi)];
                for k in start..j {
                    s -= data[offsets[i] + (k - fi)] * data[offsets[j] + (k - fj)];
                }
                data[offsets[i] + (j - fi)] = s / data[offsets[j] + (j - fj)];
            }
            let mut s = data[offsets[i] + (i - fi)];
            for k in fi..i {
                let l = data[offsets[i] + (k - fi)];
                s -= l * l;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::NotPositiveDefinite { row: i, pivot: s });
            }
            data[offsets[i] + (i - fi)] = s.sqrt();
        }

        Ok(Self {
            n,
            perm,
            first,
            offsets,
            data,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = b[self.perm[i]];
        }
        // forward: L y = Pb
        for i in 0..n {
            let fi = self.first[i];
            let mut s = y[i];
            for k in fi..i {
                s -= self.data[self.offsets[i] + (k - fi)] * y[k];
            }
            y[i] = s / self.data[self.offsets[i] + (i - fi)];
        }
        // backward: L^T x = y
        for i in (0..n).rev() {
            let fi = self.first[i];
            y[i] /= self.data[self.offsets[i] + (i - fi)];
            let yi = y[i];
            for k in fi..i {
                y[k] -= self.data[self.offsets[i] + (k - fi)] * yi;
            }
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }
}

/// Direct sparse solve: RCM + envelope Cholesky.
pub fn solve_direct(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(SkylineCholesky::factor(a)?.solve(b))
}

/// Jacobi-preconditioned conjugate gradient for SPD systems.
pub fn solve_cg(a: &CsrMatrix, b: &[f64], rel_tol: f64, max_iters: usize) -> Result<Vec<f64>> {
    let n = a.n;
    let mut diag = vec![0.0; n];
    for i in 0..n {
        let d = a.get(i, i);
        if d <= 0.0 {
            return Err(Error::NotPositiveDefinite { row: i, pivot: d });
        }
        diag[i] = d;
    }
    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for _ in 0..max_iters {
        let ap = a.matvec(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::LinearSolve(format!(
                "cg breakdown: p^T A p = {pap:.3e}"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let norm_r = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_r <= rel_tol * norm_b {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolve(format!(
        "cg did not reach {rel_tol:.1e} within {max_iters} iterations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 1, 1.0), (0, 1, 4.0)]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(0, 1), 4.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn two_by_two_solve() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]);
        let x = solve_direct(&a, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() <= 1e-14);
        assert!((x[1] - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn identity_returns_rhs() {
        let trips: Vec<_> = (0..5).map(|i| (i, i, 1.0)).collect();
        let a = CsrMatrix::from_triplets(5, &trips);
        let b = [5.0, -1.0, 0.5, 2.0, 3.25];
        assert_eq!(solve_direct(&a, &b).unwrap(), b.to_vec());
    }

    #[test]
    fn laplacian_solve_matches_residual_bound() {
        let n = 200;
        let a = laplacian_1d(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        for x in [solve_direct(&a, &b).unwrap(), solve_cg(&a, &b, 1e-12, 10 * n).unwrap()] {
            let r = a.matvec(&x);
            let res: f64 = r
                .iter()
                .zip(&b)
                .map(|(ri, bi)| (ri - bi) * (ri - bi))
                .sum::<f64>()
                .sqrt();
            let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(res / nb <= 1e-10, "relative residual {}", res / nb);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(matches!(
            SkylineCholesky::factor(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn random_spd_matches_dense_lu() {
        let mut rng = StdRng::seed_from_u64(21);
        let n = 40;
        // A = B^T B + n I with a sparse-ish random B
        let mut dense = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            dense[i][i] = n as f64;
        }
        for _ in 0..4 * n {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let v = rng.gen_range(-1.0..1.0);
            dense[i][j] += v;
            dense[j][i] += v;
        }
        let mut trips = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if dense[i][j] != 0.0 {
                    trips.push((i, j, dense[i][j]));
                }
            }
        }
        let a = CsrMatrix::from_triplets(n, &trips);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let x = solve_direct(&a, &b).unwrap();

        let na = nalgebra::DMatrix::from_fn(n, n, |i, j| dense[i][j]);
        let nb = nalgebra::DVector::from_iterator(n, b.iter().copied());
        let x_ref = na.lu().solve(&nb).unwrap();
        for i in 0..n {
            assert!((x[i] - x_ref[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn factorisation_is_deterministic() {
        let a = laplacian_1d(64);
        let b: Vec<f64> = (0..64).map(|i| (i as f64).sin()).collect();
        let x1 = solve_direct(&a, &b).unwrap();
        let x2 = solve_direct(&a, &b).unwrap();
        assert_eq!(x1, x2);
    }
}
