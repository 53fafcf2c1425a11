//! Compressed-row matrix with a fixed pattern and a banded LU with partial pivoting.

use std::collections::BTreeSet;

use crate::error::{AxiError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_rows(rows: &[BTreeSet<usize>]) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for r in rows {
            col_idx.extend(r.iter().copied());
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        CsrMatrix { n, row_ptr, col_idx, vals: vec![0.0; nnz] }
    }

    /// Pattern of a two-dof-per-node finite element connectivity.
    pub fn from_connectivity(n_nodes: usize, elems: &[[usize; 8]]) -> Self {
        let mut rows = vec![BTreeSet::new(); 2 * n_nodes];
        for e in elems {
            for &a in e {
                for &b in e {
                    for i in 0..2 {
                        for j in 0..2 {
                            rows[2 * a + i].insert(2 * b + j);
                        }
                    }
                }
            }
        }
        CsrMatrix::from_rows(&rows)
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    fn pos(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[a..b].binary_search(&j).ok().map(|k| a + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pos(i, j).map(|k| self.vals[k]).unwrap_or(0.0)
    }

    /// Adds to an entry inside the pattern; panics otherwise.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.pos(i, j).unwrap_or_else(|| panic!("entry ({i}, {j}) outside sparsity pattern"));
        self.vals[k] += v;
    }

    pub fn clear(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| self.vals[k] * x[self.col_idx[k]])
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Square submatrix on the kept indices, renumbered in order.
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut map = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        for &i in keep {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = map[self.col_idx[k]];
                if j != usize::MAX {
                    col_idx.push(j);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { n: keep.len(), row_ptr, col_idx, vals }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                d[i][self.col_idx[k]] = self.vals[k];
            }
        }
        d
    }

    /// `(lower, upper)` bandwidths of the pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }
}

/// Banded LU factors; row swaps are applied column by column.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let (kl, ku) = a.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut lu = BandLu { n, kl, width, ab: vec![0.0; n * width], ipiv: vec![0; n] };
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let idx = lu.at(i, a.col_idx[k]);
                lu.ab[idx] = a.vals[k];
            }
        }
        let reach = kl + ku;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.ab[lu.at(k, k)].abs();
            for i in k + 1..=last {
                let v = lu.ab[lu.at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            lu.ipiv[k] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(AxiError::Singular(k));
            }
            let jmax = (k + reach).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (x, y) = (lu.at(k, j), lu.at(p, j));
                    lu.ab.swap(x, y);
                }
            }
            let piv = lu.ab[lu.at(k, k)];
            for i in k + 1..=last {
                let ik = lu.at(i, k);
                let l = lu.ab[ik] / piv;
                lu.ab[ik] = l;
                if l != 0.0 {
                    for j in k + 1..=jmax {
                        let kj = lu.ab[lu.at(k, j)];
                        let ij = lu.at(i, j);
                        lu.ab[ij] -= l * kj;
                    }
                }
            }
        }
        Ok(lu)
    }

    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let reach = self.width - 1 - self.kl;
        for k in 0..n {
            let p = self.ipiv[k];
            if p != k {
                b.swap(k, p);
            }
            let last = (k + self.kl).min(n.saturating_sub(1));
            for i in k + 1..=last {
                b[i] -= self.ab[self.at(i, k)] * b[k];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                s -= self.ab[self.at(i, j)] * b[j];
            }
            b[i] = s / self.ab[self.at(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(n: usize, kl: usize, ku: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = vec![BTreeSet::new(); n];
        for (i, r) in rows.iter_mut().enumerate() {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                r.insert(j);
            }
        }
        let mut m = CsrMatrix::from_rows(&rows);
        for v in m.vals.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        m
    }

    #[test]
    fn band_lu_matches_dense_solve() {
        for (seed, &(n, kl, ku)) in [(30, 3, 5), (40, 7, 2), (17, 0, 0), (25, 24, 24)].iter().enumerate() {
            let a = random_banded(n, kl, ku, seed as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(99 + seed as u64);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut x = b.clone();
            BandLu::factor(&a).unwrap().solve(&mut x);
            let d = a.to_dense();
            let dm = DMatrix::from_fn(n, n, |i, j| d[i][j]);
            let want = dm.lu().solve(&DVector::from_vec(b.clone())).unwrap();
            for i in 0..n {
                assert!((x[i] - want[i]).abs() < 1e-9 * (1.0 + want[i].abs()));
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let rows = vec![BTreeSet::from([0, 1]), BTreeSet::from([0, 1])];
        let mut a = CsrMatrix::from_rows(&rows);
        a.add(0, 1, 1.0);
        a.add(1, 0, 2.0);
        a.add(1, 1, 1.0);
        let mut b = vec![3.0, 4.0];
        BandLu::factor(&a).unwrap().solve(&mut b);
        assert!((b[0] - 0.5).abs() < 1e-15 && (b[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let rows = vec![BTreeSet::from([0]), BTreeSet::from([1])];
        let a = CsrMatrix::from_rows(&rows);
        assert!(matches!(BandLu::factor(&a), Err(AxiError::Singular(0))));
    }

    #[test]
    fn submatrix_keeps_entries() {
        let a = random_banded(6, 2, 2, 5);
        let s = a.submatrix(&[1, 3, 4]);
        assert_eq!(s.get(0, 1), a.get(1, 3));
        assert_eq!(s.get(2, 1), a.get(4, 3));
        assert_eq!(s.get(0, 2), 0.0);
    }
}
