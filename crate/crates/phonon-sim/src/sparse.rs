//! Complex CSR kernels backing [`crate::fock::Operator`].
//!
//! Square matrices only; rows are kept sorted by column and duplicate
//! insertions are summed at construction. All reorderings (adjoint, add,
//! matmul) are deterministic so repeated builds are bitwise identical.

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let dim = diag.len();
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            vals: diag.to_vec(),
        }
    }

    /// Build from (row, col, value) triplets; duplicates are summed in
    /// sorted order.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) out of range");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(k) => self.vals[lo + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.vals[k]))
        })
    }

    /// y = A x.
    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    /// Conjugate transpose. Pure reindexing plus exact conjugation, so
    /// `m.adjoint().adjoint() == m` bitwise.
    pub fn adjoint(&self) -> Self {
        let mut counts = vec![0usize; self.dim + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for c in 0..self.dim {
            counts[c + 1] += counts[c];
        }
        let mut col_idx = vec![0usize; self.nnz()];
        let mut vals = vec![C64::new(0.0, 0.0); self.nnz()];
        let mut next = counts.clone();
        for (r, c, v) in self.iter() {
            let slot = next[c];
            next[c] += 1;
            col_idx[slot] = r;
            vals[slot] = v.conj();
        }
        Self {
            dim: self.dim,
            row_ptr: counts,
            col_idx,
            vals,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx = Vec::with_capacity(self.nnz() + other.nnz());
        let mut vals = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.dim {
            let (mut i, ei) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let (mut j, ej) = (other.row_ptr[r], other.row_ptr[r + 1]);
            while i < ei || j < ej {
                let ci = if i < ei { self.col_idx[i] } else { usize::MAX };
                let cj = if j < ej { other.col_idx[j] } else { usize::MAX };
                if ci < cj {
                    col_idx.push(ci);
                    vals.push(self.vals[i]);
                    i += 1;
                } else if cj < ci {
                    col_idx.push(cj);
                    vals.push(other.vals[j]);
                    j += 1;
                } else {
                    col_idx.push(ci);
                    vals.push(self.vals[i] + other.vals[j]);
                    i += 1;
                    j += 1;
                }
            }
            row_ptr[r + 1] = col_idx.len();
        }
        Self {
            dim: self.dim,
            row_ptr,
            col_idx,
            vals,
        }
    }

    /// C = A B with a dense scatter workspace per row.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx: Vec<usize> = Vec::new();
        let mut vals: Vec<C64> = Vec::new();
        let mut slot_of = vec![usize::MAX; self.dim];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..self.dim {
            let row_start = col_idx.len();
            touched.clear();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.vals[k];
                let mid = self.col_idx[k];
                for m in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.col_idx[m];
                    let contrib = a * other.vals[m];
                    if slot_of[c] >= row_start && slot_of[c] < col_idx.len() && col_idx[slot_of[c]] == c
                    {
                        vals[slot_of[c]] += contrib;
                    } else {
                        slot_of[c] = col_idx.len();
                        col_idx.push(c);
                        vals.push(contrib);
                        touched.push(c);
                    }
                }
            }
            // restore sorted column order within the row
            let mut pairs: Vec<(usize, C64)> = col_idx[row_start..]
                .iter()
                .copied()
                .zip(vals[row_start..].iter().copied())
                .collect();
            pairs.sort_by_key(|&(c, _)| c);
            for (slot, (c, v)) in pairs.into_iter().enumerate() {
                col_idx[row_start + slot] = c;
                vals[row_start + slot] = v;
            }
            for &c in &touched {
                slot_of[c] = usize::MAX;
            }
            row_ptr[r + 1] = col_idx.len();
        }
        Self {
            dim: self.dim,
            row_ptr,
            col_idx,
            vals,
        }
    }

    /// max_{ij} |A_ij - B_ij|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut max = 0.0f64;
        for r in 0..self.dim {
            let (mut i, ei) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let (mut j, ej) = (other.row_ptr[r], other.row_ptr[r + 1]);
            while i < ei || j < ej {
                let ci = if i < ei { self.col_idx[i] } else { usize::MAX };
                let cj = if j < ej { other.col_idx[j] } else { usize::MAX };
                let d = if ci < cj {
                    i += 1;
                    self.vals[i - 1].norm()
                } else if cj < ci {
                    j += 1;
                    other.vals[j - 1].norm()
                } else {
                    i += 1;
                    j += 1;
                    (self.vals[i - 1] - other.vals[j - 1]).norm()
                };
                max = max.max(d);
            }
        }
        max
    }

    /// max_ij |A_ij - conj(A_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                self.vals[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dense(m: &CsrMatrix) -> Vec<Vec<C64>> {
        let mut out = vec![vec![c(0.0, 0.0); m.dim()]; m.dim()];
        for (r, col, v) in m.iter() {
            out[r][col] += v;
        }
        out
    }

    #[test]
    fn triplets_merge_duplicates() {
        let m = CsrMatrix::from_triplets(
            3,
            vec![(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 1.0)), (2, 0, c(0.5, 0.0))],
        );
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), c(3.0, 1.0));
        assert_eq!(m.get(2, 0), c(0.5, 0.0));
        assert_eq!(m.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn matvec_matches_dense() {
        let m = CsrMatrix::from_triplets(
            3,
            vec![
                (0, 0, c(1.0, 0.0)),
                (0, 2, c(0.0, 1.0)),
                (1, 1, c(-2.0, 0.0)),
                (2, 0, c(3.0, -1.0)),
            ],
        );
        let x = [c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)];
        let mut y = [c(0.0, 0.0); 3];
        m.matvec(&x, &mut y);
        let d = dense(&m);
        for r in 0..3 {
            let want: C64 = (0..3).map(|j| d[r][j] * x[j]).sum();
            assert!((y[r] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn adjoint_is_exact_involution() {
        let m = CsrMatrix::from_triplets(
            4,
            vec![
                (0, 1, c(1.25, -0.5)),
                (1, 3, c(0.1, 0.7)),
                (3, 0, c(-2.0, 0.25)),
                (2, 2, c(0.0, 1.0)),
            ],
        );
        assert_eq!(m.adjoint().adjoint(), m);
        assert_eq!(m.adjoint().get(1, 0), c(1.25, 0.5));
    }

    #[test]
    fn add_and_matmul_match_dense() {
        let a = CsrMatrix::from_triplets(
            3,
            vec![(0, 1, c(1.0, 0.0)), (1, 2, c(2.0, 0.5)), (2, 0, c(0.0, -1.0))],
        );
        let b = CsrMatrix::from_triplets(
            3,
            vec![(0, 1, c(-1.0, 0.0)), (1, 1, c(1.0, 1.0)), (2, 2, c(4.0, 0.0))],
        );
        let sum = a.add(&b);
        let prod = a.matmul(&b);
        let (da, db) = (dense(&a), dense(&b));
        for r in 0..3 {
            for col in 0..3 {
                assert!((sum.get(r, col) - (da[r][col] + db[r][col])).norm() < 1e-15);
                let want: C64 = (0..3).map(|k| da[r][k] * db[k][col]).sum();
                assert!((prod.get(r, col) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn hermiticity_defect_zero_for_hermitian() {
        let h = CsrMatrix::from_triplets(
            2,
            vec![
                (0, 0, c(1.0, 0.0)),
                (0, 1, c(0.5, 0.25)),
                (1, 0, c(0.5, -0.25)),
                (1, 1, c(-1.0, 0.0)),
            ],
        );
        assert_eq!(h.hermiticity_defect(), 0.0);
        let skew = CsrMatrix::from_triplets(2, vec![(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, 1.0))]);
        assert!(skew.hermiticity_defect() > 1.9);
    }

    #[test]
    fn inf_norm_is_max_row_sum() {
        let m = CsrMatrix::from_triplets(2, vec![(0, 0, c(3.0, 4.0)), (1, 0, c(1.0, 0.0)), (1, 1, c(2.0, 0.0))]);
        assert!((m.inf_norm() - 5.0).abs() < 1e-15);
    }
}
