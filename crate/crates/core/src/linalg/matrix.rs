use crate::scalars::Field;

use super::{axpy, is_zero, Subspace};

/// Sparse vector as `(index, nonzero residue)` pairs in ascending index order.
pub type SparseVec = Vec<(usize, u32)>;

pub fn to_sparse(v: &[u32]) -> SparseVec {
    super::support(v).collect()
}

pub fn to_dense(v: &SparseVec, dim: usize) -> Vec<u32> {
    let mut out = vec![0; dim];
    for &(i, c) in v {
        out[i] = c;
    }
    out
}

/// Dense square or rectangular matrix over `F_p`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, dim: usize) -> Self {
        let mut m = Self::zeros(field, dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1;
        }
        m
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &c) in col.iter().enumerate() {
                m.data[i * m.cols + j] = c;
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, c: u32) {
        self.data[i * self.cols + j] = c;
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % f.p() as u64)
                    as u32
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0 {
                    axpy(&f, dst, a, &other.data[k * other.cols..(k + 1) * other.cols]);
                }
            }
        }
        out
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Matrix, c: u32) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        axpy(&f, &mut self.data, c, &other.data);
    }

    /// `self - λ I`.
    pub fn shifted(&self, lambda: u32) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i);
            m.set(i, i, self.field.sub(v, lambda));
        }
        m
    }

    pub fn rank(&self) -> usize {
        Subspace::span(self.field, self.cols, (0..self.rows).map(|i| {
            self.data[i * self.cols..(i + 1) * self.cols].to_vec()
        }))
        .dim()
    }

    /// Basis of the null space.
    pub fn null_space(&self) -> Vec<Vec<u32>> {
        super::kernel(&self.field, &self.columns(), self.rows)
    }

    /// Smallest `k <= cap` with `self^k = 0`.
    pub fn nilpotency_index(&self, cap: usize) -> Option<usize> {
        SparseOp::from_matrix(self).nilpotency_index(cap)
    }
}

/// A linear operator stored by sparse columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseOp {
    field: Field,
    dim: usize,
    cols: Vec<SparseVec>,
}

impl SparseOp {
    pub fn new(field: Field, dim: usize, cols: Vec<SparseVec>) -> Self {
        assert_eq!(cols.len(), dim);
        SparseOp { field, dim, cols }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        assert_eq!(m.rows, m.cols);
        let cols = (0..m.cols).map(|j| to_sparse(&m.column(j))).collect();
        SparseOp::new(m.field, m.rows, cols)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.dim, self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, c) in col {
                m.set(i, j, c);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.dim];
        for (j, &c) in v.iter().enumerate() {
            if c != 0 {
                for &(i, a) in &self.cols[j] {
                    out[i] = self.field.mul_add(a, c, out[i]);
                }
            }
        }
        out
    }

    fn apply_sparse(&self, v: &SparseVec, acc: &mut [u32], touched: &mut Vec<usize>) -> SparseVec {
        for &(j, c) in v {
            for &(i, a) in &self.cols[j] {
                if acc[i] == 0 {
                    touched.push(i);
                }
                acc[i] = self.field.mul_add(a, c, acc[i]);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let mut out = Vec::with_capacity(touched.len());
        for &i in touched.iter() {
            if acc[i] != 0 {
                out.push((i, acc[i]));
                acc[i] = 0;
            }
        }
        touched.clear();
        out
    }

    /// `self^k v` for `k = 0..=steps`, stopping early at zero.
    pub fn orbit(&self, v: &[u32], steps: usize) -> Vec<Vec<u32>> {
        let mut out = vec![v.to_vec()];
        for _ in 0..steps {
            let next = self.apply(out.last().unwrap());
            let stop = is_zero(&next);
            out.push(next);
            if stop {
                break;
            }
        }
        out
    }

    /// Smallest `k <= cap` with `self^k = 0`, iterating on sparse columns.
    pub fn nilpotency_index(&self, cap: usize) -> Option<usize> {
        if self.dim == 0 {
            return Some(0);
        }
        let mut acc = vec![0u32; self.dim];
        let mut touched = Vec::new();
        let mut cur: Vec<SparseVec> = self.cols.iter().filter(|c| !c.is_empty()).cloned().collect();
        for k in 1..=cap {
            if cur.is_empty() {
                return Some(k);
            }
            cur = cur
                .iter()
                .map(|v| self.apply_sparse(v, &mut acc, &mut touched))
                .filter(|v| !v.is_empty())
                .collect();
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_operator_index() {
        let f = Field::new(3).unwrap();
        // e_j -> e_{j+1}
        let dim = 5;
        let cols = (0..dim)
            .map(|j| if j + 1 < dim { vec![(j + 1, 1)] } else { vec![] })
            .collect();
        let op = SparseOp::new(f, dim, cols);
        assert_eq!(op.nilpotency_index(10), Some(5));
        assert_eq!(op.nilpotency_index(4), None);
        let m = op.to_matrix();
        let mut pow = Matrix::identity(f, dim);
        for _ in 0..4 {
            pow = pow.mul(&m);
        }
        assert!(!pow.is_zero());
        assert!(pow.mul(&m).is_zero());
        assert_eq!(m.rank(), 4);
        assert_eq!(m.null_space().len(), 1);
    }

    #[test]
    fn zero_operator_has_index_one() {
        let f = Field::new(5).unwrap();
        let op = SparseOp::new(f, 3, vec![vec![]; 3]);
        assert_eq!(op.nilpotency_index(3), Some(1));
    }

    #[test]
    fn identity_is_not_nilpotent() {
        let f = Field::new(5).unwrap();
        let m = Matrix::identity(f, 4);
        assert_eq!(m.nilpotency_index(20), None);
        assert_eq!(m.shifted(1).null_space().len(), 4);
    }
}
