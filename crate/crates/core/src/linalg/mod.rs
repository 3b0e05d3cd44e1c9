//! Exact linear algebra over `F_p` on fixed ordered bases.
//!
//! Vectors are dense `Vec<u32>` of residues. [`Subspace`] keeps a reduced
//! row-echelon basis, so two subspaces are equal iff their rows are equal.

mod closure;
mod matrix;
mod nil;
mod triangulate;

pub use closure::{lie_closure, normalizer, solve_bracket_constraint, spin_submodule, Bracket, QuotientAction};
pub use matrix::{to_dense, to_sparse, Matrix, SparseOp, SparseVec};
pub use nil::{
    ad_matrix, classify_poly, raw_nilpotent, AdMatrix, HeightIndex, NilCertificate, NilOracle,
    NilPolicy, NilVerdict, NilWitness, SequenceWitness,
};
pub use triangulate::{strict_triangulation, Flag, TriangulationFailure};

use crate::error::{Error, Result};
use crate::scalars::Field;

/// Support of a dense vector.
pub fn support(v: &[u32]) -> impl Iterator<Item = (usize, u32)> + '_ {
    v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c))
}

pub fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&c| c == 0)
}

pub fn unit(dim: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

/// `acc += c * v`.
pub fn axpy(field: &Field, acc: &mut [u32], c: u32, v: &[u32]) {
    if c == 0 {
        return;
    }
    for (a, &b) in acc.iter_mut().zip(v) {
        if b != 0 {
            *a = field.mul_add(c, b, *a);
        }
    }
}

pub fn scale(field: &Field, v: &mut [u32], c: u32) {
    for a in v.iter_mut() {
        *a = field.mul(*a, c);
    }
}

/// A subspace of `F_p^ambient` in reduced row-echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Self::from_units(field, ambient, 0..ambient)
    }

    /// Span of the given coordinate axes.
    pub fn from_units(field: Field, ambient: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut pivots: Vec<usize> = idx.into_iter().collect();
        pivots.sort_unstable();
        pivots.dedup();
        let rows = pivots.iter().map(|&i| unit(ambient, i)).collect();
        Subspace {
            field,
            ambient,
            rows,
            pivots,
        }
    }

    /// The echelonized span of `vectors`.
    pub fn span<I, V>(field: Field, ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[u32]>,
    {
        let mut s = Self::zero(field, ambient);
        for v in vectors {
            s.insert(v.as_ref());
        }
        s
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero_space(&self) -> bool {
        self.rows.is_empty()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            Err(Error::AmbientMismatch(self.ambient, other.ambient))
        } else {
            Ok(())
        }
    }

    /// Residual of `v` after eliminating every pivot column; zero iff `v ∈ self`.
    /// The map `v ↦ reduce(v)` is linear.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut r = v.to_vec();
        self.reduce_in_place(&mut r);
        r
    }

    pub fn reduce_in_place(&self, r: &mut [u32]) {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = r[piv];
            if c != 0 {
                axpy(&self.field, r, self.field.neg(c), row);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        is_zero(&self.reduce(v))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length differs from ambient");
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = self.field.inv(r[piv]).expect("nonzero pivot");
        scale(&self.field, &mut r, inv);
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                axpy(&self.field, row, self.field.neg(c), &r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < piv);
        self.pivots.insert(at, piv);
        self.rows.insert(at, r);
        true
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(self.rows.iter().all(|r| other.contains(r)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r);
        }
        Ok(s)
    }

    /// Intersection via the kernel of `(a, b) ↦ a - b` on the two bases.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let f = self.field;
        let images: Vec<Vec<u32>> = self
            .rows
            .iter()
            .cloned()
            .chain(other.rows.iter().map(|r| r.iter().map(|&c| f.neg(c)).collect()))
            .collect();
        let k = self.dim();
        let mut out = Subspace::zero(f, self.ambient);
        for combo in kernel(&f, &images, self.ambient) {
            let mut v = vec![0; self.ambient];
            for (i, &c) in combo[..k].iter().enumerate() {
                axpy(&f, &mut v, c, &self.rows[i]);
            }
            out.insert(&v);
        }
        Ok(out)
    }

    /// Image under a linear map given on vectors.
    pub fn image(&self, ambient: usize, map: impl Fn(&[u32]) -> Vec<u32>) -> Subspace {
        Subspace::span(self.field, ambient, self.rows.iter().map(|r| map(r)))
    }

    /// Coordinates of the quotient `F^ambient / self`: the non-pivot columns.
    pub fn complement_columns(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.ambient];
        for &p in &self.pivots {
            is_piv[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_piv[i]).collect()
    }

    /// Rows of `self` that enlarge `other`, each counted against the ones before it.
    pub fn excess_over(&self, other: &Subspace) -> Vec<Vec<u32>> {
        let mut seen = other.clone();
        self.rows
            .iter()
            .filter(|r| seen.insert(r))
            .cloned()
            .collect()
    }
}

/// Basis of `{c ∈ F^k : Σ c_i images[i] = 0}` where each image has length `width`.
pub fn kernel(field: &Field, images: &[Vec<u32>], width: usize) -> Vec<Vec<u32>> {
    let k = images.len();
    // rows are (image | identity); reduce on the image block
    let mut rows: Vec<Vec<u32>> = images
        .iter()
        .enumerate()
        .map(|(i, img)| {
            let mut r = Vec::with_capacity(width + k);
            r.extend_from_slice(img);
            r.resize(width + k, 0);
            r[width + i] = 1;
            r
        })
        .collect();
    let mut done = vec![false; k];
    for col in 0..width {
        let Some(src) = (0..k).find(|&r| !done[r] && rows[r][col] != 0) else {
            continue;
        };
        let inv = field.inv(rows[src][col]).expect("nonzero pivot");
        scale(field, &mut rows[src], inv);
        let pivot = rows[src].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != src && !done[r] && row[col] != 0 {
                let c = field.neg(row[col]);
                axpy(field, row, c, &pivot);
            }
        }
        done[src] = true;
    }
    rows.into_iter()
        .enumerate()
        .filter(|(r, _)| !done[*r])
        .map(|(_, row)| row[width..].to_vec())
        .collect()
}

/// Rank of a set of vectors.
pub fn rank(field: &Field, ambient: usize, vectors: &[Vec<u32>]) -> usize {
    Subspace::span(*field, ambient, vectors).dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> Field {
        Field::new(3).unwrap()
    }

    #[test]
    fn membership_and_dimension() {
        let f = f3();
        let s = Subspace::span(f, 3, [vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[1, 2, 1]));
        assert!(!s.contains(&[1, 0, 0]));
        assert_eq!(s.complement_columns(), vec![2]);
    }

    #[test]
    fn sum_and_intersection() {
        let f = f3();
        let a = Subspace::from_units(f, 4, [0, 1]);
        let b = Subspace::span(f, 4, [vec![0, 1, 1, 0], vec![0, 0, 0, 1]]);
        assert_eq!(a.sum(&b).unwrap().dim(), 4);
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.dim(), 0);
        let c = Subspace::span(f, 4, [vec![1, 1, 0, 0], vec![0, 0, 1, 0]]);
        let i = a.intersect(&c).unwrap();
        assert_eq!(i, Subspace::span(f, 4, [vec![1, 1, 0, 0]]));
        assert!(a.intersect(&Subspace::zero(f, 3)).is_err());
    }

    #[test]
    fn kernel_of_dependent_images() {
        let f = f3();
        let k = kernel(&f, &[vec![1, 0], vec![0, 1], vec![1, 1]], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![2, 2, 1]);
    }

    fn vectors(p: u32, dim: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
        prop::collection::vec(prop::collection::vec(0..p, dim), 0..6)
    }

    proptest! {
        #[test]
        fn rref_is_canonical(vs in vectors(5, 5)) {
            let f = Field::new(5).unwrap();
            let s = Subspace::span(f, 5, &vs);
            // reversed insertion order gives the same echelon form
            let t = Subspace::span(f, 5, vs.iter().rev());
            prop_assert_eq!(&s, &t);
            for v in &vs {
                prop_assert!(s.contains(v));
            }
        }

        #[test]
        fn dimension_formula(a in vectors(3, 6), b in vectors(3, 6)) {
            let f = f3();
            let sa = Subspace::span(f, 6, &a);
            let sb = Subspace::span(f, 6, &b);
            let sum = sa.sum(&sb).unwrap();
            let int = sa.intersect(&sb).unwrap();
            prop_assert_eq!(sum.dim() + int.dim(), sa.dim() + sb.dim());
            prop_assert!(int.is_subspace_of(&sa).unwrap());
            prop_assert!(int.is_subspace_of(&sb).unwrap());
        }
    }
}
