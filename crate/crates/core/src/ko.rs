//! The odd Contact superalgebra `KO(n,n+1;t)`.
//!
//! Elements are stored by their potential `a`, standing for `D_KO(a)`. The
//! map `a ↦ D_KO(a)` is injective, so nothing is lost, and the closed-form
//! bracket on potentials is much cheaper than commuting derivations.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, SparseOp, SparseVec, Subspace};
use crate::scalars::Field;
use crate::superalg::{Monomial, Parity, Poly, Shape};
use crate::witt::SuperDerivation;

/// A `Z_2`-homogeneous generator `a` of `D_KO(a)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Potential(Poly);

impl Potential {
    pub fn new(a: Poly) -> Result<Self> {
        a.homogeneous_parity()?;
        Ok(Potential(a))
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Parity of the potential itself (not of `D_KO(a)`).
    pub fn potential_parity(&self) -> Parity {
        self.0.parity().expect("homogeneous by construction")
    }

    /// `p(D_KO(a)) = p(a) + 1`.
    pub fn parity_ko(&self) -> Parity {
        self.potential_parity().flip()
    }
}

impl std::fmt::Display for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl Shape {
    fn expand_unchecked(&self, a: &Poly, pa: Parity) -> SuperDerivation {
        let n = self.n();
        let field = self.field();
        let dist = 2 * n + 1;
        let mut d = self.t_h(a).expect("shape and parity checked");
        // (-1)^{p(a)} ∂_{2n+1}(a) E
        let da = self.derive_unchecked(dist, a);
        if !da.is_zero() {
            let sign = field.sign(pa.bit());
            for i in 1..=2 * n {
                let xi = self.var(i).expect("index in range");
                d.add_term(i, &self.mul_unchecked(&da, &xi), sign, self);
            }
        }
        // (E(a) - 2a) ∂_{2n+1}
        let mut ea = self.e_operator(a).expect("contact shape");
        ea.add_scaled(a, field.neg(2), field);
        d.add_term(dist, &ea, 1, self);
        d
    }

    /// `D_KO(a) = T_H(a) + (-1)^{p(a)} ∂_{2n+1}(a) E + (E(a) - 2a) ∂_{2n+1}`.
    pub fn d_ko_expand(&self, a: &Potential) -> Result<SuperDerivation> {
        self.distinguished()?;
        self.check(a.poly())?;
        Ok(self.expand_unchecked(a.poly(), a.potential_parity()))
    }

    fn bracket_with_expansion(&self, da: &SuperDerivation, a: &Poly, pa: Parity, b: &Poly) -> Poly {
        let field = self.field();
        let mut out = self.apply_unchecked(da, b);
        let d2 = self.derive_unchecked(2 * self.n() + 1, a);
        if !d2.is_zero() {
            let c = field.neg(field.mul(2, field.sign(pa.bit())));
            out.add_scaled(&self.mul_unchecked(&d2, b), c, field);
        }
        out
    }

    /// Potential of `[D_KO(a), D_KO(b)]`: `D_KO(a)(b) - (-1)^{p(a)} 2 ∂_{2n+1}(a) b`.
    pub fn bracket_ko(&self, a: &Potential, b: &Potential) -> Result<Potential> {
        let da = self.d_ko_expand(a)?;
        self.check(b.poly())?;
        let out = self.bracket_with_expansion(&da, a.poly(), a.potential_parity(), b.poly());
        Potential::new(out)
    }

    /// `[D_KO(a), D_KO(b)] = D_KO(T_H(a)(b))` for `a ∈ O(n,n)` of standard degree 2.
    pub fn bracket_simplified(&self, a: &Potential, b: &Potential) -> Result<Potential> {
        let dist = self.distinguished()?;
        if a.poly().terms().any(|(m, _)| m.contains_odd(dist) || m.sdeg() != 2) {
            return Err(Error::Precondition(format!(
                "{a} must have standard degree 2 and not involve x{dist}"
            )));
        }
        let th = self.t_h(a.poly())?;
        Potential::new(self.apply(&th, b.poly())?)
    }

    pub fn parity_ko(&self, a: &Potential) -> Parity {
        a.parity_ko()
    }
}

/// Basis of one principal-degree component `KO_[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedComponent {
    pub index: i32,
    pub basis: Vec<Potential>,
    /// Positions of the basis in the model's ordering.
    pub positions: Range<usize>,
}

/// Structure-constant export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub schema: u32,
    pub p: u32,
    pub n: usize,
    pub t: Vec<u32>,
    pub classification_invariant: usize,
    pub basis: Vec<String>,
    pub brackets: Vec<(usize, usize, SparseVec)>,
}

/// Coordinates on the monomial basis of a truncated `KO(n,n+1;t)`,
/// ordered by principal degree so each filtration space is a tail of the basis.
#[derive(Debug)]
pub struct KoModel {
    shape: Shape,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    degree: Vec<i32>,
    parity: Vec<Parity>,
    starts: Vec<usize>,
    rows: Vec<OnceLock<Vec<SparseVec>>>,
}

impl KoModel {
    pub fn new(shape: Shape) -> Result<Self> {
        shape.distinguished()?;
        let mut basis = shape.full_basis();
        let pdeg = |m: &Monomial| shape.pdeg(m).expect("contact shape");
        basis.sort_by(|a, b| pdeg(a).cmp(&pdeg(b)).then_with(|| a.cmp(b)));
        let degree: Vec<i32> = basis.iter().map(|m| pdeg(m) as i32 - 2).collect();
        let parity = basis.iter().map(|m| m.parity().flip()).collect();
        let index = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let top = *degree.last().expect("nonempty basis");
        let starts = (-2..=top + 1)
            .map(|d| degree.partition_point(|&x| x < d))
            .collect();
        let rows = (0..basis.len()).map(|_| OnceLock::new()).collect();
        Ok(KoModel {
            shape,
            basis,
            index,
            degree,
            parity,
            starts,
            rows,
        })
    }

    pub fn with_cap(shape: Shape, cap: usize) -> Result<Self> {
        let dim = shape.dim();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        Self::new(shape)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn field(&self) -> &Field {
        self.shape.field()
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degree[i]
    }

    /// Parity of `D_KO(basis_i)`.
    pub fn parity(&self, i: usize) -> Parity {
        self.parity[i]
    }

    pub fn max_degree(&self) -> i32 {
        *self.degree.last().unwrap()
    }

    pub fn potential(&self, i: usize) -> Potential {
        Potential(Poly::monomial(self.basis[i].clone(), 1))
    }

    /// Positions of the basis of `KO_[i]`; empty outside the range.
    pub fn component_range(&self, i: i32) -> Range<usize> {
        if i < -2 || i > self.max_degree() {
            return 0..0;
        }
        let k = (i + 2) as usize;
        self.starts[k]..self.starts[k + 1]
    }

    pub fn graded_component(&self, i: i32) -> Result<GradedComponent> {
        if i < -2 || i > self.max_degree() {
            return Err(Error::DegreeOutOfRange(i));
        }
        let positions = self.component_range(i);
        Ok(GradedComponent {
            index: i,
            basis: positions.clone().map(|j| self.potential(j)).collect(),
            positions,
        })
    }

    /// `KO_i = Σ_{j≥i} KO_[j]`.
    pub fn filtration(&self, i: i32) -> Subspace {
        let start = self.degree.partition_point(|&d| d < i);
        Subspace::from_units(*self.field(), self.dim(), start..self.dim())
    }

    /// The even or odd part `KO_θ`.
    pub fn parity_part(&self, p: Parity) -> Subspace {
        Subspace::from_units(
            *self.field(),
            self.dim(),
            (0..self.dim()).filter(|&i| self.parity[i] == p),
        )
    }

    /// `KO_[i] ∩ KO_θ` as basis positions.
    pub fn positions(&self, degree: i32, p: Parity) -> Vec<usize> {
        self.component_range(degree)
            .filter(|&i| self.parity[i] == p)
            .collect()
    }

    pub fn units(&self, idx: impl IntoIterator<Item = usize>) -> Subspace {
        Subspace::from_units(*self.field(), self.dim(), idx)
    }

    pub fn coords(&self, a: &Poly) -> Result<Vec<u32>> {
        let mut v = vec![0; self.dim()];
        for (m, c) in a.terms() {
            let i = self
                .index_of(m)
                .ok_or_else(|| Error::ShapeMismatch(m.to_string()))?;
            v[i] = c;
        }
        Ok(v)
    }

    pub fn poly(&self, v: &[u32]) -> Poly {
        let mut out = Poly::zero();
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                out.add_term(self.basis[i].clone(), c, self.field());
            }
        }
        out
    }

    /// Parity of `D_KO` of a coordinate vector, `None` if mixed. Zero is even.
    pub fn vector_parity(&self, v: &[u32]) -> Option<Parity> {
        let mut it = crate::linalg::support(v).map(|(i, _)| self.parity[i]);
        match it.next() {
            None => Some(Parity::Even),
            Some(first) => it.all(|q| q == first).then_some(first),
        }
    }

    /// Lowest principal degree present in `v`.
    pub fn lowest_degree(&self, v: &[u32]) -> Option<i32> {
        crate::linalg::support(v).map(|(i, _)| self.degree[i]).min()
    }

    /// Projection onto `KO_[d]`.
    pub fn component(&self, v: &[u32], d: i32) -> Vec<u32> {
        let r = self.component_range(d);
        let mut out = vec![0; self.dim()];
        out[r.clone()].copy_from_slice(&v[r]);
        out
    }

    fn compute_row(&self, i: usize) -> Vec<SparseVec> {
        let a = &self.potential(i).0;
        let pa = self.basis[i].parity();
        let da = self.shape.expand_unchecked(a, pa);
        (0..self.dim())
            .map(|j| {
                let b = Poly::monomial(self.basis[j].clone(), 1);
                let out = self.shape.bracket_with_expansion(&da, a, pa, &b);
                let mut sv: SparseVec = out
                    .terms()
                    .map(|(m, c)| (self.index[m], c))
                    .collect();
                sv.sort_unstable();
                sv
            })
            .collect()
    }

    /// `[b_i, b_j]` for every `j`, computed on first use.
    pub fn row(&self, i: usize) -> &[SparseVec] {
        self.rows[i].get_or_init(|| self.compute_row(i))
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.row(i)[j]
    }

    /// Fills the whole structure-constant table in parallel.
    pub fn ensure_table(&self) {
        (0..self.dim()).into_par_iter().for_each(|i| {
            self.row(i);
        });
    }

    /// Bilinear bracket of coordinate vectors.
    pub fn bracket(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let field = *self.field();
        let ys: Vec<(usize, u32)> = crate::linalg::support(y).collect();
        let mut out = vec![0; self.dim()];
        for (i, xi) in crate::linalg::support(x) {
            let row = self.row(i);
            for &(j, yj) in &ys {
                let c = field.mul(xi, yj);
                for &(k, t) in &row[j] {
                    out[k] = field.mul_add(c, t, out[k]);
                }
            }
        }
        out
    }

    /// `ad y` as a sparse operator.
    pub fn ad_op(&self, y: &[u32]) -> SparseOp {
        let field = *self.field();
        let dim = self.dim();
        let terms: Vec<(usize, u32)> = crate::linalg::support(y).collect();
        let mut dense = vec![0u32; dim];
        let sparse_cols = (0..dim)
            .map(|j| {
                for &(i, c) in &terms {
                    for &(k, t) in &self.row(i)[j] {
                        dense[k] = field.mul_add(c, t, dense[k]);
                    }
                }
                let col: SparseVec = crate::linalg::support(&dense).collect();
                for &(k, _) in &col {
                    dense[k] = 0;
                }
                col
            })
            .collect();
        SparseOp::new(field, dim, sparse_cols)
    }

    /// `Σ c_i y_i` with `y_i` given by coordinates.
    pub fn combine(&self, terms: &[(u32, &[u32])]) -> Vec<u32> {
        let mut out = vec![0; self.dim()];
        for &(c, v) in terms {
            axpy(self.field(), &mut out, c, v);
        }
        out
    }

    /// `dim KO_[-2] + dim KO_[-1]`.
    pub fn low_degree_dimension(&self) -> usize {
        self.component_range(-2).len() + self.component_range(-1).len()
    }

    pub fn structure_constants(&self) -> StructureConstants {
        self.ensure_table();
        let mut brackets = Vec::with_capacity(self.dim() * self.dim());
        for i in 0..self.dim() {
            for (j, entry) in self.row(i).iter().enumerate() {
                brackets.push((i, j, entry.clone()));
            }
        }
        StructureConstants {
            schema: 1,
            p: self.shape.p(),
            n: self.n(),
            t: self.shape.heights().to_vec(),
            classification_invariant: self.low_degree_dimension(),
            basis: self.basis.iter().map(|m| m.to_string()).collect(),
            brackets,
        }
    }

    pub fn export_json(&self) -> String {
        serde_json::to_string(&self.structure_constants()).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::Graded;

    fn shape(n: usize, p: u32) -> Shape {
        Shape::contact_default(n, p).unwrap()
    }

    fn pot(f: Poly) -> Potential {
        Potential::new(f).unwrap()
    }

    fn x(s: &Shape, i: usize) -> Poly {
        s.var(i).unwrap()
    }

    #[test]
    fn expansion_examples() {
        let s = shape(1, 3);
        let f = s.field();
        let d1 = s.d_ko_expand(&pot(s.one())).unwrap();
        assert_eq!(d1, SuperDerivation::term(s.constant(f.neg(2)), 3));
        // D(x3) = -E - 2 x3 d3
        let d = s.d_ko_expand(&pot(x(&s, 3))).unwrap();
        let mut expect = s.e_derivation().unwrap().scaled(f.neg(1), &s);
        expect.add_term(3, &x(&s, 3), f.neg(2), &s);
        assert_eq!(d, expect);
        // D(x_i) = ±∂_{i′} - x_i ∂_{2n+1}
        let d = s.d_ko_expand(&pot(x(&s, 1))).unwrap();
        let mut expect = SuperDerivation::term(s.one(), 2);
        expect.add_term(3, &x(&s, 1), f.neg(1), &s);
        assert_eq!(d, expect);
        let d = s.d_ko_expand(&pot(x(&s, 2))).unwrap();
        let mut expect = SuperDerivation::term(s.constant(f.neg(1)), 1);
        expect.add_term(3, &x(&s, 2), f.neg(1), &s);
        assert_eq!(d, expect);
    }

    #[test]
    fn parity_rule_matches_expansion() {
        for (n, p) in [(1, 3), (2, 3), (1, 5)] {
            let s = shape(n, p);
            for m in s.full_basis() {
                let a = pot(Poly::monomial(m, 1));
                let d = s.d_ko_expand(&a).unwrap();
                assert_eq!(d.parity(n), Some(a.parity_ko()), "{a}");
            }
        }
        let s = shape(1, 3);
        assert_eq!(pot(s.one()).parity_ko(), Parity::Odd);
        assert_eq!(pot(x(&s, 3)).parity_ko(), Parity::Even);
        let x2x3 = s.mul(&x(&s, 2), &x(&s, 3)).unwrap();
        assert_eq!(pot(x2x3).parity_ko(), Parity::Odd);
        assert!(Potential::new(x(&s, 1).sum(&x(&s, 2), s.field())).is_err());
    }

    #[test]
    fn expansion_is_injective() {
        for (n, p) in [(1, 3), (2, 3), (1, 5)] {
            let s = shape(n, p);
            let w = crate::witt::WittModel::new(s.clone());
            let images: Vec<Vec<u32>> = s
                .full_basis()
                .into_iter()
                .map(|m| w.coords(&s.d_ko_expand(&pot(Poly::monomial(m, 1))).unwrap()))
                .collect();
            assert_eq!(crate::linalg::rank(s.field(), w.dim(), &images), s.dim());
        }
    }

    #[test]
    fn principal_degree_matches_witt_grading() {
        let s = shape(2, 3);
        let model = KoModel::new(s.clone()).unwrap();
        for i in 0..model.dim() {
            let d = s.d_ko_expand(&model.potential(i)).unwrap();
            assert_eq!(s.pdeg_w(&d).unwrap(), Graded::Pure(model.degree(i)));
        }
    }

    #[test]
    fn bracket_examples() {
        for (n, p) in [(1, 3), (2, 5)] {
            let s = shape(n, p);
            let f = s.field();
            let dist = 2 * n + 1;
            for i in 1..=2 * n {
                let a = pot(s.mul(&x(&s, i), &x(&s, dist)).unwrap());
                let br = s.bracket_ko(&a, &pot(s.one())).unwrap();
                assert_eq!(br.poly(), &x(&s, i).scaled(2, f));
            }
            let one = pot(s.one());
            assert!(s.bracket_ko(&one, &one).unwrap().is_zero());
        }
    }

    #[test]
    fn simplified_bracket_examples() {
        let s = shape(1, 3);
        let a = pot(s.mul(&x(&s, 1), &x(&s, 2)).unwrap());
        assert!(s.bracket_simplified(&a, &pot(s.one())).unwrap().is_zero());
        let r = s.bracket_simplified(&a, &pot(x(&s, 1))).unwrap();
        assert_eq!(r, s.bracket_ko(&a, &pot(x(&s, 1))).unwrap());
        assert_eq!(r.poly().len(), 1);
        assert!(s
            .bracket_simplified(&pot(x(&s, 3)), &pot(s.one()))
            .is_err());
    }

    #[test]
    fn graded_components() {
        for n in 1..=2 {
            let model = KoModel::new(shape(n, 3)).unwrap();
            let c = model.graded_component(-2).unwrap();
            assert_eq!(c.basis, vec![model.potential(0)]);
            assert_eq!(model.graded_component(-1).unwrap().basis.len(), 2 * n);
            assert_eq!(model.graded_component(0).unwrap().basis.len(), 2 * n * n + 1);
            assert!(model.graded_component(-3).is_err());
            assert!(model.graded_component(model.max_degree() + 1).is_err());
        }
    }

    #[test]
    fn filtration_spaces() {
        let model = KoModel::new(shape(1, 3)).unwrap();
        assert_eq!(model.filtration(-2).dim(), 12);
        assert_eq!(model.filtration(-2).dim() - model.filtration(-1).dim(), 1);
        for i in -2..=model.max_degree() {
            assert!(model.filtration(i).dim() > model.filtration(i + 1).dim());
        }
        assert_eq!(model.filtration(model.max_degree() + 1).dim(), 0);
        let dims: Vec<usize> = (-2..=3).map(|i| model.component_range(i).len()).collect();
        assert_eq!(dims, vec![1, 2, 3, 3, 2, 1]);
    }

    #[test]
    fn table_matches_direct_bracket() {
        let s = shape(1, 5);
        let model = KoModel::new(s.clone()).unwrap();
        for i in 0..model.dim() {
            for j in 0..model.dim() {
                let direct = s
                    .bracket_ko(&model.potential(i), &model.potential(j))
                    .unwrap();
                let via = model.bracket(
                    &crate::linalg::unit(model.dim(), i),
                    &crate::linalg::unit(model.dim(), j),
                );
                assert_eq!(model.coords(direct.poly()).unwrap(), via);
            }
        }
    }

    #[test]
    fn export_is_deterministic() {
        let a = KoModel::new(shape(1, 3)).unwrap().export_json();
        let b = KoModel::new(shape(1, 3)).unwrap().export_json();
        assert_eq!(a, b);
        let parsed: StructureConstants = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed.basis.len(), 12);
        assert_eq!(parsed.brackets.len(), 144);
        assert_eq!(parsed.classification_invariant, 3);
    }
}
