//! The truncated associative superalgebra `O(n,m;t) = O(n;t) ⊗ Λ(m)`.
//!
//! Even variables `x_1..x_n` carry divided powers `x^(α)` with
//! `α_i < p^{t_i}`; odd variables `x_{n+1}..x_{n+m}` generate an exterior
//! algebra. A product overflowing a truncation bound is zero, which agrees
//! with the divided-power coefficient vanishing mod p at the overflow.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::scalars::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: u32) -> Self {
        if b.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn flip(self) -> Self {
        Parity::from_bit(self.bit() + 1)
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// A standard basis element `x^(α) x^u`.
///
/// `odd` is a bit set: bit `k` stands for the odd variable `x_{n+1+k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub alpha: Vec<u32>,
    pub odd: u32,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            alpha: vec![0; n],
            odd: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha_weight(&self) -> u32 {
        self.alpha.iter().sum()
    }

    pub fn odd_len(&self) -> u32 {
        self.odd.count_ones()
    }

    /// Standard degree `|α| + |u|`.
    pub fn sdeg(&self) -> u32 {
        self.alpha_weight() + self.odd_len()
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.odd_len())
    }

    /// Absolute indices (1-based) of the odd variables present, ascending.
    pub fn odd_indices(&self) -> Vec<usize> {
        let n = self.n();
        (0..32)
            .filter(|k| self.odd >> k & 1 == 1)
            .map(|k| n + 1 + k)
            .collect()
    }

    pub fn contains_odd(&self, index: usize) -> bool {
        let n = self.n();
        index > n && (self.odd >> (index - n - 1)) & 1 == 1
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sdeg()
            .cmp(&other.sdeg())
            .then_with(|| self.alpha.cmp(&other.alpha))
            .then_with(|| {
                // lexicographic on the ascending index lists
                let diff = self.odd ^ other.odd;
                if diff == 0 {
                    return Ordering::Equal;
                }
                let low = diff & diff.wrapping_neg();
                if self.odd & low != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        for (i, &a) in self.alpha.iter().enumerate() {
            match a {
                0 => {}
                1 => factors.push(format!("x{}", i + 1)),
                _ => factors.push(format!("x{}^({})", i + 1, a)),
            }
        }
        for j in self.odd_indices() {
            factors.push(format!("x{j}"));
        }
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("*"))
        }
    }
}

/// An `F_p`-linear combination of monomials. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, u32>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn monomial(m: Monomial, c: u32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: u32, field: &Field) {
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Poly, c: u32, field: &Field) {
        if c == 0 {
            return;
        }
        for (m, v) in other.terms() {
            self.add_term(m.clone(), field.mul(v, c), field);
        }
    }

    pub fn scaled(&self, c: u32, field: &Field) -> Poly {
        let mut out = Poly::zero();
        out.add_scaled(self, c, field);
        out
    }

    pub fn sum(&self, other: &Poly, field: &Field) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, 1, field);
        out
    }

    pub fn difference(&self, other: &Poly, field: &Field) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, field.neg(1), field);
        out
    }

    /// Common parity of all terms; `None` when mixed. Zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(Monomial::parity);
        match it.next() {
            None => Some(Parity::Even),
            Some(first) => it.all(|q| q == first).then_some(first),
        }
    }

    pub fn homogeneous_parity(&self) -> Result<Parity> {
        self.parity().ok_or(Error::MixedParity)
    }

    /// Splits into even and odd parts.
    pub fn split_parity(&self) -> (Poly, Poly) {
        let mut even = Poly::zero();
        let mut odd = Poly::zero();
        for (m, c) in self.terms() {
            let target = match m.parity() {
                Parity::Even => &mut even,
                Parity::Odd => &mut odd,
            };
            target.terms.insert(m.clone(), c);
        }
        (even, odd)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let is_one = m.alpha.iter().all(|&a| a == 0) && m.odd == 0;
            match (c, is_one) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{m}")?,
                _ => write!(f, "{c}*{m}")?,
            }
        }
        Ok(())
    }
}

/// Parameters of `O(n,m;t)` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    n: usize,
    m: usize,
    heights: Vec<u32>,
    bounds: Vec<u32>,
    field: Field,
}

impl Shape {
    pub fn new(n: usize, m: usize, heights: Vec<u32>, p: u32) -> Result<Self> {
        let field = Field::new(p)?;
        if heights.len() != n {
            return Err(Error::InvalidShape(format!(
                "expected {n} truncation heights, got {}",
                heights.len()
            )));
        }
        if heights.contains(&0) {
            return Err(Error::InvalidShape("truncation heights must be >= 1".into()));
        }
        if m > 31 {
            return Err(Error::InvalidShape("at most 31 odd variables".into()));
        }
        let bounds = heights
            .iter()
            .map(|&t| {
                (p as u64)
                    .checked_pow(t)
                    .filter(|&b| b <= u32::MAX as u64)
                    .map(|b| b as u32 - 1)
                    .ok_or_else(|| Error::InvalidShape("truncation height too large".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Shape {
            n,
            m,
            heights,
            bounds,
            field,
        })
    }

    /// The shape `O(n, n+1; t)` underlying `KO(n, n+1)`.
    pub fn contact(n: usize, heights: Vec<u32>, p: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidShape("n must be positive".into()));
        }
        Shape::new(n, n + 1, heights, p)
    }

    /// `O(n, n+1; (1,...,1))`.
    pub fn contact_default(n: usize, p: u32) -> Result<Self> {
        Shape::contact(n, vec![1; n], p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    /// Largest admissible exponent of each even variable.
    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    /// Number of variables `n + m`.
    pub fn num_vars(&self) -> usize {
        self.n + self.m
    }

    pub fn is_contact(&self) -> bool {
        self.m == self.n + 1
    }

    /// Index `2n+1` of the distinguished odd variable.
    pub fn distinguished(&self) -> Result<usize> {
        if self.is_contact() {
            Ok(2 * self.n + 1)
        } else {
            Err(Error::NoDistinguishedVariable)
        }
    }

    /// `dim O(n,m;t) = (∏ p^{t_i}) 2^m`.
    pub fn dim(&self) -> usize {
        self.bounds.iter().map(|&b| b as usize + 1).product::<usize>() << self.m
    }

    /// The same shape with every height raised by `by`.
    pub fn raised(&self, by: u32) -> Result<Shape> {
        Shape::new(
            self.n,
            self.m,
            self.heights.iter().map(|t| t + by).collect(),
            self.p(),
        )
    }

    pub fn is_member(&self, m: &Monomial) -> bool {
        m.alpha.len() == self.n
            && m.alpha.iter().zip(&self.bounds).all(|(a, b)| a <= b)
            && (self.m == 32 || m.odd >> self.m == 0)
    }

    pub fn check(&self, f: &Poly) -> Result<()> {
        match f.terms().find(|(m, _)| !self.is_member(m)) {
            None => Ok(()),
            Some((m, _)) => Err(Error::ShapeMismatch(m.to_string())),
        }
    }

    pub fn one(&self) -> Poly {
        Poly::monomial(Monomial::one(self.n), 1)
    }

    pub fn constant(&self, c: u32) -> Poly {
        Poly::monomial(Monomial::one(self.n), c % self.p())
    }

    /// The variable `x_i`, `1 <= i <= n+m`.
    pub fn var(&self, i: usize) -> Result<Poly> {
        let mut mono = Monomial::one(self.n);
        if i == 0 || i > self.num_vars() {
            return Err(Error::DirectionOutOfRange {
                direction: i,
                max: self.num_vars(),
            });
        }
        if i <= self.n {
            mono.alpha[i - 1] = 1;
        } else {
            mono.odd = 1 << (i - self.n - 1);
        }
        Ok(Poly::monomial(mono, 1))
    }

    /// The divided power `x_i^(k)` of an even variable, zero past the truncation.
    pub fn divided_power(&self, i: usize, k: u32) -> Result<Poly> {
        if i == 0 || i > self.n {
            return Err(Error::Precondition(format!("x{i} is not an even variable")));
        }
        if k > self.bounds[i - 1] {
            return Ok(Poly::zero());
        }
        let mut mono = Monomial::one(self.n);
        mono.alpha[i - 1] = k;
        Ok(Poly::monomial(mono, 1))
    }

    /// Product of two basis elements as `(coefficient, monomial)`; `None` if zero.
    pub fn mono_mul(&self, a: &Monomial, b: &Monomial) -> Option<(u32, Monomial)> {
        if a.odd & b.odd != 0 {
            return None;
        }
        let mut coeff = 1u32;
        let mut alpha = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let s = a.alpha[i] + b.alpha[i];
            if s > self.bounds[i] {
                return None;
            }
            coeff = self.field.mul(coeff, self.field.binom(s as u64, a.alpha[i] as u64));
            if coeff == 0 {
                return None;
            }
            alpha.push(s);
        }
        // sign of moving each odd factor of b left past the larger factors of a
        let mut inversions = 0;
        let mut rest = b.odd;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            inversions += (a.odd & !(bit | (bit - 1))).count_ones();
            rest &= rest - 1;
        }
        Some((
            self.field.mul(coeff, self.field.sign(inversions)),
            Monomial {
                alpha,
                odd: a.odd | b.odd,
            },
        ))
    }

    pub(crate) fn mul_unchecked(&self, f: &Poly, g: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in f.terms() {
            for (b, cb) in g.terms() {
                if let Some((c, m)) = self.mono_mul(a, b) {
                    out.add_term(m, self.field.mul(c, self.field.mul(ca, cb)), &self.field);
                }
            }
        }
        out
    }

    pub fn mul(&self, f: &Poly, g: &Poly) -> Result<Poly> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.mul_unchecked(f, g))
    }

    /// `∂_r` on a basis element.
    pub fn mono_derive(&self, r: usize, a: &Monomial) -> Option<(u32, Monomial)> {
        if r <= self.n {
            let i = r - 1;
            if a.alpha[i] == 0 {
                return None;
            }
            let mut out = a.clone();
            out.alpha[i] -= 1;
            Some((1, out))
        } else {
            let bit = 1u32 << (r - self.n - 1);
            if a.odd & bit == 0 {
                return None;
            }
            let before = (a.odd & (bit - 1)).count_ones();
            let mut out = a.clone();
            out.odd &= !bit;
            Some((self.field.sign(before), out))
        }
    }

    pub(crate) fn derive_unchecked(&self, r: usize, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, c) in f.terms() {
            if let Some((s, m)) = self.mono_derive(r, a) {
                out.add_term(m, self.field.mul(s, c), &self.field);
            }
        }
        out
    }

    pub fn check_direction(&self, r: usize) -> Result<()> {
        if r == 0 || r > self.num_vars() {
            Err(Error::DirectionOutOfRange {
                direction: r,
                max: self.num_vars(),
            })
        } else {
            Ok(())
        }
    }

    /// The superderivation `∂_r`.
    pub fn derive(&self, r: usize, f: &Poly) -> Result<Poly> {
        self.check_direction(r)?;
        self.check(f)?;
        Ok(self.derive_unchecked(r, f))
    }

    /// `‖u‖`: the distinguished variable counts twice.
    pub fn principal_odd_weight(&self, m: &Monomial) -> Result<u32> {
        let d = self.distinguished()?;
        Ok(m.odd_len() + u32::from(m.contains_odd(d)))
    }

    /// Principal degree `|α| + ‖u‖`.
    pub fn pdeg(&self, m: &Monomial) -> Result<u32> {
        Ok(m.alpha_weight() + self.principal_odd_weight(m)?)
    }

    pub fn sdeg(&self, m: &Monomial) -> u32 {
        m.sdeg()
    }

    /// Largest principal degree present.
    pub fn max_pdeg(&self) -> Result<u32> {
        self.distinguished()?;
        Ok(self.bounds.iter().sum::<u32>() + self.n as u32 + 2)
    }

    /// All monomials satisfying `keep`, in monomial order.
    pub fn basis(&self, keep: impl Fn(&Monomial) -> bool) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut alpha = vec![0u32; self.n];
        loop {
            for odd in 0..(1u32 << self.m) {
                let mono = Monomial {
                    alpha: alpha.clone(),
                    odd,
                };
                if keep(&mono) {
                    out.push(mono);
                }
            }
            // odometer over the exponent box
            let mut i = 0;
            loop {
                if i == self.n {
                    out.sort();
                    return out;
                }
                if alpha[i] < self.bounds[i] {
                    alpha[i] += 1;
                    break;
                }
                alpha[i] = 0;
                i += 1;
            }
        }
    }

    pub fn full_basis(&self) -> Vec<Monomial> {
        self.basis(|_| true)
    }

    /// Re-expresses `f` over a larger (or equal) shape with the same `n, m, p`.
    pub fn embed(&self, f: &Poly, target: &Shape) -> Result<Poly> {
        if target.n != self.n || target.m != self.m || target.p() != self.p() {
            return Err(Error::ShapeMismatch("incompatible shapes".into()));
        }
        target.check(f)?;
        Ok(f.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(n: usize, m: usize, p: u32) -> Shape {
        Shape::new(n, m, vec![1; n], p).unwrap()
    }

    #[test]
    fn divided_power_square() {
        let s = sh(1, 2, 3);
        let x1 = s.var(1).unwrap();
        let prod = s.mul(&x1, &x1).unwrap();
        assert_eq!(prod, s.divided_power(1, 2).unwrap().scaled(2, s.field()));
    }

    #[test]
    fn odd_square_vanishes() {
        let s = sh(1, 2, 3);
        let x2 = s.var(2).unwrap();
        assert!(s.mul(&x2, &x2).unwrap().is_zero());
    }

    #[test]
    fn odd_variables_anticommute() {
        let s = sh(1, 2, 3);
        let (x2, x3) = (s.var(2).unwrap(), s.var(3).unwrap());
        let a = s.mul(&x3, &x2).unwrap();
        let b = s.mul(&x2, &x3).unwrap();
        assert_eq!(a, b.scaled(2, s.field()));
        assert_eq!(b.to_string(), "x2*x3");
    }

    #[test]
    fn truncation_overflow_is_zero() {
        let s = sh(1, 2, 3);
        let x1 = s.var(1).unwrap();
        let sq = s.divided_power(1, 2).unwrap();
        assert!(s.mul(&sq, &x1).unwrap().is_zero());
    }

    #[test]
    fn derivative_examples() {
        let s = sh(1, 2, 3);
        assert_eq!(
            s.derive(1, &s.divided_power(1, 2).unwrap()).unwrap(),
            s.var(1).unwrap()
        );
        let x2x3 = s.mul(&s.var(2).unwrap(), &s.var(3).unwrap()).unwrap();
        assert_eq!(
            s.derive(3, &x2x3).unwrap(),
            s.var(2).unwrap().scaled(2, s.field())
        );
        let s2 = sh(2, 3, 3);
        assert!(s2.derive(2, &s2.var(1).unwrap()).unwrap().is_zero());
        assert!(matches!(
            s.derive(4, &x2x3),
            Err(Error::DirectionOutOfRange { .. })
        ));
    }

    #[test]
    fn degree_examples() {
        let s = sh(1, 2, 3);
        let m = |f: Poly| f.terms().next().unwrap().0.clone();
        let a = m(s
            .mul(&s.divided_power(1, 2).unwrap(), &s.var(2).unwrap())
            .unwrap());
        assert_eq!(a.sdeg(), 3);
        assert_eq!(Monomial::one(1).sdeg(), 0);
        let x3 = m(s.var(3).unwrap());
        assert_eq!(x3.sdeg(), 1);
        assert_eq!(s.pdeg(&x3).unwrap(), 2);
        let x1x2 = m(s.mul(&s.var(1).unwrap(), &s.var(2).unwrap()).unwrap());
        assert_eq!(s.pdeg(&x1x2).unwrap(), 2);
        let x1x3 = m(s.mul(&s.var(1).unwrap(), &s.var(3).unwrap()).unwrap());
        assert_eq!(s.pdeg(&x1x3).unwrap(), 3);
        assert!(matches!(
            sh(1, 1, 3).pdeg(&x1x2),
            Err(Error::NoDistinguishedVariable)
        ));
    }

    #[test]
    fn parity_examples() {
        let s = sh(1, 2, 3);
        let x1x2 = s.mul(&s.var(1).unwrap(), &s.var(2).unwrap()).unwrap();
        assert_eq!(x1x2.parity(), Some(Parity::Odd));
        let s5 = sh(1, 2, 5);
        assert_eq!(s5.divided_power(1, 3).unwrap().parity(), Some(Parity::Even));
        let mixed = s.var(1).unwrap().sum(&s.var(2).unwrap(), s.field());
        assert_eq!(mixed.parity(), None);
    }

    #[test]
    fn basis_examples() {
        let s = sh(1, 2, 3);
        assert_eq!(s.full_basis().len(), 12);
        assert_eq!(s.dim(), 12);
        let deg0 = s.basis(|m| s.pdeg(m).unwrap() == 0);
        assert_eq!(deg0, vec![Monomial::one(1)]);
        let deg2: Vec<String> = s
            .basis(|m| s.pdeg(m).unwrap() == 2)
            .iter()
            .map(|m| m.to_string())
            .collect();
        let mut sorted = deg2.clone();
        sorted.sort();
        assert_eq!(sorted, vec!["x1*x2", "x1^(2)", "x3"]);
    }

    #[test]
    fn basis_is_sorted_and_complete() {
        let s = Shape::new(2, 3, vec![1, 2], 3).unwrap();
        let b = s.full_basis();
        assert_eq!(b.len(), s.dim());
        assert!(b.windows(2).all(|w| w[0] < w[1]));
    }
}
