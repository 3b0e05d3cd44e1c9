//! The generalized Witt superalgebra `W(n,m;t)` of superderivations
//! `Σ f_r ∂_r`, together with the operators `E`, `T_H` and `Δ` used to
//! build the odd Contact series.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::superalg::{Monomial, Parity, Poly, Shape};

/// `μ(i)`: parity of the direction `∂_i`.
pub fn mu(i: usize, n: usize) -> Parity {
    if i <= n {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// The pairing `i ↦ i′` on `1..=2n`.
pub fn prime(i: usize, n: usize) -> Result<usize> {
    match i {
        _ if i >= 1 && i <= n => Ok(i + n),
        _ if i > n && i <= 2 * n => Ok(i - n),
        _ => Err(Error::DirectionOutOfRange {
            direction: i,
            max: 2 * n,
        }),
    }
}

/// Principal degree of a (possibly inhomogeneous) element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Graded {
    Zero,
    Pure(i32),
    Mixed,
}

/// `Σ_r f_r ∂_r`, stored without zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SuperDerivation {
    coeffs: BTreeMap<usize, Poly>,
}

impl SuperDerivation {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `f ∂_r`.
    pub fn term(f: Poly, r: usize) -> Self {
        let mut d = Self::zero();
        if !f.is_zero() {
            d.coeffs.insert(r, f);
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, r: usize) -> Option<&Poly> {
        self.coeffs.get(&r)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &Poly)> {
        self.coeffs.iter().map(|(&r, f)| (r, f))
    }

    /// `self += c * f ∂_r`.
    pub fn add_term(&mut self, r: usize, f: &Poly, c: u32, shape: &Shape) {
        let slot = self.coeffs.entry(r).or_default();
        slot.add_scaled(f, c, shape.field());
        if slot.is_zero() {
            self.coeffs.remove(&r);
        }
    }

    pub fn add_scaled(&mut self, other: &SuperDerivation, c: u32, shape: &Shape) {
        for (r, f) in other.coeffs() {
            self.add_term(r, f, c, shape);
        }
    }

    pub fn scaled(&self, c: u32, shape: &Shape) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c, shape);
        out
    }

    /// Common parity of the terms `f_r ∂_r`; zero counts as even.
    pub fn parity(&self, n: usize) -> Option<Parity> {
        let mut parities = self
            .coeffs
            .iter()
            .flat_map(|(&r, f)| f.terms().map(move |(m, _)| m.parity() + mu(r, n)));
        match parities.next() {
            None => Some(Parity::Even),
            Some(first) => parities.all(|q| q == first).then_some(first),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, usize, u32)> {
        self.coeffs
            .iter()
            .flat_map(|(&r, f)| f.terms().map(move |(m, c)| (m, r, c)))
    }
}

impl fmt::Display for SuperDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, poly) in &self.coeffs {
            for (m, c) in poly.terms() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let unit = m.alpha.iter().all(|&a| a == 0) && m.odd == 0;
                match (c, unit) {
                    (1, true) => write!(f, "d{r}")?,
                    (_, true) => write!(f, "{c}*d{r}")?,
                    (1, false) => write!(f, "{m}*d{r}")?,
                    _ => write!(f, "{c}*{m}*d{r}")?,
                }
            }
        }
        Ok(())
    }
}

impl Shape {
    fn check_derivation(&self, d: &SuperDerivation) -> Result<()> {
        for (r, f) in d.coeffs() {
            self.check_direction(r)?;
            self.check(f)?;
        }
        Ok(())
    }

    pub(crate) fn apply_unchecked(&self, d: &SuperDerivation, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (r, coeff) in d.coeffs() {
            let df = self.derive_unchecked(r, f);
            if !df.is_zero() {
                out.add_scaled(&self.mul_unchecked(coeff, &df), 1, self.field());
            }
        }
        out
    }

    /// `D(f) = Σ f_r ∂_r(f)`.
    pub fn apply(&self, d: &SuperDerivation, f: &Poly) -> Result<Poly> {
        self.check_derivation(d)?;
        self.check(f)?;
        Ok(self.apply_unchecked(d, f))
    }

    /// Super-commutator `[D1, D2]` of homogeneous superderivations.
    pub fn bracket_w(&self, d1: &SuperDerivation, d2: &SuperDerivation) -> Result<SuperDerivation> {
        self.check_derivation(d1)?;
        self.check_derivation(d2)?;
        let p1 = d1.parity(self.n()).ok_or(Error::MixedParity)?;
        let p2 = d2.parity(self.n()).ok_or(Error::MixedParity)?;
        let field = self.field();
        let mut out = SuperDerivation::zero();
        for (j, g) in d2.coeffs() {
            out.add_term(j, &self.apply_unchecked(d1, g), 1, self);
        }
        let sign = field.neg(field.sign(p1.bit() * p2.bit()));
        for (i, f) in d1.coeffs() {
            out.add_term(i, &self.apply_unchecked(d2, f), sign, self);
        }
        Ok(out)
    }

    /// The Euler-type operator `E = Σ_{i≤2n} x_i ∂_i` as a derivation.
    pub fn e_derivation(&self) -> Result<SuperDerivation> {
        self.distinguished()?;
        let mut d = SuperDerivation::zero();
        for i in 1..=2 * self.n() {
            d.add_term(i, &self.var(i)?, 1, self);
        }
        Ok(d)
    }

    /// `E(f)`.
    pub fn e_operator(&self, f: &Poly) -> Result<Poly> {
        let e = self.e_derivation()?;
        self.apply(&e, f)
    }

    /// `T_H(a) = Σ_{i≤2n} (-1)^{μ(i′)p(a)} ∂_{i′}(a) ∂_i`.
    pub fn t_h(&self, a: &Poly) -> Result<SuperDerivation> {
        self.check(a)?;
        if self.m() < self.n() {
            return Err(Error::InvalidShape("T_H needs m >= n".into()));
        }
        let pa = a.homogeneous_parity()?;
        let n = self.n();
        let field = self.field();
        let mut d = SuperDerivation::zero();
        for i in 1..=2 * n {
            let ip = prime(i, n)?;
            let sign = field.sign(mu(ip, n).bit() * pa.bit());
            d.add_term(i, &self.derive_unchecked(ip, a), sign, self);
        }
        Ok(d)
    }

    /// `Δ(a) = Σ_{i≤n} ∂_i ∂_{i′}(a)`.
    pub fn delta(&self, a: &Poly) -> Result<Poly> {
        self.check(a)?;
        if self.m() < self.n() {
            return Err(Error::InvalidShape("Δ needs m >= n".into()));
        }
        let n = self.n();
        let mut out = Poly::zero();
        for i in 1..=n {
            let inner = self.derive_unchecked(i + n, a);
            out.add_scaled(&self.derive_unchecked(i, &inner), 1, self.field());
        }
        Ok(out)
    }

    /// Whether `T_H(a)` lies in `SHO′(n,n)`, i.e. `Δ(a) = 0` for `a` free of `x_{2n+1}`.
    pub fn in_sho_prime(&self, a: &Poly) -> Result<bool> {
        let d = self.distinguished()?;
        if a.terms().any(|(m, _)| m.contains_odd(d)) {
            return Err(Error::Precondition(format!("{a} involves x{d}")));
        }
        Ok(self.delta(a)?.is_zero())
    }

    /// Principal degree of `f ∂_j`: `pdeg(f) - 1 - δ_{j,2n+1}`.
    pub fn pdeg_w(&self, d: &SuperDerivation) -> Result<Graded> {
        let dist = self.distinguished()?;
        let mut seen = None;
        for (m, r, _) in d.terms() {
            let deg = self.pdeg(m)? as i32 - 1 - i32::from(r == dist);
            match seen {
                None => seen = Some(deg),
                Some(s) if s != deg => return Ok(Graded::Mixed),
                _ => {}
            }
        }
        Ok(seen.map_or(Graded::Zero, Graded::Pure))
    }

    /// Standard degree of `f ∂_j`: `sdeg(f) - 1`.
    pub fn sdeg_w(&self, d: &SuperDerivation) -> Graded {
        let mut seen = None;
        for (m, _, _) in d.terms() {
            let deg = m.sdeg() as i32 - 1;
            match seen {
                None => seen = Some(deg),
                Some(s) if s != deg => return Graded::Mixed,
                _ => {}
            }
        }
        seen.map_or(Graded::Zero, Graded::Pure)
    }
}

/// Coordinates on the standard basis `{x^(α)x^u ∂_r}` of a truncated `W(n,m;t)`.
#[derive(Debug, Clone)]
pub struct WittModel {
    shape: Shape,
    basis: Vec<(Monomial, usize)>,
    index: std::collections::HashMap<(Monomial, usize), usize>,
}

impl WittModel {
    pub fn new(shape: Shape) -> Self {
        let monos = shape.full_basis();
        let mut basis = Vec::with_capacity(monos.len() * shape.num_vars());
        for r in 1..=shape.num_vars() {
            for m in &monos {
                basis.push((m.clone(), r));
            }
        }
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), i))
            .collect();
        WittModel {
            shape,
            basis,
            index,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[(Monomial, usize)] {
        &self.basis
    }

    pub fn element(&self, i: usize) -> SuperDerivation {
        let (m, r) = &self.basis[i];
        SuperDerivation::term(Poly::monomial(m.clone(), 1), *r)
    }

    pub fn parity(&self, i: usize) -> Parity {
        let (m, r) = &self.basis[i];
        m.parity() + mu(*r, self.shape.n())
    }

    pub fn coords(&self, d: &SuperDerivation) -> Vec<u32> {
        let mut v = vec![0; self.dim()];
        for (m, r, c) in d.terms() {
            v[self.index[&(m.clone(), r)]] = c;
        }
        v
    }

    pub fn from_coords(&self, v: &[u32]) -> SuperDerivation {
        let mut d = SuperDerivation::zero();
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                let (m, r) = &self.basis[i];
                d.add_term(*r, &Poly::monomial(m.clone(), 1), c, &self.shape);
            }
        }
        d
    }

    /// Matrix of `ad D` for a homogeneous `D`, as columns.
    pub fn ad_columns(&self, d: &SuperDerivation) -> Result<Vec<Vec<u32>>> {
        (0..self.dim())
            .map(|j| Ok(self.coords(&self.shape.bracket_w(d, &self.element(j))?)))
            .collect()
    }

    /// Principal degree of basis element `i`.
    pub fn pdeg(&self, i: usize) -> Result<i32> {
        let (m, r) = &self.basis[i];
        let dist = self.shape.distinguished()?;
        Ok(self.shape.pdeg(m)? as i32 - 1 - i32::from(*r == dist))
    }
}
