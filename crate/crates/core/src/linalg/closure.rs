use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ko::KoModel;
use crate::scalars::Field;
use crate::witt::WittModel;

use super::{axpy, is_zero, kernel, Subspace};

/// A bilinear bracket on coordinate vectors of a fixed basis.
pub trait Bracket: Sync {
    fn field(&self) -> &Field;
    fn dim(&self) -> usize;
    fn bracket(&self, x: &[u32], y: &[u32]) -> Vec<u32>;
}

impl Bracket for KoModel {
    fn field(&self) -> &Field {
        KoModel::field(self)
    }

    fn dim(&self) -> usize {
        KoModel::dim(self)
    }

    fn bracket(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        KoModel::bracket(self, x, y)
    }
}

impl Bracket for WittModel {
    fn field(&self) -> &Field {
        self.shape().field()
    }

    fn dim(&self) -> usize {
        WittModel::dim(self)
    }

    fn bracket(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let d = self
            .shape()
            .bracket_w(&self.from_coords(x), &self.from_coords(y))
            .expect("basis elements lie in the shape");
        self.coords(&d)
    }
}

/// Smallest bracket-closed subspace containing `generators`.
///
/// Each round brackets only the newly added vectors against everything kept so far.
pub fn lie_closure<B: Bracket>(alg: &B, generators: &[Vec<u32>]) -> Subspace {
    let mut span = Subspace::zero(*alg.field(), alg.dim());
    let mut kept: Vec<Vec<u32>> = Vec::new();
    let mut frontier: Vec<Vec<u32>> = Vec::new();
    for g in generators {
        if span.insert(g) {
            frontier.push(g.clone());
        }
    }
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        assert!(rounds <= alg.dim() + 1, "closure failed to stabilize");
        kept.extend(frontier.iter().cloned());
        let products: Vec<Vec<u32>> = frontier
            .par_iter()
            .flat_map_iter(|v| kept.iter().map(move |w| alg.bracket(v, w)))
            .filter(|b| !is_zero(b))
            .collect();
        frontier = products.into_iter().filter(|b| span.insert(b)).collect();
    }
    span
}

/// `{y ∈ a : [y, t] ∈ target for every t in tests}`, solved as one kernel computation.
pub fn solve_bracket_constraint<B: Bracket>(
    alg: &B,
    a: &Subspace,
    tests: &[Vec<u32>],
    target: &Subspace,
) -> Result<Subspace> {
    let dim = alg.dim();
    if a.ambient() != dim {
        return Err(Error::AmbientMismatch(a.ambient(), dim));
    }
    if target.ambient() != dim {
        return Err(Error::AmbientMismatch(target.ambient(), dim));
    }
    let field = *alg.field();
    if tests.is_empty() {
        return Ok(a.clone());
    }
    let width = dim * tests.len();
    let images: Vec<Vec<u32>> = a
        .rows()
        .par_iter()
        .map(|r| {
            let mut img = Vec::with_capacity(width);
            for t in tests {
                img.extend(target.reduce(&alg.bracket(r, t)));
            }
            img
        })
        .collect();
    let mut out = Subspace::zero(field, dim);
    for combo in kernel(&field, &images, width) {
        let mut v = vec![0; dim];
        for (row, &c) in a.rows().iter().zip(&combo) {
            axpy(&field, &mut v, c, row);
        }
        out.insert(&v);
    }
    Ok(out)
}

/// `{y ∈ a : [y, n] ⊆ n}`.
pub fn normalizer<B: Bracket>(alg: &B, a: &Subspace, n: &Subspace) -> Result<Subspace> {
    solve_bracket_constraint(alg, a, n.rows(), n)
}

/// The action of a family of elements on `L / base`, in coordinates given by
/// the non-pivot columns of `base`.
pub struct QuotientAction {
    base: Subspace,
    free: Vec<usize>,
    ops: Vec<Vec<Vec<u32>>>,
}

impl QuotientAction {
    /// Fails when some action element does not preserve `base`.
    pub fn new<B: Bracket>(alg: &B, action: &[Vec<u32>], base: &Subspace) -> Result<Self> {
        let dim = alg.dim();
        for (k, g) in action.iter().enumerate() {
            if base.rows().iter().any(|r| !base.contains(&alg.bracket(g, r))) {
                return Err(Error::IllDefinedQuotient(format!(
                    "action element {k} does not preserve the defining subspace"
                )));
            }
        }
        let free = base.complement_columns();
        let ops = action
            .iter()
            .map(|g| {
                free.iter()
                    .map(|&c| {
                        let r = base.reduce(&alg.bracket(g, &super::unit(dim, c)));
                        free.iter().map(|&f| r[f]).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(QuotientAction {
            base: base.clone(),
            free,
            ops,
        })
    }

    fn project(&self, v: &[u32]) -> Vec<u32> {
        let r = self.base.reduce(v);
        self.free.iter().map(|&f| r[f]).collect()
    }

    fn act(&self, op: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
        let field = self.base.field();
        let mut out = vec![0; v.len()];
        for (col, &c) in op.iter().zip(v) {
            if c != 0 {
                super::axpy(field, &mut out, c, col);
            }
        }
        out
    }

    /// Smallest `S ⊇ base` containing `start` and stable under the action.
    pub fn spin(&self, start: &[u32]) -> Subspace {
        let field = *self.base.field();
        let mut small = Subspace::zero(field, self.free.len());
        let mut queue = Vec::new();
        let v = self.project(start);
        if small.insert(&v) {
            queue.push(v);
        }
        while let Some(v) = queue.pop() {
            for op in &self.ops {
                let w = self.act(op, &v);
                if small.insert(&w) {
                    queue.push(w);
                }
            }
        }
        let mut span = self.base.clone();
        for row in small.rows() {
            let mut lifted = vec![0; self.base.ambient()];
            for (&f, &c) in self.free.iter().zip(row) {
                lifted[f] = c;
            }
            span.insert(&lifted);
        }
        span
    }
}

/// Smallest subspace `S ⊇ base` with `start ∈ S` and `[g, S] ⊆ S` for every action element `g`.
///
/// `S / base` is the submodule of the quotient generated by the image of `start`.
/// Fails when some action element does not preserve `base`.
pub fn spin_submodule<B: Bracket>(
    alg: &B,
    action: &[Vec<u32>],
    base: &Subspace,
    start: &[u32],
) -> Result<Subspace> {
    Ok(QuotientAction::new(alg, action, base)?.spin(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit;
    use crate::superalg::{Parity, Shape};

    fn model(n: usize, p: u32) -> KoModel {
        KoModel::new(Shape::contact_default(n, p).unwrap()).unwrap()
    }

    fn pot(m: &KoModel, s: &str) -> Vec<u32> {
        m.coords(&crate::syntax::parse_poly(m.shape(), s).unwrap()).unwrap()
    }

    #[test]
    fn empty_closure_is_zero() {
        let m = model(1, 3);
        assert!(lie_closure(&m, &[]).is_zero_space());
    }

    #[test]
    fn closure_contains_torus_difference() {
        let m = model(2, 3);
        // n = 2: x1,x2 even, x3 = x1′, x4 = x2′, x5 distinguished
        let s = lie_closure(&m, &[pot(&m, "x1*x2"), pot(&m, "x3*x4")]);
        assert!(s.contains(&pot(&m, "x1*x3 - x2*x4")));
        assert!(!s.contains(&pot(&m, "x1*x3")));
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let m = model(1, 3);
        let gens = vec![pot(&m, "x1*x2"), pot(&m, "x2")];
        let s = lie_closure(&m, &gens);
        assert_eq!(lie_closure(&m, s.rows()), s);
        let mut more = gens.clone();
        more.push(pot(&m, "x3"));
        assert!(s.is_subspace_of(&lie_closure(&m, &more)).unwrap());
        // degree -1 closes up onto the Heisenberg part
        let h = lie_closure(&m, &[pot(&m, "x1"), pot(&m, "x2")]);
        assert_eq!(h, m.units(0..3));
    }

    #[test]
    fn normalizer_basics() {
        let m = model(1, 3);
        let even = m.parity_part(Parity::Even);
        let zero = Subspace::zero(*m.field(), m.dim());
        assert_eq!(normalizer(&m, &even, &zero).unwrap(), even);
        let ko0 = m.filtration(0);
        let nor = normalizer(&m, &ko0, &ko0).unwrap();
        assert!(ko0.is_subspace_of(&nor).unwrap());
        let all = Subspace::full(*m.field(), m.dim());
        assert!(normalizer(&m, &all, &Subspace::zero(*m.field(), 3)).is_err());
    }

    #[test]
    fn normalizer_contains_centralizer() {
        let m = model(1, 3);
        let all = Subspace::full(*m.field(), m.dim());
        for i in 0..m.dim() {
            let n = m.units([i]);
            let nor = normalizer(&m, &all, &n).unwrap();
            for j in 0..m.dim() {
                let b = m.bracket(&unit(m.dim(), j), &unit(m.dim(), i));
                if is_zero(&b) {
                    assert!(nor.contains(&unit(m.dim(), j)));
                }
            }
        }
    }

    #[test]
    fn spinning_the_quotient() {
        let m = model(1, 3);
        let ko0 = m.filtration(0);
        let action = ko0.rows().to_vec();
        let top = spin_submodule(&m, &action, &ko0, &pot(&m, "1")).unwrap();
        assert_eq!(top.dim(), m.dim());
        let low = spin_submodule(&m, &action, &ko0, &pot(&m, "x2")).unwrap();
        assert_eq!(low, m.filtration(-1));
        // at n = 1 nothing in degree 0 moves D(x1) back to D(x2)
        let line = spin_submodule(&m, &action, &ko0, &pot(&m, "x1")).unwrap();
        assert_eq!(line.dim(), ko0.dim() + 1);
        let zero = spin_submodule(&m, &action, &ko0, &vec![0; m.dim()]).unwrap();
        assert_eq!(zero, ko0);
        let bad = vec![pot(&m, "x1")];
        assert!(matches!(
            spin_submodule(&m, &bad, &ko0, &pot(&m, "1")),
            Err(Error::IllDefinedQuotient(_))
        ));
    }
}
