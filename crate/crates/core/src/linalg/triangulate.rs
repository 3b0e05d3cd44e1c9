use serde::Serialize;

use crate::scalars::Field;
use crate::superalg::Parity;

use super::{kernel, Matrix, Subspace};

/// `0 = V_0 ⊂ V_1 ⊂ ... ⊂ V_m = V` with every operator mapping `V_i` into `V_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flag {
    pub levels: Vec<Subspace>,
}

impl Flag {
    /// Direct check of `x(V_i) ⊆ V_{i-1}` for every operator and level.
    pub fn is_strict_for(&self, ops: &[Matrix]) -> bool {
        self.levels.windows(2).all(|w| {
            ops.iter()
                .all(|x| w[1].rows().iter().all(|r| w[0].contains(&x.apply(r))))
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(Subspace::dim).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TriangulationFailure {
    /// The super-commutator of two operators leaves their span.
    NotClosed { left: usize, right: usize },
    /// Operator `offender` is not nilpotent.
    NotNilpotent { offender: usize },
    /// The common-kernel chain stalls below the whole space.
    Stalled { reached: usize, dim: usize },
}

fn flatten(m: &Matrix) -> Vec<u32> {
    (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| m.get(i, j))).collect()
}

fn super_commutator(a: &Matrix, pa: Parity, b: &Matrix, pb: Parity) -> Matrix {
    let mut c = a.mul(b);
    let sign = a.field().sign(pa.bit() * pb.bit());
    c.add_scaled(&b.mul(a), a.field().neg(sign));
    c
}

/// Builds a strict flag by iterated common-kernel extraction:
/// `V_i = {v : x v ∈ V_{i-1} for every x}`.
///
/// The operators must be square of one size, carry their parities, and span a
/// space closed under super-commutators.
pub fn strict_triangulation(
    field: Field,
    ops: &[(Matrix, Parity)],
    dim: usize,
) -> std::result::Result<Flag, TriangulationFailure> {
    for (k, (x, _)) in ops.iter().enumerate() {
        assert_eq!((x.rows(), x.cols()), (dim, dim), "operator {k} has the wrong size");
        if x.nilpotency_index(dim + 1).is_none() {
            return Err(TriangulationFailure::NotNilpotent { offender: k });
        }
    }
    let span = Subspace::span(field, dim * dim, ops.iter().map(|(x, _)| flatten(x)));
    for (i, (a, pa)) in ops.iter().enumerate() {
        for (j, (b, pb)) in ops.iter().enumerate().skip(i) {
            if !span.contains(&flatten(&super_commutator(a, *pa, b, *pb))) {
                return Err(TriangulationFailure::NotClosed { left: i, right: j });
            }
        }
    }
    let mut levels = vec![Subspace::zero(field, dim)];
    loop {
        let prev = levels.last().unwrap();
        if prev.dim() == dim {
            return Ok(Flag { levels });
        }
        let images: Vec<Vec<u32>> = (0..dim)
            .map(|j| {
                let e = super::unit(dim, j);
                ops.iter().flat_map(|(x, _)| prev.reduce(&x.apply(&e))).collect()
            })
            .collect();
        let next = Subspace::span(field, dim, kernel(&field, &images, dim * ops.len()));
        if next.dim() == prev.dim() {
            return Err(TriangulationFailure::Stalled {
                reached: prev.dim(),
                dim,
            });
        }
        levels.push(next);
    }
}
