//! Ad-nilpotency with certificates.
//!
//! A truncated model is an ad-invariant subalgebra of the full algebra, so a
//! non-nilpotent truncated `ad y` (or an eigenvector with nonzero eigenvalue)
//! certifies non-nilpotency outright. The converse fails for elements with a
//! negative-degree part: those are compared across several heights.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ko::{KoModel, Potential};
use crate::superalg::{Parity, Poly};

use super::{is_zero, support, Matrix, SparseOp, SparseVec};

/// `ad y` on the basis of a truncated model.
#[derive(Debug, Clone)]
pub struct AdMatrix {
    pub element: Potential,
    pub op: SparseOp,
}

impl AdMatrix {
    pub fn matrix(&self) -> Matrix {
        self.op.to_matrix()
    }
}

pub fn ad_matrix(model: &KoModel, y: &Potential) -> Result<AdMatrix> {
    let v = model.coords(y.poly())?;
    Ok(AdMatrix {
        element: y.clone(),
        op: model.ad_op(&v),
    })
}

/// Heights at which indices are compared, and the largest index tried there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilPolicy {
    pub heights: Vec<Vec<u32>>,
    pub max_index: usize,
}

impl NilPolicy {
    /// Heights `t` and `t + (1,...,1)`, index cap `4p`.
    pub fn standard(model: &KoModel) -> Self {
        let t = model.shape().heights().to_vec();
        let raised = t.iter().map(|h| h + 1).collect();
        NilPolicy {
            heights: vec![t, raised],
            max_index: 4 * model.shape().p() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightIndex {
    pub heights: Vec<u32>,
    pub dim: usize,
    /// `None` when the index exceeds the cap.
    pub index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NilCertificate {
    /// Every component has principal degree at least 1.
    Structural,
    /// Same index at every tested height.
    StableIndex,
}

/// `(ad y)^k D_KO(x_j^(k+1))` is nonzero for each tested `k`: its lowest
/// component is a nonzero multiple of `D_KO(x_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceWitness {
    pub direction: usize,
    pub coefficient: u32,
    pub tested: Vec<(Vec<u32>, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NilWitness {
    /// `[y, z] = λ z` with `λ ≠ 0`.
    Eigen {
        z: SparseVec,
        z_text: String,
        lambda: u32,
    },
    /// The index grows with the height.
    GrowingIndex {
        indices: Vec<HeightIndex>,
        sequence: Option<SequenceWitness>,
    },
    /// `(ad y)^steps e_column ≠ 0` with `steps` at least the dimension.
    Persistent {
        heights: Vec<u32>,
        column: usize,
        steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NilVerdict {
    NilpotentStable {
        index: usize,
        heights: Vec<HeightIndex>,
        certificate: NilCertificate,
    },
    NotNilpotent {
        witness: NilWitness,
    },
    Inconclusive {
        diagnostic: String,
        heights: Vec<HeightIndex>,
    },
}

impl NilVerdict {
    pub fn is_nilpotent(&self) -> bool {
        matches!(self, NilVerdict::NilpotentStable { .. })
    }

    pub fn is_not_nilpotent(&self) -> bool {
        matches!(self, NilVerdict::NotNilpotent { .. })
    }
}

/// Classifies elements of a base model, building taller models on demand.
pub struct NilOracle<'a> {
    base: &'a KoModel,
    policy: NilPolicy,
    taller: Vec<OnceLock<KoModel>>,
}

impl<'a> NilOracle<'a> {
    pub fn new(base: &'a KoModel, policy: NilPolicy) -> Result<Self> {
        if policy.heights.is_empty() {
            return Err(Error::EmptyPolicy);
        }
        let t = base.shape().heights();
        for h in &policy.heights {
            if h.len() != t.len() || h.iter().zip(t).any(|(a, b)| a < b) {
                return Err(Error::InvalidShape(format!(
                    "policy height {h:?} does not contain {t:?}"
                )));
            }
        }
        let taller = policy.heights.iter().map(|_| OnceLock::new()).collect();
        Ok(NilOracle {
            base,
            policy,
            taller,
        })
    }

    pub fn standard(base: &'a KoModel) -> Self {
        Self::new(base, NilPolicy::standard(base)).expect("standard policy is valid")
    }

    pub fn base(&self) -> &KoModel {
        self.base
    }

    pub fn policy(&self) -> &NilPolicy {
        &self.policy
    }

    fn model_at(&self, k: usize) -> Result<&KoModel> {
        let h = &self.policy.heights[k];
        if h.as_slice() == self.base.shape().heights() {
            return Ok(self.base);
        }
        if let Some(m) = self.taller[k].get() {
            return Ok(m);
        }
        let shape = crate::superalg::Shape::contact(self.base.n(), h.clone(), self.base.shape().p())?;
        let m = KoModel::new(shape)?;
        Ok(self.taller[k].get_or_init(|| m))
    }

    fn lift(&self, y: &[u32], target: &KoModel) -> Result<Vec<u32>> {
        let poly = self.base.poly(y);
        target.coords(&self.base.shape().embed(&poly, target.shape())?)
    }

    fn index_at(&self, y: &[u32], k: usize, cap: usize) -> Result<HeightIndex> {
        let model = self.model_at(k)?;
        let lifted = self.lift(y, model)?;
        Ok(HeightIndex {
            heights: model.shape().heights().to_vec(),
            dim: model.dim(),
            index: model.ad_op(&lifted).nilpotency_index(cap),
        })
    }

    fn index_for(&self, y: &[u32], heights: &[u32], cap: usize) -> Result<HeightIndex> {
        if heights == self.base.shape().heights() {
            let op = self.base.ad_op(y);
            return Ok(HeightIndex {
                heights: heights.to_vec(),
                dim: self.base.dim(),
                index: op.nilpotency_index(cap),
            });
        }
        let k = self
            .policy
            .heights
            .iter()
            .position(|h| h == heights)
            .ok_or_else(|| Error::InvalidShape(format!("untested height {heights:?}")))?;
        self.index_at(y, k, cap)
    }

    pub fn classify_potential(&self, y: &Potential) -> Result<NilVerdict> {
        self.classify(&self.base.coords(y.poly())?)
    }

    /// Verdict for `ad y`, `y` given in base coordinates.
    pub fn classify(&self, y: &[u32]) -> Result<NilVerdict> {
        let base = self.base;
        if self.base.lowest_degree(y).is_none_or(|d| d >= 1) {
            let h = self.index_for(y, base.shape().heights(), usize::MAX)?;
            let index = h.index.expect("positive degree acts nilpotently");
            return Ok(NilVerdict::NilpotentStable {
                index,
                heights: vec![h],
                certificate: NilCertificate::Structural,
            });
        }
        if let Some(w) = self.eigen_witness(y) {
            return Ok(NilVerdict::NotNilpotent { witness: w });
        }
        let op = base.ad_op(y);
        if op.nilpotency_index(base.dim() + 1).is_none() {
            let column = (0..base.dim())
                .find(|&j| {
                    let mut v = super::unit(base.dim(), j);
                    for _ in 0..base.dim() {
                        v = op.apply(&v);
                    }
                    !is_zero(&v)
                })
                .expect("some column survives");
            return Ok(NilVerdict::NotNilpotent {
                witness: NilWitness::Persistent {
                    heights: base.shape().heights().to_vec(),
                    column,
                    steps: base.dim(),
                },
            });
        }
        let indices = (0..self.policy.heights.len())
            .map(|k| self.index_at(y, k, self.policy.max_index))
            .collect::<Result<Vec<_>>>()?;
        let values: Vec<Option<usize>> = indices.iter().map(|h| h.index).collect();
        if values.iter().all(|v| v.is_some() && *v == values[0]) {
            return Ok(NilVerdict::NilpotentStable {
                index: values[0].unwrap(),
                heights: indices,
                certificate: NilCertificate::StableIndex,
            });
        }
        let lowest = self.policy.heights.iter().map(|h| h.iter().sum::<u32>()).min();
        let first = (0..indices.len())
            .find(|&k| Some(self.policy.heights[k].iter().sum::<u32>()) == lowest)
            .unwrap();
        if values[first].is_none() {
            return Ok(NilVerdict::Inconclusive {
                diagnostic: format!(
                    "index exceeds {} already at the lowest height",
                    self.policy.max_index
                ),
                heights: indices,
            });
        }
        let sequence = self.sequence_witness(y)?;
        Ok(NilVerdict::NotNilpotent {
            witness: NilWitness::GrowingIndex { indices, sequence },
        })
    }

    /// An eigenvector of `ad y` with nonzero eigenvalue: first among basis
    /// vectors, then in each eigenspace over `F_p`.
    pub fn eigen_witness(&self, y: &[u32]) -> Option<NilWitness> {
        let base = self.base;
        let field = *base.field();
        let op = base.ad_op(y);
        for (j, col) in op.columns().iter().enumerate() {
            if let [(i, lambda)] = col.as_slice() {
                if *i == j {
                    return Some(self.eigen(vec![(j, *lambda)], *lambda));
                }
            }
        }
        let m = op.to_matrix();
        for lambda in 1..field.p() {
            if let Some(z) = m.shifted(lambda).null_space().into_iter().next() {
                return Some(self.eigen(support(&z).collect(), lambda));
            }
        }
        None
    }

    fn eigen(&self, z: SparseVec, lambda: u32) -> NilWitness {
        let dense = super::matrix::to_dense(&z, self.base.dim());
        NilWitness::Eigen {
            z_text: self.base.poly(&dense).to_string(),
            z,
            lambda,
        }
    }

    /// For even `y` whose degree −1 part has a nonzero coefficient on `D_KO(x_{j′})`.
    fn sequence_witness(&self, y: &[u32]) -> Result<Option<SequenceWitness>> {
        let base = self.base;
        if base.vector_parity(y) != Some(Parity::Even) {
            return Ok(None);
        }
        let n = base.n();
        let low = base.poly(&base.component(y, -1));
        let Some((direction, coefficient)) = (1..=n).find_map(|j| {
            let var = base.shape().var(j + n).ok()?;
            let (m, _) = var.terms().next()?;
            let c = low.coeff(m);
            (c != 0).then_some((j, c))
        }) else {
            return Ok(None);
        };
        let mut tested = Vec::new();
        for k in 0..self.policy.heights.len() {
            let model = self.model_at(k)?;
            let bound = model.shape().bounds()[direction - 1] as usize;
            tested.push((model.shape().heights().to_vec(), bound.saturating_sub(1)));
        }
        let w = SequenceWitness {
            direction,
            coefficient,
            tested,
        };
        Ok(self.check_sequence(y, &w)?.then_some(w))
    }

    fn check_sequence(&self, y: &[u32], w: &SequenceWitness) -> Result<bool> {
        for (heights, max_k) in &w.tested {
            let k = self
                .policy
                .heights
                .iter()
                .position(|h| h == heights)
                .ok_or_else(|| Error::InvalidShape(format!("untested height {heights:?}")))?;
            let model = self.model_at(k)?;
            let op = model.ad_op(&self.lift(y, model)?);
            for steps in 1..=*max_k {
                let z = model.shape().divided_power(w.direction, steps as u32 + 1)?;
                let mut v = model.coords(&z)?;
                for _ in 0..steps {
                    v = op.apply(&v);
                }
                if is_zero(&v) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Re-checks a verdict from its own data.
    pub fn verify(&self, y: &[u32], verdict: &NilVerdict) -> Result<bool> {
        let base = self.base;
        match verdict {
            NilVerdict::NilpotentStable { index, heights, .. } => {
                let Some(last) = heights.last() else {
                    return Ok(false);
                };
                Ok(self.index_for(y, &last.heights, *index + 1)?.index == Some(*index))
            }
            NilVerdict::NotNilpotent { witness } => match witness {
                NilWitness::Eigen { z, lambda, .. } => {
                    let z = super::matrix::to_dense(z, base.dim());
                    let mut scaled = z.clone();
                    super::scale(base.field(), &mut scaled, *lambda);
                    Ok(*lambda != 0 && !is_zero(&z) && base.bracket(y, &z) == scaled)
                }
                NilWitness::Persistent {
                    column, steps, ..
                } => {
                    let op = base.ad_op(y);
                    let mut v = super::unit(base.dim(), *column);
                    for _ in 0..*steps {
                        v = op.apply(&v);
                    }
                    Ok(*steps >= base.dim() && !is_zero(&v))
                }
                NilWitness::GrowingIndex { indices, sequence } => {
                    let mut seen = Vec::new();
                    for h in indices {
                        let again = self.index_for(y, &h.heights, self.policy.max_index)?;
                        if again != *h {
                            return Ok(false);
                        }
                        seen.push(again.index);
                    }
                    let growing = seen.iter().any(|v| *v != seen[0]);
                    let seq_ok = match sequence {
                        Some(w) => self.check_sequence(y, w)?,
                        None => true,
                    };
                    Ok(growing && seq_ok)
                }
            },
            NilVerdict::Inconclusive { .. } => Ok(false),
        }
    }
}

/// Nilpotency of the truncated matrix only, with no certificate.
pub fn raw_nilpotent(model: &KoModel, y: &[u32]) -> bool {
    model.ad_op(y).nilpotency_index(model.dim() + 1).is_some()
}

/// Convenience for a single potential in its own model.
pub fn classify_poly(model: &KoModel, a: &Poly) -> Result<NilVerdict> {
    NilOracle::standard(model).classify(&model.coords(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalg::Shape;
    use crate::syntax::parse_poly;

    fn model(n: usize, p: u32) -> KoModel {
        KoModel::new(Shape::contact_default(n, p).unwrap()).unwrap()
    }

    fn v(m: &KoModel, s: &str) -> Vec<u32> {
        m.coords(&parse_poly(m.shape(), s).unwrap()).unwrap()
    }

    #[test]
    fn zero_is_nilpotent_of_index_one() {
        let m = model(1, 3);
        let o = NilOracle::standard(&m);
        match o.classify(&vec![0; m.dim()]).unwrap() {
            NilVerdict::NilpotentStable { index, .. } => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
        assert!(ad_matrix(&m, &Potential::new(Poly::zero()).unwrap()).unwrap().op.is_zero());
    }

    #[test]
    fn ad_of_d_one_squares_to_zero() {
        let m = model(1, 3);
        let one = Potential::new(m.shape().one()).unwrap();
        let a = ad_matrix(&m, &one).unwrap().matrix();
        // independent: compare against brackets computed through the model
        for j in 0..m.dim() {
            let col = m.bracket(&v(&m, "1"), &super::super::unit(m.dim(), j));
            assert_eq!(a.column(j), col);
        }
        let sq = a.mul(&a);
        let expect: Vec<Vec<u32>> = (0..m.dim())
            .map(|j| {
                let once = m.bracket(&v(&m, "1"), &super::super::unit(m.dim(), j));
                m.bracket(&v(&m, "1"), &once)
            })
            .collect();
        assert_eq!(sq.columns(), expect);
        // [D(1), D(1)] = 0, so (ad D(1))^2 = ad [D(1), D(1)] / 2 vanishes
        assert!(sq.is_zero());
    }

    #[test]
    fn torus_element_is_diagonal() {
        let m = model(2, 3);
        let a = ad_matrix(&m, &Potential::new(parse_poly(m.shape(), "x1*x3").unwrap()).unwrap()).unwrap();
        for (j, col) in a.op.columns().iter().enumerate() {
            assert!(col.iter().all(|&(i, _)| i == j));
        }
    }

    #[test]
    fn off_diagonal_quadratics_are_nilpotent() {
        for p in [3, 5] {
            let m = model(2, p);
            let o = NilOracle::standard(&m);
            for s in ["x1*x2", "x1*x4", "x2*x3", "x3*x4", "x1^(2)", "x2^(2)"] {
                let y = v(&m, s);
                let verdict = o.classify(&y).unwrap();
                match &verdict {
                    NilVerdict::NilpotentStable { index, .. } => {
                        assert!(*index <= 2 * p as usize, "{s}: {index}")
                    }
                    other => panic!("{s}: {other:?}"),
                }
                assert!(o.verify(&y, &verdict).unwrap());
            }
        }
    }

    #[test]
    fn torus_elements_have_eigen_witnesses() {
        let m = model(2, 3);
        let o = NilOracle::standard(&m);
        for s in ["x1*x3", "x5", "x1*x3 + 2*x2*x4"] {
            let y = v(&m, s);
            let verdict = o.classify(&y).unwrap();
            assert!(matches!(
                verdict,
                NilVerdict::NotNilpotent {
                    witness: NilWitness::Eigen { .. }
                }
            ));
            assert!(o.verify(&y, &verdict).unwrap(), "{s}");
        }
        // [D(x1 x3), D(x1 x5)] = -D(x1 x5)
        let y = v(&m, "x1*x3");
        let z = v(&m, "x1*x5");
        let mut minus = z.clone();
        crate::linalg::scale(m.field(), &mut minus, 2);
        assert_eq!(m.bracket(&y, &z), minus);
        // [D(x5), D(1)] = 2 D(1)
        assert_eq!(m.bracket(&v(&m, "x5"), &v(&m, "1")), v(&m, "2"));
    }

    #[test]
    fn negative_degree_translation_grows() {
        let m = model(1, 3);
        let o = NilOracle::standard(&m);
        let y = v(&m, "x2");
        assert!(raw_nilpotent(&m, &y));
        let verdict = o.classify(&y).unwrap();
        match &verdict {
            NilVerdict::NotNilpotent {
                witness: NilWitness::GrowingIndex { indices, sequence },
            } => {
                assert!(indices[0].index < indices[1].index || indices[1].index.is_none());
                let s = sequence.as_ref().expect("sequence witness");
                assert_eq!(s.direction, 1);
            }
            other => panic!("{other:?}"),
        }
        assert!(o.verify(&y, &verdict).unwrap());
    }

    #[test]
    fn policy_validation() {
        let m = model(1, 3);
        let empty = NilPolicy {
            heights: vec![],
            max_index: 12,
        };
        assert!(matches!(NilOracle::new(&m, empty), Err(Error::EmptyPolicy)));
    }

    #[test]
    fn verdict_json_round_trip() {
        let m = model(1, 3);
        let verdict = NilOracle::standard(&m).classify(&v(&m, "x1*x2")).unwrap();
        let json = serde_json::to_string(&verdict).unwrap();
        assert!(json.contains("\"verdict\":\"not_nilpotent\""));
        let back: NilVerdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back, verdict);
    }
}
