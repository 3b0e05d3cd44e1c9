use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ko::KoModel;
use crate::linalg::{is_zero, support, to_dense, unit, Bracket, NilOracle, NilVerdict, SparseOp, SparseVec, Subspace};
use crate::scalars::Field;
use crate::superalg::Parity;

use super::{describe, InvariantReport, Mode, Verdict};

/// A bracket-preserving bijection of a truncated model, stored by the images
/// of the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoMap {
    op: SparseOp,
    provenance: String,
}

impl AutoMap {
    pub fn identity(model: &KoModel) -> Self {
        let cols = (0..model.dim()).map(|j| vec![(j, 1)]).collect();
        AutoMap {
            op: SparseOp::new(*model.field(), model.dim(), cols),
            provenance: "identity".into(),
        }
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn op(&self) -> &SparseOp {
        &self.op
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.op.columns()[j]
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        self.op.apply(v)
    }

    pub fn image(&self, s: &Subspace) -> Subspace {
        s.image(s.ambient(), |v| self.apply(v))
    }

    /// `self ∘ other`, re-verified.
    pub fn compose(&self, other: &AutoMap, model: &KoModel) -> Result<AutoMap> {
        let dim = model.dim();
        let cols = (0..dim)
            .map(|j| support(&self.apply(&to_dense(other.column(j), dim))).collect())
            .collect();
        let map = AutoMap {
            op: SparseOp::new(*model.field(), dim, cols),
            provenance: format!("({}) o ({})", self.provenance, other.provenance),
        };
        verify_automorphism(model, &map)?;
        Ok(map)
    }
}

/// Invertible, parity-preserving, and `φ[e_i, e_j] = [φ e_i, φ e_j]` for all basis pairs.
pub fn verify_automorphism(model: &KoModel, map: &AutoMap) -> Result<()> {
    let dim = model.dim();
    let field = *model.field();
    for j in 0..dim {
        let col = to_dense(map.column(j), dim);
        if model.vector_parity(&col) != Some(model.parity(j)) || is_zero(&col) {
            return Err(Error::NotAutomorphism(format!(
                "image of {} has the wrong parity",
                describe(model, &unit(dim, j))
            )));
        }
    }
    let rank = Subspace::span(field, dim, (0..dim).map(|j| to_dense(map.column(j), dim))).dim();
    if rank != dim {
        return Err(Error::NotAutomorphism(format!("rank {rank} < {dim}")));
    }
    model.ensure_table();
    let bad = (0..dim).into_par_iter().find_map_any(|i| {
        let mut lhs = vec![0u32; dim];
        let mut rhs = vec![0u32; dim];
        for j in 0..dim {
            lhs.iter_mut().for_each(|c| *c = 0);
            rhs.iter_mut().for_each(|c| *c = 0);
            for &(k, c) in model.bracket_basis(i, j) {
                for &(l, d) in map.column(k) {
                    rhs[l] = field.mul_add(c, d, rhs[l]);
                }
            }
            for &(a, ca) in map.column(i) {
                let row = model.row(a);
                for &(b, cb) in map.column(j) {
                    let c = field.mul(ca, cb);
                    for &(k, t) in &row[b] {
                        lhs[k] = field.mul_add(c, t, lhs[k]);
                    }
                }
            }
            if lhs != rhs {
                return Some((i, j));
            }
        }
        None
    });
    match bad {
        None => Ok(()),
        Some((i, j)) => Err(Error::NotAutomorphism(format!(
            "bracket of {} and {} is not preserved",
            describe(model, &unit(dim, i)),
            describe(model, &unit(dim, j))
        ))),
    }
}

/// `exp(ad z) = Σ_{j<k} (ad z)^j / j!` for an even `z` certified nilpotent of index `k < p`.
pub fn make_exp_automorphism(oracle: &NilOracle, z: &[u32]) -> Result<AutoMap> {
    let model = oracle.base();
    let field: Field = *model.field();
    let dim = model.dim();
    if is_zero(z) {
        return Ok(AutoMap::identity(model));
    }
    if model.vector_parity(z) != Some(Parity::Even) {
        return Err(Error::ExpRefused(format!("{} is not even", describe(model, z))));
    }
    let index = match oracle.classify(z)? {
        NilVerdict::NilpotentStable { index, .. } => index,
        other => {
            return Err(Error::ExpRefused(format!(
                "{} is not certified nilpotent: {other:?}",
                describe(model, z)
            )))
        }
    };
    if index >= field.p() as usize {
        return Err(Error::ExpRefused(format!(
            "nilpotency index {index} of {} is not below p",
            describe(model, z)
        )));
    }
    let ad = model.ad_op(z);
    let inv_fact: Vec<u32> = (0..index)
        .map(|j| field.inv(field.factorial(j as u32)).expect("j < p"))
        .collect();
    let cols = (0..dim)
        .map(|i| {
            let mut acc = unit(dim, i);
            let mut v = acc.clone();
            for &c in &inv_fact[1..] {
                v = ad.apply(&v);
                crate::linalg::axpy(&field, &mut acc, c, &v);
            }
            support(&acc).collect()
        })
        .collect();
    let map = AutoMap {
        op: SparseOp::new(field, dim, cols),
        provenance: format!("exp ad {}", describe(model, z)),
    };
    verify_automorphism(model, &map)?;
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyConfig {
    pub seed: u64,
    pub count: usize,
    pub max_factors: usize,
}

impl FamilyConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        FamilyConfig {
            seed,
            count,
            max_factors: 3,
        }
    }
}

/// Exponentials of random even elements of positive degree or nilpotent
/// degree-0 basis elements, and products of up to `max_factors` of them.
/// Candidates that fail the construction checks are skipped.
pub fn seeded_family(oracle: &NilOracle, cfg: FamilyConfig) -> Result<Vec<AutoMap>> {
    let model = oracle.base();
    let dim = model.dim();
    let p = model.shape().p();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut candidates: Vec<usize> = Vec::new();
    for i in 0..dim {
        if model.parity(i) != Parity::Even {
            continue;
        }
        let d = model.degree(i);
        if d >= 1 || (d == 0 && oracle.classify(&unit(dim, i))?.is_nilpotent()) {
            candidates.push(i);
        }
    }
    let mut generators: Vec<AutoMap> = Vec::new();
    let target = cfg.count.clamp(1, 24);
    let mut attempts = 0;
    while generators.len() < target && attempts < 40 * target && !candidates.is_empty() {
        attempts += 1;
        let mut z = vec![0u32; dim];
        let a = *candidates.choose(&mut rng).unwrap();
        z[a] = rng.gen_range(1..p);
        if rng.gen_bool(0.5) {
            let same: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&b| b != a && model.degree(b) == model.degree(a))
                .collect();
            if let Some(&b) = same.choose(&mut rng) {
                z[b] = rng.gen_range(1..p);
            }
        }
        if let Ok(map) = make_exp_automorphism(oracle, &z) {
            if !generators.contains(&map) {
                generators.push(map);
            }
        }
    }
    if generators.is_empty() {
        return Err(Error::ExpRefused("no exponential passed the construction checks".into()));
    }
    let mut family = generators.clone();
    let mut tries = 0;
    while family.len() < cfg.count && tries < 20 * cfg.count {
        tries += 1;
        let factors = rng.gen_range(2..=cfg.max_factors.max(2));
        let mut map = generators.choose(&mut rng).unwrap().clone();
        for _ in 1..factors {
            let g = generators.choose(&mut rng).unwrap();
            map = map.compose(g, model)?;
        }
        if !family.contains(&map) {
            family.push(map);
        }
    }
    family.truncate(cfg.count);
    Ok(family)
}

/// `φ(KO_i) = KO_i` for every `i`. Containment suffices since `φ` is injective.
pub fn check_filtration_invariance(model: &KoModel, map: &AutoMap) -> InvariantReport {
    let mut failures = Vec::new();
    let levels: Vec<i32> = (-2..=model.max_degree()).collect();
    for &i in &levels {
        for j in model.filtration(i).pivots().iter().copied() {
            let col = to_dense(map.column(j), model.dim());
            if model.lowest_degree(&col).is_some_and(|d| d < i) {
                failures.push(format!("KO_{i}: {} leaves the filtration", describe(model, &unit(model.dim(), j))));
                break;
            }
        }
    }
    let mut r = InvariantReport::cases(
        "filtration-invariance",
        "automorphisms preserve every filtration space KO_i",
        levels.len(),
        failures,
    );
    r.diagnostic = Some(map.provenance.clone());
    r
}

/// `φ(S) = S`, checked as containment.
pub fn check_subspace_invariance(model: &KoModel, map: &AutoMap, name: &str, s: &Subspace) -> InvariantReport {
    let mut r = InvariantReport::new(format!("invariance-{name}"), Mode::Certified, format!("{name} is invariant under automorphisms"));
    r.computed_dim = s.dim();
    r.expected_dim = s.dim();
    for row in s.rows() {
        let img = map.apply(row);
        if !s.contains(&img) {
            r.verdict = Verdict::Mismatch;
            r.witnesses.push(format!("{} maps outside {name}", describe(model, row)));
            break;
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rigidity {
    pub agree_on_minus_one: bool,
    pub equal: bool,
}

impl Rigidity {
    /// Agreement on `KO_[-1]` forces equality.
    pub fn consistent(&self) -> bool {
        !self.agree_on_minus_one || self.equal
    }
}

pub fn rigidity_check(model: &KoModel, phi: &AutoMap, psi: &AutoMap) -> Rigidity {
    let agree_on_minus_one = model
        .component_range(-1)
        .all(|j| phi.column(j) == psi.column(j));
    Rigidity {
        agree_on_minus_one,
        equal: phi.op == psi.op,
    }
}

/// `dim KO_[-2] + dim KO_[-1]`, which is `2n + 1`.
pub fn classification_invariant(model: &KoModel) -> usize {
    model.low_degree_dimension()
}

/// A model with its basis relabelled: position `i` holds old basis element `perm[i]`.
pub struct Permuted<'a> {
    model: &'a KoModel,
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl<'a> Permuted<'a> {
    pub fn new(model: &'a KoModel, perm: Vec<usize>) -> Self {
        let mut inverse = vec![0; perm.len()];
        for (i, &j) in perm.iter().enumerate() {
            inverse[j] = i;
        }
        Permuted { model, perm, inverse }
    }

    pub fn shuffled(model: &'a KoModel, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..model.dim()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::new(model, perm)
    }

    /// Old coordinates to new.
    pub fn forward(&self, v: &[u32]) -> Vec<u32> {
        self.perm.iter().map(|&j| v[j]).collect()
    }

    /// New coordinates to old.
    pub fn back(&self, v: &[u32]) -> Vec<u32> {
        self.inverse.iter().map(|&i| v[i]).collect()
    }

    pub fn old_index(&self, i: usize) -> usize {
        self.perm[i]
    }
}

impl Bracket for Permuted<'_> {
    fn field(&self) -> &Field {
        self.model.field()
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn bracket(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        self.forward(&self.model.bracket(&self.back(x), &self.back(y)))
    }
}
