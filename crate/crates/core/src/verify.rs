//! The verification suites behind `kolab verify`.
//!
//! `s1` checks the algebra itself, `s2` the nilpotency verdicts, `s3` the
//! invariant subspaces and the filtration, `s4` automorphisms and the
//! classification invariant. Checks run in parallel; reports come back
//! sorted by name.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::invariants::{
    check_filtration_invariance, check_subspace_invariance, classification_invariant, compute_invariants,
    compute_nil_degree0, describe, filtration_recover, rigidity_check, seeded_family,
    unique_irreducible_check, FamilyConfig, InvariantReport, Mode, Permuted, QTarget, SweepPolicy, Verdict,
};
use crate::ko::{KoModel, Potential};
use crate::linalg::{lie_closure, solve_bracket_constraint, unit, Bracket, NilOracle, NilVerdict, Subspace};
use crate::superalg::{Parity, Poly, Shape};
use crate::syntax::parse_poly;
use crate::witt::{mu, prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    S1,
    S2,
    S3,
    S4,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all" => Ok(Suite::All),
            "s1" => Ok(Suite::S1),
            "s2" => Ok(Suite::S2),
            "s3" => Ok(Suite::S3),
            "s4" => Ok(Suite::S4),
            _ => Err(format!("unknown suite '{s}' (expected all, s1, s2, s3 or s4)")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::S1 => "s1",
            Suite::S2 => "s2",
            Suite::S3 => "s3",
            Suite::S4 => "s4",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub mode: Mode,
    pub seed: u64,
    pub automorphisms: usize,
    /// Whether a conditional verdict counts as a pass.
    pub conditional_passes: bool,
}

impl VerifyConfig {
    /// Conditional verdicts pass in raw mode and fail in certified mode.
    pub fn new(mode: Mode, seed: u64) -> Self {
        VerifyConfig {
            mode,
            seed,
            automorphisms: 20,
            conditional_passes: mode == Mode::Raw,
        }
    }

    pub fn passes(&self, r: &InvariantReport) -> bool {
        match r.verdict {
            Verdict::Match => true,
            Verdict::Conditional => self.conditional_passes,
            Verdict::Mismatch => false,
        }
    }
}

/// Which pairs or triples a check walks through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

impl Coverage {
    fn tuples(self, dim: usize, arity: usize) -> Vec<Vec<usize>> {
        match self {
            Coverage::Exhaustive => {
                let total = dim.pow(arity as u32);
                (0..total)
                    .map(|mut code| {
                        let mut t = vec![0; arity];
                        for slot in t.iter_mut().rev() {
                            *slot = code % dim;
                            code /= dim;
                        }
                        t
                    })
                    .collect()
            }
            Coverage::Sampled { seed, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| (0..arity).map(|_| rng.gen_range(0..dim)).collect())
                    .collect()
            }
        }
    }
}

fn potential(shape: &Shape, text: &str) -> Result<Potential> {
    Potential::new(parse_poly(shape, text)?)
}

fn sign_of(model: &KoModel, a: Parity, b: Parity) -> u32 {
    model.field().sign(a.bit() * b.bit())
}

/// `D_KO([a, b]) = [D_KO(a), D_KO(b)]` as derivations.
pub fn operator_identity(model: &KoModel, coverage: Coverage) -> Result<InvariantReport> {
    let shape = model.shape();
    let pairs = coverage.tuples(model.dim(), 2);
    let failures: Vec<String> = pairs
        .par_iter()
        .map(|t| -> Result<Option<String>> {
            let (a, b) = (model.potential(t[0]), model.potential(t[1]));
            let lhs = shape.d_ko_expand(&shape.bracket_ko(&a, &b)?)?;
            let rhs = shape.bracket_w(&shape.d_ko_expand(&a)?, &shape.d_ko_expand(&b)?)?;
            Ok((lhs != rhs).then(|| format!("D_KO([{a}, {b}]) differs from the commutator")))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(InvariantReport::cases(
        "s1.operator-identity",
        "the potential bracket is the commutator of the operators D_KO",
        pairs.len(),
        failures,
    ))
}

/// `[x, y] = -(-1)^{|x||y|} [y, x]` on basis pairs.
pub fn super_antisymmetry(model: &KoModel) -> InvariantReport {
    let field = *model.field();
    let dim = model.dim();
    model.ensure_table();
    let mut failures = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            let s = field.neg(sign_of(model, model.parity(i), model.parity(j)));
            let mut swapped = model.bracket(&unit(dim, j), &unit(dim, i));
            crate::linalg::scale(&field, &mut swapped, s);
            if model.bracket(&unit(dim, i), &unit(dim, j)) != swapped {
                failures.push(format!("{} and {}", describe(model, &unit(dim, i)), describe(model, &unit(dim, j))));
            }
        }
    }
    InvariantReport::cases(
        "s1.super-antisymmetry",
        "[x, y] = -(-1)^(|x||y|) [y, x]",
        dim * (dim + 1) / 2,
        failures,
    )
}

/// `[x, [y, z]] = [[x, y], z] + (-1)^{|x||y|} [y, [x, z]]` on basis triples.
pub fn super_jacobi(model: &KoModel, coverage: Coverage) -> InvariantReport {
    let field = *model.field();
    let dim = model.dim();
    model.ensure_table();
    let triples = coverage.tuples(dim, 3);
    let failures: Vec<String> = triples
        .par_iter()
        .filter_map(|t| {
            let (x, y, z) = (unit(dim, t[0]), unit(dim, t[1]), unit(dim, t[2]));
            let lhs = model.bracket(&x, &model.bracket(&y, &z));
            let mut rhs = model.bracket(&model.bracket(&x, &y), &z);
            let s = sign_of(model, model.parity(t[0]), model.parity(t[1]));
            crate::linalg::axpy(&field, &mut rhs, s, &model.bracket(&y, &model.bracket(&x, &z)));
            (lhs != rhs).then(|| format!("{}, {}, {}", describe(model, &x), describe(model, &y), describe(model, &z)))
        })
        .collect();
    InvariantReport::cases(
        "s1.super-jacobi",
        "the super Jacobi identity",
        triples.len(),
        failures,
    )
}

/// `T_H(x_i x_j)^{2p} = 0` on every basis monomial of `O`, for `i ≠ j′`.
pub fn hamiltonian_nilpotence(shape: &Shape) -> Result<InvariantReport> {
    let n = shape.n();
    let p = shape.p() as usize;
    let basis = shape.full_basis();
    let mut failures = Vec::new();
    let mut checked = 0;
    for i in 1..=2 * n {
        for j in i..=2 * n {
            if j == prime(i, n)? {
                continue;
            }
            let a = shape.mul(&shape.var(i)?, &shape.var(j)?)?;
            if a.is_zero() {
                continue;
            }
            let th = shape.t_h(&a)?;
            checked += 1;
            for m in &basis {
                let mut f = Poly::monomial(m.clone(), 1);
                for _ in 0..2 * p {
                    f = shape.apply(&th, &f)?;
                }
                if !f.is_zero() {
                    failures.push(format!("T_H(x{i}*x{j}) on {m}"));
                    break;
                }
            }
        }
    }
    Ok(InvariantReport::cases(
        "s1.hamiltonian-nilpotence",
        "(T_H(x_i x_j))^(2p) = 0 for i != j'",
        checked,
        failures,
    ))
}

/// For `a ∈ O(n,n)` of standard degree 2 the bracket reduces to `T_H(a)(b)`.
pub fn simplified_bracket(model: &KoModel) -> Result<InvariantReport> {
    let shape = model.shape();
    let dist = shape.distinguished()?;
    let quadratic: Vec<Potential> = shape
        .basis(|m| m.sdeg() == 2 && !m.contains_odd(dist))
        .into_iter()
        .map(|m| Potential::new(Poly::monomial(m, 1)))
        .collect::<Result<_>>()?;
    let mut failures = Vec::new();
    for a in &quadratic {
        for j in 0..model.dim() {
            let b = model.potential(j);
            if shape.bracket_simplified(a, &b)? != shape.bracket_ko(a, &b)? {
                failures.push(format!("a = {a}, b = {b}"));
            }
        }
    }
    Ok(InvariantReport::cases(
        "s1.simplified-bracket",
        "[D_KO(a), D_KO(b)] = D_KO(T_H(a)(b)) for a in O(n,n) of degree 2",
        quadratic.len() * model.dim(),
        failures,
    ))
}

/// The bracket identities used in the nilpotency and invariance arguments,
/// for all admissible indices.
pub fn bracket_identities(model: &KoModel) -> Result<InvariantReport> {
    let shape = model.shape();
    let field = *model.field();
    let n = model.n();
    let p = shape.p();
    let dist = 2 * n + 1;
    let one = potential(shape, "1")?;
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut expect = |label: String, lhs: Potential, rhs: Poly| {
        checked += 1;
        if *lhs.poly() != rhs {
            failures.push(format!("{label}: got {lhs}, expected {rhs}"));
        }
    };
    for i in 1..=2 * n {
        let a = potential(shape, &format!("x{i}*x{dist}"))?;
        expect(
            format!("[D(x{i}*x{dist}), D(1)]"),
            shape.bracket_ko(&a, &one)?,
            parse_poly(shape, &format!("2*x{i}"))?,
        );
    }
    for c in 1..p {
        let a = potential(shape, &format!("{c}*x{dist}"))?;
        expect(
            format!("[D({c}*x{dist}), D(1)]"),
            shape.bracket_ko(&a, &one)?,
            shape.constant(field.mul(2, c)),
        );
    }
    // the pairing x_i x_i′ carries a Koszul sign when i is odd and j even
    for i in 1..=2 * n {
        for j in 1..=2 * n {
            let (ip, jp) = (prime(i, n)?, prime(j, n)?);
            if i == j || j == ip {
                continue;
            }
            let a = potential(shape, &format!("x{i}*x{j}"))?;
            let b = potential(shape, &format!("x{ip}*x{jp}"))?;
            let flip = mu(i, n) == Parity::Odd && mu(j, n) == Parity::Even;
            let text = format!("x{i}*x{ip} - x{j}*x{jp}");
            let rhs = parse_poly(shape, &if flip { text.clone() } else { format!("-({text})") })?;
            expect(format!("[D(x{i}*x{j}), D(x{ip}*x{jp})]"), shape.bracket_ko(&a, &b)?, rhs);
        }
    }
    let coeffs = (p as usize).pow(n as u32);
    for code in 0..coeffs {
        let a: Vec<u32> = (0..n).map(|k| ((code / (p as usize).pow(k as u32)) % p as usize) as u32).collect();
        let mut torus = Poly::zero();
        for (k, &c) in a.iter().enumerate() {
            torus.add_scaled(&parse_poly(shape, &format!("x{}*x{}", k + 1, k + 1 + n))?, c, &field);
        }
        let torus = Potential::new(torus)?;
        for j in 1..=n {
            let b = potential(shape, &format!("x{j}*x{dist}"))?;
            let rhs = b.poly().scaled(field.neg(a[j - 1]), &field);
            expect(format!("[D({torus}), D(x{j}*x{dist})]"), shape.bracket_ko(&torus, &b)?, rhs);
        }
    }
    Ok(InvariantReport::cases(
        "s1.bracket-identities",
        "[D(x_i x_(2n+1)), D(1)] = 2D(x_i); [D(a x_(2n+1)), D(1)] = 2aD(1); \
         [D(x_i x_j), D(x_i' x_j')] = -D(x_i x_i' - x_j x_j'); [sum a_i D(x_i x_i'), D(x_j x_(2n+1))] = -a_j D(x_j x_(2n+1))",
        checked,
        failures,
    ))
}

fn pair_coverage(model: &KoModel, seed: u64) -> Coverage {
    if model.dim() <= 80 {
        Coverage::Exhaustive
    } else {
        Coverage::Sampled { seed, count: 500 }
    }
}

fn triple_coverage(model: &KoModel, seed: u64) -> Coverage {
    if model.dim() <= 20 {
        Coverage::Exhaustive
    } else {
        Coverage::Sampled { seed, count: 2000 }
    }
}

/// Nilpotency verdicts on the quadratic elements of degree 0, each re-checked
/// from its certificate or witness.
pub fn nil_verdicts(oracle: &NilOracle) -> Result<InvariantReport> {
    let model = oracle.base();
    let shape = model.shape();
    let n = model.n();
    let p = shape.p();
    let dist = 2 * n + 1;
    let mut cases: Vec<(String, bool)> = Vec::new();
    for i in 1..=2 * n {
        for j in i..=2 * n {
            if j != prime(i, n)? {
                cases.push((format!("x{i}*x{j}"), true));
            }
        }
    }
    for i in 1..=n {
        cases.push((format!("x{i}*x{}", i + n), false));
    }
    cases.push((format!("x{dist}"), false));
    let coeffs = (p as usize).pow(n as u32);
    for code in 1..coeffs {
        let terms: Vec<String> = (0..n)
            .filter_map(|k| {
                let c = (code / (p as usize).pow(k as u32)) % p as usize;
                (c != 0).then(|| format!("{c}*x{}*x{}", k + 1, k + 1 + n))
            })
            .collect();
        if terms.len() > 1 {
            cases.push((terms.join(" + "), false));
        }
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    for (text, nilpotent) in cases {
        let y = model.coords(&parse_poly(shape, &text)?)?;
        if y.iter().all(|&c| c == 0) {
            continue;
        }
        checked += 1;
        let verdict = oracle.classify(&y)?;
        let ok = if nilpotent {
            matches!(verdict, NilVerdict::NilpotentStable { .. })
        } else {
            verdict.is_not_nilpotent()
        };
        if !ok || !oracle.verify(&y, &verdict)? {
            failures.push(format!("D({text}): {}", verdict_name(&verdict)));
        }
    }
    Ok(InvariantReport::cases(
        "s2.nil-verdicts",
        "D(x_i x_j) is ad-nilpotent for i != j'; D(x_i x_i'), D(x_(2n+1)) and nonzero sum a_i D(x_i x_i') are not",
        checked,
        failures,
    ))
}

fn verdict_name(v: &NilVerdict) -> &'static str {
    match v {
        NilVerdict::NilpotentStable { .. } => "nilpotent",
        NilVerdict::NotNilpotent { .. } => "not nilpotent",
        NilVerdict::Inconclusive { .. } => "inconclusive",
    }
}

/// Membership in `Nil(KO_[0])`: torus differences in, `D(x_i x_i′)` and `D(x_{2n+1})` out.
pub fn nil_degree0_membership(oracle: &NilOracle) -> Result<InvariantReport> {
    let model = oracle.base();
    let shape = model.shape();
    let n = model.n();
    let nil = compute_nil_degree0(oracle)?;
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut expect = |text: String, inside: bool| -> Result<()> {
        checked += 1;
        let v = model.coords(&parse_poly(shape, &text)?)?;
        if nil.contains(&v) != inside {
            failures.push(format!("D({text}) {}", if inside { "missing" } else { "present" }));
        }
        Ok(())
    };
    for i in 1..=n {
        for j in i + 1..=n {
            expect(format!("x{i}*x{} - x{j}*x{}", i + n, j + n), true)?;
        }
        expect(format!("x{i}*x{}", i + n), false)?;
    }
    expect(format!("x{}", 2 * n + 1), false)?;
    let mut r = InvariantReport::cases(
        "s2.nil-degree0",
        "D(x_i x_i' - x_j x_j') lies in Nil(KO_[0]); D(x_i x_i') and D(x_(2n+1)) do not",
        checked,
        failures,
    );
    r.diagnostic = Some(format!("dim Nil(KO_[0]) = {}", nil.dim()));
    r.computed = Some(nil);
    Ok(r)
}

/// The invariant subspaces together with the filtration reports.
pub fn invariant_subspaces(oracle: &NilOracle, mode: Mode, seed: u64) -> Result<Vec<InvariantReport>> {
    let model = oracle.base();
    let inv = compute_invariants(oracle, mode, QTarget::Normalizer)?;
    let mut nil = InvariantReport::cases(
        "Nil0",
        "Nil of the even part is the degree-0 nilpotent closure plus KO_1 ∩ KO_even, inside SHO'",
        2,
        [
            (!inv.nil0.decomposition_holds).then(|| "decomposition fails".to_string()),
            (!inv.nil0.sho_holds).then(|| "degree-0 part leaves SHO'".to_string()),
        ]
        .into_iter()
        .flatten()
        .collect(),
    );
    nil.mode = mode;
    nil.computed_dim = inv.nil0.space.dim();
    nil.expected_dim = inv.nil0.space.dim();
    nil.computed = Some(inv.nil0.space.clone());
    let mut out = vec![nil, inv.t, inv.q, inv.m];
    for r in &mut out {
        r.name = format!("s3.{}", r.name);
    }
    for i in 1..=model.max_degree() {
        let mut r = filtration_recover(model, i)?;
        r.name = format!("s3.{}", r.name);
        out.push(r);
    }
    let mut sweep = unique_irreducible_check(model, SweepPolicy::standard(model, seed))?;
    sweep.name = format!("s3.{}", sweep.name);
    out.push(sweep);
    Ok(out)
}

/// `dim L - dim L_0`, after checking that `L_0` is a subalgebra.
pub fn quotient_dimension<B: Bracket>(alg: &B, l0: &Subspace) -> Option<usize> {
    (lie_closure(alg, l0.rows()) == *l0).then(|| alg.dim() - l0.dim())
}

/// Automorphism checks over a seeded family.
pub fn automorphism_checks(oracle: &NilOracle, mode: Mode, seed: u64, count: usize) -> Result<Vec<InvariantReport>> {
    let model = oracle.base();
    let dim = model.dim();
    let n = model.n();
    let family = seeded_family(oracle, FamilyConfig::new(seed, count))?;
    let inv = compute_invariants(oracle, mode, QTarget::Normalizer)?;
    let ko0 = model.filtration(0);
    let spaces = [
        ("T", inv.t.space().clone()),
        ("Q", inv.q.space().clone()),
        ("M", inv.m.space().clone()),
        ("KO_0", ko0.clone()),
    ];

    let mut filt_fail = Vec::new();
    let mut space_fail = Vec::new();
    for phi in &family {
        let r = check_filtration_invariance(model, phi);
        if !r.is_match() {
            filt_fail.push(format!("{}: {}", phi.provenance(), r.witnesses.join("; ")));
        }
        for (name, s) in &spaces {
            let r = check_subspace_invariance(model, phi, name, s);
            if !r.is_match() {
                space_fail.push(format!("{}: {}", phi.provenance(), r.witnesses.join("; ")));
            }
        }
    }
    let mut filt = InvariantReport::cases(
        "s4.auto-filtration",
        "every generated automorphism preserves each KO_i",
        family.len(),
        filt_fail,
    );
    filt.diagnostic = Some(format!("{} automorphisms, seed {seed}", family.len()));
    let mut sub = InvariantReport::cases(
        "s4.auto-subspaces",
        "every generated automorphism preserves T, Q, M and KO_0",
        family.len() * spaces.len(),
        space_fail,
    );
    sub.mode = mode;

    let mut rigid_fail = Vec::new();
    let mut agreeing = 0;
    for (a, phi) in family.iter().enumerate() {
        for psi in &family[a + 1..] {
            let r = rigidity_check(model, phi, psi);
            if r.agree_on_minus_one {
                agreeing += 1;
            }
            if !r.consistent() {
                rigid_fail.push(format!("{} and {}", phi.provenance(), psi.provenance()));
            }
        }
    }
    // agreement on KO_[-1] propagates upward only if nothing of degree >= -1
    // centralizes KO_[-1]
    let tests: Vec<Vec<u32>> = model.component_range(-1).map(|j| unit(dim, j)).collect();
    let full = Subspace::full(*model.field(), dim);
    let centralizer = solve_bracket_constraint(model, &full, &tests, &Subspace::zero(*model.field(), dim))?;
    for v in centralizer.excess_over(&model.units(model.component_range(-2))) {
        rigid_fail.push(format!("{} centralizes KO_[-1]", describe(model, &v)));
    }
    let pairs = family.len() * family.len().saturating_sub(1) / 2;
    let mut rigid = InvariantReport::cases(
        "s4.auto-rigidity",
        "generated automorphisms agreeing on KO_[-1] are equal",
        pairs + 1,
        rigid_fail,
    );
    rigid.diagnostic = Some(format!("{agreeing} of {pairs} pairs agree on KO_[-1]"));

    let mut class_fail = Vec::new();
    let expected = 2 * n + 1;
    let base = classification_invariant(model);
    if base != expected {
        class_fail.push(format!("graded count {base}"));
    }
    if quotient_dimension(model, &ko0) != Some(expected) {
        class_fail.push("dim KO/KO_0".into());
    }
    for phi in &family {
        if quotient_dimension(model, &phi.image(&ko0)) != Some(expected) {
            class_fail.push(format!("after {}", phi.provenance()));
        }
    }
    let permuted = Permuted::shuffled(model, seed);
    let moved = Subspace::span(*model.field(), dim, ko0.rows().iter().map(|r| permuted.forward(r)));
    if quotient_dimension(&permuted, &moved) != Some(expected) {
        class_fail.push("after relabelling the basis".into());
    }
    let mut class = InvariantReport::cases(
        "s4.classification",
        "the classification invariant dim KO/KO_0 equals 2n + 1",
        family.len() + 3,
        class_fail,
    );
    class.computed_dim = base;
    class.expected_dim = expected;
    Ok(vec![filt, sub, rigid, class])
}

/// Runs the selected suites on one model.
pub fn run(model: &KoModel, suite: Suite, cfg: &VerifyConfig) -> Result<Vec<InvariantReport>> {
    if cfg.automorphisms == 0 && suite.includes(Suite::S4) {
        return Err(Error::Precondition("at least one automorphism is needed".into()));
    }
    let oracle = NilOracle::standard(model);
    model.ensure_table();
    type Check<'a> = Box<dyn Fn() -> Result<Vec<InvariantReport>> + Send + Sync + 'a>;
    let mut checks: Vec<Check> = Vec::new();
    let seed = cfg.seed;
    if suite.includes(Suite::S1) {
        checks.push(Box::new(move || Ok(vec![operator_identity(model, pair_coverage(model, seed))?])));
        checks.push(Box::new(move || Ok(vec![super_antisymmetry(model)])));
        checks.push(Box::new(move || Ok(vec![super_jacobi(model, triple_coverage(model, seed))])));
        checks.push(Box::new(move || Ok(vec![hamiltonian_nilpotence(model.shape())?])));
        checks.push(Box::new(move || Ok(vec![simplified_bracket(model)?])));
        checks.push(Box::new(move || Ok(vec![bracket_identities(model)?])));
    }
    let oracle = &oracle;
    if suite.includes(Suite::S2) {
        checks.push(Box::new(move || Ok(vec![nil_verdicts(oracle)?])));
        checks.push(Box::new(move || Ok(vec![nil_degree0_membership(oracle)?])));
    }
    if suite.includes(Suite::S3) {
        checks.push(Box::new(move || invariant_subspaces(oracle, cfg.mode, seed)));
    }
    if suite.includes(Suite::S4) {
        checks.push(Box::new(move || automorphism_checks(oracle, cfg.mode, seed, cfg.automorphisms)));
    }
    let mut out: Vec<InvariantReport> = checks
        .par_iter()
        .map(|c| c())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}
