//! The twelve acceptance criteria, one line each.
//!
//! Criteria 7 and 9 are known to fail at n = 1: with a single pair of
//! variables, D(x1) spans a KO_0-stable line of KO_(-1)/KO_0 and lies in Q.
//! They print FAIL; the run only errors if the set of failures changes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kolab::invariants::{
    check_filtration_invariance, check_subspace_invariance, classification_invariant, compute_invariants,
    filtration_recover, rigidity_check, seeded_family, unique_irreducible_check, FamilyConfig, Mode, Permuted,
    QTarget, SweepPolicy, Verdict,
};
use kolab::ko::KoModel;
use kolab::linalg::{to_dense, NilOracle, NilVerdict, NilWitness, Subspace};
use kolab::superalg::Shape;
use kolab::syntax::parse_poly;
use kolab::verify::{self, Coverage};

const KNOWN_FAILURES: [u32; 2] = [7, 9];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(checks: Vec<(bool, String)>) -> Outcome {
    let failed: Vec<String> = checks.iter().filter(|(ok, _)| !ok).map(|(_, d)| d.clone()).collect();
    if failed.is_empty() {
        let all: Vec<String> = checks.into_iter().map(|(_, d)| d).collect();
        Outcome {
            pass: true,
            detail: all.join("; "),
        }
    } else {
        Outcome {
            pass: false,
            detail: failed.join("; "),
        }
    }
}

fn model(n: usize, p: u32) -> KoModel {
    KoModel::new(Shape::contact_default(n, p).unwrap()).unwrap()
}

/// `p^n 2^(n+1)` for heights 1.
fn expected_dim(n: usize, p: u32) -> usize {
    (p as usize).pow(n as u32) << (n + 1)
}

fn c1() -> Outcome {
    let mut checks = Vec::new();
    for (n, p, coverage) in [
        (1, 3, Coverage::Exhaustive),
        (1, 5, Coverage::Exhaustive),
        (2, 3, Coverage::Sampled { seed: 1, count: 500 }),
    ] {
        let m = model(n, p);
        let r = verify::operator_identity(&m, coverage).unwrap();
        let pairs = match coverage {
            Coverage::Exhaustive => expected_dim(n, p).pow(2),
            Coverage::Sampled { count, .. } => count,
        };
        checks.push((
            r.is_match() && r.expected_dim == pairs,
            format!("n={n} p={p}: {}/{pairs} pairs", r.computed_dim),
        ));
    }
    outcome(checks)
}

fn c2() -> Outcome {
    let m = model(1, 3);
    let anti = verify::super_antisymmetry(&m);
    let jacobi = verify::super_jacobi(&m, Coverage::Exhaustive);
    outcome(vec![
        (anti.is_match(), format!("antisymmetry {}/{}", anti.computed_dim, anti.expected_dim)),
        (
            jacobi.is_match() && jacobi.expected_dim == 1728,
            format!("jacobi {}/{} triples", jacobi.computed_dim, jacobi.expected_dim),
        ),
    ])
}

fn c3() -> Outcome {
    let mut checks = Vec::new();
    for p in [3, 5] {
        let r = verify::hamiltonian_nilpotence(&Shape::contact_default(2, p).unwrap()).unwrap();
        // unordered pairs i <= j of 1..4 minus the two pairs {i, i'}; x_i x_i vanishes for the odd ones
        checks.push((r.is_match() && r.expected_dim == 10 - 2 - 2, format!("p={p}: {} operators", r.expected_dim)));
    }
    outcome(checks)
}

fn c4() -> Outcome {
    let mut checks = Vec::new();
    for n in [1, 2] {
        let r = verify::simplified_bracket(&model(n, 3)).unwrap();
        checks.push((r.is_match(), format!("n={n}: {}/{}", r.computed_dim, r.expected_dim)));
    }
    outcome(checks)
}

fn c5() -> Outcome {
    let mut checks = Vec::new();
    for n in [1, 2] {
        for p in [3, 5] {
            let r = verify::bracket_identities(&model(n, p)).unwrap();
            checks.push((
                r.is_match(),
                format!("n={n} p={p}: {}/{} {}", r.computed_dim, r.expected_dim, r.witnesses.join(", ")),
            ));
        }
    }
    outcome(checks)
}

fn c6() -> Outcome {
    let m = model(2, 3);
    let o = NilOracle::standard(&m);
    let verdicts = verify::nil_verdicts(&o).unwrap();
    let membership = verify::nil_degree0_membership(&o).unwrap();
    // re-check eigen witnesses by a direct bracket
    let mut eigen_ok = true;
    for text in ["x1*x3", "x2*x4", "x5", "x1*x3 + 2*x2*x4"] {
        let y = m.coords(&parse_poly(m.shape(), text).unwrap()).unwrap();
        match o.classify(&y).unwrap() {
            NilVerdict::NotNilpotent {
                witness: NilWitness::Eigen { z, lambda, .. },
            } => {
                let z = to_dense(&z, m.dim());
                let expect: Vec<u32> = z.iter().map(|&c| c * lambda % 3).collect();
                eigen_ok &= lambda != 0 && z.iter().any(|&c| c != 0) && m.bracket(&y, &z) == expect;
            }
            _ => eigen_ok = false,
        }
    }
    outcome(vec![
        (verdicts.is_match(), format!("verdicts {}/{}", verdicts.computed_dim, verdicts.expected_dim)),
        (
            membership.is_match(),
            format!("Nil(KO_[0]) membership {}/{}", membership.computed_dim, membership.expected_dim),
        ),
        (eigen_ok, "eigen witnesses re-checked".into()),
    ])
}

fn c7() -> Outcome {
    let mut checks = Vec::new();
    for n in [1, 2] {
        let m = model(n, 3);
        let o = NilOracle::standard(&m);
        let inv = compute_invariants(&o, Mode::Certified, QTarget::Normalizer).unwrap();
        for r in [&inv.t, &inv.q, &inv.m] {
            checks.push((
                r.is_match(),
                format!("n={n} {} {:?} {}", r.name, r.verdict, r.witnesses.join(", ")),
            ));
        }
        let raw = compute_invariants(&o, Mode::Raw, QTarget::Normalizer).unwrap();
        let flagged = raw.nil0.artifacts.is_empty() || raw.t.verdict == Verdict::Conditional;
        checks.push((
            flagged,
            format!("n={n} raw T {:?}, {} artifacts", raw.t.verdict, raw.nil0.artifacts.len()),
        ));
        if n == 1 {
            let x2 = m.coords(&parse_poly(m.shape(), "x2").unwrap()).unwrap();
            let pos = x2.iter().position(|&c| c != 0).unwrap();
            checks.push((raw.nil0.artifacts.contains(&pos), "n=1 raw flags D(x2)".into()));
        }
    }
    outcome(checks)
}

fn c8() -> Outcome {
    let mut checks = Vec::new();
    for n in [1, 2] {
        let m = model(n, 3);
        let top = m.max_degree();
        let bad: Vec<i32> = (1..top).filter(|&i| !filtration_recover(&m, i).unwrap().is_match()).collect();
        checks.push((bad.is_empty(), format!("n={n}: i = 1..{} {bad:?}", top - 1)));
    }
    outcome(checks)
}

fn c9() -> Outcome {
    let r = unique_irreducible_check(&model(1, 3), SweepPolicy::Exhaustive).unwrap();
    let two = unique_irreducible_check(&model(2, 3), SweepPolicy::Exhaustive).unwrap();
    let mut o = outcome(vec![(
        r.is_match(),
        format!("n=1 p=3: {} ({})", r.diagnostic.clone().unwrap_or_default(), r.witnesses.join(", ")),
    )]);
    o.detail.push_str(&format!(
        "; for reference n=2 p=3: {:?}, {}",
        two.verdict,
        two.diagnostic.unwrap_or_default()
    ));
    o
}

fn c10() -> Outcome {
    let mut checks = Vec::new();
    let mut total = 0;
    for n in [1, 2] {
        for p in [3, 5] {
            let m = model(n, p);
            let o = NilOracle::standard(&m);
            let family = seeded_family(&o, FamilyConfig::new(2024, 50)).unwrap();
            total += family.len();
            let inv = compute_invariants(&o, Mode::Certified, QTarget::Normalizer).unwrap();
            let spaces: [(&str, &Subspace); 4] = [
                ("T", inv.t.space()),
                ("Q", inv.q.space()),
                ("M", inv.m.space()),
                ("KO_0", &m.filtration(0)),
            ];
            let mut bad = 0;
            for phi in &family {
                bad += usize::from(!check_filtration_invariance(&m, phi).is_match());
                for (name, s) in spaces {
                    bad += usize::from(!check_subspace_invariance(&m, phi, name, s).is_match());
                }
            }
            let mut rigid_bad = 0;
            for (a, phi) in family.iter().enumerate() {
                for psi in &family[a + 1..] {
                    rigid_bad += usize::from(!rigidity_check(&m, phi, psi).consistent());
                }
            }
            checks.push((
                bad == 0 && rigid_bad == 0 && !family.is_empty(),
                format!("n={n} p={p}: {} maps, {bad} invariance and {rigid_bad} rigidity failures", family.len()),
            ));
        }
    }
    checks.push((total >= 50, format!("{total} automorphisms in total")));
    outcome(checks)
}

fn c11() -> Outcome {
    let mut checks = Vec::new();
    let mut values = Vec::new();
    for n in [1, 2, 3] {
        let m = model(n, 3);
        // independent count: potentials of principal degree 0 and 1 are 1 and x1..x2n
        let expected = 1 + 2 * n;
        let v = classification_invariant(&m);
        values.push(v);
        let ko0 = m.filtration(0);
        let o = NilOracle::standard(&m);
        let family = seeded_family(&o, FamilyConfig::new(5, if n == 3 { 4 } else { 10 })).unwrap();
        let moved = family
            .iter()
            .all(|phi| verify::quotient_dimension(&m, &phi.image(&ko0)) == Some(expected));
        let perm = Permuted::shuffled(&m, 11);
        let relabelled = Subspace::span(*m.field(), m.dim(), ko0.rows().iter().map(|r| perm.forward(r)));
        let permuted = verify::quotient_dimension(&perm, &relabelled) == Some(expected);
        checks.push((
            v == expected && moved && permuted,
            format!("n={n}: {v} (automorphisms {moved}, relabelling {permuted})"),
        ));
    }
    values.dedup();
    checks.push((values.len() == 3, "distinct across n".into()));
    outcome(checks)
}

fn c12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_kolab");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("export{k}.json"));
        let status = std::process::Command::new(bin)
            .args(["--n", "1", "--p", "3", "export"])
            .arg(&path)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    let value: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    outcome(vec![
        (outputs[0] == outputs[1], format!("{} bytes, identical", outputs[0].len())),
        (value["basis"].as_array().map(Vec::len) == Some(12), "12 basis elements".into()),
    ])
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "operator identity", c1),
        (2, "superalgebra axioms", c2),
        (3, "T_H(x_i x_j)^(2p) = 0", c3),
        (4, "simplified bracket", c4),
        (5, "bracket identities", c5),
        (6, "nilpotency verdicts", c6),
        (7, "certified T, Q, M", c7),
        (8, "filtration recovery", c8),
        (9, "unique irreducible quotient", c9),
        (10, "automorphism invariance", c10),
        (11, "classification invariant", c11),
        (12, "export determinism", c12),
    ];
    let mut failures = Vec::new();
    let mut slow = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        if took > Duration::from_secs(60) {
            slow.push(id);
        }
        println!(
            "criterion {id:>2} {}  {name} [{:.2}s]: {}",
            if o.pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failures.push(id);
        }
    }
    println!("{} of 12 criteria pass", 12 - failures.len());
    if failures != KNOWN_FAILURES || !slow.is_empty() {
        eprintln!("unexpected outcome: failing {failures:?}, known {KNOWN_FAILURES:?}, over 60s {slow:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
