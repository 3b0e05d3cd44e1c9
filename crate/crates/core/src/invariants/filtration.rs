use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ko::KoModel;
use crate::linalg::{solve_bracket_constraint, unit, QuotientAction, Subspace};

use super::{describe, InvariantReport, Mode, Verdict};

/// `{y ∈ KO_{i-1} : [y, KO_{-1}] ⊆ KO_{i-1}}` compared with `KO_i`.
///
/// `KO_0` brackets `KO_{i-1}` into itself, so testing against the degree −1
/// basis is enough. A deviation at the top degree is reported as conditional.
pub fn filtration_recover(model: &KoModel, i: i32) -> Result<InvariantReport> {
    if i < 1 || i > model.max_degree() {
        return Err(Error::DegreeOutOfRange(i));
    }
    let prev = model.filtration(i - 1);
    let tests: Vec<Vec<u32>> = model
        .component_range(-1)
        .map(|j| unit(model.dim(), j))
        .collect();
    let h = solve_bracket_constraint(model, &prev, &tests, &prev)?;
    let mut report = InvariantReport::compare(
        format!("filtration-{i}"),
        Mode::Certified,
        "KO_i = {y in KO_(i-1) : [y, KO_(-1)] in KO_(i-1)}",
        model,
        h,
        &model.filtration(i),
    );
    if report.verdict == Verdict::Mismatch && i == model.max_degree() {
        report.verdict = Verdict::Conditional;
        report.diagnostic = Some("deviation at the truncation ceiling".into());
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPolicy {
    /// One representative per projective point of the quotient.
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

impl SweepPolicy {
    /// Exhaustive for `p ≤ 5, n ≤ 2`, otherwise a seeded sample.
    pub fn standard(model: &KoModel, seed: u64) -> Self {
        if model.shape().p() <= 5 && model.n() <= 2 {
            SweepPolicy::Exhaustive
        } else {
            SweepPolicy::Sampled { seed, count: 200 }
        }
    }
}

/// Vectors with first nonzero coordinate 1.
fn projective_points(p: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for lead in 0..len {
        let free = len - lead - 1;
        let total = (p as u64).pow(free as u32);
        for mut code in 0..total {
            let mut v = vec![0; len];
            v[lead] = 1;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = (code % p as u64) as u32;
                code /= p as u64;
            }
            out.push(v);
        }
    }
    out
}

/// Spins nonzero vectors of `KO/KO_0` under `KO_0` and checks that every
/// proper stable subspace reached is `KO_{-1}/KO_0`, and that any vector
/// outside it fills the quotient.
pub fn unique_irreducible_check(model: &KoModel, sweep: SweepPolicy) -> Result<InvariantReport> {
    let dim = model.dim();
    let ko0 = model.filtration(0);
    let action: Vec<Vec<u32>> = ko0.rows().to_vec();
    let ko_minus1 = model.filtration(-1);
    let low = model.component_range(-2).start..model.component_range(-1).end;
    let p = model.shape().p();
    let points = match sweep {
        SweepPolicy::Exhaustive => projective_points(p, low.len()),
        SweepPolicy::Sampled { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| loop {
                    let v: Vec<u32> = (0..low.len()).map(|_| rng.gen_range(0..p)).collect();
                    if v.iter().any(|&c| c != 0) {
                        break v;
                    }
                })
                .collect()
        }
    };
    let quotient = QuotientAction::new(model, &action, &ko0)?;
    let spun: Vec<(Vec<u32>, usize, bool)> = points
        .par_iter()
        .map(|q| {
            let mut v = vec![0; dim];
            v[low.clone()].copy_from_slice(q);
            let s = quotient.spin(&v);
            let ok = if ko_minus1.contains(&v) { s == ko_minus1 } else { s.dim() == dim };
            (v, s.dim() - ko0.dim(), ok)
        })
        .collect();
    let mut failures = Vec::new();
    let mut found: Vec<usize> = Vec::new();
    for (v, quotient_dim, ok) in spun {
        if !found.contains(&quotient_dim) {
            found.push(quotient_dim);
        }
        if !ok {
            failures.push(format!(
                "{} spins to a stable subspace of quotient dimension {}",
                describe(model, &v),
                quotient_dim
            ));
        }
    }
    found.sort_unstable();
    let mut report = InvariantReport::cases(
        "unique-irreducible",
        "KO_(-1)/KO_0 is the unique irreducible KO_0-submodule of KO/KO_0",
        points.len(),
        failures,
    );
    report.diagnostic = Some(format!(
        "{} vectors swept; quotient dimensions reached: {:?}",
        points.len(),
        found
    ));
    report.computed = Some(Subspace::clone(&ko_minus1));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalg::Shape;

    fn model(n: usize, p: u32) -> KoModel {
        KoModel::new(Shape::contact_default(n, p).unwrap()).unwrap()
    }

    #[test]
    fn projective_point_count() {
        assert_eq!(projective_points(3, 3).len(), 13);
        assert_eq!(projective_points(5, 2).len(), 6);
    }

    #[test]
    fn recovers_low_filtration() {
        let m = model(1, 3);
        assert!(filtration_recover(&m, 1).unwrap().is_match());
        assert!(filtration_recover(&m, 2).unwrap().is_match());
        assert!(filtration_recover(&m, 0).is_err());
        assert!(filtration_recover(&m, m.max_degree() + 1).is_err());
    }

    #[test]
    fn quotient_sweep_for_two_pairs_of_variables() {
        let m = model(2, 3);
        let r = unique_irreducible_check(&m, SweepPolicy::Exhaustive).unwrap();
        assert!(r.is_match(), "{:?}", r.witnesses);
    }

    #[test]
    fn quotient_sweep_for_one_pair_finds_a_line() {
        // with a single pair x1, x1′ the square of x1′ vanishes, so D(x1)
        // spans a KO_0-stable line inside KO_(-1)/KO_0
        let m = model(1, 3);
        let r = unique_irreducible_check(&m, SweepPolicy::Exhaustive).unwrap();
        assert_eq!(r.verdict, Verdict::Mismatch);
        assert_eq!(r.witnesses.len(), 1);
        assert!(r.witnesses[0].starts_with("D(x1) "), "{:?}", r.witnesses);
    }
}
