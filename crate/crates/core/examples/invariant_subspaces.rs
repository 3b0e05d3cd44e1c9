//! The subspaces T, Q, M built from nilpotent elements, in raw and certified
//! mode, plus filtration recovery and the sweep over KO/KO_0.

use kolab::invariants::{
    compute_invariants, filtration_recover, unique_irreducible_check, Mode, QTarget, SweepPolicy,
};
use kolab::ko::KoModel;
use kolab::linalg::NilOracle;
use kolab::superalg::Shape;

fn main() -> kolab::Result<()> {
    for n in [1, 2] {
        let model = KoModel::new(Shape::contact_default(n, 3)?)?;
        let oracle = NilOracle::standard(&model);
        println!("n={n}, p=3, dim {}", model.dim());
        for mode in [Mode::Certified, Mode::Raw] {
            let inv = compute_invariants(&oracle, mode, QTarget::Normalizer)?;
            for r in [&inv.t, &inv.q, &inv.m] {
                println!(
                    "  {mode:<9} {}: {:?} ({} vs {}) {}",
                    r.name,
                    r.verdict,
                    r.computed_dim,
                    r.expected_dim,
                    r.witnesses.join(", ")
                );
                if let Some(d) = &r.diagnostic {
                    println!("            {d}");
                }
            }
        }
        for i in 1..=model.max_degree() {
            let r = filtration_recover(&model, i)?;
            println!("  KO_{i} recovered from KO_{}: {:?}", i - 1, r.verdict);
        }
        let sweep = unique_irreducible_check(&model, SweepPolicy::Exhaustive)?;
        println!("  quotient sweep: {:?}, {}", sweep.verdict, sweep.diagnostic.unwrap_or_default());
        for w in &sweep.witnesses {
            println!("    {w}");
        }
    }
    Ok(())
}
