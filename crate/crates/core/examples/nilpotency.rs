//! Ad-nilpotency verdicts with certificates and witnesses.

use kolab::ko::KoModel;
use kolab::linalg::{NilOracle, NilVerdict, NilWitness};
use kolab::superalg::Shape;
use kolab::syntax::parse_poly;

fn main() -> kolab::Result<()> {
    let model = KoModel::new(Shape::contact_default(2, 3)?)?;
    let oracle = NilOracle::standard(&model);
    for text in ["x1*x2", "x3*x4", "x1*x4", "x1*x3", "x5", "x1*x3 - x2*x4", "x3", "x1^(2)*x5", "1"] {
        let y = model.coords(&parse_poly(model.shape(), text)?)?;
        let verdict = oracle.classify(&y)?;
        let summary = match &verdict {
            NilVerdict::NilpotentStable { index, certificate, .. } => {
                format!("nilpotent, index {index} ({certificate:?})")
            }
            NilVerdict::NotNilpotent { witness } => match witness {
                NilWitness::Eigen { z_text, lambda, .. } => format!("not nilpotent: [y, D({z_text})] = {lambda} D({z_text})"),
                NilWitness::GrowingIndex { indices, .. } => {
                    let seen: Vec<_> = indices.iter().map(|h| (h.heights.clone(), h.index)).collect();
                    format!("not nilpotent: index grows with the height {seen:?}")
                }
                NilWitness::Persistent { steps, .. } => format!("not nilpotent: still nonzero after {steps} steps"),
            },
            NilVerdict::Inconclusive { diagnostic, .. } => format!("inconclusive: {diagnostic}"),
        };
        println!("D({text}): {summary}  [re-checked: {}]", oracle.verify(&y, &verdict)?);
    }
    Ok(())
}
