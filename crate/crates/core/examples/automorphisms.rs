//! Exponentials of nilpotent derivations and the invariance checks they feed.

use kolab::invariants::{
    check_filtration_invariance, make_exp_automorphism, rigidity_check, seeded_family, FamilyConfig,
};
use kolab::ko::KoModel;
use kolab::linalg::NilOracle;
use kolab::superalg::Shape;
use kolab::syntax::parse_poly;

fn main() -> kolab::Result<()> {
    let model = KoModel::new(Shape::contact_default(2, 5)?)?;
    let oracle = NilOracle::standard(&model);

    let z = model.coords(&parse_poly(model.shape(), "x3*x4*x5")?)?;
    let phi = make_exp_automorphism(&oracle, &z)?;
    let d1 = model.coords(&parse_poly(model.shape(), "1")?)?;
    println!("{}: D(1) -> D({})", phi.provenance(), model.poly(&phi.apply(&d1)));
    println!("preserves the filtration: {:?}", check_filtration_invariance(&model, &phi).verdict);

    let refused = model.coords(&parse_poly(model.shape(), "x1*x2*x5")?)?;
    match make_exp_automorphism(&oracle, &refused) {
        Ok(_) => println!("exp ad D(x1*x2*x5) accepted"),
        Err(e) => println!("exp ad D(x1*x2*x5) refused: {e}"),
    }

    let family = seeded_family(&oracle, FamilyConfig::new(42, 12))?;
    for map in family.iter().take(4) {
        println!("  {}", map.provenance());
    }
    let agreeing = family
        .iter()
        .enumerate()
        .flat_map(|(a, f)| family[a + 1..].iter().map(move |g| (f, g)))
        .filter(|(f, g)| rigidity_check(&model, f, g).agree_on_minus_one)
        .count();
    println!("{} automorphisms, {agreeing} pairs agree on KO_[-1]", family.len());
    Ok(())
}
