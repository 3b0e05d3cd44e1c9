//! Elements D_KO(a), their brackets, and the graded dimensions of KO(n,n+1).

use kolab::ko::{KoModel, Potential};
use kolab::superalg::Shape;
use kolab::syntax::parse_poly;

fn main() -> kolab::Result<()> {
    for (n, p) in [(1, 3), (2, 3), (1, 5)] {
        let model = KoModel::new(Shape::contact_default(n, p)?)?;
        let dims: Vec<usize> = (-2..=model.max_degree())
            .map(|d| model.component_range(d).len())
            .collect();
        println!("n={n} p={p}: dim {} by degree {dims:?}", model.dim());
    }

    let shape = Shape::contact_default(2, 3)?;
    let pot = |s: &str| -> kolab::Result<Potential> { Potential::new(parse_poly(&shape, s)?) };
    let one = pot("1")?;
    for a in ["x1*x5", "x5", "x1*x2", "x3*x4*x5"] {
        let a = pot(a)?;
        println!("D({a}) = {}", shape.d_ko_expand(&a)?);
        println!("  [D({a}), D(1)] = D({})", shape.bracket_ko(&a, &one)?);
    }
    let (a, b) = (pot("x1*x2")?, pot("x3*x4")?);
    println!("[D({a}), D({b})] = D({})", shape.bracket_ko(&a, &b)?);
    Ok(())
}
