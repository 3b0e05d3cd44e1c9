//! Divided powers and odd variables in O(1,2) over F_5.

use kolab::superalg::Shape;
use kolab::syntax::parse_poly;

fn main() -> kolab::Result<()> {
    // one even variable x1 (truncated below x1^(5)), odd x2 and the distinguished x3
    let shape = Shape::contact_default(1, 5)?;
    println!("dim O = {}", shape.dim());

    let x1 = shape.var(1)?;
    let mut power = shape.one();
    for k in 1..=5 {
        power = shape.mul(&power, &x1)?;
        // x1^k = k! x1^(k), which vanishes once k reaches p
        println!("x1^{k} = {power}");
    }

    let f = parse_poly(&shape, "x1^(3)*x2 + 2*x1*x3")?;
    let g = parse_poly(&shape, "x2*x3")?;
    println!("f = {f}");
    println!("f * x2*x3 = {}", shape.mul(&f, &g)?);
    for r in 1..=3 {
        println!("d{r}(f) = {}", shape.derive(r, &f)?);
    }
    // odd variables anticommute and square to zero
    println!("x3*x2 = {}", parse_poly(&shape, "x3*x2")?);
    println!("x2*x2 = {}", parse_poly(&shape, "x2*x2")?);
    Ok(())
}
