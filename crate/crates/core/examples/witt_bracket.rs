//! Super derivations, their bracket, and the Hamiltonian operator T_H.

use kolab::superalg::Shape;
use kolab::syntax::{parse_derivation, parse_poly};

fn main() -> kolab::Result<()> {
    let shape = Shape::contact_default(1, 3)?;
    let d1 = parse_derivation(&shape, "x1*d1 + x2*d3")?;
    let d2 = parse_derivation(&shape, "x3*d2")?;
    println!("[{d1}, {d2}] = {}", shape.bracket_w(&d1, &d2)?);
    println!("[{d2}, {d2}] = {}", shape.bracket_w(&d2, &d2)?);

    let a = parse_poly(&shape, "x1*x2")?;
    let th = shape.t_h(&a)?;
    println!("T_H({a}) = {th}");
    let mut f = parse_poly(&shape, "x1^(2)*x2")?;
    for k in 1..=3 {
        f = shape.apply(&th, &f)?;
        println!("T_H({a})^{k} applied to x1^(2)*x2 = {f}");
    }
    println!("E(x1^(2)*x3) = {}", shape.e_operator(&parse_poly(&shape, "x1^(2)*x3")?)?);
    Ok(())
}
