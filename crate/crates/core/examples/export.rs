//! Structure constants as JSON, and a reader-side antisymmetry check.

use kolab::ko::{KoModel, StructureConstants};
use kolab::superalg::Shape;

fn main() -> kolab::Result<()> {
    let model = KoModel::new(Shape::contact_default(1, 3)?)?;
    let json = model.export_json();
    println!("{} bytes", json.len());

    let table: StructureConstants = serde_json::from_str(&json).expect("valid export");
    println!("basis: {}", table.basis.join(", "));
    let p = table.p;
    let parity = |i: usize| model.parity(i).bit();
    let mut entries = std::collections::HashMap::new();
    for (i, j, v) in &table.brackets {
        entries.insert((*i, *j), v.clone());
    }
    let mut checked = 0;
    for (&(i, j), v) in &entries {
        // [e_i, e_j] = -(-1)^(|i||j|) [e_j, e_i]
        let sign = if parity(i) * parity(j) == 1 { 1 } else { p - 1 };
        let swapped: Vec<(usize, u32)> = entries[&(j, i)].iter().map(|&(k, c)| (k, c * sign % p)).collect();
        assert_eq!(*v, swapped);
        checked += 1;
    }
    println!("{checked} entries consistent with super antisymmetry");
    println!("classification invariant {}", table.classification_invariant);
    Ok(())
}
