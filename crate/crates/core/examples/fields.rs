//! Arithmetic in F_9 = F_3[x]/(m(x)).

use ffcorr::gf::FieldElement;
use ffcorr::FieldSpec;

fn main() -> ffcorr::Result<()> {
    let f = FieldSpec::new(3, 2)?;
    println!("q = {}, p = {}, k = {}, modulus coefficients {:?}", f.q(), f.p(), f.k(), f.modulus());

    // elements are base-p digit strings of their coordinates: 5 = 2 + 1*x
    let a = f.element(5)?;
    let b = f.element(7)?;
    println!("{a} + {b} = {}", f.add(a, b));
    println!("{a} * {b} = {}", f.mul(a, b));
    println!("1 / {a} = {}", f.inv(a)?);

    let generator = f.elements().skip(1).find(|&g| (1..8).all(|e| f.pow(g, e) != FieldElement::ONE)).unwrap();
    println!("smallest generator of F_9^*: {generator}");

    for q in [6, 1 << 17] {
        match FieldSpec::from_order(q) {
            Ok(_) => println!("F_{q} ok"),
            Err(e) => println!("F_{q}: {e}"),
        }
    }
    Ok(())
}
