//! Polynomial literals, division, gcd and the monic index.

use ffcorr::polyring::{iter_interval, iter_monic};
use ffcorr::{FieldSpec, Poly};

fn main() -> ffcorr::Result<()> {
    let f = FieldSpec::from_order(3)?;
    // ascending coefficients: "1,0,1" is T^2 + 1
    let a = Poly::parse(&f, "2,0,1,1")?;
    let b = Poly::parse(&f, "1,0,1")?;
    let (quo, rem) = a.divmod(&b)?;
    println!("({a}) = ({b})({quo}) + ({rem})");
    println!("gcd = {}", a.gcd(&b)?);
    println!("norm of {a} = {}", a.norm());

    let m = Poly::parse(&f, "2,1,1")?.encode()?;
    println!("T^2+T+2 has monic index {} in degree {}", m.idx, m.n);
    let first: Vec<String> = iter_monic(&f, 2).take(4).map(|m| m.decode(&f).to_string()).collect();
    println!("first monic quadratics: {}", first.join(", "));

    let center = Poly::parse(&f, "0,0,0,1")?;
    let interval: Vec<String> = iter_interval(&center, 0)?.map(|g| g.to_string()).collect();
    println!("I(T^3; 0) = {{{}}}", interval.join(", "));
    Ok(())
}
