//! Λ, μ and d for every monic polynomial of degree 4 over F_5.

use ffcorr::sieve::{factors_as_polys, irreducible_count_formula, table_sums, Sieve};
use ffcorr::{ArithFn, Budget, FieldSpec, Poly};

fn main() -> ffcorr::Result<()> {
    let f = FieldSpec::from_order(5)?;
    let n = 4;
    let sieve = Sieve::build(&f, n, Budget::default())?;
    let tables = sieve.derive();

    for d in 1..=n {
        println!("degree {d}: {} irreducibles (formula {})", sieve.irreducibles().count(d), irreducible_count_formula(5, d));
    }

    let g = Poly::parse(&f, "4,0,0,0,1")?; // T^4 - 1
    let idx = g.encode()?.idx;
    let factors: Vec<String> = factors_as_polys(&f, &sieve.factor(n, idx))
        .iter()
        .map(|(p, e)| if *e == 1 { format!("({p})") } else { format!("({p})^{e}") })
        .collect();
    println!("{g} = {}", factors.join(""));
    for func in [ArithFn::Lambda, ArithFn::Mu, ArithFn::Divisor] {
        let t = tables.table(n, func);
        let s = table_sums(&t);
        println!("{}({g}) = {}; sum over M_4 = {}, sum of squares = {}", func.name(), t.get(idx), s.sum, s.sum_sq);
    }
    Ok(())
}
