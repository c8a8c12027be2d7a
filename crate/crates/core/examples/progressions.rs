//! Primes in arithmetic progressions modulo Q over F_3.

use ffcorr::rational::ExactRational;
use ffcorr::sieve::build_table;
use ffcorr::stats;
use ffcorr::{ArithFn, Budget, FieldSpec, Poly};

fn main() -> ffcorr::Result<()> {
    let f = FieldSpec::from_order(3)?;
    let n = 6;
    let lam = build_table(&f, n, ArithFn::Lambda, Budget::default())?;
    let modulus = Poly::parse(&f, "1,0,1")?;
    let data = stats::progression_data(&lam, &modulus)?;
    println!("Q = {modulus}, Φ(Q) = {}", data.phi);
    for (i, (&psi, &reduced)) in data.psi.iter().zip(&data.reduced).enumerate() {
        let a = Poly::from_dense_index(&f, 2, i as u64);
        println!("  Ψ({n}; Q, {a}) = {psi}{}", if reduced { "" } else { "  (not coprime)" });
    }
    let g = stats::progression_variance(&lam, &modulus)?;
    println!("G(n;Q) = {g}, G/q^n = {}", (&g / &ExactRational::from_int(3i64.pow(n))).to_decimal(6));
    Ok(())
}
