//! Shifted correlations of Λ and their error terms over F_7.

use ffcorr::sieve::build_table;
use ffcorr::stats;
use ffcorr::{ArithFn, Budget, FieldSpec, Poly};

fn main() -> ffcorr::Result<()> {
    let f = FieldSpec::from_order(7)?;
    let n = 5;
    let lam = build_table(&f, n, ArithFn::Lambda, Budget::default())?;

    for lit in ["1", "0,1", "3,0,1"] {
        let k = Poly::parse(&f, lit)?;
        let e = stats::error_term(&lam, &k)?;
        println!("E({k}, {n}, 7) = {e} ~ {}", e.to_decimal(6));
    }

    for k in 0..3 {
        let s = stats::sum_e(&lam, k)?;
        println!("k={k}: sum over monic K = {}, over all nonzero K = {}", s.monic.to_decimal(6), s.all_nonzero.to_decimal(6));
    }

    let modulus = Poly::parse(&f, "1,0,1")?;
    let twisted = stats::twisted_sum_e(&lam, &modulus)?;
    println!("twisted sum for Q = {modulus}: {}", twisted.to_decimal(6));

    let d = build_table(&f, 3, ArithFn::Divisor, Budget::default())?;
    println!("divisor autocorrelation at K=1, n=3: {}", stats::autocorr(&d, &Poly::one(&f))?);
    Ok(())
}
