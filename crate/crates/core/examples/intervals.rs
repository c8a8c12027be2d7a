//! Short-interval sums and their variance, against the prime polynomial theorem.

use ffcorr::rational::ExactRational;
use ffcorr::sieve::build_table;
use ffcorr::stats;
use ffcorr::{ArithFn, Budget, FieldSpec, Poly};

fn main() -> ffcorr::Result<()> {
    let f = FieldSpec::from_order(5)?;
    let n = 6;
    let lam = build_table(&f, n, ArithFn::Lambda, Budget::default())?;
    let center = Poly::parse(&f, "1,2,0,0,3,1,1")?;
    println!("mean of Λ over M_6 = {}", stats::mean_value(&lam)?);
    for h in 0..4 {
        let v = stats::interval_variance(&lam, h)?;
        let scale = ExactRational::from_int(5i64.pow(h + 1));
        println!(
            "h={h}: sum over I(A;h) = {:>5}, Var = {:>14}, Var/q^(h+1) = {}",
            stats::interval_sum(&lam, &center, h)?,
            v.to_decimal(8),
            (&v / &scale).to_decimal(6)
        );
    }
    Ok(())
}
