//! Shifted products of Möbius values against the bound 2rnq^(n-1/2) + 3rn^2q^(n-1).

use ffcorr::sieve::build_table;
use ffcorr::verify::{chowla_samples, CHOWLA_SEED};
use ffcorr::{stats, ArithFn, Budget, FieldSpec};

fn main() -> ffcorr::Result<()> {
    for q in [3, 5, 7] {
        let f = FieldSpec::from_order(q)?;
        let n = 4;
        let mu = build_table(&f, n, ArithFn::Mu, Budget::default())?;
        let samples = chowla_samples(&mu, 5, CHOWLA_SEED)?;
        println!("q={q}, n={n}, bound {:.0}", stats::chowla_bound(2, n, q as u32));
        for s in samples {
            println!(
                "  μ(f+{})^{} μ(f+{})^{}: {:>6}",
                s.shifts[0], s.epsilons[0], s.shifts[1], s.epsilons[1], s.sum.value
            );
        }
    }
    Ok(())
}
