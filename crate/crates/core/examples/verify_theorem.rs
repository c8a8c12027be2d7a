//! Sweep one theorem over its preset q-list and fit the decay of the deviation.
//!
//! `cargo run --release --example verify_theorem -- t13`

use ffcorr::verify::{run_suite, Grid, Suite, VerifyConfig};

fn main() -> ffcorr::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "t12".into());
    let suite: Suite = id.parse()?;
    let run = run_suite(suite, Grid::default(), &VerifyConfig::default())?;
    for r in &run.reports {
        println!(
            "{:<10} q={:<3} computed={:<14} predicted={:<6} normalized={:.3} {}",
            r.theorem,
            r.q,
            r.computed().to_decimal(8),
            r.predicted().to_string(),
            r.normalized_deviation,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    for (family, fit) in &run.fits {
        match fit {
            Ok(fit) => println!("{family}: slope {:.3} over {} points", fit.slope, fit.points),
            Err(e) => println!("{family}: {e}"),
        }
    }
    Ok(())
}
