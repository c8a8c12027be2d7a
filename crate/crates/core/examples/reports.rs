//! JSON and CSV reports of a verification run.

use ffcorr::verify::{from_csv, run_suite, to_csv, to_json, Grid, Suite, VerifyConfig};

fn main() -> ffcorr::Result<()> {
    let grid = Grid { q_list: Some(vec![3, 5]), ..Grid::default() };
    let run = run_suite(Suite::Theorem("t44".parse()?), grid, &VerifyConfig::default())?;
    print!("{}", to_json(&run.reports[..1]));
    let csv = to_csv(&run.reports);
    print!("{csv}");
    assert_eq!(from_csv(&csv)?, run.reports);
    Ok(())
}
