//! Exact identities over a small field, summarized per family.

use std::collections::BTreeMap;

use ffcorr::verify::check_identities;
use ffcorr::FieldSpec;

fn main() -> ffcorr::Result<()> {
    for q in [3, 4, 5] {
        let rows = check_identities(&FieldSpec::from_order(q)?, 5, 4)?;
        let mut families: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for r in &rows {
            let e = families.entry(r.theorem.as_str()).or_default();
            e.0 += 1;
            e.1 += r.pass as usize;
        }
        println!("q = {q}");
        for (name, (total, ok)) in families {
            println!("  {name:<30} {ok}/{total}");
        }
    }
    Ok(())
}
