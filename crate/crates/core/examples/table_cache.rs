//! Writing a table to the binary cache and reading it back.

use ffcorr::sieve::{build_table, cache};
use ffcorr::{ArithFn, Budget, FieldSpec};

fn main() -> ffcorr::Result<()> {
    let f = FieldSpec::from_order(9)?;
    let table = build_table(&f, 4, ArithFn::Divisor, Budget::default())?;
    let dir = std::env::temp_dir().join("ffcorr-example-cache");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(cache::file_name(9, 4, ArithFn::Divisor));
    cache::write(&table, &path)?;
    let back = cache::read(&path)?;
    println!("{} ({} bytes), crc32 {:08x}", path.display(), std::fs::metadata(&path)?.len(), cache::payload_crc(&back));
    println!("round trip equal: {}", back == table);

    let mut bytes = std::fs::read(&path)?;
    let i = bytes.len() - 8;
    bytes[i] ^= 0xff;
    println!("after flipping a byte: {}", cache::decode(&bytes).unwrap_err());
    Ok(())
}
