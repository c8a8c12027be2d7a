//! Binary table cache.
//!
//! Layout, all little-endian:
//! `"FFAT"`, version `u16 = 1`, `p: u32`, `k: u16`, `(k+1) x u32` modulus
//! coefficients (ascending; prime fields store `x`, i.e. `0,1`), `n: u16`,
//! function id `u8`, entry width `u8`, `q^n` entries, CRC32 of the payload.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use super::{ArithFn, ArithTable, TableValues};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::polyring::checked_pow;

pub const MAGIC: &[u8; 4] = b"FFAT";
pub const VERSION: u16 = 1;

fn modulus_coeffs(field: &FieldSpec) -> Vec<u32> {
    if field.k() == 1 {
        vec![0, 1]
    } else {
        field.modulus().to_vec()
    }
}

pub fn payload_crc(table: &ArithTable) -> u32 {
    crc32fast::hash(&table.payload_bytes())
}

pub fn encode(table: &ArithTable) -> Vec<u8> {
    let field = table.field();
    let payload = table.payload_bytes();
    let mut out = Vec::with_capacity(payload.len() + 64);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&field.p().to_le_bytes());
    out.extend_from_slice(&(field.k() as u16).to_le_bytes());
    for c in modulus_coeffs(field) {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out.extend_from_slice(&(table.n() as u16).to_le_bytes());
    out.push(table.func().id());
    out.push(table.func().width());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| Error::BadCache("truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

pub fn decode(buf: &[u8]) -> Result<ArithTable> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::BadCache("bad magic".into()));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(Error::BadCache(format!("unsupported version {version}")));
    }
    let p = r.u32()?;
    let k = r.u16()? as u32;
    let field = FieldSpec::new(p as u64, k).map_err(|e| Error::BadCache(e.to_string()))?;
    let modulus = (0..=k).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    if modulus != modulus_coeffs(&field) {
        return Err(Error::BadCache("modulus does not match the canonical field".into()));
    }
    let n = r.u16()? as u32;
    let func = ArithFn::from_id(r.u8()?).ok_or_else(|| Error::BadCache("unknown function id".into()))?;
    let width = r.u8()?;
    if width != func.width() {
        return Err(Error::BadCache(format!("entry width {width} does not match {}", func.name())));
    }
    let entries = checked_pow(field.q(), n).ok_or_else(|| Error::BadCache("table too large".into()))? as usize;
    let payload = r.take(entries * width as usize)?;
    let crc = r.u32()?;
    if r.pos != buf.len() {
        return Err(Error::BadCache("trailing bytes".into()));
    }
    if crc32fast::hash(payload) != crc {
        return Err(Error::BadCache("CRC mismatch".into()));
    }
    let values = match func {
        ArithFn::Lambda => TableValues::Lambda(Arc::from(payload)),
        ArithFn::Mu => TableValues::Mu(payload.iter().map(|&b| b as i8).collect()),
        ArithFn::Divisor => {
            TableValues::Divisor(payload.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect())
        }
        ArithFn::Spf => {
            TableValues::Spf(payload.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect())
        }
    };
    Ok(ArithTable::new(&field, n, values))
}

pub fn write(table: &ArithTable, path: &Path) -> Result<()> {
    let tmp = path.with_extension("ffat.tmp");
    let mut file = fs::File::create(&tmp)?;
    file.write_all(&encode(table))?;
    file.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read(path: &Path) -> Result<ArithTable> {
    decode(&fs::read(path)?)
}

/// Canonical cache file name, e.g. `lambda_q9_n5.ffat`.
pub fn file_name(q: u32, n: u32, func: ArithFn) -> String {
    format!("{}_q{}_n{}.ffat", func.name(), q, n)
}
