pub mod error;
pub mod gf;
pub mod polyring;
pub mod sieve;

pub use error::{Error, Result};
pub use gf::{FieldElement, FieldSpec};
pub use polyring::{Degree, MonicIndex, Poly};
pub use sieve::{ArithFn, ArithTable, Budget};
pub mod rational;
pub mod stats;
pub mod verify;
pub mod cli;
