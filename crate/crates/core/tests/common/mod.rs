//! Slow reference implementations used as oracles by the integration tests.
//! Everything here goes through `Poly` arithmetic and trial division; nothing
//! touches the sieve.

#![allow(dead_code)]

use ffcorr::polyring::iter_monic;
use ffcorr::rational::ExactRational;
use ffcorr::{Degree, FieldSpec, Poly};

pub fn deg(f: &Poly) -> u32 {
    match f.degree() {
        Degree::Finite(d) => d,
        _ => panic!("zero polynomial has no degree"),
    }
}

/// Factorization of a monic `f` by trial division with monic polynomials of
/// increasing degree, as `(irreducible, exponent)` pairs.
pub fn factor(f: &Poly) -> Vec<(Poly, u32)> {
    let field = f.field().clone();
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut d = 1;
    while 2 * d <= deg(&rest) {
        for m in iter_monic(&field, d) {
            let g = m.decode(&field);
            let mut e = 0;
            loop {
                let (quo, rem) = rest.divmod(&g).unwrap();
                if !rem.is_zero() {
                    break;
                }
                rest = quo;
                e += 1;
            }
            if e > 0 {
                out.push((g, e));
            }
        }
        d += 1;
    }
    if deg(&rest) > 0 {
        match out.iter_mut().find(|(g, _)| *g == rest) {
            Some(entry) => entry.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    out
}

pub fn lambda(f: &Poly) -> i64 {
    match factor(f).as_slice() {
        [(g, _)] => deg(g) as i64,
        _ => 0,
    }
}

pub fn mu(f: &Poly) -> i64 {
    let fs = factor(f);
    if fs.iter().any(|&(_, e)| e > 1) {
        0
    } else if fs.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn divisor(f: &Poly) -> i64 {
    factor(f).iter().map(|&(_, e)| e as i64 + 1).product()
}

pub fn monic(field: &FieldSpec, n: u32) -> Vec<Poly> {
    iter_monic(field, n).map(|m| m.decode(field)).collect()
}

/// `(1/q^n) sum_{f in M_n} Λ(f) Λ(f + K)`, evaluated polynomial by polynomial.
pub fn autocorr(field: &FieldSpec, n: u32, shift: &Poly) -> ExactRational {
    let mut total = 0i64;
    for f in monic(field, n) {
        let g = f.add(shift).unwrap();
        total += lambda(&f) * lambda(&g);
    }
    ExactRational::new(total, (field.q() as i64).pow(n))
}

/// Nonzero polynomials of degree `< n`, every leading coefficient included.
pub fn shifts_below(field: &FieldSpec, n: u32) -> Vec<Poly> {
    let size = (field.q() as u64).pow(n);
    (1..size).map(|i| Poly::from_dense_index(field, n, i)).collect()
}

/// `binom(a, 3)` with `binom(a, 3) = 0` for `a < 3`.
pub fn binom3(a: i64) -> i64 {
    if a < 3 {
        0
    } else {
        a * (a - 1) * (a - 2) / 6
    }
}

/// Irreducible count of degree `d` over `F_q` by brute force.
pub fn count_irreducible(field: &FieldSpec, d: u32) -> u64 {
    monic(field, d).iter().filter(|f| factor(f).len() == 1 && factor(f)[0].1 == 1).count() as u64
}

/// `A mod Q` reduced to canonical representatives; residues `A` of degree
/// `< deg Q` with `gcd(A, Q) = 1`.
pub fn reduced_residues(modulus: &Poly) -> Vec<Poly> {
    let field = modulus.field();
    let d = deg(modulus);
    let size = (field.q() as u64).pow(d);
    (1..size)
        .map(|i| Poly::from_dense_index(field, d, i))
        .filter(|a| deg(&a.gcd(modulus).unwrap()) == 0)
        .collect()
}
