//! Tame Hilbert symbols, the quadratic characters sgn_{K/F} and χ_c, and a
//! rational product-formula checker.

use crate::error::{Error, Result};
use crate::etale::{EtaleElement, QuadEtale};
use crate::localfield::{FieldElement, LocalField, MuM, Residue};
use serde::Serialize;

/// Residue of (−1)^{v(a)v(b)} a^{v(b)} b^{−v(a)}.
fn tame_residue(f: LocalField, a: &FieldElement, b: &FieldElement) -> Result<Residue> {
    let rf = f.residue_field();
    let (va, vb) = (a.valuation()?, b.valuation()?);
    let (ra, rb) = (a.unit_residue()?, b.unit_residue()?);
    let mut t = rf.mul(rf.pow(ra, vb)?, rf.pow(rb, -va)?);
    if (va * vb).rem_euclid(2) == 1 {
        t = rf.neg(t);
    }
    Ok(t)
}

fn check_modulus(f: LocalField, m: u64) -> Result<()> {
    if m == 0 || m.is_multiple_of(f.p()) || !(f.q() - 1).is_multiple_of(m) {
        return Err(Error::BadModulus(m));
    }
    Ok(())
}

/// (a, b)_{F,m} as an exponent of ζ_F.
pub fn hilbert_m(f: LocalField, m: u64, a: &FieldElement, b: &FieldElement) -> Result<MuM> {
    check_modulus(f, m)?;
    let rf = f.residue_field();
    let t = tame_residue(f, a, b)?;
    let w = rf.pow(t, ((f.q() - 1) / m) as i64)?;
    let g = rf.root_generator(m)?;
    let k = rf.dlog(g, w).expect("w lies in the order-m subgroup");
    Ok(MuM::new(m, k as i64))
}

/// (a, b)_{F,2} ∈ {±1}.
pub fn hilbert2(f: LocalField, a: &FieldElement, b: &FieldElement) -> Result<i8> {
    let rf = f.residue_field();
    let t = tame_residue(f, a, b)?;
    Ok(if rf.is_square(t) { 1 } else { -1 })
}

/// Symbol on a quadratic étale algebra; componentwise when split.
pub fn hilbert_m_alg(k: &QuadEtale, m: u64, x: &EtaleElement, y: &EtaleElement) -> Result<MuM> {
    match (k, x, y) {
        (QuadEtale::Split(f), EtaleElement::Split(x1, x2), EtaleElement::Split(y1, y2)) => {
            Ok(hilbert_m(*f, m, x1, y1)?.mul(&hilbert_m(*f, m, x2, y2)?))
        }
        (QuadEtale::Field(kf), EtaleElement::Field(a), EtaleElement::Field(b)) => hilbert_m(*kf, m, a, b),
        _ => Err(Error::UnsupportedParameter("element kind does not match the algebra")),
    }
}

/// sgn_{K/F}(x): +1 iff x is a norm from K.
pub fn sgn_quadratic(k: &QuadEtale, x: &FieldElement) -> Result<i8> {
    match k {
        QuadEtale::Split(_) => {
            x.valuation()?;
            Ok(1)
        }
        QuadEtale::Field(_) => hilbert2(k.base(), x, &k.d_elem()),
    }
}

/// χ_c(x) = (x, c)_{F,2}.
pub fn chi_c(f: LocalField, c: &FieldElement, x: &FieldElement) -> Result<i8> {
    hilbert2(f, x, c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaceValue {
    pub place: String,
    pub value: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductFormulaReport {
    pub places: Vec<PlaceValue>,
    pub product: i8,
}

fn split_prime(mut n: i128, p: i128) -> (u32, i128) {
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (k, n)
}

fn prime_factors(mut n: u128, out: &mut Vec<u128>) {
    let mut d = 2u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
}

fn legendre_int(a: i128, p: i128) -> i8 {
    let a = a.rem_euclid(p) as u128;
    let p = p as u128;
    let mut r = 1u128;
    let (mut b, mut e) = (a, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// (A, B)_2 by the closed form (−1)^{ε(u)ε(v) + α ω(v) + β ω(u)}.
pub fn hilbert_q2(a: i128, b: i128) -> i8 {
    let (al, u) = split_prime(a, 2);
    let (be, v) = split_prime(b, 2);
    let eps = |x: i128| ((x.rem_euclid(4) - 1) / 2) as u32;
    let omega = |x: i128| {
        let r = x.rem_euclid(8);
        u32::from(r == 3 || r == 5)
    };
    let e = eps(u) * eps(v) + al * omega(v) + be * omega(u);
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// (A, B)_p for an odd prime p by the tame formula.
pub fn hilbert_qp(a: i128, b: i128, p: i128) -> i8 {
    let (al, u) = split_prime(a, p);
    let (be, v) = split_prime(b, p);
    let mut s: i8 = if (al * be) % 2 == 1 && (p - 1) / 2 % 2 == 1 {
        -1
    } else {
        1
    };
    if be % 2 == 1 {
        s *= legendre_int(u, p);
    }
    if al % 2 == 1 {
        s *= legendre_int(v, p);
    }
    s
}

/// Local symbols of two nonzero rationals at every place where they can be
/// nontrivial, and their product.
pub fn product_formula_check(a: (i64, i64), b: (i64, i64)) -> Result<ProductFormulaReport> {
    if a.0 == 0 || a.1 == 0 || b.0 == 0 || b.1 == 0 {
        return Err(Error::DegenerateInput("zero numerator or denominator"));
    }
    let aa = a.0 as i128 * a.1 as i128;
    let bb = b.0 as i128 * b.1 as i128;
    let mut places = vec![PlaceValue {
        place: "inf".into(),
        value: if aa < 0 && bb < 0 { -1 } else { 1 },
    }];
    places.push(PlaceValue {
        place: "2".into(),
        value: hilbert_q2(aa, bb),
    });
    let mut primes = Vec::new();
    for n in [a.0, a.1, b.0, b.1] {
        prime_factors(n.unsigned_abs() as u128, &mut primes);
    }
    primes.sort_unstable();
    primes.dedup();
    for p in primes.into_iter().filter(|&p| p != 2) {
        places.push(PlaceValue {
            place: p.to_string(),
            value: hilbert_qp(aa, bb, p as i128),
        });
    }
    let product = places.iter().map(|pv| pv.value).product();
    Ok(ProductFormulaReport { places, product })
}
