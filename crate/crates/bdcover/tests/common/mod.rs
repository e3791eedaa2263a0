#![allow(dead_code)]

use bdcover::localfield::{FieldElement, LocalField, RootOfUnity};
use num_complex::Complex64;

pub fn q(p: u64) -> LocalField {
    LocalField::base(p, 32).unwrap()
}

pub fn e(f: LocalField, n: i64) -> FieldElement {
    FieldElement::from_int(f, n)
}

pub fn r(f: LocalField, n: i128, d: i128) -> FieldElement {
    FieldElement::from_rational(f, n, d).unwrap()
}

/// p^{-1/2} Σ_{x mod p} e(t x²/p) for a unit t, snapped to an eighth root of unity.
pub fn gauss_oracle(p: u64, t: i64) -> RootOfUnity {
    let s: Complex64 = (0..p)
        .map(|x| {
            let k = (t.rem_euclid(p as i64) as u64 * x * x) % p;
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / p as f64)
        })
        .sum::<Complex64>()
        / (p as f64).sqrt();
    assert!((s.norm() - 1.0).abs() < 1e-9);
    let k = (s.arg() / (std::f64::consts::PI / 4.0)).round() as i128;
    RootOfUnity::new(k, 8)
}
