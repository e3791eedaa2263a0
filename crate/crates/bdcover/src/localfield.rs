//! Bounded-precision arithmetic in Q_p (p odd) and its quadratic extensions.
//!
//! An element is stored as `p^s (a + b θ)` where `θ² = D` and the pair `(a, b)`
//! is known modulo `p^r`. The pair is kept normalized so that `a` and `b` are
//! not both divisible by `p`; `r = 0` encodes an element indistinguishable
//! from zero at level `s` (written ⊥ below). Exact zero is a separate variant.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub const DEFAULT_PRECISION: u32 = 32;

const MOD_LIMIT_BITS: u32 = 120;

pub(crate) fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if a < (1u128 << 64) && b < (1u128 << 64) {
        return (a * b) % m;
    }
    let mut acc: u128 = 0;
    for i in (0..16).rev() {
        let byte = (b >> (8 * i)) & 0xff;
        acc = (acc << 8) % m;
        acc = (acc + (a * byte) % m) % m;
    }
    acc
}

pub(crate) fn powmod(mut a: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`; `a` must be coprime to `m`.
pub(crate) fn invmod(a: u128, m: u128) -> u128 {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "invmod of a non-unit");
    old_s.rem_euclid(m as i128) as u128
}

fn ipow(p: u64, k: u32) -> u128 {
    (p as u128).pow(k)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn legendre(a: i128, p: u64) -> i8 {
    let a = a.rem_euclid(p as i128) as u128;
    if a == 0 {
        return 0;
    }
    if powmod(a, (p as u128 - 1) / 2, p as u128) == 1 {
        1
    } else {
        -1
    }
}

/// Square classes of F^× for p odd: unit squares, non-square units, and their
/// products with a uniformizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareClass {
    One,
    U,
    P,
    UP,
}

impl SquareClass {
    pub const ALL: [SquareClass; 4] = [SquareClass::One, SquareClass::U, SquareClass::P, SquareClass::UP];

    pub fn label(self) -> &'static str {
        match self {
            SquareClass::One => "1",
            SquareClass::U => "u",
            SquareClass::P => "p",
            SquareClass::UP => "up",
        }
    }

    pub fn from_parts(odd_valuation: bool, unit_square: bool) -> Self {
        match (odd_valuation, unit_square) {
            (false, true) => SquareClass::One,
            (false, false) => SquareClass::U,
            (true, true) => SquareClass::P,
            (true, false) => SquareClass::UP,
        }
    }

    pub fn odd_valuation(self) -> bool {
        matches!(self, SquareClass::P | SquareClass::UP)
    }

    pub fn unit_square(self) -> bool {
        matches!(self, SquareClass::One | SquareClass::P)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: SquareClass) -> SquareClass {
        SquareClass::from_parts(
            self.odd_valuation() ^ o.odd_valuation(),
            self.unit_square() == o.unit_square(),
        )
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(SquareClass::One),
            "u" => Ok(SquareClass::U),
            "p" => Ok(SquareClass::P),
            "up" => Ok(SquareClass::UP),
            _ => Err(Error::Parse(format!("unknown square class {s:?}"))),
        }
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtKind {
    Base,
    Unramified,
    /// Ramified quadratic extension F(√D) with D of class `P` or `UP`.
    Ramified(SquareClass),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalField {
    p: u64,
    kind: ExtKind,
    u: u64,
    d: u64,
    prec: u32,
}

impl LocalField {
    pub fn new(p: u64, kind: ExtKind, prec: u32) -> Result<Self> {
        if p.is_multiple_of(2) || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        if prec == 0 || (prec as f64) * (p as f64).log2() >= MOD_LIMIT_BITS as f64 {
            return Err(Error::BadPrecision { p, prec });
        }
        let u = (2..p)
            .find(|&a| legendre(a as i128, p) == -1)
            .expect("odd prime has a non-residue");
        let d = match kind {
            ExtKind::Base => 0,
            ExtKind::Unramified => u,
            ExtKind::Ramified(SquareClass::P) => p,
            ExtKind::Ramified(SquareClass::UP) => u * p,
            ExtKind::Ramified(_) => return Err(Error::NotNonSquare),
        };
        Ok(LocalField { p, kind, u, d, prec })
    }

    pub fn base(p: u64, prec: u32) -> Result<Self> {
        Self::new(p, ExtKind::Base, prec)
    }

    /// Quadratic extension F(√D) for a non-trivial square class of D.
    pub fn quadratic(p: u64, class: SquareClass, prec: u32) -> Result<Self> {
        match class {
            SquareClass::One => Err(Error::NotNonSquare),
            SquareClass::U => Self::new(p, ExtKind::Unramified, prec),
            c => Self::new(p, ExtKind::Ramified(c), prec),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn kind(&self) -> ExtKind {
        self.kind
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn is_base(&self) -> bool {
        self.kind == ExtKind::Base
    }
    pub fn is_ramified(&self) -> bool {
        matches!(self.kind, ExtKind::Ramified(_))
    }
    /// The smallest positive quadratic non-residue mod p.
    pub fn nonresidue(&self) -> u64 {
        self.u
    }
    /// The defining integer D with θ² = D (0 for the base field).
    pub fn d_int(&self) -> u64 {
        self.d
    }
    /// Square class of D in the base field.
    pub fn d_class(&self) -> Option<SquareClass> {
        match self.kind {
            ExtKind::Base => None,
            ExtKind::Unramified => Some(SquareClass::U),
            ExtKind::Ramified(c) => Some(c),
        }
    }
    pub fn q(&self) -> u64 {
        if self.kind == ExtKind::Unramified {
            self.p * self.p
        } else {
            self.p
        }
    }
    pub fn e(&self) -> u32 {
        if self.is_ramified() {
            2
        } else {
            1
        }
    }
    pub fn base_field(&self) -> LocalField {
        LocalField {
            kind: ExtKind::Base,
            d: 0,
            ..*self
        }
    }
    pub fn residue_field(&self) -> ResidueField {
        ResidueField {
            p: self.p,
            u: self.u,
            quad: self.kind == ExtKind::Unramified,
        }
    }
    /// For a ramified extension, D = p·w; returns w.
    fn w(&self) -> u64 {
        self.d / self.p
    }
    fn modulus(&self, r: u32) -> u128 {
        ipow(self.p, r)
    }
}

impl fmt::Display for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ExtKind::Base => write!(f, "Q_{}", self.p),
            _ => write!(f, "Q_{}(sqrt {})", self.p, self.d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rep {
    Zero,
    Num { s: i64, a: u128, b: u128, r: u32 },
}

#[derive(Clone, Copy, Debug)]
pub struct FieldElement {
    f: LocalField,
    rep: Rep,
}

impl FieldElement {
    fn make(f: LocalField, mut s: i64, a: u128, b: u128, mut r: u32) -> Self {
        let p = f.p as u128;
        let m = f.modulus(r);
        let (mut a, mut b) = (a % m, b % m);
        while r > 0 && a % p == 0 && b % p == 0 {
            a /= p;
            b /= p;
            s += 1;
            r -= 1;
        }
        if r == 0 {
            a = 0;
            b = 0;
        }
        FieldElement {
            f,
            rep: Rep::Num { s, a, b, r },
        }
    }

    fn signed(f: &LocalField, x: i128, r: u32) -> u128 {
        x.rem_euclid(f.modulus(r) as i128) as u128
    }

    pub fn zero(f: LocalField) -> Self {
        FieldElement { f, rep: Rep::Zero }
    }
    pub fn one(f: LocalField) -> Self {
        Self::make(f, 0, 1, 0, f.prec)
    }
    pub fn from_int(f: LocalField, n: i64) -> Self {
        Self::from_rational(f, n as i128, 1).expect("denominator is 1")
    }

    /// The element `num/den` with full precision.
    pub fn from_rational(f: LocalField, num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DegenerateInput("zero denominator"));
        }
        if num == 0 {
            return Ok(Self::zero(f));
        }
        let p = f.p as i128;
        let (mut num, mut den, mut s) = (num, den, 0i64);
        while num % p == 0 {
            num /= p;
            s += 1;
        }
        while den % p == 0 {
            den /= p;
            s -= 1;
        }
        let m = f.modulus(f.prec);
        let nu = Self::signed(&f, num, f.prec);
        let du = Self::signed(&f, den, f.prec);
        Ok(Self::make(f, s, mulmod(nu, invmod(du, m), m), 0, f.prec))
    }

    /// `p^s (a + b θ)` with integer coordinates at full precision.
    pub fn from_coords(f: LocalField, s: i64, a: i128, b: i128) -> Self {
        if a == 0 && b == 0 {
            return Self::zero(f);
        }
        let b = if f.is_base() { 0 } else { b };
        Self::make(f, s, Self::signed(&f, a, f.prec), Self::signed(&f, b, f.prec), f.prec)
    }

    /// θ = √D.
    pub fn sqrt_d(f: LocalField) -> Self {
        assert!(!f.is_base(), "sqrt_d on the base field");
        Self::make(f, 0, 0, 1, f.prec)
    }

    /// π^v for the fixed uniformizer (p, or √D when ramified), exact.
    pub fn pi_pow(f: LocalField, v: i64) -> Self {
        if !f.is_ramified() {
            return Self::make(f, v, 1, 0, f.prec);
        }
        let m = f.modulus(f.prec);
        let k = v.div_euclid(2);
        let wk = powmod(f.w() as u128, k.unsigned_abs() as u128, m);
        let wk = if k < 0 { invmod(wk, m) } else { wk };
        if v.rem_euclid(2) == 0 {
            Self::make(f, k, wk, 0, f.prec)
        } else {
            Self::make(f, k, 0, wk, f.prec)
        }
    }

    pub fn uniformizer(f: LocalField) -> Self {
        Self::pi_pow(f, 1)
    }

    /// Element indistinguishable from zero modulo p^level.
    pub fn bottom(f: LocalField, level: i64) -> Self {
        FieldElement {
            f,
            rep: Rep::Num {
                s: level,
                a: 0,
                b: 0,
                r: 0,
            },
        }
    }

    pub fn field(&self) -> LocalField {
        self.f
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rep == Rep::Zero
    }

    /// True for exact zero and for elements with no known digits.
    pub fn is_zero_like(&self) -> bool {
        match self.rep {
            Rep::Zero => true,
            Rep::Num { r, .. } => r == 0,
        }
    }

    /// Relative precision in p-adic digits (`None` for exact zero).
    pub fn rel_prec(&self) -> Option<u32> {
        match self.rep {
            Rep::Zero => None,
            Rep::Num { r, .. } => Some(r),
        }
    }

    /// Absolute precision: the element is known modulo p^k (`None` if exact zero).
    pub fn abs_prec(&self) -> Option<i64> {
        match self.rep {
            Rep::Zero => None,
            Rep::Num { s, r, .. } => Some(s + r as i64),
        }
    }

    /// Raw representation `(s, a, b, r)`; `None` for exact zero.
    pub fn raw(&self) -> Option<(i64, u128, u128, u32)> {
        match self.rep {
            Rep::Zero => None,
            Rep::Num { s, a, b, r } => Some((s, a, b, r)),
        }
    }

    /// Reinterpret in a field with the same prime (used to move between a
    /// base field and its quadratic extensions).
    pub fn embed(&self, k: LocalField) -> Self {
        assert_eq!(self.f.p, k.p);
        if self.f == k {
            return *self;
        }
        assert!(self.f.is_base(), "embed from a non-base field");
        match self.rep {
            Rep::Zero => Self::zero(k),
            Rep::Num { s, a, r, .. } => Self::make(k, s, a, 0, r),
        }
    }

    /// Coordinates `(x₀, x₁)` over the base with `self = x₀ + x₁ θ`.
    pub fn coords(&self) -> (FieldElement, FieldElement) {
        let bf = self.f.base_field();
        match self.rep {
            Rep::Zero => (Self::zero(bf), Self::zero(bf)),
            Rep::Num { s, a, b, r } => {
                let ca = if a == 0 && r > 0 {
                    Self::bottom(bf, s + r as i64)
                } else {
                    Self::make(bf, s, a, 0, r)
                };
                let cb = if b == 0 && r > 0 {
                    Self::bottom(bf, s + r as i64)
                } else {
                    Self::make(bf, s, b, 0, r)
                };
                (ca, cb)
            }
        }
    }

    /// `x₀ + x₁ θ` from base coordinates.
    pub fn from_base_coords(k: LocalField, x0: &FieldElement, x1: &FieldElement) -> Self {
        x0.embed(k) + x1.embed(k) * Self::sqrt_d(k)
    }

    pub fn valuation(&self) -> Result<i64> {
        match self.rep {
            Rep::Zero => Err(Error::PrecisionExhausted),
            Rep::Num { r: 0, .. } => Err(Error::PrecisionExhausted),
            Rep::Num { s, a, .. } => {
                if self.f.is_ramified() {
                    Ok(2 * s + (a % self.f.p as u128 == 0) as i64)
                } else {
                    Ok(s)
                }
            }
        }
    }

    /// `(v, u)` with `self = π^v u` and `u` a unit.
    pub fn valuation_unit(&self) -> Result<(i64, FieldElement)> {
        let v = self.valuation()?;
        Ok((v, *self * Self::pi_pow(self.f, -v)))
    }

    /// Residue class of the unit part `self / π^v`.
    pub fn unit_residue(&self) -> Result<Residue> {
        let v = self.valuation()?;
        let Rep::Num { s, a, b, .. } = self.rep else {
            unreachable!()
        };
        let p = self.f.p as u128;
        if self.f.is_ramified() {
            let winv = invmod(powmod(self.f.w() as u128 % p, s.unsigned_abs() as u128, p), p);
            let wfac = if s >= 0 { winv } else { invmod(winv, p) };
            let lead = if v % 2 == 0 { a % p } else { b % p };
            Ok(Residue::new((lead * wfac % p) as u64, 0))
        } else {
            Ok(Residue::new((a % p) as u64, (b % p) as u64))
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        let f = self.f;
        let (s, a, b, r) = match self.rep {
            Rep::Zero => return Err(Error::DegenerateInput("inverse of zero")),
            Rep::Num { r: 0, .. } => return Err(Error::PrecisionExhausted),
            Rep::Num { s, a, b, r } => (s, a, b, r),
        };
        let p = f.p as u128;
        let m = f.modulus(r);
        if f.is_ramified() && a % p == 0 {
            if r < 2 {
                return Err(Error::PrecisionExhausted);
            }
            let m1 = f.modulus(r - 1);
            let w = f.w() as u128;
            let unit = Self::make(f, 0, b % m1, mulmod((a / p) % m1, invmod(w, m1), m1), r - 1);
            let theta_inv = Self::make(f, -s - 1, 0, invmod(w % f.modulus(f.prec), f.modulus(f.prec)), f.prec);
            return Ok(theta_inv * unit.inv()?);
        }
        let dm = (f.d as u128) % m;
        let n = (mulmod(a, a, m) + m - mulmod(dm, mulmod(b, b, m), m)) % m;
        let ninv = invmod(n, m);
        Ok(Self::make(f, -s, mulmod(a, ninv, m), (m - mulmod(b, ninv, m)) % m, r))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement> {
        Ok(*self * o.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<FieldElement> {
        let base = if k < 0 { self.inv()? } else { *self };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.f);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq;
            }
            sq = sq * sq;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Galois conjugate `a + bθ ↦ a − bθ` (identity on the base field).
    pub fn conj(&self) -> FieldElement {
        match self.rep {
            Rep::Zero => *self,
            Rep::Num { s, a, b, r } => Self::make(self.f, s, a, (self.f.modulus(r) - b) % self.f.modulus(r).max(1), r),
        }
    }

    /// Trace to the base field.
    pub fn trace(&self) -> FieldElement {
        let bf = self.f.base_field();
        if self.f.is_base() {
            return *self;
        }
        match self.rep {
            Rep::Zero => Self::zero(bf),
            Rep::Num { s, a, r, .. } => {
                if a == 0 && r > 0 {
                    return Self::bottom(bf, s + r as i64);
                }
                Self::make(bf, s, 2 * a, 0, r)
            }
        }
    }

    /// Norm to the base field.
    pub fn norm(&self) -> FieldElement {
        if self.f.is_base() {
            return *self * *self;
        }
        (*self * self.conj()).coords().0
    }

    /// `self ≈ o`: their difference has no known nonzero digit.
    pub fn approx_eq(&self, o: &FieldElement) -> bool {
        (*self - *o).is_zero_like()
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.valuation(), Ok(0))
    }

    /// Square class, valid in any supported field (non-square unit and uniformizer classes).
    pub fn square_class(&self) -> Result<SquareClass> {
        let v = self.valuation()?;
        let r = self.unit_residue()?;
        Ok(SquareClass::from_parts(
            v.rem_euclid(2) == 1,
            self.f.residue_field().is_square(r),
        ))
    }

    /// A representative of a square class in this element's field.
    pub fn class_rep(f: LocalField, c: SquareClass) -> FieldElement {
        let u = match f.kind {
            ExtKind::Unramified => {
                let rf = f.residue_field();
                let r = rf.first_nonsquare();
                Self::from_coords(f, 0, r.c0 as i128, r.c1 as i128)
            }
            _ => Self::from_int(f, f.u as i64),
        };
        let pi = Self::uniformizer(f);
        match c {
            SquareClass::One => Self::one(f),
            SquareClass::U => u,
            SquareClass::P => pi,
            SquareClass::UP => u * pi,
        }
    }

    /// Reduce the relative precision to at most `r` digits.
    pub fn truncate(&self, r: u32) -> FieldElement {
        match self.rep {
            Rep::Zero => *self,
            Rep::Num { s, a, b, r: r0 } => Self::make(self.f, s, a, b, r0.min(r)),
        }
    }

    /// Canonical textual form: `0`, `O(p^k)`, or `p^s*(a+b*t)` with decimal digits.
    pub fn to_text(&self) -> String {
        match self.rep {
            Rep::Zero => "0".into(),
            Rep::Num { s, r: 0, .. } => format!("O({}^{})", self.f.p, s),
            Rep::Num { s, a, b, r } => {
                let body = if self.f.is_base() {
                    format!("{a}")
                } else {
                    format!("{a}+{b}*sqrt({})", self.f.d)
                };
                format!("{}^{}*({}) + O({}^{})", self.f.p, s, body, self.f.p, s + r as i64)
            }
        }
    }

    pub fn random_unit<R: Rng + ?Sized>(f: LocalField, rng: &mut R) -> FieldElement {
        let m = f.modulus(f.prec);
        let p = f.p as u128;
        loop {
            let a = rng.gen_range(0..m);
            let b = if f.is_base() { 0 } else { rng.gen_range(0..m) };
            if f.is_ramified() {
                if a % p != 0 {
                    return Self::make(f, 0, a, b, f.prec);
                }
            } else if a % p != 0 || b % p != 0 {
                return Self::make(f, 0, a, b, f.prec);
            }
        }
    }

    /// π^v · unit with v uniform in `vmin..=vmax`.
    pub fn random_nonzero<R: Rng + ?Sized>(f: LocalField, rng: &mut R, vmin: i64, vmax: i64) -> FieldElement {
        let v = rng.gen_range(vmin..=vmax);
        Self::pi_pow(f, v) * Self::random_unit(f, rng)
    }

    /// Random element of 1 + 𝔭.
    pub fn random_one_plus_p<R: Rng + ?Sized>(f: LocalField, rng: &mut R) -> FieldElement {
        Self::one(f) + Self::random_nonzero(f, rng, 1, 3)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, o: FieldElement) -> FieldElement {
        assert_eq!(self.f, o.f, "field mismatch");
        let f = self.f;
        let (s1, a1, b1, r1, s2, a2, b2, r2) = match (self.rep, o.rep) {
            (Rep::Zero, _) => return o,
            (_, Rep::Zero) => return self,
            (
                Rep::Num {
                    s: s1,
                    a: a1,
                    b: b1,
                    r: r1,
                },
                Rep::Num {
                    s: s2,
                    a: a2,
                    b: b2,
                    r: r2,
                },
            ) => (s1, a1, b1, r1, s2, a2, b2, r2),
        };
        let s = s1.min(s2);
        let abs = (s1 + r1 as i64).min(s2 + r2 as i64);
        if abs <= s {
            return Self::bottom(f, abs);
        }
        let r = (abs - s) as u32;
        let m = f.modulus(r);
        let shift = |k: i64| -> u128 {
            if k >= r as i64 {
                0
            } else {
                ipow(f.p, k as u32) % m
            }
        };
        let (h1, h2) = (shift(s1 - s), shift(s2 - s));
        let a = (mulmod(a1 % m, h1, m) + mulmod(a2 % m, h2, m)) % m;
        let b = (mulmod(b1 % m, h1, m) + mulmod(b2 % m, h2, m)) % m;
        Self::make(f, s, a, b, r)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self.rep {
            Rep::Zero => self,
            Rep::Num { s, r: 0, .. } => Self::bottom(self.f, s),
            Rep::Num { s, a, b, r } => {
                let m = self.f.modulus(r);
                Self::make(self.f, s, (m - a) % m, (m - b) % m, r)
            }
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, o: FieldElement) -> FieldElement {
        self + (-o)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, o: FieldElement) -> FieldElement {
        assert_eq!(self.f, o.f, "field mismatch");
        let f = self.f;
        match (self.rep, o.rep) {
            (Rep::Zero, _) | (_, Rep::Zero) => Self::zero(f),
            (
                Rep::Num {
                    s: s1,
                    a: a1,
                    b: b1,
                    r: r1,
                },
                Rep::Num {
                    s: s2,
                    a: a2,
                    b: b2,
                    r: r2,
                },
            ) => {
                let s = s1 + s2;
                let r = r1.min(r2);
                if r == 0 {
                    return Self::bottom(f, s);
                }
                let m = f.modulus(r);
                let (a1, b1, a2, b2) = (a1 % m, b1 % m, a2 % m, b2 % m);
                let dm = (f.d as u128) % m;
                let a = (mulmod(a1, a2, m) + mulmod(dm, mulmod(b1, b2, m), m)) % m;
                let b = (mulmod(a1, b2, m) + mulmod(a2, b1, m)) % m;
                Self::make(f, s, a, b, r)
            }
        }
    }
}

/// The residue field F_q, realized as F_p or F_p[t]/(t² − u).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueField {
    p: u64,
    u: u64,
    quad: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    pub c0: u64,
    pub c1: u64,
}

impl Residue {
    pub fn new(c0: u64, c1: u64) -> Self {
        Residue { c0, c1 }
    }
    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }
}

impl ResidueField {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn q(&self) -> u64 {
        if self.quad {
            self.p * self.p
        } else {
            self.p
        }
    }
    pub fn one(&self) -> Residue {
        Residue::new(1, 0)
    }
    pub fn reduce(&self, x: i128) -> Residue {
        Residue::new(x.rem_euclid(self.p as i128) as u64, 0)
    }
    pub fn mul(&self, x: Residue, y: Residue) -> Residue {
        let p = self.p;
        let c0 = (x.c0 * y.c0 + self.u * (x.c1 * y.c1 % p)) % p;
        let c1 = (x.c0 * y.c1 + x.c1 * y.c0) % p;
        Residue::new(c0, c1)
    }
    pub fn neg(&self, x: Residue) -> Residue {
        Residue::new((self.p - x.c0) % self.p, (self.p - x.c1) % self.p)
    }
    pub fn pow(&self, x: Residue, k: i64) -> Result<Residue> {
        let base = if k < 0 { self.inv(x)? } else { x };
        let mut e = k.unsigned_abs();
        let (mut acc, mut sq) = (self.one(), base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        Ok(acc)
    }
    pub fn inv(&self, x: Residue) -> Result<Residue> {
        if x.is_zero() {
            return Err(Error::ZeroResidue);
        }
        self.pow(x, self.q() as i64 - 2)
    }
    pub fn order(&self, x: Residue) -> u64 {
        let n = self.q() - 1;
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .find(|&d| self.pow(x, d as i64).unwrap() == self.one())
            .unwrap_or(n)
    }
    pub fn is_square(&self, x: Residue) -> bool {
        self.pow(x, ((self.q() - 1) / 2) as i64).unwrap() == self.one()
    }
    /// All elements, ordered by `(c1, c0)`.
    pub fn elements(&self) -> Vec<Residue> {
        let c1max = if self.quad { self.p } else { 1 };
        (0..c1max)
            .flat_map(|c1| (0..self.p).map(move |c0| Residue::new(c0, c1)))
            .collect()
    }
    pub fn first_nonsquare(&self) -> Residue {
        self.elements()
            .into_iter()
            .find(|x| !x.is_zero() && !self.is_square(*x))
            .expect("q odd")
    }
    /// Fixed generator of the order-m subgroup: the first element (in the
    /// order of [`Self::elements`]) whose multiplicative order is exactly m.
    pub fn root_generator(&self, m: u64) -> Result<Residue> {
        if m == 0 || !(self.q() - 1).is_multiple_of(m) {
            return Err(Error::BadModulus(m));
        }
        Ok(self
            .elements()
            .into_iter()
            .find(|x| !x.is_zero() && self.order(*x) == m)
            .expect("cyclic group has an element of every order dividing q-1"))
    }
    /// Discrete logarithm of `x` to base `g`, brute force.
    pub fn dlog(&self, g: Residue, x: Residue) -> Option<u64> {
        let ord = self.order(g);
        let mut acc = self.one();
        for k in 0..ord {
            if acc == x {
                return Some(k);
            }
            acc = self.mul(acc, g);
        }
        None
    }
}

/// Teichmüller lift ω(r) of a nonzero residue, by Newton iteration on
/// x^{q−1} = 1.
pub fn teichmuller(f: LocalField, r: Residue) -> Result<FieldElement> {
    if r.is_zero() {
        return Err(Error::ZeroResidue);
    }
    let mut x = FieldElement::from_coords(f, 0, r.c0 as i128, r.c1 as i128);
    let q1 = f.q() as i64 - 1;
    let one = FieldElement::one(f);
    let q1e = FieldElement::from_int(f, q1);
    for _ in 0..64 {
        let xq = x.pow(q1)?;
        let err = xq - one;
        if err.is_zero_like() {
            return Ok(x);
        }
        x = x - err * x * (q1e * xq).inv()?;
    }
    Err(Error::PrecisionExhausted)
}

/// Exact root of unity e^{2πi·num/den}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RootOfUnity {
    pub num: u64,
    pub den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl RootOfUnity {
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0);
        let n = num.rem_euclid(den as i128) as u64;
        let g = gcd(n, den).max(1);
        let (n, d) = (n / g, den / g);
        if n == 0 {
            RootOfUnity { num: 0, den: 1 }
        } else {
            RootOfUnity { num: n, den: d }
        }
    }
    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }
    pub fn from_sign(s: i8) -> Self {
        if s == 1 {
            Self::one()
        } else {
            RootOfUnity { num: 1, den: 2 }
        }
    }
    pub fn mul(&self, o: &RootOfUnity) -> RootOfUnity {
        let den = self.den / gcd(self.den, o.den) * o.den;
        let n = self.num as i128 * (den / self.den) as i128 + o.num as i128 * (den / o.den) as i128;
        RootOfUnity::new(n, den)
    }
    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity::new(-(self.num as i128), self.den)
    }
    pub fn pow(&self, k: i64) -> RootOfUnity {
        RootOfUnity::new(self.num as i128 * k as i128, self.den)
    }
    pub fn order(&self) -> u64 {
        self.den
    }
    pub fn is_one(&self) -> bool {
        self.num == 0
    }
    /// `Some(±1)` if this is a sign.
    pub fn as_sign(&self) -> Option<i8> {
        match (self.num, self.den) {
            (0, 1) => Some(1),
            (1, 2) => Some(-1),
            _ => None,
        }
    }
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.num as f64 / self.den as f64)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({}/{})", self.num, self.den)
    }
}

/// An element ζ_F^k of μ_m(F), where ζ_F is the Teichmüller lift of
/// [`ResidueField::root_generator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MuM {
    pub m: u64,
    #[serde(rename = "exp")]
    pub k: u64,
}

impl MuM {
    pub fn new(m: u64, k: i64) -> Self {
        assert!(m > 0);
        MuM {
            m,
            k: k.rem_euclid(m as i64) as u64,
        }
    }
    pub fn one(m: u64) -> Self {
        MuM { m, k: 0 }
    }
    /// The image of a sign in μ_m (m even for −1).
    pub fn from_sign(m: u64, s: i8) -> Self {
        if s == 1 {
            Self::one(m)
        } else {
            assert!(m.is_multiple_of(2), "-1 is not in mu_m for odd m");
            MuM { m, k: m / 2 }
        }
    }
    pub fn mul(&self, o: &MuM) -> MuM {
        assert_eq!(self.m, o.m);
        MuM::new(self.m, (self.k + o.k) as i64)
    }
    pub fn inv(&self) -> MuM {
        MuM::new(self.m, -(self.k as i64))
    }
    pub fn pow(&self, e: i64) -> MuM {
        MuM::new(self.m, (self.k as i128 * e as i128).rem_euclid(self.m as i128) as i64)
    }
    pub fn is_one(&self) -> bool {
        self.k == 0
    }
    /// The embedding ε: ζ_F^k ↦ e^{2πik/m}.
    pub fn to_root(&self) -> RootOfUnity {
        RootOfUnity::new(self.k as i128, self.m)
    }
    pub fn as_sign(&self) -> Option<i8> {
        self.to_root().as_sign()
    }
}

/// ζ_F as a field element.
pub fn zeta(f: LocalField, m: u64) -> Result<FieldElement> {
    teichmuller(f, f.residue_field().root_generator(m)?)
}

/// Additive character ψ_c(x) = ψ(cx), where ψ has level ℓ: trivial on 𝔭^{ℓ+1}
/// and nontrivial on 𝔭^ℓ, given by x ↦ e({x p^{-ℓ-1}}_p).
#[derive(Clone, Copy, Debug)]
pub struct AdditiveCharacter {
    field: LocalField,
    level: i64,
    twist: FieldElement,
}

impl AdditiveCharacter {
    pub fn new(field: LocalField, level: i64, twist: FieldElement) -> Result<Self> {
        if !field.is_base() || twist.field() != field {
            return Err(Error::UnsupportedParameter(
                "additive characters live on the base field",
            ));
        }
        twist.valuation()?;
        Ok(AdditiveCharacter { field, level, twist })
    }

    pub fn standard(field: LocalField, level: i64) -> Self {
        AdditiveCharacter {
            field,
            level,
            twist: FieldElement::one(field),
        }
    }

    pub fn field(&self) -> LocalField {
        self.field
    }
    pub fn level(&self) -> i64 {
        self.level
    }
    pub fn twist(&self) -> FieldElement {
        self.twist
    }

    /// ψ_{c'}: the same character further twisted by c'.
    pub fn twisted(&self, c: &FieldElement) -> Result<Self> {
        Self::new(self.field, self.level, self.twist * *c)
    }

    /// Level of ψ∘tr_{M/F} on the field M.
    pub fn level_on(&self, m: LocalField) -> i64 {
        let eff = self.level - self.twist.valuation().expect("twist checked at construction");
        m.e() as i64 * eff
    }

    pub fn eval(&self, x: &FieldElement) -> Result<RootOfUnity> {
        assert_eq!(x.field().p(), self.field.p());
        let y = self.twist * x.trace();
        let shift = self.level + 1;
        match y.rep {
            Rep::Zero => Ok(RootOfUnity::one()),
            Rep::Num { s, a, r, .. } => {
                let t = s - shift;
                if t >= 0 {
                    return Ok(RootOfUnity::one());
                }
                let need = (-t) as u32;
                if r < need {
                    return Err(Error::PrecisionExhausted);
                }
                let m = self.field.modulus(need);
                if m > u64::MAX as u128 {
                    return Err(Error::PrecisionExhausted);
                }
                Ok(RootOfUnity::new((a % m) as i128, m as u64))
            }
        }
    }
}

/// Convenience: ψ(x) for a standard or twisted character.
pub fn psi_eval(psi: &AdditiveCharacter, x: &FieldElement) -> Result<RootOfUnity> {
    psi.eval(x)
}
