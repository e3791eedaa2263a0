//! Quadratic étale algebras K/F with involution τ, the norm-one torus K¹,
//! Hilbert 90, and the isogeny ι(t) = t^{m/gcd(2,m)}.

use crate::error::{Error, Result};
use crate::localfield::{zeta, FieldElement, LocalField, SquareClass};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadEtale {
    Split(LocalField),
    /// F(√D); the stored field is the extension.
    Field(LocalField),
}

impl QuadEtale {
    pub fn split(base: LocalField) -> Self {
        QuadEtale::Split(base.base_field())
    }

    pub fn field(base: LocalField, class: SquareClass) -> Result<Self> {
        Ok(QuadEtale::Field(LocalField::quadratic(base.p(), class, base.prec())?))
    }

    /// `None` for split, else the class of D.
    pub fn from_class(base: LocalField, class: Option<SquareClass>) -> Result<Self> {
        match class {
            None => Ok(Self::split(base)),
            Some(c) => Self::field(base, c),
        }
    }

    pub fn base(&self) -> LocalField {
        match self {
            QuadEtale::Split(f) => *f,
            QuadEtale::Field(k) => k.base_field(),
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(self, QuadEtale::Split(_))
    }

    pub fn ext(&self) -> Option<LocalField> {
        match self {
            QuadEtale::Split(_) => None,
            QuadEtale::Field(k) => Some(*k),
        }
    }

    pub fn d_class(&self) -> Option<SquareClass> {
        self.ext().and_then(|k| k.d_class())
    }

    /// D as a base-field element (1 for split, where F×F = F[t]/(t²−1)).
    pub fn d_elem(&self) -> FieldElement {
        match self {
            QuadEtale::Split(f) => FieldElement::one(*f),
            QuadEtale::Field(k) => FieldElement::from_int(k.base_field(), k.d_int() as i64),
        }
    }

    pub fn label(&self) -> &'static str {
        match self.d_class() {
            None => "split",
            Some(c) => c.label(),
        }
    }

    pub fn one(&self) -> EtaleElement {
        self.from_base(&FieldElement::one(self.base()))
    }

    pub fn from_base(&self, x: &FieldElement) -> EtaleElement {
        match self {
            QuadEtale::Split(_) => EtaleElement::Split(*x, *x),
            QuadEtale::Field(k) => EtaleElement::Field(x.embed(*k)),
        }
    }

    /// The element √D (field) or (1, −1) (split).
    pub fn sqrt_d(&self) -> EtaleElement {
        match self {
            QuadEtale::Split(f) => EtaleElement::Split(FieldElement::one(*f), -FieldElement::one(*f)),
            QuadEtale::Field(k) => EtaleElement::Field(FieldElement::sqrt_d(*k)),
        }
    }

    /// x₀ + x₁·√D in the sense of [`Self::sqrt_d`].
    pub fn from_coords(&self, x0: &FieldElement, x1: &FieldElement) -> EtaleElement {
        self.from_base(x0).add(&self.from_base(x1).mul(&self.sqrt_d()))
    }

    pub fn contains(&self, x: &EtaleElement) -> bool {
        match (self, x) {
            (QuadEtale::Split(f), EtaleElement::Split(a, b)) => a.field() == *f && b.field() == *f,
            (QuadEtale::Field(k), EtaleElement::Field(a)) => a.field() == *k,
            _ => false,
        }
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> EtaleElement {
        match self {
            QuadEtale::Split(f) => {
                EtaleElement::Split(FieldElement::random_unit(*f, rng), FieldElement::random_unit(*f, rng))
            }
            QuadEtale::Field(k) => EtaleElement::Field(FieldElement::random_unit(*k, rng)),
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, vmin: i64, vmax: i64) -> EtaleElement {
        match self {
            QuadEtale::Split(f) => EtaleElement::Split(
                FieldElement::random_nonzero(*f, rng, vmin, vmax),
                FieldElement::random_nonzero(*f, rng, vmin, vmax),
            ),
            QuadEtale::Field(k) => EtaleElement::Field(FieldElement::random_nonzero(*k, rng, vmin, vmax)),
        }
    }

    /// A random element of K¹, drawn as ω/τ(ω).
    pub fn sample_norm_one<R: Rng + ?Sized>(&self, rng: &mut R) -> NormOneElement {
        let w = self.random_nonzero(rng, 0, 2);
        let x = w.div(&w.tau()).expect("w is a unit times a uniformizer power");
        NormOneElement { k: *self, x }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum EtaleElement {
    Split(FieldElement, FieldElement),
    Field(FieldElement),
}

impl EtaleElement {
    fn zip(&self, o: &EtaleElement, f: impl Fn(FieldElement, FieldElement) -> FieldElement) -> EtaleElement {
        match (self, o) {
            (EtaleElement::Split(a, b), EtaleElement::Split(c, d)) => EtaleElement::Split(f(*a, *c), f(*b, *d)),
            (EtaleElement::Field(a), EtaleElement::Field(c)) => EtaleElement::Field(f(*a, *c)),
            _ => panic!("mixing split and field elements"),
        }
    }

    pub fn add(&self, o: &EtaleElement) -> EtaleElement {
        self.zip(o, |a, b| a + b)
    }
    pub fn sub(&self, o: &EtaleElement) -> EtaleElement {
        self.zip(o, |a, b| a - b)
    }
    pub fn mul(&self, o: &EtaleElement) -> EtaleElement {
        self.zip(o, |a, b| a * b)
    }
    pub fn neg(&self) -> EtaleElement {
        match self {
            EtaleElement::Split(a, b) => EtaleElement::Split(-*a, -*b),
            EtaleElement::Field(a) => EtaleElement::Field(-*a),
        }
    }
    pub fn inv(&self) -> Result<EtaleElement> {
        match self {
            EtaleElement::Split(a, b) => Ok(EtaleElement::Split(a.inv()?, b.inv()?)),
            EtaleElement::Field(a) => Ok(EtaleElement::Field(a.inv()?)),
        }
    }
    pub fn div(&self, o: &EtaleElement) -> Result<EtaleElement> {
        Ok(self.mul(&o.inv()?))
    }
    pub fn pow(&self, k: i64) -> Result<EtaleElement> {
        match self {
            EtaleElement::Split(a, b) => Ok(EtaleElement::Split(a.pow(k)?, b.pow(k)?)),
            EtaleElement::Field(a) => Ok(EtaleElement::Field(a.pow(k)?)),
        }
    }
    pub fn tau(&self) -> EtaleElement {
        match self {
            EtaleElement::Split(a, b) => EtaleElement::Split(*b, *a),
            EtaleElement::Field(a) => EtaleElement::Field(a.conj()),
        }
    }
    pub fn norm(&self) -> FieldElement {
        match self {
            EtaleElement::Split(a, b) => *a * *b,
            EtaleElement::Field(a) => a.norm(),
        }
    }
    pub fn trace(&self) -> FieldElement {
        match self {
            EtaleElement::Split(a, b) => *a + *b,
            EtaleElement::Field(a) => a.trace(),
        }
    }
    /// Coordinates over the base w.r.t. {1, √D} (split: √D = (1, −1)).
    pub fn coords(&self) -> (FieldElement, FieldElement) {
        match self {
            EtaleElement::Split(a, b) => {
                let half = FieldElement::from_rational(a.field(), 1, 2).expect("p odd");
                ((*a + *b) * half, (*a - *b) * half)
            }
            EtaleElement::Field(a) => a.coords(),
        }
    }
    pub fn approx_eq(&self, o: &EtaleElement) -> bool {
        match (self, o) {
            (EtaleElement::Split(a, b), EtaleElement::Split(c, d)) => a.approx_eq(c) && b.approx_eq(d),
            (EtaleElement::Field(a), EtaleElement::Field(c)) => a.approx_eq(c),
            _ => false,
        }
    }
    pub fn is_zero_like(&self) -> bool {
        match self {
            EtaleElement::Split(a, b) => a.is_zero_like() || b.is_zero_like(),
            EtaleElement::Field(a) => a.is_zero_like(),
        }
    }
    pub fn is_one(&self) -> bool {
        self.approx_eq(&self.one_like())
    }
    pub fn is_minus_one(&self) -> bool {
        self.approx_eq(&self.one_like().neg())
    }
    pub fn one_like(&self) -> EtaleElement {
        match self {
            EtaleElement::Split(a, _) => {
                EtaleElement::Split(FieldElement::one(a.field()), FieldElement::one(a.field()))
            }
            EtaleElement::Field(a) => EtaleElement::Field(FieldElement::one(a.field())),
        }
    }
    pub fn to_text(&self) -> String {
        match self {
            EtaleElement::Split(a, b) => format!("({}, {})", a, b),
            EtaleElement::Field(a) => a.to_text(),
        }
    }
}

impl serde::Serialize for EtaleElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

/// An element of K¹ = ker N.
#[derive(Clone, Copy, Debug)]
pub struct NormOneElement {
    k: QuadEtale,
    x: EtaleElement,
}

impl NormOneElement {
    pub fn new(k: QuadEtale, x: EtaleElement) -> Result<Self> {
        if !k.contains(&x) {
            return Err(Error::UnsupportedParameter("element does not lie in the algebra"));
        }
        if !x.norm().approx_eq(&FieldElement::one(k.base())) {
            return Err(Error::DegenerateInput("element does not have norm one"));
        }
        Ok(NormOneElement { k, x })
    }

    /// (a, a⁻¹) in the split algebra.
    pub fn split_from(base: LocalField, a: &FieldElement) -> Result<Self> {
        let k = QuadEtale::split(base);
        Self::new(k, EtaleElement::Split(*a, a.inv()?))
    }

    pub fn algebra(&self) -> QuadEtale {
        self.k
    }
    pub fn elem(&self) -> EtaleElement {
        self.x
    }
    pub fn mul(&self, o: &NormOneElement) -> NormOneElement {
        NormOneElement {
            k: self.k,
            x: self.x.mul(&o.x),
        }
    }
    pub fn inv(&self) -> NormOneElement {
        NormOneElement {
            k: self.k,
            x: self.x.tau(),
        }
    }
    pub fn neg(&self) -> NormOneElement {
        NormOneElement {
            k: self.k,
            x: self.x.neg(),
        }
    }
    pub fn pow(&self, e: i64) -> Result<NormOneElement> {
        Ok(NormOneElement {
            k: self.k,
            x: self.x.pow(e)?,
        })
    }
    /// Regular: x ≠ ±1 (first coordinate ≠ ±1 when split).
    pub fn is_regular(&self) -> bool {
        match self.x {
            EtaleElement::Split(a, _) => {
                let one = FieldElement::one(a.field());
                !a.approx_eq(&one) && !a.approx_eq(&-one)
            }
            EtaleElement::Field(_) => !self.x.is_one() && !self.x.is_minus_one(),
        }
    }
}

/// ω ∈ K× with ω/τ(ω) = x₀.
pub fn hilbert90_solve(x0: &NormOneElement) -> Result<EtaleElement> {
    match x0.x {
        EtaleElement::Split(a, _) => Ok(EtaleElement::Split(a, FieldElement::one(a.field()))),
        EtaleElement::Field(x) => {
            let w = FieldElement::one(x.field()) + x;
            if w.is_zero_like() {
                Ok(x0.k.sqrt_d())
            } else {
                Ok(EtaleElement::Field(w))
            }
        }
    }
}

pub fn iota_exponent(m: u64) -> i64 {
    (if m.is_multiple_of(2) { m / 2 } else { m }) as i64
}

/// ι_{Q,m}(x₀) = x₀^{m/gcd(2,m)}.
pub fn iota(m: u64, x0: &NormOneElement) -> Result<NormOneElement> {
    x0.pow(iota_exponent(m))
}

/// Generators of ker ι on K¹.
pub fn iota_kernel(m: u64, k: &QuadEtale) -> Result<Vec<NormOneElement>> {
    let base = k.base();
    if m == 0 || !(base.p() - 1).is_multiple_of(m) {
        return Err(Error::BadModulus(m));
    }
    let m0 = iota_exponent(m) as u64;
    match k {
        QuadEtale::Split(_) => {
            if m0 == 1 {
                return Ok(vec![]);
            }
            let z = zeta(base, m0)?;
            Ok(vec![NormOneElement::split_from(base, &z)?])
        }
        QuadEtale::Field(_) => {
            if m.is_multiple_of(4) {
                Ok(vec![NormOneElement {
                    k: *k,
                    x: k.one().neg(),
                }])
            } else {
                Ok(vec![])
            }
        }
    }
}
