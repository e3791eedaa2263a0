//! The degree-m Kubota cover of GL(2, F), its blockwise version over a product
//! of SL(2)'s, commutators, lifts of −1 and good elements.

use crate::error::{Error, Result};
use crate::etale::{iota_exponent, EtaleElement, NormOneElement, QuadEtale};
use crate::localfield::{AdditiveCharacter, FieldElement, LocalField, MuM, RootOfUnity};
use crate::quadforms::{weil_index, DiagQuadForm};
use crate::symbols::{hilbert_m, hilbert_m_alg};
use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GL2Element {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl GL2Element {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Result<Self> {
        let g = GL2Element { a, b, c, d };
        if g.det().is_zero_like() {
            return Err(Error::DegenerateInput("singular matrix"));
        }
        Ok(g)
    }

    pub fn field(&self) -> LocalField {
        self.a.field()
    }

    pub fn from_ints(f: LocalField, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let e = |n| FieldElement::from_int(f, n);
        Self::new(e(a), e(b), e(c), e(d))
    }

    pub fn identity(f: LocalField) -> Self {
        Self::scalar(&FieldElement::one(f))
    }

    pub fn scalar(l: &FieldElement) -> Self {
        let z = FieldElement::zero(l.field());
        GL2Element {
            a: *l,
            b: z,
            c: z,
            d: *l,
        }
    }

    pub fn diag(x: &FieldElement, y: &FieldElement) -> Self {
        let z = FieldElement::zero(x.field());
        GL2Element {
            a: *x,
            b: z,
            c: z,
            d: *y,
        }
    }

    /// The Weyl element [[0, −1], [1, 0]].
    pub fn weyl(f: LocalField) -> Self {
        let (z, o) = (FieldElement::zero(f), FieldElement::one(f));
        GL2Element {
            a: z,
            b: -o,
            c: o,
            d: z,
        }
    }

    pub fn det(&self) -> FieldElement {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> FieldElement {
        self.a + self.d
    }

    pub fn mul(&self, o: &GL2Element) -> GL2Element {
        GL2Element {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inv(&self) -> Result<GL2Element> {
        let di = self.det().inv()?;
        Ok(GL2Element {
            a: self.d * di,
            b: -self.b * di,
            c: -self.c * di,
            d: self.a * di,
        })
    }

    pub fn neg(&self) -> GL2Element {
        GL2Element {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    pub fn scale(&self, l: &FieldElement) -> GL2Element {
        GL2Element {
            a: self.a * *l,
            b: self.b * *l,
            c: self.c * *l,
            d: self.d * *l,
        }
    }

    pub fn conj_by(&self, h: &GL2Element) -> Result<GL2Element> {
        Ok(h.mul(self).mul(&h.inv()?))
    }

    pub fn approx_eq(&self, o: &GL2Element) -> bool {
        self.a.approx_eq(&o.a) && self.b.approx_eq(&o.b) && self.c.approx_eq(&o.c) && self.d.approx_eq(&o.d)
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero_like() && self.c.is_zero_like() && self.a.approx_eq(&self.d)
    }

    /// x(g): the lower-left entry if nonzero, else the lower-right one. A
    /// lower-left entry with no known digits counts as zero.
    pub fn x_entry(&self) -> Result<FieldElement> {
        if !self.c.is_zero_like() {
            Ok(self.c)
        } else if !self.d.is_zero_like() {
            Ok(self.d)
        } else {
            Err(Error::PrecisionExhausted)
        }
    }
}

/// The cocycle c(g₁, g₂) = (x(g₁)/x(g₁g₂), det(g₁)x(g₂)/x(g₁g₂))_{F,m}^{-1}.
pub fn kubota_c(g1: &GL2Element, g2: &GL2Element, m: u64) -> Result<MuM> {
    let f = g1.field();
    let x1 = g1.x_entry()?;
    let x2 = g2.x_entry()?;
    let x12 = g1.mul(g2).x_entry()?;
    let x12i = x12.inv()?;
    Ok(hilbert_m(f, m, &(x1 * x12i), &(g1.det() * x2 * x12i))?.inv())
}

/// ζ·s(g) in the cover.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoverElement {
    pub g: GL2Element,
    pub z: MuM,
}

impl CoverElement {
    pub fn section(g: GL2Element, m: u64) -> Self {
        CoverElement { g, z: MuM::one(m) }
    }

    pub fn identity(f: LocalField, m: u64) -> Self {
        Self::section(GL2Element::identity(f), m)
    }

    pub fn m(&self) -> u64 {
        self.z.m
    }

    pub fn mul(&self, o: &CoverElement) -> Result<CoverElement> {
        let c = kubota_c(&self.g, &o.g, self.m())?;
        Ok(CoverElement {
            g: self.g.mul(&o.g),
            z: self.z.mul(&o.z).mul(&c),
        })
    }

    pub fn inv(&self) -> Result<CoverElement> {
        let gi = self.g.inv()?;
        let c = kubota_c(&self.g, &gi, self.m())?;
        Ok(CoverElement {
            g: gi,
            z: self.z.inv().mul(&c.inv()),
        })
    }

    pub fn translate(&self, z: &MuM) -> CoverElement {
        CoverElement {
            g: self.g,
            z: self.z.mul(z),
        }
    }

    pub fn pow(&self, k: u64) -> Result<CoverElement> {
        let mut acc = Self::identity(self.g.field(), self.m());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// s(h)·self·s(h)⁻¹; independent of the lift of h since the kernel is central.
    pub fn conj(&self, h: &GL2Element) -> Result<CoverElement> {
        let hs = CoverElement::section(*h, self.m());
        hs.mul(self)?.mul(&hs.inv()?)
    }

    pub fn approx_eq(&self, o: &CoverElement) -> bool {
        self.z == o.z && self.g.approx_eq(&o.g)
    }
}

/// [g, γ] with g γ̃ g⁻¹ = [g, γ]·γ̃.
pub fn commutator(g: &GL2Element, gt: &CoverElement) -> Result<MuM> {
    let c = gt.conj(g)?;
    if !c.g.approx_eq(&gt.g) {
        return Err(Error::NotCommuting);
    }
    Ok(c.z.mul(&gt.z.inv()))
}

/// [g, γ] for γ, g in the torus K× ⊂ GL(2, F) attached to x, u: with the
/// cocycle above this is (x, τ(u))_{K,m}. The usual (un-negated) Kubota
/// cocycle gives the inverse.
pub fn flicker_commutator(k: &QuadEtale, m: u64, x: &EtaleElement, u: &EtaleElement) -> Result<MuM> {
    hilbert_m_alg(k, m, x, &u.tau())
}

/// ζ·∏ s_i(g_i) in the contracted product of per-block covers.
#[derive(Clone, Debug, Serialize)]
pub struct BlockCoverElement {
    pub blocks: Vec<GL2Element>,
    pub z: MuM,
}

impl BlockCoverElement {
    pub fn block(&self, i: usize) -> CoverElement {
        CoverElement {
            g: self.blocks[i],
            z: MuM::one(self.z.m),
        }
    }

    pub fn mul(&self, o: &BlockCoverElement) -> Result<BlockCoverElement> {
        assert_eq!(self.blocks.len(), o.blocks.len());
        let mut z = self.z.mul(&o.z);
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (g, h) in self.blocks.iter().zip(&o.blocks) {
            z = z.mul(&kubota_c(g, h, z.m)?);
            blocks.push(g.mul(h));
        }
        Ok(BlockCoverElement { blocks, z })
    }

    pub fn translate(&self, z: &MuM) -> BlockCoverElement {
        BlockCoverElement {
            blocks: self.blocks.clone(),
            z: self.z.mul(z),
        }
    }

    pub fn approx_eq(&self, o: &BlockCoverElement) -> bool {
        self.z == o.z
            && self.blocks.len() == o.blocks.len()
            && self.blocks.iter().zip(&o.blocks).all(|(a, b)| a.approx_eq(b))
    }
}

/// Matrix of multiplication by x ∈ K on K ≅ F² for the symplectic form
/// tr(τ(u) v c) with c = c′√D: x₀ + x₁√D ↦ [[x₀, x₁/(2c′)], [2c′D x₁, x₀]].
/// Split algebras act diagonally.
pub fn torus_matrix(k: &QuadEtale, c: &FieldElement, x: &EtaleElement) -> Result<GL2Element> {
    match x {
        EtaleElement::Split(a, b) => {
            GL2Element::new(*a, FieldElement::zero(a.field()), FieldElement::zero(a.field()), *b)
        }
        EtaleElement::Field(_) => {
            let (x0, x1) = x.coords();
            let two_c = FieldElement::from_int(k.base(), 2) * *c;
            GL2Element::new(x0, x1 * two_c.inv()?, two_c * k.d_elem() * x1, x0)
        }
    }
}

fn residue_m0_power_in_norm_one(x: &NormOneElement, m0: u64) -> Result<bool> {
    let k = x.algebra();
    match x.elem() {
        EtaleElement::Split(a, _) => {
            let f = k.base();
            let v = a.valuation()?;
            if v.rem_euclid(m0 as i64) != 0 {
                return Ok(false);
            }
            let rf = f.residue_field();
            let r = a.unit_residue()?;
            let g = gcd(m0, rf.q() - 1);
            Ok(rf.pow(r, ((rf.q() - 1) / g) as i64)? == rf.one())
        }
        EtaleElement::Field(a) => {
            let kf = a.field();
            let rf = kf.residue_field();
            let r = a.unit_residue()?;
            let h = if kf.is_ramified() { 2 } else { kf.p() + 1 };
            let g = gcd(m0, h);
            Ok(rf.pow(r, (h / g) as i64)? == rf.one())
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_m(f: LocalField, m: u64) -> Result<()> {
    if m == 0 || !(f.p() - 1).is_multiple_of(m) {
        return Err(Error::BadModulus(m));
    }
    Ok(())
}

/// x ∈ ι_{Q,m}(K¹); the pro-p part of K¹ is m-divisible, so the residue decides.
pub fn in_iota_image(x: &NormOneElement, m: u64) -> Result<bool> {
    check_m(x.algebra().base(), m)?;
    residue_m0_power_in_norm_one(x, iota_exponent(m) as u64)
}

/// x ∈ {±1}·ι_{Q,m}(K¹), decided through the residue image of K¹.
pub fn is_good(x: &NormOneElement, m: u64) -> Result<bool> {
    check_m(x.algebra().base(), m)?;
    if !x.is_regular() {
        return Err(Error::NotRegular);
    }
    let m0 = iota_exponent(m) as u64;
    Ok(residue_m0_power_in_norm_one(x, m0)? || residue_m0_power_in_norm_one(&x.neg(), m0)?)
}

/// Generators of K×/K^{×m} for p ∤ m: a unit lifting a generator of the
/// residue group (1 + 𝔭 consists of m-th powers) and a uniformizer, per factor.
pub fn unit_group_generators(k: &QuadEtale) -> Result<Vec<EtaleElement>> {
    let lift = |f: LocalField| -> Result<FieldElement> {
        let rf = f.residue_field();
        let r = rf.root_generator(rf.q() - 1)?;
        Ok(FieldElement::from_coords(f, 0, r.c0 as i128, r.c1 as i128))
    };
    match k {
        QuadEtale::Split(f) => {
            let g = lift(*f)?;
            let (o, p) = (FieldElement::one(*f), FieldElement::uniformizer(*f));
            Ok(vec![
                EtaleElement::Split(g, o),
                EtaleElement::Split(o, g),
                EtaleElement::Split(p, o),
                EtaleElement::Split(o, p),
            ])
        }
        QuadEtale::Field(kf) => {
            let g = lift(*kf)?;
            Ok(vec![
                EtaleElement::Field(g),
                EtaleElement::Field(FieldElement::uniformizer(*kf)),
            ])
        }
    }
}

/// The symbol criterion: (x², v)_{K,m} = 1 for all generators v of K×/K^{×m}.
pub fn good_by_symbols(x: &NormOneElement, m: u64) -> Result<bool> {
    let k = x.algebra();
    check_m(k.base(), m)?;
    let x2 = x.elem().mul(&x.elem());
    for v in unit_group_generators(&k)? {
        if !hilbert_m_alg(&k, m, &x2, &v)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Kernel part, in the enlarged cover, of the distinguished lift of −1
/// (matrix −1 in every block) relative to the section s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnlargedRoot(pub RootOfUnity);

pub fn minus_one_tilde(f: LocalField, m: u64, psi: Option<&AdditiveCharacter>, n_blocks: u32) -> Result<EnlargedRoot> {
    check_m(f, m)?;
    let mo = -FieldElement::one(f);
    let mut k = hilbert_m(f, m, &mo, &mo)?.to_root();
    if m % 4 == 2 {
        let psi = psi.ok_or(Error::UnsupportedParameter("m = 2 mod 4 needs an additive character"))?;
        let eps = weil_index(psi, &DiagQuadForm::from_ints(f, &[1, 1])?)?;
        k = k.mul(&eps.inv());
    }
    Ok(EnlargedRoot(k.pow(n_blocks as i64)))
}
