//! Rank-one transfer factors Δ± and the function ∇ on the twofold cover.

use crate::cover::{CoverElement, GL2Element};
use crate::error::{Error, Result};
use crate::etale::{hilbert90_solve, EtaleElement, NormOneElement, QuadEtale};
use crate::localfield::{AdditiveCharacter, FieldElement, RootOfUnity};
use crate::quadforms::gamma;
use crate::stabconj::CalibratedElement;
use crate::symbols::hilbert2;
use serde::Serialize;

fn rank_one(elem: &CalibratedElement) -> Result<()> {
    if elem.delta0.len() != 1 {
        return Err(Error::UnsupportedParameter("transfer factors are defined in rank one"));
    }
    Ok(())
}

fn need_psi(m: u64, psi: Option<&AdditiveCharacter>) -> Result<Option<&AdditiveCharacter>> {
    if !m.is_multiple_of(2) {
        return Err(Error::BadModulus(m));
    }
    if m % 4 == 2 && psi.is_none() {
        return Err(Error::UnsupportedParameter("m = 2 mod 4 needs an additive character"));
    }
    Ok(psi)
}

/// A Hilbert 90 solution for −x₀ from one for x₀.
pub fn omega_for_negated(k: &QuadEtale, w: &EtaleElement) -> EtaleElement {
    match k {
        QuadEtale::Split(f) => EtaleElement::Split(-FieldElement::one(*f), FieldElement::one(*f)).mul(w),
        QuadEtale::Field(_) => k.sqrt_d().mul(w),
    }
}

fn delta_plus_raw(
    m: u64,
    psi: Option<&AdditiveCharacter>,
    gt: &CoverElement,
    d0: &NormOneElement,
    omega: Option<EtaleElement>,
) -> Result<RootOfUnity> {
    let delta = gt.g;
    if delta.is_scalar() {
        return Err(Error::NotRegular);
    }
    let f = delta.field();
    let w = match omega {
        Some(w) => w,
        None => hilbert90_solve(d0)?,
    };
    if !w.div(&w.tau())?.approx_eq(&d0.elem()) {
        return Err(Error::DegenerateInput("omega does not solve Hilbert 90 for delta_0"));
    }
    let nw = w.norm();
    let mut val = gt.z.to_root();
    if m % 4 == 2 {
        let psi = psi.expect("checked by need_psi");
        val = val
            .mul(&gamma(psi, &FieldElement::one(f))?)
            .mul(&gamma(psi, &nw)?.inv());
    }
    let s = hilbert2(f, &nw, &-delta.x_entry()?)?;
    Ok(val.mul(&RootOfUnity::from_sign(s)))
}

/// Δ⁺(δ̃, δ₀) = ζ·[γ_ψ(1)/γ_ψ(N ω)]^{[m ≡ 2 mod 4]}·(N ω, −x(δ))_{F,2}.
pub fn delta_plus(
    m: u64,
    psi: Option<&AdditiveCharacter>,
    elem: &CalibratedElement,
    omega: Option<EtaleElement>,
) -> Result<RootOfUnity> {
    rank_one(elem)?;
    let psi = need_psi(m, psi)?;
    if elem.m() != m {
        return Err(Error::BadModulus(m));
    }
    delta_plus_raw(
        m,
        psi,
        &elem.tilde.block(0).translate(&elem.tilde.z),
        &elem.delta0[0],
        omega,
    )
}

/// Δ⁻(δ̃, δ₀) = [γ_ψ(1)²]^{[m ≡ 2 mod 4]}·Δ⁺(s(−1)δ̃, δ₀) on T̃⁻. For m ≡ 2 mod 4
/// the element is given in T̃⁺ and δ₀ is replaced by −δ₀ (same δ̃).
pub fn delta_minus(
    m: u64,
    psi: Option<&AdditiveCharacter>,
    elem: &CalibratedElement,
    omega: Option<EtaleElement>,
) -> Result<RootOfUnity> {
    rank_one(elem)?;
    let psi = need_psi(m, psi)?;
    if elem.m() != m {
        return Err(Error::BadModulus(m));
    }
    let sign = elem.sigma.0[0];
    let d0 = elem.delta0[0];
    let (d0, omega) = if m % 4 == 2 {
        if sign != 1 {
            return Err(Error::BadSign);
        }
        (d0.neg(), omega.map(|w| omega_for_negated(&d0.algebra(), &w)))
    } else {
        if sign != -1 {
            return Err(Error::BadSign);
        }
        (d0, omega)
    };
    let gt = elem.tilde.block(0).translate(&elem.tilde.z);
    let f = gt.g.field();
    let s_minus = CoverElement::section(GL2Element::identity(f).neg(), m);
    let shifted = s_minus.mul(&gt)?;
    let mut val = delta_plus_raw(m, psi, &shifted, &d0, omega)?;
    if m % 4 == 2 {
        let g1 = gamma(psi.expect("checked"), &FieldElement::one(f))?;
        val = val.mul(&g1.pow(2));
    }
    Ok(val)
}

/// ∇(γ̃) = ζ·γ_ψ(⟨−c, c(2 + tr γ)⟩) on the twofold cover of SL(2), after
/// conjugating so that the lower-left entry is nonzero.
pub fn nabla_rank1(psi: &AdditiveCharacter, gt: &CoverElement) -> Result<RootOfUnity> {
    if gt.m() != 2 {
        return Err(Error::BadModulus(gt.m()));
    }
    let f = gt.g.field();
    if !gt.g.det().approx_eq(&FieldElement::one(f)) {
        return Err(Error::UnsupportedParameter("nabla is defined on SL(2)"));
    }
    if gt.g.is_scalar() {
        return Err(Error::NotRegular);
    }
    let mut e = *gt;
    if e.g.c.is_zero_like() {
        e = e.conj(&GL2Element::weyl(f))?;
    }
    if e.g.c.is_zero_like() {
        e = e.conj(&GL2Element::from_ints(f, 1, 0, 1, 1)?)?;
    }
    if e.g.c.is_zero_like() {
        return Err(Error::LowerLeftZero);
    }
    let c = e.g.c;
    let t = FieldElement::from_int(f, 2) + e.g.trace();
    if t.is_zero_like() {
        return Err(Error::NotRegular);
    }
    Ok(e.z.to_root().mul(&gamma(psi, &-c)?).mul(&gamma(psi, &(c * t))?))
}

#[derive(Clone, Debug, Serialize)]
pub struct M2Report {
    pub delta_plus: RootOfUnity,
    pub nabla: RootOfUnity,
    pub equal: bool,
}

pub fn m2_compare(psi: &AdditiveCharacter, elem: &CalibratedElement) -> Result<M2Report> {
    let dp = delta_plus(2, Some(psi), elem, None)?;
    let nb = nabla_rank1(psi, &elem.tilde.block(0).translate(&elem.tilde.z))?;
    Ok(M2Report {
        delta_plus: dp,
        nabla: nb,
        equal: dp == nb,
    })
}
