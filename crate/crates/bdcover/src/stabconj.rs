//! Parameters of maximal tori and regular semisimple classes of Sp(2n) with
//! all K_i^♯ = F, stable-conjugacy invariants, κ±, the calibration factor and
//! calibrated stable conjugacy.

use crate::cover::{torus_matrix, BlockCoverElement, CoverElement, GL2Element};
use crate::error::{Error, Result};
use crate::etale::{hilbert90_solve, iota, EtaleElement, NormOneElement, QuadEtale};
use crate::localfield::{FieldElement, LocalField, MuM};
use crate::symbols::{hilbert2, sgn_quadratic};
use serde::Serialize;

/// One block (K_i, c_i) with c_i = c′√D_i (field) or (c′, −c′) (split).
#[derive(Clone, Copy, Debug)]
pub struct TorusBlock {
    pub k: QuadEtale,
    pub c: FieldElement,
}

impl TorusBlock {
    pub fn new(k: QuadEtale, c: FieldElement) -> Result<Self> {
        if c.field() != k.base() {
            return Err(Error::UnsupportedParameter("c must lie in the base field"));
        }
        if c.is_zero_like() {
            return Err(Error::DegenerateInput("c must be nonzero"));
        }
        Ok(TorusBlock { k, c })
    }

    /// c_i as an element of K_i.
    pub fn c_elem(&self) -> EtaleElement {
        self.k.from_base(&self.c).mul(&self.k.sqrt_d())
    }

    pub fn matrix(&self, x: &EtaleElement) -> Result<GL2Element> {
        torus_matrix(&self.k, &self.c, x)
    }
}

#[derive(Clone, Debug)]
pub struct TorusParam {
    pub base: LocalField,
    pub blocks: Vec<TorusBlock>,
}

impl TorusParam {
    pub fn new(base: LocalField, blocks: Vec<TorusBlock>) -> Result<Self> {
        if blocks.iter().any(|b| b.k.base() != base) {
            return Err(Error::UnsupportedParameter("every K_i must have K_i^# = F"));
        }
        Ok(TorusParam { base, blocks })
    }
    pub fn n(&self) -> usize {
        self.blocks.len()
    }
    pub fn field_blocks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(|&i| !self.blocks[i].k.is_split())
    }
}

#[derive(Clone, Debug)]
pub struct RegClassParam {
    pub torus: TorusParam,
    pub x: Vec<NormOneElement>,
}

impl RegClassParam {
    pub fn new(torus: TorusParam, x: Vec<NormOneElement>) -> Result<Self> {
        if x.len() != torus.n() {
            return Err(Error::UnsupportedParameter("one x per block"));
        }
        for (b, xi) in torus.blocks.iter().zip(&x) {
            if xi.algebra() != b.k {
                return Err(Error::UnsupportedParameter("x_i must lie in K_i"));
            }
            if !xi.is_regular() {
                return Err(Error::NotRegular);
            }
        }
        Ok(RegClassParam { torus, x })
    }
}

/// Representatives ν_i modulo N(K_i^×); `None` on split blocks.
#[derive(Clone, Debug)]
pub struct InvClass {
    pub nus: Vec<Option<FieldElement>>,
}

impl InvClass {
    pub fn signs(&self, torus: &TorusParam) -> Result<Vec<i8>> {
        self.nus
            .iter()
            .zip(&torus.blocks)
            .map(|(nu, b)| match nu {
                None => Ok(1),
                Some(nu) => sgn_quadratic(&b.k, nu),
            })
            .collect()
    }

    pub fn is_trivial(&self, torus: &TorusParam) -> Result<bool> {
        Ok(self.signs(torus)?.iter().all(|&s| s == 1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignVector(pub Vec<i8>);

impl SignVector {
    pub fn plus(n: usize) -> Self {
        SignVector(vec![1; n])
    }
    pub fn check(&self, m: u64) -> Result<()> {
        if self.0.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::BadSign);
        }
        if !m.is_multiple_of(4) && self.0.contains(&-1) {
            return Err(Error::BadSign);
        }
        Ok(())
    }
}

pub fn inv_of(torus: &TorusParam, gs: &[GL2Element]) -> Result<InvClass> {
    if gs.len() != torus.n() {
        return Err(Error::UnsupportedParameter("one g per block"));
    }
    let nus = torus
        .blocks
        .iter()
        .zip(gs)
        .map(|(b, g)| if b.k.is_split() { None } else { Some(g.det()) })
        .collect();
    Ok(InvClass { nus })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaSign {
    Plus,
    Minus,
}

pub fn kappa_eval(sign: KappaSign, torus: &TorusParam, inv: &InvClass) -> Result<i8> {
    match sign {
        KappaSign::Plus => Ok(1),
        KappaSign::Minus => Ok(inv.signs(torus)?.iter().product()),
    }
}

/// C_m(ν, γ₀) = (N(ω), ν)_{F,gcd(2,m)}.
pub fn cali_factor(m: u64, nu: &FieldElement, g0: &NormOneElement) -> Result<i8> {
    if m % 2 == 1 {
        nu.valuation()?;
        return Ok(1);
    }
    let w = hilbert90_solve(g0)?;
    hilbert2(g0.algebra().base(), &w.norm(), nu)
}

/// (δ̃, δ₀) with p(δ̃) = σ·ι(δ₀) blockwise. `delta0_mat` holds the matrices
/// of δ₀ in the current tori, which move under conjugation while the abstract
/// parameters stay fixed.
#[derive(Clone, Debug)]
pub struct CalibratedElement {
    pub tilde: BlockCoverElement,
    pub delta0: Vec<NormOneElement>,
    pub delta0_mat: Vec<GL2Element>,
    pub sigma: SignVector,
}

impl CalibratedElement {
    pub fn new(m: u64, torus: &TorusParam, delta0: Vec<NormOneElement>, sigma: SignVector, z: MuM) -> Result<Self> {
        sigma.check(m)?;
        if delta0.len() != torus.n() || sigma.0.len() != torus.n() {
            return Err(Error::UnsupportedParameter("one entry per block"));
        }
        let mut blocks = Vec::new();
        let mut mats = Vec::new();
        for ((b, d0), s) in torus.blocks.iter().zip(&delta0).zip(&sigma.0) {
            let d0m = b.matrix(&d0.elem())?;
            let img = b.matrix(&iota(m, d0)?.elem())?;
            blocks.push(if *s == 1 { img } else { img.neg() });
            mats.push(d0m);
        }
        Ok(CalibratedElement {
            tilde: BlockCoverElement { blocks, z },
            delta0,
            delta0_mat: mats,
            sigma,
        })
    }

    pub fn m(&self) -> u64 {
        self.tilde.z.m
    }

    pub fn translate(&self, z: &MuM) -> Self {
        CalibratedElement {
            tilde: self.tilde.translate(z),
            ..self.clone()
        }
    }

    pub fn approx_eq(&self, o: &CalibratedElement) -> bool {
        self.sigma == o.sigma
            && self.tilde.approx_eq(&o.tilde)
            && self
                .delta0
                .iter()
                .zip(&o.delta0)
                .all(|(a, b)| a.elem().approx_eq(&b.elem()))
            && self.delta0_mat.iter().zip(&o.delta0_mat).all(|(a, b)| a.approx_eq(b))
    }

    /// Product in T̃^+ (componentwise on δ₀, in the cover on δ̃).
    pub fn mul(&self, o: &CalibratedElement) -> Result<CalibratedElement> {
        Ok(CalibratedElement {
            tilde: self.tilde.mul(&o.tilde)?,
            delta0: self.delta0.iter().zip(&o.delta0).map(|(a, b)| a.mul(b)).collect(),
            delta0_mat: self
                .delta0_mat
                .iter()
                .zip(&o.delta0_mat)
                .map(|(a, b)| a.mul(b))
                .collect(),
            sigma: SignVector(self.sigma.0.iter().zip(&o.sigma.0).map(|(a, b)| a * b).collect()),
        })
    }
}

/// Ad(g) on a single block cover element; for σ = −, conjugate the factor
/// t̃′ = (−1~)⁻¹ t̃ and multiply the lift back in.
fn block_conj(g: &GL2Element, mat: &GL2Element, sign: i8, m: u64) -> Result<(GL2Element, MuM)> {
    let t = CoverElement::section(*mat, m);
    let res = if sign == 1 {
        t.conj(g)?
    } else {
        let l = CoverElement::section(GL2Element::identity(mat.field()).neg(), m);
        let tp = l.inv()?.mul(&t)?;
        l.mul(&tp.conj(g)?)?
    };
    Ok((res.g, res.z))
}

/// CAd^σ(g) applied blockwise.
pub fn cad_sigma(gs: &[GL2Element], elem: &CalibratedElement) -> Result<CalibratedElement> {
    let m = elem.m();
    elem.sigma.check(m)?;
    if gs.len() != elem.delta0.len() {
        return Err(Error::UnsupportedParameter("one g per block"));
    }
    let mut z = elem.tilde.z;
    let mut blocks = Vec::new();
    let mut mats = Vec::new();
    for (i, g) in gs.iter().enumerate() {
        let c = cali_factor(m, &g.det(), &elem.delta0[i])?;
        if c == -1 {
            z = z.mul(&MuM::from_sign(m, -1));
        }
        let (mat, k) = block_conj(g, &elem.tilde.blocks[i], elem.sigma.0[i], m)?;
        z = z.mul(&k);
        blocks.push(mat);
        mats.push(elem.delta0_mat[i].conj_by(g)?);
    }
    Ok(CalibratedElement {
        tilde: BlockCoverElement { blocks, z },
        delta0: elem.delta0.clone(),
        delta0_mat: mats,
        sigma: elem.sigma.clone(),
    })
}

fn norm_class_eq(k: &QuadEtale, a: &FieldElement, b: &FieldElement) -> Result<bool> {
    Ok(sgn_quadratic(k, &a.div(b)?)? == 1)
}

/// Equivalence of regular-class parameters: a block bijection matching the
/// algebras, carrying x to x or τ(x) with the matching sign change on c, and
/// c-ratios in the norm group.
pub fn equiv_params(a: &RegClassParam, b: &RegClassParam) -> Result<bool> {
    let n = a.torus.n();
    if b.torus.n() != n || a.torus.base != b.torus.base {
        return Ok(false);
    }
    let mut ok = vec![vec![false; n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in 0..n {
            let (bi, bj) = (&a.torus.blocks[i], &b.torus.blocks[j]);
            if bi.k != bj.k {
                continue;
            }
            let (xi, xj) = (a.x[i].elem(), b.x[j].elem());
            let direct = xi.approx_eq(&xj) && norm_class_eq(&bi.k, &bi.c, &bj.c)?;
            let flipped = xi.tau().approx_eq(&xj) && norm_class_eq(&bi.k, &-bi.c, &bj.c)?;
            ok[i][j] = direct || flipped;
        }
    }
    Ok(has_perfect_matching(&ok))
}

fn has_perfect_matching(ok: &[Vec<bool>]) -> bool {
    let n = ok.len();
    let mut match_of: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, ok: &[Vec<bool>], seen: &mut [bool], match_of: &mut [Option<usize>]) -> bool {
        for j in 0..ok.len() {
            if ok[i][j] && !seen[j] {
                seen[j] = true;
                if match_of[j].is_none_or(|k| augment(k, ok, seen, match_of)) {
                    match_of[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|i| augment(i, ok, &mut vec![false; n], &mut match_of))
}

/// The parameter c′ of the torus g·T·g⁻¹ read off from the matrix of √D:
/// c′ = (lower-left entry of the image of √D)/(2D).
pub fn conjugated_c(block: &TorusBlock, g: &GL2Element) -> Result<FieldElement> {
    if block.k.is_split() {
        return Ok(block.c * g.det());
    }
    let s = block.matrix(&block.k.sqrt_d())?.conj_by(g)?;
    let two_d = FieldElement::from_int(block.k.base(), 2) * block.k.d_elem();
    s.c.div(&two_d)
}
