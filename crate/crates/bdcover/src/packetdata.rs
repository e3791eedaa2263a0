//! Toral invariants, the characters ε on the 2-torsion {±1}^I, the character
//! θ† and moment-map quadratic spaces.

use crate::error::{Error, Result};
use crate::etale::{EtaleElement, QuadEtale};
use crate::localfield::{AdditiveCharacter, FieldElement, LocalField, SquareClass};
use crate::quadforms::{gamma, DiagQuadForm};
use crate::stabconj::TorusParam;
use crate::symbols::{hilbert2, sgn_quadratic};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Sp,
    SO,
}

/// Galois orbits of roots. Pair orbits carry `sum`: when D_i ≡ D_j the roots
/// ε_i − ε_j and ε_i + ε_j lie in different orbits (`sum = false/true`);
/// otherwise a single orbit with `sum = false` contains all four.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootOrbit {
    SpLong(usize),
    SpShortPair { i: usize, j: usize, sum: bool },
    SoShort(usize),
    SoLongPair { i: usize, j: usize, sum: bool },
}

#[derive(Clone, Debug)]
pub struct YParam {
    pub y: Vec<FieldElement>,
}

impl YParam {
    pub fn new(torus: &TorusParam, y: Vec<FieldElement>) -> Result<Self> {
        if y.len() != torus.n() {
            return Err(Error::UnsupportedParameter("one y per block"));
        }
        if y.iter().any(|v| v.is_zero_like() || v.field() != torus.base) {
            return Err(Error::NotRegular);
        }
        for i in 0..y.len() {
            for j in i + 1..y.len() {
                if torus.blocks[i].k == torus.blocks[j].k && (y[i].approx_eq(&y[j]) || y[i].approx_eq(&-y[j])) {
                    return Err(Error::NotRegular);
                }
            }
        }
        Ok(YParam { y })
    }

    /// y_i ∈ K_i.
    pub fn y_elem(&self, torus: &TorusParam, i: usize) -> EtaleElement {
        let k = torus.blocks[i].k;
        k.from_base(&self.y[i]).mul(&k.sqrt_d())
    }

    pub fn det(&self, torus: &TorusParam) -> FieldElement {
        (0..torus.n()).fold(FieldElement::one(torus.base), |acc, i| {
            acc * self.y_elem(torus, i).norm()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionPoint(pub Vec<i8>);

impl TorsionPoint {
    /// All of {±1}^n, starting from (+, …, +).
    pub fn all(n: usize) -> Vec<TorsionPoint> {
        (0..1u32 << n)
            .map(|bits| TorsionPoint((0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect()))
            .collect()
    }
}

fn same_class(torus: &TorusParam, i: usize, j: usize) -> bool {
    torus.blocks[i].k.d_class() == torus.blocks[j].k.d_class()
}

fn is_field(torus: &TorusParam, i: usize) -> bool {
    !torus.blocks[i].k.is_split()
}

/// Orbits with their symmetry flag.
pub fn enumerate_orbits(side: Side, torus: &TorusParam) -> Vec<(RootOrbit, bool)> {
    let n = torus.n();
    let mut out = Vec::new();
    for i in 0..n {
        let single = match side {
            Side::Sp => RootOrbit::SpLong(i),
            Side::SO => RootOrbit::SoShort(i),
        };
        out.push((single, is_field(torus, i)));
        for j in i + 1..n {
            let both = is_field(torus, i) && is_field(torus, j);
            let sums: &[bool] = if both && !same_class(torus, i, j) {
                &[false]
            } else {
                &[false, true]
            };
            for &sum in sums {
                let o = match side {
                    Side::Sp => RootOrbit::SpShortPair { i, j, sum },
                    Side::SO => RootOrbit::SoLongPair { i, j, sum },
                };
                out.push((o, both));
            }
        }
    }
    out
}

/// V_{i,Y} = ⟨−2y_ic_i, 2y_ic_iD_i⟩ ⊕ ⟨(−1)^n det Y⟩ with y_ic_i = y′c′D.
pub fn block_space(torus: &TorusParam, y: &YParam, i: usize) -> Result<DiagQuadForm> {
    let f = torus.base;
    let b = &torus.blocks[i];
    if b.k.is_split() {
        return Err(Error::UnsupportedParameter("block space needs a field block"));
    }
    let d = b.k.d_elem();
    let two_yc = FieldElement::from_int(f, 2) * y.y[i] * b.c * d;
    DiagQuadForm::new(f, vec![-two_yc, two_yc * d, signed_det(torus, y)])
}

fn signed_det(torus: &TorusParam, y: &YParam) -> FieldElement {
    let d = y.det(torus);
    if torus.n() % 2 == 1 {
        -d
    } else {
        d
    }
}

/// ε(U)·(−1, d±(U))_{F,2}.
fn so_split_sign(q: &DiagQuadForm) -> Result<i8> {
    let f = q.field();
    Ok(q.hasse()? * hilbert2(f, &-FieldElement::one(f), &q.disc_pm_elem())?)
}

pub fn toral_invariant(orbit: RootOrbit, torus: &TorusParam, y: Option<&YParam>) -> Result<i8> {
    let f = torus.base;
    let minus_one = -FieldElement::one(f);
    match orbit {
        RootOrbit::SpLong(i) => {
            if !is_field(torus, i) {
                return Err(Error::AsymmetricOrbit);
            }
            Ok(1)
        }
        RootOrbit::SpShortPair { i, j, .. } | RootOrbit::SoLongPair { i, j, .. } => {
            if i == j || !is_field(torus, i) || !is_field(torus, j) {
                return Err(Error::AsymmetricOrbit);
            }
            let di = torus.blocks[i].k.d_elem();
            if same_class(torus, i, j) {
                hilbert2(f, &minus_one, &di)
            } else {
                let ci = torus.blocks[i].k.d_class().expect("field block");
                let cj = torus.blocks[j].k.d_class().expect("field block");
                let e = LocalField::quadratic(f.p(), ci.mul(cj), f.prec())?;
                hilbert2(e, &minus_one.embed(e), &di.embed(e))
            }
        }
        RootOrbit::SoShort(i) => {
            if !is_field(torus, i) {
                return Err(Error::AsymmetricOrbit);
            }
            let y = y.ok_or(Error::UnsupportedParameter("SoShort needs Y"))?;
            so_split_sign(&block_space(torus, y, i)?)
        }
    }
}

fn root_value(orbit: RootOrbit, g0: &TorsionPoint) -> i8 {
    match orbit {
        RootOrbit::SpLong(_) => 1,
        RootOrbit::SoShort(i) => g0.0[i],
        RootOrbit::SpShortPair { i, j, .. } | RootOrbit::SoLongPair { i, j, .. } => g0.0[i] * g0.0[j],
    }
}

/// Product of toral invariants over symmetric orbits on which γ₀ is −1.
pub fn epsilon_char(side: Side, torus: &TorusParam, y: &YParam, g0: &TorsionPoint) -> Result<i8> {
    if g0.0.len() != torus.n() {
        return Err(Error::UnsupportedParameter("one sign per block"));
    }
    if side == Side::SO && torus.blocks.iter().any(|b| b.k.is_split()) {
        return Err(Error::UnsupportedParameter("the SO side needs an anisotropic torus"));
    }
    let mut s = 1;
    for (o, symmetric) in enumerate_orbits(side, torus) {
        if symmetric && root_value(o, g0) == -1 {
            s *= toral_invariant(o, torus, Some(y))?;
        }
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug)]
pub enum DaggerMethod<'a> {
    Hasse,
    Weil(&'a AdditiveCharacter),
}

/// Block value by Weil indices:
/// γ(q⁰)·γ(a)·γ(1)^{-2}·γ(d±(V))·(−1, d±(V))_{F,2}, a = (−1)^n det Y.
pub fn dagger_block_weil(psi: &AdditiveCharacter, torus: &TorusParam, y: &YParam, i: usize) -> Result<i8> {
    let v = block_space(torus, y, i)?;
    let f = torus.base;
    let one = FieldElement::one(f);
    let dpm = v.disc_pm_elem();
    let mut r = gamma(psi, &one)?.pow(-2).mul(&gamma(psi, &dpm)?);
    for e in v.entries() {
        r = r.mul(&gamma(psi, e)?);
    }
    r = r.mul(&crate::localfield::RootOfUnity::from_sign(hilbert2(f, &-one, &dpm)?));
    r.as_sign().ok_or(Error::SnapFailure)
}

pub fn dagger_char(m: u64, torus: &TorusParam, y: &YParam, g0: &TorsionPoint, method: DaggerMethod) -> Result<i8> {
    if m % 4 != 2 {
        return Err(Error::UnsupportedParameter("theta-dagger is defined for m = 2 mod 4"));
    }
    if g0.0.len() != torus.n() {
        return Err(Error::UnsupportedParameter("one sign per block"));
    }
    let mut s = 1;
    for i in 0..torus.n() {
        if g0.0[i] != -1 {
            continue;
        }
        if torus.blocks[i].k.is_split() {
            return Err(Error::UnsupportedParameter("gamma_0 = -1 on a split block"));
        }
        s *= match method {
            DaggerMethod::Hasse => so_split_sign(&block_space(torus, y, i)?)?,
            DaggerMethod::Weil(psi) => dagger_block_weil(psi, torus, y, i)?,
        };
    }
    Ok(s)
}

/// ⊕_i q⁰_{i,Y} ⊕ ⟨(−1)^n det Y⟩; split blocks give ⟨−2y′c′, 2y′c′⟩.
pub fn mm_space(torus: &TorusParam, y: &YParam) -> Result<DiagQuadForm> {
    let f = torus.base;
    let two = FieldElement::from_int(f, 2);
    let mut entries = Vec::new();
    for (i, b) in torus.blocks.iter().enumerate() {
        let d = b.k.d_elem();
        if b.k.is_split() {
            let t = two * y.y[i] * b.c;
            entries.extend([-t, t]);
        } else {
            let t = two * y.y[i] * b.c * d;
            entries.extend([-t, t * d]);
        }
    }
    entries.push(signed_det(torus, y));
    DiagQuadForm::new(f, entries)
}

type Mat = Vec<Vec<FieldElement>>;

fn zeros(f: LocalField, r: usize, c: usize) -> Mat {
    vec![vec![FieldElement::zero(f); c]; r]
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let f = a[0][0].field();
    let mut out = zeros(f, a.len(), b[0].len());
    for i in 0..a.len() {
        for j in 0..b[0].len() {
            out[i][j] = (0..b.len()).fold(FieldElement::zero(f), |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    out
}

fn transpose(a: &Mat) -> Mat {
    (0..a[0].len())
        .map(|j| (0..a.len()).map(|i| a[i][j]).collect())
        .collect()
}

fn mat_approx_eq(a: &Mat, b: &Mat) -> bool {
    a.iter()
        .zip(b)
        .all(|(r, s)| r.iter().zip(s).all(|(x, y)| x.approx_eq(y)))
}

/// Characteristic polynomial det(λ − A), leading coefficient first, by the
/// division-free Samuelson–Berkowitz recursion.
pub fn charpoly(a: &[Vec<FieldElement>]) -> Vec<FieldElement> {
    let n = a.len();
    let f = a[0][0].field();
    let one = FieldElement::one(f);
    let mut c = vec![one, -a[0][0]];
    for r in 1..n {
        let ar: Mat = (0..r).map(|i| a[i][..r].to_vec()).collect();
        let row: Vec<FieldElement> = a[r][..r].to_vec();
        let mut col: Vec<FieldElement> = (0..r).map(|i| a[i][r]).collect();
        let mut t = vec![one, -a[r][r]];
        for _ in 0..r {
            let dot = row
                .iter()
                .zip(&col)
                .fold(FieldElement::zero(f), |acc, (x, y)| acc + *x * *y);
            t.push(-dot);
            col = (0..r)
                .map(|i| (0..r).fold(FieldElement::zero(f), |acc, k| acc + ar[i][k] * col[k]))
                .collect();
        }
        let mut next = vec![FieldElement::zero(f); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for j in 0..=r.min(i) {
                if i - j < t.len() {
                    *slot = *slot + t[i - j] * c[j];
                }
            }
        }
        c = next;
    }
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct MmReport {
    pub form: Vec<FieldElement>,
    pub disc_pm: SquareClass,
    pub gram_matches_form: bool,
    pub y_in_sp: bool,
    pub y_in_so: bool,
    pub charpoly_ok: bool,
    pub torus_preserves_form: bool,
    pub pass: bool,
}

fn basis(k: &QuadEtale) -> [EtaleElement; 2] {
    match k {
        QuadEtale::Split(f) => {
            let (o, z) = (FieldElement::one(*f), FieldElement::zero(*f));
            [EtaleElement::Split(o, z), EtaleElement::Split(z, o)]
        }
        QuadEtale::Field(_) => [k.one(), k.sqrt_d()],
    }
}

fn coords_in_basis(x: &EtaleElement) -> [FieldElement; 2] {
    match x {
        EtaleElement::Split(a, b) => [*a, *b],
        EtaleElement::Field(_) => {
            let (a, b) = x.coords();
            [a, b]
        }
    }
}

fn mult_matrix(torus: &TorusParam, xs: &[EtaleElement]) -> Mat {
    let n = torus.n();
    let mut m = zeros(torus.base, 2 * n, 2 * n);
    for (i, b) in torus.blocks.iter().enumerate() {
        let bs = basis(&b.k);
        for (col, e) in bs.iter().enumerate() {
            let img = coords_in_basis(&xs[i].mul(e));
            for (row, v) in img.iter().enumerate() {
                m[2 * i + row][2 * i + col] = *v;
            }
        }
    }
    m
}

/// Eigenvalue matching between Y ∈ 𝔰𝔭(W) and Y′ = ι∘Y∘pr ∈ 𝔰𝔬(V), plus the
/// Gram-matrix and torus-invariance checks.
pub fn mm_eigen_check(torus: &TorusParam, y: &YParam) -> Result<MmReport> {
    let f = torus.base;
    let n = torus.n();
    let form = mm_space(torus, y)?;
    let ys: Vec<EtaleElement> = (0..n).map(|i| y.y_elem(torus, i)).collect();
    let ymat = mult_matrix(torus, &ys);

    let mut j = zeros(f, 2 * n, 2 * n);
    for (i, b) in torus.blocks.iter().enumerate() {
        let bs = basis(&b.k);
        let c = b.c_elem();
        for r in 0..2 {
            for s in 0..2 {
                j[2 * i + r][2 * i + s] = bs[r].tau().mul(&bs[s]).mul(&c).trace();
            }
        }
    }
    let skew = |a: &Mat, g: &Mat| {
        let l = matmul(&transpose(a), g);
        let r = matmul(g, a);
        let sum: Mat = l
            .iter()
            .zip(&r)
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| *u + *v).collect())
            .collect();
        mat_approx_eq(&sum, &zeros(f, a.len(), a.len()))
    };
    let y_in_sp = skew(&ymat, &j);
    let gram = matmul(&transpose(&ymat), &j);

    let one = FieldElement::one(f);
    let mut gram_ok = mat_approx_eq(&gram, &transpose(&gram));
    for (i, b) in torus.blocks.iter().enumerate() {
        let g2 = [
            [gram[2 * i][2 * i], gram[2 * i][2 * i + 1]],
            [gram[2 * i + 1][2 * i], gram[2 * i + 1][2 * i + 1]],
        ];
        let g2 = if b.k.is_split() {
            let p = [[one, one], [one, -one]];
            let mut out = [[FieldElement::zero(f); 2]; 2];
            for r in 0..2 {
                for s in 0..2 {
                    for a in 0..2 {
                        for c in 0..2 {
                            out[r][s] = out[r][s] + p[a][r] * g2[a][c] * p[c][s];
                        }
                    }
                }
            }
            out
        } else {
            g2
        };
        let e = form.entries();
        gram_ok &= g2[0][0].approx_eq(&e[2 * i])
            && g2[1][1].approx_eq(&e[2 * i + 1])
            && g2[0][1].is_zero_like()
            && g2[1][0].is_zero_like();
        for (a, row) in gram.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if a / 2 != c / 2 && !v.is_zero_like() {
                    gram_ok = false;
                }
            }
        }
    }

    let mut yp = zeros(f, 2 * n + 1, 2 * n + 1);
    let mut gp = zeros(f, 2 * n + 1, 2 * n + 1);
    for r in 0..2 * n {
        for s in 0..2 * n {
            yp[r][s] = ymat[r][s];
            gp[r][s] = gram[r][s];
        }
    }
    gp[2 * n][2 * n] = signed_det(torus, y);
    let y_in_so = skew(&yp, &gp);

    let cy = charpoly(&ymat);
    let cyp = charpoly(&yp);
    let mut expected = cy.clone();
    expected.push(FieldElement::zero(f));
    let charpoly_ok = cyp.len() == expected.len() && cyp.iter().zip(&expected).all(|(a, b)| a.approx_eq(b));

    let ts: Vec<EtaleElement> = torus
        .blocks
        .iter()
        .map(|b| {
            let w = b.k.from_coords(&FieldElement::from_int(f, 2), &FieldElement::one(f));
            w.div(&w.tau())
        })
        .collect::<Result<_>>()?;
    let tmat = mult_matrix(torus, &ts);
    let moved = matmul(&matmul(&transpose(&tmat), &gram), &tmat);
    let torus_ok = mat_approx_eq(&moved, &gram);

    let disc_pm = form.disc_pm()?;
    let pass = gram_ok && y_in_sp && y_in_so && charpoly_ok && torus_ok && disc_pm == SquareClass::One;
    Ok(MmReport {
        form: form.entries().to_vec(),
        disc_pm,
        gram_matches_form: gram_ok,
        y_in_sp,
        y_in_so,
        charpoly_ok,
        torus_preserves_form: torus_ok,
        pass,
    })
}

/// sgn_{K_i/F}(d) for a block (exposed for the scaling law).
pub fn block_sgn(torus: &TorusParam, i: usize, d: &FieldElement) -> Result<i8> {
    sgn_quadratic(&torus.blocks[i].k, d)
}
