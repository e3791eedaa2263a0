//! Diagonal quadratic forms: signed discriminant, Hasse invariant, isotropy,
//! Witt decomposition and Weil indices.

use crate::error::{Error, Result};
use crate::localfield::{AdditiveCharacter, FieldElement, LocalField, RootOfUnity, SquareClass};
use crate::symbols::hilbert2;
use num_complex::Complex64;

const SNAP_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct DiagQuadForm {
    field: LocalField,
    entries: Vec<FieldElement>,
}

impl DiagQuadForm {
    pub fn new(field: LocalField, entries: Vec<FieldElement>) -> Result<Self> {
        for e in &entries {
            if e.field() != field {
                return Err(Error::UnsupportedParameter("entry from another field"));
            }
            if e.is_exact_zero() {
                return Err(Error::DegenerateInput("zero diagonal entry"));
            }
            e.valuation()?;
        }
        Ok(DiagQuadForm { field, entries })
    }

    pub fn from_ints(field: LocalField, entries: &[i64]) -> Result<Self> {
        Self::new(
            field,
            entries.iter().map(|&n| FieldElement::from_int(field, n)).collect(),
        )
    }

    pub fn field(&self) -> LocalField {
        self.field
    }
    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn direct_sum(&self, o: &DiagQuadForm) -> DiagQuadForm {
        assert_eq!(self.field, o.field);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&o.entries);
        DiagQuadForm {
            field: self.field,
            entries,
        }
    }

    pub fn scaled(&self, c: &FieldElement) -> DiagQuadForm {
        DiagQuadForm {
            field: self.field,
            entries: self.entries.iter().map(|e| *e * *c).collect(),
        }
    }

    pub fn det(&self) -> FieldElement {
        self.entries
            .iter()
            .fold(FieldElement::one(self.field), |acc, e| acc * *e)
    }

    /// (−1)^{n(n−1)/2} d₁⋯d_n as an element.
    pub fn disc_pm_elem(&self) -> FieldElement {
        let n = self.rank();
        let d = self.det();
        if (n * n.saturating_sub(1) / 2) % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn disc_pm(&self) -> Result<SquareClass> {
        self.disc_pm_elem().square_class()
    }

    pub fn hasse(&self) -> Result<i8> {
        let mut s = 1;
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                s *= hilbert2(self.field, &self.entries[i], &self.entries[j])?;
            }
        }
        Ok(s)
    }

    pub fn is_isotropic(&self) -> Result<bool> {
        let f = self.field;
        let e = &self.entries;
        let minus_one = -FieldElement::one(f);
        match self.rank() {
            0 | 1 => Ok(false),
            2 => Ok((-(e[0] * e[1])).square_class()? == SquareClass::One),
            3 => Ok(hilbert2(f, &-(e[0] * e[2]), &-(e[1] * e[2]))? == 1),
            4 => {
                let d_square = self.det().square_class()? == SquareClass::One;
                let anisotropic = d_square && self.hasse()? == -hilbert2(f, &minus_one, &minus_one)?;
                Ok(!anisotropic)
            }
            _ => Ok(true),
        }
    }

    /// Anisotropic kernel entries and the number of split-off hyperbolic planes.
    pub fn witt_decompose(&self) -> Result<(Vec<FieldElement>, usize)> {
        if self.rank() > 5 {
            return Err(Error::UnsupportedParameter("witt_decompose supports rank <= 5"));
        }
        let f = self.field;
        let mut cur = self.clone();
        let mut hyperbolic = 0;
        while cur.is_isotropic()? {
            let n = cur.rank() - 2;
            let target_d = (-cur.det()).square_class()?;
            let target_e = cur.hasse()?;
            let reps: Vec<FieldElement> = SquareClass::ALL
                .iter()
                .map(|c| FieldElement::class_rep(f, *c))
                .collect();
            let mut found = None;
            let total = 4usize.pow(n as u32);
            for code in 0..total {
                let entries: Vec<FieldElement> = (0..n).map(|i| reps[(code / 4usize.pow(i as u32)) % 4]).collect();
                let cand = DiagQuadForm { field: f, entries };
                if cand.det().square_class()? != target_d {
                    continue;
                }
                let full = DiagQuadForm::from_ints(f, &[1, -1])?.direct_sum(&cand);
                if full.hasse()? == target_e {
                    found = Some(cand);
                    break;
                }
            }
            cur = found.ok_or(Error::DegenerateInput("no Witt complement found"))?;
            hyperbolic += 1;
        }
        Ok((cur.entries, hyperbolic))
    }
}

/// γ_ψ(t): the normalized Gauss sum of x ↦ ψ(t x²) over t's field, where ψ is
/// a base-field character composed with the trace.
pub fn gamma(psi: &AdditiveCharacter, t: &FieldElement) -> Result<RootOfUnity> {
    let m = t.field();
    if m.base_field() != psi.field() {
        return Err(Error::UnsupportedParameter("character over a different base"));
    }
    if t.is_exact_zero() {
        return Err(Error::DegenerateInput("weil index of zero"));
    }
    let v = t.valuation()?;
    let num = psi.level_on(m) + 1 - v;
    if num.rem_euclid(2) == 0 {
        return Ok(RootOfUnity::one());
    }
    let k = num.div_euclid(2);
    let t = t.truncate(3);
    let pik = FieldElement::pi_pow(m, k);
    let rf = m.residue_field();
    let mut g = Complex64::new(0.0, 0.0);
    for r in rf.elements() {
        let x = pik * FieldElement::from_coords(m, 0, r.c0 as i128, r.c1 as i128);
        g += psi.eval(&(t * x * x))?.to_complex();
    }
    let expected = (rf.q() as f64).sqrt();
    if ((g.norm() - expected) / expected).abs() > SNAP_TOL {
        return Err(Error::SnapFailure);
    }
    let z = g / g.norm();
    let k8 = (z.arg() / (2.0 * std::f64::consts::PI) * 8.0).round() as i128;
    let snapped = RootOfUnity::new(k8, 8);
    if (snapped.to_complex() - z).norm() > SNAP_TOL {
        return Err(Error::SnapFailure);
    }
    Ok(snapped)
}

/// γ_ψ(q) = ∏ γ_ψ(d_i).
pub fn weil_index(psi: &AdditiveCharacter, q: &DiagQuadForm) -> Result<RootOfUnity> {
    q.entries
        .iter()
        .try_fold(RootOfUnity::one(), |acc, d| Ok(acc.mul(&gamma(psi, d)?)))
}
