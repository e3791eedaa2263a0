//! Textual literals for field elements, étale-algebra elements and matrices.
//!
//! A field literal is a sum of terms, each a rational `a` or `a/b` optionally
//! followed by `√D`, `sqrtD` or `sqrt(D)` (a bare `√D` means one). Examples:
//! `3`, `-2/7`, `1/9+2√D`, `sqrtD`, `5-1/3*sqrtD`. Split-algebra elements are
//! pairs `a,b`.

use crate::cover::GL2Element;
use crate::error::{Error, Result};
use crate::etale::{EtaleElement, QuadEtale};
use crate::localfield::{FieldElement, LocalField};

const ROOT_SUFFIXES: [&str; 3] = ["√D", "sqrt(D)", "sqrtD"];

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// (numerator, denominator) of `[-]digits[/digits]`.
pub fn parse_rational(s: &str) -> Result<(i128, i128)> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let int = |t: &str| -> Result<i128> {
        let t = t.trim();
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(perr(format!("not an integer: {t:?}")));
        }
        t.parse::<i128>()
            .map_err(|_| perr(format!("integer out of range: {t:?}")))
    };
    let (n, d) = (int(num)?, int(den)?);
    if d == 0 {
        return Err(perr("zero denominator"));
    }
    Ok((n, d))
}

/// Splits at top-level signs, keeping each sign with its term.
fn terms(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with(['/', '*', '(']) {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if cur.is_empty() {
        return Err(perr("empty literal"));
    }
    out.push(cur);
    Ok(out)
}

pub fn parse_element(f: LocalField, s: &str) -> Result<FieldElement> {
    let mut acc = FieldElement::zero(f);
    for t in terms(s)? {
        let root = ROOT_SUFFIXES.iter().find_map(|suf| t.strip_suffix(suf));
        let (coef, is_root) = match root {
            Some(c) => (c.strip_suffix('*').unwrap_or(c), true),
            None => (t.as_str(), false),
        };
        let (n, d) = match (coef, is_root) {
            ("" | "+", true) => (1, 1),
            ("-", true) => (-1, 1),
            (c, _) => parse_rational(c)?,
        };
        let mut term = FieldElement::from_rational(f, n, d)?;
        if is_root {
            if f.is_base() {
                return Err(perr("√D in a base-field literal"));
            }
            term = term * FieldElement::sqrt_d(f);
        }
        acc = acc + term;
    }
    Ok(acc)
}

pub fn parse_etale(k: &QuadEtale, s: &str) -> Result<EtaleElement> {
    match k {
        QuadEtale::Split(f) => {
            let (a, b) = s.split_once(',').ok_or_else(|| perr("split elements are pairs a,b"))?;
            Ok(EtaleElement::Split(parse_element(*f, a)?, parse_element(*f, b)?))
        }
        QuadEtale::Field(kf) => Ok(EtaleElement::Field(parse_element(*kf, s)?)),
    }
}

/// `a,b,c,d` for [[a, b], [c, d]].
pub fn parse_matrix(f: LocalField, s: &str) -> Result<GL2Element> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(perr("matrices are a,b,c,d"));
    }
    let e: Vec<FieldElement> = parts.iter().map(|t| parse_element(f, t)).collect::<Result<_>>()?;
    GL2Element::new(e[0], e[1], e[2], e[3])
}

/// `;`-separated list.
pub fn split_list(s: &str) -> Vec<&str> {
    s.split(';').map(str::trim).collect()
}
