//! Elements of the division algebra `D`, modeled as truncated skew Laurent
//! series over the residue field: `D = k_D((pi; sigma))` with the commutation
//! rule `pi * a = sigma(a) * pi`, `sigma = Frobenius^{a_D}`.
//!
//! A series is written with coefficients to the right of the powers,
//! `x = sum_i pi^{e0+i} [digit_i]`. Addition is digit-wise (equal
//! characteristic, no carries); the product rule is
//! `pi^u a * pi^v b = pi^{u+v} sigma^{-v}(a) b`.
//!
//! Every element carries an explicit precision window. `exact` elements have
//! all unwritten higher digits known to be zero; inexact elements only know
//! their digits up to `window_end()`.

use crate::residue::{Field, Fq};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SkewError {
    #[error("insufficient precision")]
    InsufficientPrecision,
    #[error("not a unit (zero or unknown leading digit)")]
    NotAUnit,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Valuation of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Val {
    /// Exactly this valuation (a nonzero known digit).
    Finite(i64),
    /// Vanishes on its whole window: valuation at least this bound.
    AtLeast(i64),
    /// The exact zero.
    Infinity,
}

impl Val {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Finite(v) => Some(v),
            _ => None,
        }
    }
    /// Lower bound usable in minima.
    pub fn lower_bound(self) -> Option<i64> {
        match self {
            Val::Finite(v) | Val::AtLeast(v) => Some(v),
            Val::Infinity => None,
        }
    }
}

/// A truncated skew Laurent series.
///
/// Canonical form: a nonzero element has `digits[0] != 0`; the exact zero is
/// `{ e0: 0, digits: [], exact: true }`; an inexact element with no known
/// nonzero digit is `{ e0: bound, digits: [], exact: false }`, meaning
/// "valuation at least `bound`, nothing known beyond".
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DElement {
    pub e0: i64,
    pub digits: Vec<Fq>,
    pub exact: bool,
}

impl DElement {
    pub fn zero() -> DElement {
        DElement { e0: 0, digits: Vec::new(), exact: true }
    }

    pub fn one() -> DElement {
        DElement { e0: 0, digits: vec![1], exact: true }
    }

    /// `pi^e * [digit]` (exact). A zero digit gives the exact zero.
    pub fn monomial(e: i64, digit: Fq) -> DElement {
        if digit == 0 {
            DElement::zero()
        } else {
            DElement { e0: e, digits: vec![digit], exact: true }
        }
    }

    /// `pi^e` (exact).
    pub fn pi_pow(e: i64) -> DElement {
        DElement::monomial(e, 1)
    }

    /// Builds from a digit window and normalizes.
    pub fn from_digits(e0: i64, digits: Vec<Fq>, exact: bool) -> DElement {
        normalize(e0, digits, exact)
    }

    /// The inexact zero "valuation at least `bound`".
    pub fn unknown_beyond(bound: i64) -> DElement {
        DElement { e0: bound, digits: Vec::new(), exact: false }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.digits.is_empty()
    }

    /// True when no nonzero digit is known (exact zero or inexact zero).
    pub fn is_zero_in_window(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn val(&self) -> Val {
        if self.digits.is_empty() {
            if self.exact {
                Val::Infinity
            } else {
                Val::AtLeast(self.e0)
            }
        } else {
            Val::Finite(self.e0)
        }
    }

    /// First exponent beyond which digits are unknown; `None` for exact.
    pub fn window_end(&self) -> Option<i64> {
        if self.exact {
            None
        } else {
            Some(self.e0 + self.digits.len() as i64)
        }
    }

    /// Digit at exponent `e` when it is known; `None` when outside the window.
    pub fn digit_at(&self, e: i64) -> Option<Fq> {
        if e < self.e0 {
            return Some(0);
        }
        let idx = (e - self.e0) as usize;
        if idx < self.digits.len() {
            Some(self.digits[idx])
        } else if self.exact {
            Some(0)
        } else {
            None
        }
    }

    /// Forgets digits at exponents `>= end` and marks the element inexact.
    pub fn truncate(&self, end: i64) -> DElement {
        let keep = (end - self.e0).max(0) as usize;
        let mut digits: Vec<Fq> = self.digits.iter().copied().take(keep).collect();
        if self.exact {
            // unwritten digits of an exact element are known zeros
            digits.resize(keep, 0);
        }
        normalize(self.e0.min(end), digits, false)
    }
}

fn normalize(mut e0: i64, mut digits: Vec<Fq>, exact: bool) -> DElement {
    let end = e0 + digits.len() as i64;
    let lead = digits.iter().position(|&d| d != 0);
    match lead {
        None => {
            if exact {
                DElement::zero()
            } else {
                DElement { e0: end, digits: Vec::new(), exact: false }
            }
        }
        Some(k) => {
            digits.drain(..k);
            e0 += k as i64;
            if exact {
                while digits.last() == Some(&0) {
                    digits.pop();
                }
            }
            DElement { e0, digits, exact }
        }
    }
}

pub fn neg(field: &Field, a: &DElement) -> DElement {
    DElement {
        e0: a.e0,
        digits: a.digits.iter().map(|&d| field.neg(d)).collect(),
        exact: a.exact,
    }
}

pub fn add(field: &Field, a: &DElement, b: &DElement) -> DElement {
    // digits of the sum are known strictly below `end`
    let end = match (a.window_end(), b.window_end()) {
        (None, None) => None,
        (Some(e), None) | (None, Some(e)) => Some(e),
        (Some(e1), Some(e2)) => Some(e1.min(e2)),
    };
    if a.is_exact_zero() {
        return match end {
            None => b.clone(),
            Some(e) => b.truncate(e),
        };
    }
    if b.is_exact_zero() {
        return match end {
            None => a.clone(),
            Some(e) => a.truncate(e),
        };
    }
    let start = a.e0.min(b.e0);
    let end_v = end.unwrap_or_else(|| {
        (a.e0 + a.digits.len() as i64).max(b.e0 + b.digits.len() as i64)
    });
    let len = (end_v - start).max(0) as usize;
    let mut digits = vec![0 as Fq; len];
    for (i, d) in digits.iter_mut().enumerate() {
        let e = start + i as i64;
        let da = a.digit_at(e).unwrap_or(0);
        let db = b.digit_at(e).unwrap_or(0);
        *d = field.add(da, db);
    }
    normalize(start, digits, end.is_none())
}

pub fn sub(field: &Field, a: &DElement, b: &DElement) -> DElement {
    add(field, a, &neg(field, b))
}

pub fn mul(field: &Field, a: &DElement, b: &DElement) -> DElement {
    if a.is_exact_zero() || b.is_exact_zero() {
        return DElement::zero();
    }
    // A factor with no known digits only leaves a valuation bound.
    if a.digits.is_empty() || b.digits.is_empty() {
        let va = a.val().lower_bound().unwrap();
        let vb = b.val().lower_bound().unwrap();
        return DElement::unknown_beyond(va + vb);
    }
    let u = a.e0;
    let v = b.e0;
    let exact = a.exact && b.exact;
    let len = if exact {
        a.digits.len() + b.digits.len() - 1
    } else {
        let la = a.window_end().map(|e| e - u);
        let lb = b.window_end().map(|e| e - v);
        match (la, lb) {
            (Some(x), Some(y)) => x.min(y) as usize,
            (Some(x), None) => x as usize,
            (None, Some(y)) => y as usize,
            (None, None) => unreachable!(),
        }
    };
    let mut digits = vec![0 as Fq; len];
    for (i, &ai) in a.digits.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.digits.iter().enumerate() {
            if bj == 0 || i + j >= len {
                continue;
            }
            let twisted = field.frobenius_pow(ai, -(v + j as i64));
            digits[i + j] = field.add(digits[i + j], field.mul(twisted, bj));
        }
    }
    normalize(u + v, digits, exact)
}

/// Inverse of a unit-after-shifting element, to `target_len` known digits
/// (fewer if the input window is shorter). The inverse of an exact monomial
/// is exact.
pub fn inv(field: &Field, a: &DElement, target_len: usize) -> Result<DElement, SkewError> {
    if a.digits.is_empty() {
        return Err(SkewError::NotAUnit);
    }
    let u = a.e0;
    // a = pi^u * w with w = sum pi^i a_i of valuation 0
    let w = &a.digits;
    if a.exact && w.len() == 1 {
        // monomial: w^{-1} is a single digit; a^{-1} = [w0^{-1}] pi^{-u}
        // = pi^{-u} [sigma^{u}(w0^{-1})]
        let w0inv = field.inv(w[0]).expect("leading digit nonzero");
        return Ok(DElement::monomial(-u, field.frobenius_pow(w0inv, u)));
    }
    let avail = if a.exact { target_len } else { w.len().min(target_len) };
    let len = avail.max(1);
    // Solve (w z)_k = delta_{k,0}:  sum_{i+j=k} sigma^{-j}(w_i) z_j = delta.
    let mut z = vec![0 as Fq; len];
    z[0] = field.inv(w[0]).expect("leading digit nonzero");
    for k in 1..len {
        let mut acc: Fq = 0;
        for j in 0..k {
            let i = k - j;
            if i < w.len() && w[i] != 0 && z[j] != 0 {
                let t = field.mul(field.frobenius_pow(w[i], -(j as i64)), z[j]);
                acc = field.add(acc, t);
            }
        }
        // sigma^{-k}(w_0) z_k = -acc
        let lead = field.frobenius_pow(w[0], -(k as i64));
        z[k] = field.mul(field.inv(lead).unwrap(), field.neg(acc));
    }
    let zel = DElement::from_digits(0, z, false);
    Ok(mul(field, &zel, &DElement::pi_pow(-u)))
}

/// Textual form `w{e0}:[t,t,...]` with digit tokens `0` for the zero digit
/// and `1 + dlog` otherwise; a trailing `~` marks an inexact window. The
/// exact zero is `0` and the inexact zero is `z{bound}~`.
pub fn format_elem(field: &Field, a: &DElement) -> String {
    if a.is_exact_zero() {
        return "0".to_string();
    }
    if a.digits.is_empty() {
        return format!("z{}~", a.e0);
    }
    let toks: Vec<String> = a
        .digits
        .iter()
        .map(|&d| {
            if d == 0 {
                "0".to_string()
            } else {
                (1 + field.dlog(d).unwrap()).to_string()
            }
        })
        .collect();
    let tail = if a.exact { "" } else { "~" };
    format!("w{}:[{}]{}", a.e0, toks.join(","), tail)
}

pub fn parse_elem(field: &Field, s: &str) -> Result<DElement, SkewError> {
    let s = s.trim();
    if s == "0" {
        return Ok(DElement::zero());
    }
    let (body, exact) = match s.strip_suffix('~') {
        Some(b) => (b, false),
        None => (s, true),
    };
    if let Some(rest) = body.strip_prefix('z') {
        if exact {
            return Err(SkewError::Parse(format!("bare lower bound must be inexact: {s}")));
        }
        let bound: i64 = rest.parse().map_err(|_| SkewError::Parse(format!("bad bound in {s}")))?;
        return Ok(DElement::unknown_beyond(bound));
    }
    let rest = body
        .strip_prefix('w')
        .ok_or_else(|| SkewError::Parse(format!("expected w<exp>:[..] in {s}")))?;
    let (e0s, digs) = rest
        .split_once(":[")
        .ok_or_else(|| SkewError::Parse(format!("expected :[ in {s}")))?;
    let e0: i64 = e0s.parse().map_err(|_| SkewError::Parse(format!("bad exponent in {s}")))?;
    let digs = digs
        .strip_suffix(']')
        .ok_or_else(|| SkewError::Parse(format!("expected closing ] in {s}")))?;
    let mut digits = Vec::new();
    for tok in digs.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let t: u32 = tok.parse().map_err(|_| SkewError::Parse(format!("bad digit token {tok}")))?;
        if t == 0 {
            digits.push(0);
        } else {
            if t > field.unit_order() {
                return Err(SkewError::Parse(format!(
                    "digit token {t} out of range for unit order {}",
                    field.unit_order()
                )));
            }
            digits.push(field.from_dlog((t - 1) as i64));
        }
    }
    Ok(DElement::from_digits(e0, digits, exact))
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{v}"),
            Val::AtLeast(v) => write!(f, ">={v}"),
            Val::Infinity => write!(f, "inf"),
        }
    }
}
