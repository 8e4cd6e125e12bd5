//! Weight multiplicities (Kostka numbers) by semistandard-tableau
//! enumeration, Kostka-Foulkes polynomials by the charge statistic, and the
//! cross-check of the character formula against brute-force Satake counts.

use crate::matd::CartanClass;
use crate::residue::Field;
use crate::satake::{self, Cocharacter, GroupData, IdentityCheck, Side};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KostkaError {
    #[error("weight must be dominant (nonincreasing): {0:?}")]
    NotDominant(Vec<i64>),
    #[error(transparent)]
    Satake(#[from] satake::SatakeError),
}

/// A dominant weight: a nonincreasing integer vector. Negative parts are
/// allowed; computations shift to nonnegative parts and shift back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominantWeight(pub Vec<i64>);

impl DominantWeight {
    pub fn new(v: Vec<i64>) -> Result<DominantWeight, KostkaError> {
        if !v.windows(2).all(|w| w[0] >= w[1]) {
            return Err(KostkaError::NotDominant(v));
        }
        Ok(DominantWeight(v))
    }
    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }
}

fn shift_to_partition(mu: &[i64], nu: &[i64]) -> Option<(Vec<usize>, Vec<usize>)> {
    let min = mu.iter().chain(nu).copied().min().unwrap_or(0);
    let shift = -min.min(0);
    let mu2: Vec<i64> = mu.iter().map(|x| x + shift).collect();
    let nu2: Vec<i64> = nu.iter().map(|x| x + shift).collect();
    if nu2.iter().any(|&x| x < 0) {
        return None;
    }
    Some((
        mu2.into_iter().map(|x| x as usize).collect(),
        nu2.into_iter().map(|x| x as usize).collect(),
    ))
}

/// All semistandard tableaux of shape `shape` (a partition) with content
/// `content` (entries `1..=content.len()`), as row fillings.
fn ssyt(shape: &[usize], content: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let total: usize = shape.iter().sum();
    if content.iter().sum::<usize>() != total {
        return Vec::new();
    }
    let rows = shape.len();
    let mut out = Vec::new();
    let mut tab: Vec<Vec<usize>> = shape.iter().map(|&l| vec![0; l]).collect();
    let mut remaining = content.to_vec();
    // fill cells row-major; each cell gets a letter >= left neighbor and
    // > the neighbor above
    fn rec(
        shape: &[usize],
        rows: usize,
        tab: &mut Vec<Vec<usize>>,
        remaining: &mut Vec<usize>,
        r: usize,
        c: usize,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if r == rows {
            out.push(tab.clone());
            return;
        }
        let (nr, nc) = if c + 1 < shape[r] { (r, c + 1) } else { (r + 1, 0) };
        let lo = {
            let mut lo = 1;
            if c > 0 {
                lo = lo.max(tab[r][c - 1]);
            }
            if r > 0 && c < shape[r - 1] {
                lo = lo.max(tab[r - 1][c] + 1);
            }
            lo
        };
        for letter in lo..=remaining.len() {
            if remaining[letter - 1] == 0 {
                continue;
            }
            remaining[letter - 1] -= 1;
            tab[r][c] = letter;
            rec(shape, rows, tab, remaining, nr, nc, out);
            remaining[letter - 1] += 1;
        }
        tab[r][c] = 0;
    }
    if rows == 0 || shape[0] == 0 {
        if total == 0 {
            out.push(tab);
        }
        return out;
    }
    rec(shape, rows, &mut tab, &mut remaining, 0, 0, &mut out);
    out
}

/// The Kostka number `dim V_mu(nu)`: semistandard tableaux of shape `mu` and
/// content `nu`.
pub fn kostka(mu: &DominantWeight, nu: &[i64]) -> u64 {
    if mu.sum() != nu.iter().sum::<i64>() {
        return 0;
    }
    let Some((shape, content)) = shift_to_partition(&mu.0, nu) else {
        return 0;
    };
    ssyt(&shape, &content).len() as u64
}

/// Dimension of the highest-weight module, by the hook-content style product
/// `prod_{i<j} (mu_i - mu_j + j - i) / (j - i)`.
pub fn weyl_dim(mu: &DominantWeight) -> u64 {
    let m = mu.0.len();
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..m {
        for j in (i + 1)..m {
            num *= (mu.0[i] - mu.0[j] + (j - i) as i64) as u128;
            den *= (j - i) as u128;
        }
    }
    (num / den) as u64
}

/// Reading word of a tableau: rows from bottom to top, each left to right.
fn reading_word(tab: &[Vec<usize>]) -> Vec<usize> {
    tab.iter().rev().flatten().copied().collect()
}

/// Charge of a word whose content is a partition, by repeated extraction of
/// standard subwords.
fn charge_word(mut word: Vec<usize>) -> u64 {
    let mut total = 0u64;
    while !word.is_empty() {
        let max_letter = *word.iter().max().unwrap();
        // select the rightmost 1, then for each next letter the rightmost
        // occurrence to the left of the previous selection, wrapping around
        // when there is none
        let mut selected: Vec<usize> = Vec::new(); // positions
        let mut cursor: Option<usize> = None;
        for letter in 1..=max_letter {
            let pos = match cursor {
                None => word.iter().rposition(|&x| x == letter),
                Some(cut) => word[..cut]
                    .iter()
                    .rposition(|&x| x == letter)
                    .or_else(|| word.iter().rposition(|&x| x == letter)),
            };
            let pos = pos.expect("content is a partition, every letter present");
            selected.push(pos);
            cursor = Some(pos);
        }
        // the standard subword in the order it appears in the original word
        let mut order: Vec<(usize, usize)> =
            selected.iter().enumerate().map(|(l, &p)| (p, l + 1)).collect();
        order.sort_unstable();
        // charge of a standard word: c(1) = 0; c(k+1) = c(k) + 1 when k+1
        // sits to the right of k
        let pos_of = |letter: usize| order.iter().position(|&(_, l)| l == letter).unwrap();
        let mut c = vec![0u64; max_letter + 1];
        for k in 1..max_letter {
            c[k + 1] = c[k] + if pos_of(k + 1) > pos_of(k) { 1 } else { 0 };
        }
        total += c.iter().sum::<u64>();
        let mut sel_sorted = selected.clone();
        sel_sorted.sort_unstable();
        for &p in sel_sorted.iter().rev() {
            word.remove(p);
        }
    }
    total
}

/// A polynomial in one variable with integer coefficients, constant term
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Poly(pub Vec<i64>);

impl Poly {
    pub fn zero() -> Poly {
        Poly(vec![])
    }
    pub fn eval(&self, x: i128) -> i128 {
        let mut acc = 0i128;
        for &c in self.0.iter().rev() {
            acc = acc * x + c as i128;
        }
        acc
    }
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0)
    }
}

/// The Kostka-Foulkes polynomial `sum_T t^{charge(T)}` over semistandard
/// tableaux of shape `mu` and weight `lambda`; zero unless
/// `lambda <= mu` in dominance.
pub fn kostka_foulkes(lambda: &DominantWeight, mu: &DominantWeight) -> Poly {
    if !crate::weyl::dominance_leq(&lambda.0, &mu.0) {
        return Poly::zero();
    }
    let Some((shape, content)) = shift_to_partition(&mu.0, &lambda.0) else {
        return Poly::zero();
    };
    let mut coeffs: Vec<i64> = Vec::new();
    for tab in ssyt(&shape, &content) {
        let ch = charge_word(reading_word(&tab)) as usize;
        if coeffs.len() <= ch {
            coeffs.resize(ch + 1, 0);
        }
        coeffs[ch] += 1;
    }
    Poly(coeffs)
}

/// The normalized affine Kazhdan-Lusztig polynomial attached to the pair
/// `lambda <= mu`, frozen against the split baseline: the coefficient
/// reversal of the Kostka-Foulkes polynomial in degree `<rho, mu - lambda>`.
/// Lies in `1 + v Z[v]`.
pub fn kl_from_kostka_foulkes(lambda: &DominantWeight, mu: &DominantWeight) -> Poly {
    let kf = kostka_foulkes(lambda, mu);
    if kf.0.is_empty() {
        return Poly::zero();
    }
    let rho2 = Cocharacter(mu.0.clone()).rho_pairing_x2() - Cocharacter(lambda.0.clone()).rho_pairing_x2();
    debug_assert!(rho2 >= 0 && rho2 % 2 == 0);
    let deg = (rho2 / 2) as usize;
    let mut coeffs = vec![0i64; deg + 1];
    for (i, &c) in kf.0.iter().enumerate() {
        assert!(i <= deg, "charge exceeds the pairing degree");
        coeffs[deg - i] += c;
    }
    Poly(coeffs)
}

#[derive(Debug, Serialize)]
pub struct LusztigKatoReport {
    pub mu: Vec<i64>,
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
}

/// Verifies, coefficient by coefficient in the strata `nu`, the identity
/// expressing the weight multiplicities of `V_mu` through normalized
/// Kazhdan-Lusztig values and the brute-force double-coset counts:
///
/// `q^{d <mu - w_0 nu, rho>} dim V_mu(nu)
///     = sum_{lambda <= mu} P_{lambda, mu}(q^d) N^U_lambda(nu)`.
///
/// Conventions are fixed dominant-everywhere; strata labels `nu` run over the
/// whole weight box of `mu` and are `w_0`-converted only inside the pairing.
pub fn lusztig_kato_check(
    gd: &GroupData,
    mu: &DominantWeight,
    digit_budget: i64,
) -> Result<LusztigKatoReport, KostkaError> {
    let field: &Field = &gd.field;
    let m = gd.m;
    assert_eq!(mu.0.len(), m);
    let qd = (field.p as i128).pow(field.f * field.d);
    let interval: Vec<DominantWeight> = crate::weyl::dominance_interval(&mu.0)
        .into_iter()
        .map(DominantWeight)
        .collect();
    // precompute KL values and class labels
    let mut terms: Vec<(CartanClass, i128)> = Vec::new();
    for lam in &interval {
        let p = kl_from_kostka_foulkes(lam, mu);
        terms.push((CartanClass::from_exponents(lam.0.clone()), p.eval(qd)));
    }
    // nu box: entries in [mu_m, mu_1], fixed total
    let lo = *mu.0.last().unwrap();
    let hi = mu.0[0];
    let total = mu.sum();
    let mut nus: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for c in &nus {
            for v in lo..=hi {
                let mut c2 = c.clone();
                c2.push(v);
                next.push(c2);
            }
        }
        nus = next;
    }
    nus.retain(|v| v.iter().sum::<i64>() == total);

    let mut checks = Vec::new();
    let mut pass = true;
    for nu in &nus {
        let nu_c = Cocharacter(nu.clone());
        let lhs_mult = kostka(mu, nu) as i128;
        let x2 = Cocharacter(mu.0.clone()).rho_pairing_x2() - nu_c.w0().rho_pairing_x2();
        debug_assert!(x2 % 2 == 0);
        // lhs multiplier q^{d <mu - w_0 nu, rho>} = (q^d)^{x2/2}
        let lhs = if lhs_mult == 0 {
            0
        } else {
            lhs_mult * qd.pow((x2 / 2).try_into().expect("nonnegative exponent"))
        };
        let mut rhs = 0i128;
        for (class, pval) in &terms {
            let lam_c = Cocharacter(class.0.clone());
            let n = satake::count_cartan_iwasawa(gd, &lam_c, &nu_c, Side::U, digit_budget)?;
            rhs += pval * n as i128;
        }
        let ok = lhs == rhs;
        pass &= ok;
        checks.push(IdentityCheck {
            name: format!("stratum {nu:?}"),
            pass: ok,
            detail: format!("lhs {lhs} rhs {rhs}"),
        });
    }
    Ok(LusztigKatoReport { mu: mu.0.clone(), checks, pass })
}
