//! Square matrices over `D`: group arithmetic, membership tests for the
//! standard subgroups, Cartan invariants by Smith reduction over the
//! noncommutative valuation ring `O_D`, and the minor-valuation criteria for
//! `m <= 3`.

use crate::residue::{Field, Fq};
use crate::skew::{self, DElement, SkewError, Val};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatError {
    #[error("insufficient precision to decide")]
    InsufficientPrecision,
    #[error("matrix is singular over D")]
    Singular,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Skew(#[from] SkewError),
}

/// An `m x m` matrix over `D`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatD {
    pub m: usize,
    pub entries: Vec<DElement>,
}

/// A Cartan (elementary-divisor) class: the nondecreasing exponent vector
/// `lambda` with `g` in `K lambda(pi) K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanClass(pub Vec<i64>);

impl CartanClass {
    pub fn from_exponents(mut e: Vec<i64>) -> CartanClass {
        e.sort_unstable();
        CartanClass(e)
    }
    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }
    pub fn spread(&self) -> i64 {
        if self.0.is_empty() {
            0
        } else {
            self.0[self.0.len() - 1] - self.0[0]
        }
    }
}

impl MatD {
    pub fn new(m: usize, entries: Vec<DElement>) -> MatD {
        assert_eq!(entries.len(), m * m);
        MatD { m, entries }
    }

    pub fn identity(m: usize) -> MatD {
        let mut entries = vec![DElement::zero(); m * m];
        for i in 0..m {
            entries[i * m + i] = DElement::one();
        }
        MatD { m, entries }
    }

    pub fn diag_pi(exps: &[i64]) -> MatD {
        let m = exps.len();
        let mut g = MatD::new(m, vec![DElement::zero(); m * m]);
        for (i, &e) in exps.iter().enumerate() {
            *g.at_mut(i, i) = DElement::pi_pow(e);
        }
        g
    }

    /// Permutation matrix sending basis vector `j` to `perm[j]` (columns of
    /// ones at rows `perm[j]`).
    pub fn permutation(perm: &[usize]) -> MatD {
        let m = perm.len();
        let mut g = MatD::new(m, vec![DElement::zero(); m * m]);
        for (j, &i) in perm.iter().enumerate() {
            *g.at_mut(i, j) = DElement::one();
        }
        g
    }

    pub fn at(&self, i: usize, j: usize) -> &DElement {
        &self.entries[i * self.m + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut DElement {
        &mut self.entries[i * self.m + j]
    }

    pub fn mul(&self, field: &Field, other: &MatD) -> MatD {
        assert_eq!(self.m, other.m);
        let m = self.m;
        let mut out = MatD::new(m, vec![DElement::zero(); m * m]);
        for i in 0..m {
            for j in 0..m {
                let mut acc = DElement::zero();
                for k in 0..m {
                    let t = skew::mul(field, self.at(i, k), other.at(k, j));
                    acc = skew::add(field, &acc, &t);
                }
                *out.at_mut(i, j) = acc;
            }
        }
        out
    }

    /// Reduction mod `pi`: the matrix of leading digits at exponent 0.
    /// `None` when some entry's window does not determine its digit at 0.
    pub fn reduction(&self) -> Option<Vec<Fq>> {
        let mut red = Vec::with_capacity(self.m * self.m);
        for e in &self.entries {
            red.push(e.digit_at(0)?);
        }
        Some(red)
    }

    /// Truncates all entries to the window `(-inf, end)`.
    pub fn truncate(&self, end: i64) -> MatD {
        MatD {
            m: self.m,
            entries: self.entries.iter().map(|e| e.truncate(end)).collect(),
        }
    }

    /// Largest finite |valuation| over all entries; 0 for the zero matrix.
    pub fn max_abs_val(&self) -> i64 {
        self.entries
            .iter()
            .filter_map(|e| e.val().finite())
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    }

    /// An adequate working precision for Smith reduction.
    pub fn work_precision(&self) -> i64 {
        let a = self.max_abs_val();
        2 * self.m as i64 * a + 2
    }
}

pub struct SmithDecomp {
    pub class: CartanClass,
    /// Row transform, in `K`: `p * g * q = diag(pi^{lambda_i})`.
    pub p: MatD,
    pub q: MatD,
    /// `det` of the reductions of `p` and `q` mod `pi`.
    pub pbar_det: Fq,
    pub qbar_det: Fq,
}

/// Smith (Cartan) invariants of an invertible matrix, with the `K`-transforms
/// and the residue determinants of the transforms tracked.
///
/// Pivot rule: minimal valuation, ties broken by row-major position.
pub fn smith_with_transforms(field: &Field, g: &MatD) -> Result<SmithDecomp, MatError> {
    let m = g.m;
    let mut work = g.truncate(match g.entries.iter().filter_map(|e| e.window_end()).min() {
        Some(e) => e.min(g.work_precision()),
        None => g.work_precision(),
    });
    let mut p = MatD::identity(m);
    let mut q = MatD::identity(m);
    let mut pbar_det: Fq = 1;
    let mut qbar_det: Fq = 1;
    let mut exps = Vec::with_capacity(m);
    let mut zero_bound_min: Option<i64> = None;

    for k in 0..m {
        // pivot: minimal valuation among remaining entries, row-major ties
        let mut pivot: Option<(usize, usize, i64)> = None;
        for i in k..m {
            for j in k..m {
                match work.at(i, j).val() {
                    Val::Finite(v) => {
                        if pivot.map_or(true, |(_, _, pv)| v < pv) {
                            pivot = Some((i, j, v));
                        }
                    }
                    Val::AtLeast(b) => {
                        zero_bound_min = Some(zero_bound_min.map_or(b, |c: i64| c.min(b)));
                    }
                    Val::Infinity => {}
                }
            }
        }
        let (pi_, pj, pv) = match pivot {
            Some(t) => t,
            None => {
                // no known nonzero entry left
                return if zero_bound_min.is_some() {
                    Err(MatError::InsufficientPrecision)
                } else {
                    Err(MatError::Singular)
                };
            }
        };
        // swap pivot into (k, k)
        if pi_ != k {
            for j in 0..m {
                work.entries.swap(pi_ * m + j, k * m + j);
                p.entries.swap(pi_ * m + j, k * m + j);
            }
            pbar_det = field.neg(pbar_det);
        }
        if pj != k {
            for i in 0..m {
                work.entries.swap(i * m + pj, i * m + k);
                q.entries.swap(i * m + pj, i * m + k);
            }
            qbar_det = field.neg(qbar_det);
        }
        // normalize the pivot to exactly pi^pv: pivot = pi^pv * w, scale row
        // k on the left by w^{-1}
        let pivot_el = work.at(k, k).clone();
        let w = skew::mul(field, &DElement::pi_pow(-pv), &pivot_el);
        let target = (work
            .entries
            .iter()
            .filter_map(|e| e.window_end())
            .max()
            .unwrap_or(work.work_precision())
            - pv)
            .max(1) as usize;
        let winv = skew::inv(field, &w, target).map_err(|_| MatError::InsufficientPrecision)?;
        let winv0 = winv.digit_at(0).ok_or(MatError::InsufficientPrecision)?;
        for j in 0..m {
            *work.at_mut(k, j) = skew::mul(field, &winv, work.at(k, j));
            *p.at_mut(k, j) = skew::mul(field, &winv, p.at(k, j));
        }
        pbar_det = field.mul(pbar_det, winv0);
        // force the pivot to the exact monomial; the discarded tail is only
        // known to vanish up to the window end, so record that bound for the
        // soundness check below
        if let Some(end) = work.at(k, k).window_end() {
            zero_bound_min = Some(zero_bound_min.map_or(end, |c: i64| c.min(end)));
        }
        *work.at_mut(k, k) = DElement::pi_pow(pv);

        // clear column k below and above
        for i in 0..m {
            if i == k || work.at(i, k).is_zero_in_window() {
                continue;
            }
            // row_i -= (g_ik * pi^{-pv}) row_k ; the coefficient is integral
            let c = skew::mul(field, work.at(i, k), &DElement::pi_pow(-pv));
            debug_assert!(c.val().lower_bound().map_or(true, |v| v >= 0));
            for j in 0..m {
                let t = skew::mul(field, &c, work.at(k, j));
                *work.at_mut(i, j) = skew::sub(field, work.at(i, j), &t);
            }
            for j in 0..m {
                let t = skew::mul(field, &c, p.at(k, j));
                *p.at_mut(i, j) = skew::sub(field, p.at(i, j), &t);
            }
        }
        // clear row k to the right and left
        for j in 0..m {
            if j == k || work.at(k, j).is_zero_in_window() {
                continue;
            }
            // col_j -= col_k * (pi^{-pv} g_kj)
            let c = skew::mul(field, &DElement::pi_pow(-pv), work.at(k, j));
            debug_assert!(c.val().lower_bound().map_or(true, |v| v >= 0));
            for i in 0..m {
                let t = skew::mul(field, work.at(i, k), &c);
                *work.at_mut(i, j) = skew::sub(field, work.at(i, j), &t);
            }
            for i in 0..m {
                let t = skew::mul(field, q.at(i, k), &c);
                *q.at_mut(i, j) = skew::sub(field, q.at(i, j), &t);
            }
        }
        exps.push(pv);
    }

    // soundness: every entry treated as zero must have bound beyond the
    // determinant valuation, so that it cannot alter any invariant factor
    let val_det: i64 = exps.iter().sum();
    if let Some(b) = zero_bound_min {
        if b <= val_det {
            return Err(MatError::InsufficientPrecision);
        }
    }
    let class = CartanClass::from_exponents(exps);
    Ok(SmithDecomp { class, p, q, pbar_det, qbar_det })
}

/// The Cartan class of `g`, i.e. the unique antidominant `lambda` with
/// `g` in `K lambda(pi) K`.
pub fn smith(field: &Field, g: &MatD) -> Result<CartanClass, MatError> {
    let dec = smith_with_transforms(field, g)?;
    #[cfg(debug_assertions)]
    {
        if g.m <= 3 && is_sorted_triangular(g) {
            if let Ok(ok) = minor_test(field, g, &dec.class) {
                debug_assert!(ok, "smith disagrees with the minor criterion");
            }
        }
    }
    Ok(dec.class)
}

/// `d^{-1} v_D(det_G g)`: the sum of the Cartan exponents.
pub fn val_det(field: &Field, g: &MatD) -> Result<i64, MatError> {
    Ok(smith_with_transforms(field, g)?.class.sum())
}

/// Inverse of an invertible matrix, through the tracked Smith transforms.
pub fn inverse(field: &Field, g: &MatD) -> Result<MatD, MatError> {
    let dec = smith_with_transforms(field, g)?;
    // p g q = t  =>  g^{-1} = q t^{-1} p
    let mut tinv_exps: Vec<i64> = Vec::with_capacity(g.m);
    // the class is sorted; recover the unsorted pivot order is not needed
    // because p g q is diagonal with the pivots in extraction order, and the
    // extraction order happens to be nondecreasing
    tinv_exps.extend(dec.class.0.iter().map(|e| -e));
    let tinv = MatD::diag_pi(&tinv_exps);
    Ok(dec.q.mul(field, &tinv).mul(field, &dec.p))
}

fn is_sorted_triangular(g: &MatD) -> bool {
    let m = g.m;
    let mut prev = i64::MIN;
    for i in 0..m {
        match diag_monomial_exp(g.at(i, i)) {
            Some(e) if e >= prev => prev = e,
            _ => return false,
        }
        for j in 0..i {
            if !g.at(i, j).is_zero_in_window() {
                return false;
            }
        }
    }
    true
}

fn diag_monomial_exp(e: &DElement) -> Option<i64> {
    if e.digits.len() == 1 && e.digits[0] == 1 {
        Some(e.e0)
    } else {
        None
    }
}

fn val_lower(e: &DElement) -> Option<i64> {
    e.val().lower_bound()
}

fn min_opt(vals: &[Option<i64>]) -> Option<i64> {
    vals.iter().filter_map(|v| *v).min()
}

/// Minor-valuation membership criterion for upper-triangular matrices of the
/// `m <= 3` normal shape (diagonal `pi^x, pi^y (, pi^z)` with `x <= y <= z`).
///
/// Returns `true` iff `g` is in the Cartan class `target`.
pub fn minor_test(field: &Field, g: &MatD, target: &CartanClass) -> Result<bool, MatError> {
    let m = g.m;
    if !(2..=3).contains(&m) || target.0.len() != m {
        return Err(MatError::ShapeMismatch(format!("minor_test needs m in {{2,3}}, got {m}")));
    }
    if !is_sorted_triangular(g) {
        return Err(MatError::ShapeMismatch(
            "matrix is not upper triangular with sorted monomial diagonal".into(),
        ));
    }
    if m == 2 {
        let x = g.at(0, 0).e0;
        let y = g.at(1, 1).e0;
        let va = val_lower(g.at(0, 1));
        let alpha = min_opt(&[Some(x), Some(y), va]).unwrap();
        return Ok(alpha == target.0[0] && x + y == target.sum());
    }
    // m = 3, criterion (min of 1x1 minors, det, min of 2x2 minors)
    let x = g.at(0, 0).e0;
    let y = g.at(1, 1).e0;
    let z = g.at(2, 2).e0;
    let a = g.at(0, 1);
    let b = g.at(0, 2);
    let c = g.at(1, 2);
    let va = val_lower(a);
    let vb = val_lower(b);
    let vc = val_lower(c);
    let alpha = min_opt(&[Some(x), Some(y), Some(z), va, vb, vc]).unwrap();
    if alpha != target.0[0] || x + y + z != target.sum() {
        return Ok(false);
    }
    // third condition: min over the 2x2 minors, with the mixed block
    // [[a, b], [pi^y, c]] contributing its det-valuation
    let block = MatD::new(
        2,
        vec![a.clone(), b.clone(), DElement::pi_pow(y), c.clone()],
    );
    let block_det = match smith_with_transforms(field, &block) {
        Ok(dec) => Some(dec.class.sum()),
        Err(MatError::Singular) => None,
        Err(e) => return Err(e),
    };
    let second = min_opt(&[
        Some(x + y),
        Some(y + z),
        Some(x + z),
        va.map(|v| z + v),
        vc.map(|v| x + v),
        block_det,
    ])
    .unwrap();
    Ok(second == target.0[0] + target.0[1])
}

/// The Cartan class of a sorted-triangular `m <= 3` matrix read off the minor
/// criteria directly (faster than a full Smith reduction).
pub fn class_of_sorted_triangular(field: &Field, g: &MatD) -> Result<CartanClass, MatError> {
    let m = g.m;
    if !is_sorted_triangular(g) || !(2..=3).contains(&m) {
        return Err(MatError::ShapeMismatch("not of the sorted triangular shape".into()));
    }
    if m == 2 {
        let x = g.at(0, 0).e0;
        let y = g.at(1, 1).e0;
        let alpha = min_opt(&[Some(x), Some(y), val_lower(g.at(0, 1))]).unwrap();
        return Ok(CartanClass(vec![alpha, x + y - alpha]));
    }
    let x = g.at(0, 0).e0;
    let y = g.at(1, 1).e0;
    let z = g.at(2, 2).e0;
    let a = g.at(0, 1);
    let b = g.at(0, 2);
    let c = g.at(1, 2);
    let va = val_lower(a);
    let vb = val_lower(b);
    let vc = val_lower(c);
    let alpha = min_opt(&[Some(x), Some(y), Some(z), va, vb, vc]).unwrap();
    let block = MatD::new(2, vec![a.clone(), b.clone(), DElement::pi_pow(y), c.clone()]);
    let block_det = match smith_with_transforms(field, &block) {
        Ok(dec) => Some(dec.class.sum()),
        Err(MatError::Singular) => None,
        Err(e) => return Err(e),
    };
    let second = min_opt(&[
        Some(x + y),
        Some(y + z),
        Some(x + z),
        va.map(|v| z + v),
        vc.map(|v| x + v),
        block_det,
    ])
    .unwrap();
    let beta = second - alpha;
    Ok(CartanClass(vec![alpha, beta, x + y + z - second]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgroupTag {
    K,
    K1,
    I,
    I1,
    U,
    Uminus,
    B,
    A,
}

fn val_at_least(e: &DElement, k: i64) -> Result<bool, MatError> {
    match e.val() {
        Val::Infinity => Ok(true),
        Val::Finite(v) => Ok(v >= k),
        Val::AtLeast(b) => {
            if b >= k {
                Ok(true)
            } else {
                Err(MatError::InsufficientPrecision)
            }
        }
    }
}

/// Zero "at declared precision": no known nonzero digit, with a window that
/// actually sees exponent 0.
fn is_zero_decl(e: &DElement) -> Result<bool, MatError> {
    match e.val() {
        Val::Infinity => Ok(true),
        Val::Finite(_) => Ok(false),
        Val::AtLeast(b) => {
            if b >= 1 {
                Ok(true)
            } else {
                Err(MatError::InsufficientPrecision)
            }
        }
    }
}

fn is_one_decl(field: &Field, e: &DElement) -> Result<bool, MatError> {
    is_zero_decl(&skew::sub(field, e, &DElement::one()))
}

/// Membership of `g` in the named subgroup, decided at the declared
/// precision of the entries.
pub fn subgroup_test(field: &Field, g: &MatD, tag: SubgroupTag) -> Result<bool, MatError> {
    let m = g.m;
    let integral = |g: &MatD| -> Result<bool, MatError> {
        for e in &g.entries {
            if !val_at_least(e, 0)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    match tag {
        SubgroupTag::K => {
            if !integral(g)? {
                return Ok(false);
            }
            let red = g.reduction().ok_or(MatError::InsufficientPrecision)?;
            Ok(det_residue(field, m, &red) != 0)
        }
        SubgroupTag::K1 => {
            for i in 0..m {
                for j in 0..m {
                    let e = if i == j {
                        skew::sub(field, g.at(i, j), &DElement::one())
                    } else {
                        g.at(i, j).clone()
                    };
                    if !val_at_least(&e, 1)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        SubgroupTag::I => {
            if !integral(g)? {
                return Ok(false);
            }
            for i in 0..m {
                match g.at(i, i).val() {
                    Val::Finite(0) => {}
                    Val::Finite(_) => return Ok(false),
                    _ => return Err(MatError::InsufficientPrecision),
                }
                for j in 0..i {
                    if !val_at_least(g.at(i, j), 1)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        SubgroupTag::I1 => {
            if !subgroup_test(field, g, SubgroupTag::I)? {
                return Ok(false);
            }
            for i in 0..m {
                let e = skew::sub(field, g.at(i, i), &DElement::one());
                if !val_at_least(&e, 1)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        SubgroupTag::U | SubgroupTag::Uminus => {
            for i in 0..m {
                if !is_one_decl(field, g.at(i, i))? {
                    return Ok(false);
                }
                for j in 0..m {
                    if j == i {
                        continue;
                    }
                    let below = if tag == SubgroupTag::U { i > j } else { i < j };
                    if below && !is_zero_decl(g.at(i, j))? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        SubgroupTag::B => {
            for i in 0..m {
                if g.at(i, i).is_zero_in_window() {
                    return Ok(false);
                }
                for j in 0..i {
                    if !is_zero_decl(g.at(i, j))? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        SubgroupTag::A => {
            for i in 0..m {
                if g.at(i, i).is_zero_in_window() {
                    return Ok(false);
                }
                for j in 0..m {
                    if i != j && !is_zero_decl(g.at(i, j))? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Determinant of an `m x m` residue matrix over `k_D` (Laplace expansion;
/// `m` stays tiny here).
pub fn det_residue(field: &Field, m: usize, red: &[Fq]) -> Fq {
    fn go(field: &Field, m: usize, red: &[Fq], rows: &mut Vec<usize>, col: usize) -> Fq {
        if col == m {
            return 1;
        }
        let mut acc: Fq = 0;
        for (pos, &r) in rows.clone().iter().enumerate() {
            let a = red[r * m + col];
            if a == 0 {
                continue;
            }
            let mut rest = rows.clone();
            rest.remove(pos);
            let sub = go(field, m, red, &mut rest, col + 1);
            let mut term = field.mul(a, sub);
            if pos % 2 == 1 {
                term = field.neg(term);
            }
            acc = field.add(acc, term);
        }
        acc
    }
    let mut rows: Vec<usize> = (0..m).collect();
    go(field, m, red, &mut rows, 0)
}

/// Parses a matrix literal: rows separated by `|`, entries by `;`, each entry
/// in the element text form of [`crate::skew::parse_elem`].
pub fn parse_matrix(field: &Field, s: &str) -> Result<MatD, MatError> {
    let rows: Vec<&str> = s.split('|').collect();
    let m = rows.len();
    let mut entries = Vec::with_capacity(m * m);
    for row in rows {
        let cells: Vec<&str> = row.split(';').collect();
        if cells.len() != m {
            return Err(MatError::ShapeMismatch(format!(
                "expected {m} entries per row, got {}",
                cells.len()
            )));
        }
        for cell in cells {
            entries.push(skew::parse_elem(field, cell)?);
        }
    }
    Ok(MatD::new(m, entries))
}

pub fn format_matrix(field: &Field, g: &MatD) -> String {
    (0..g.m)
        .map(|i| {
            (0..g.m)
                .map(|j| skew::format_elem(field, g.at(i, j)))
                .collect::<Vec<_>>()
                .join(";")
        })
        .collect::<Vec<_>>()
        .join("|")
}
