//! The finite group `GL(m, k_D)`: parabolic coset spaces, generalized
//! Steinberg quotients with their Borel-invariant basis, the Hecke operators
//! `T_s` in characteristic `p`, and the irreducible `GL(2)` weights
//! `V(r, chi)`.

use crate::linalg::{self, Matrix, Subspace, Vector};
use crate::matd::det_residue;
use crate::residue::{Field, Fq};
use crate::weyl::{JSet, Perm};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FinError {
    #[error("group order {0} exceeds the context cap {1}")]
    TooLarge(u64, u64),
    #[error("dimension {0} exceeds the weight cap {1}")]
    DimensionCap(u64, u64),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub const GROUP_CAP: u64 = 1_000_000;
pub const WEIGHT_CAP: u64 = 10_000;

/// Element table of `GL(m, k)` with deterministic (lexicographic) ordering.
pub struct FiniteGroupCtx {
    pub field: Field,
    pub m: usize,
    pub elements: Vec<Vec<Fq>>,
    index: HashMap<Vec<Fq>, u32>,
}

pub fn group_order(q: u64, m: u32) -> u64 {
    let qm = q.pow(m);
    (0..m).map(|i| qm - q.pow(i)).product()
}

impl FiniteGroupCtx {
    pub fn new(field: Field, m: usize) -> Result<FiniteGroupCtx, FinError> {
        let order = group_order(field.size as u64, m as u32);
        if order > GROUP_CAP {
            return Err(FinError::TooLarge(order, GROUP_CAP));
        }
        let n2 = m * m;
        let mut elements = Vec::with_capacity(order as usize);
        let mut cur = vec![0 as Fq; n2];
        loop {
            if det_residue(&field, m, &cur) != 0 {
                elements.push(cur.clone());
            }
            // next matrix in lexicographic order of packed entries
            let mut i = n2;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < field.size {
                    break;
                }
                cur[i] = 0;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
        debug_assert_eq!(elements.len() as u64, order);
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        Ok(FiniteGroupCtx { field, m, elements, index })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn idx(&self, g: &[Fq]) -> u32 {
        self.index[g]
    }

    pub fn mul_k(&self, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
        let m = self.m;
        let f = &self.field;
        let mut out = vec![0 as Fq; m * m];
        for i in 0..m {
            for k in 0..m {
                let aik = a[i * m + k];
                if aik == 0 {
                    continue;
                }
                for j in 0..m {
                    let bkj = b[k * m + j];
                    if bkj != 0 {
                        out[i * m + j] = f.add(out[i * m + j], f.mul(aik, bkj));
                    }
                }
            }
        }
        out
    }

    pub fn inv_k(&self, a: &[Fq]) -> Vec<Fq> {
        let m = self.m;
        let f = &self.field;
        let mut aug: Vec<Vec<Fq>> = (0..m)
            .map(|i| {
                let mut row: Vec<Fq> = a[i * m..(i + 1) * m].to_vec();
                row.extend((0..m).map(|j| if i == j { 1 } else { 0 }));
                row
            })
            .collect();
        for c in 0..m {
            let sel = (c..m).find(|&i| aug[i][c] != 0).expect("invertible");
            aug.swap(c, sel);
            let inv = f.inv(aug[c][c]).unwrap();
            for j in 0..2 * m {
                aug[c][j] = f.mul(aug[c][j], inv);
            }
            for i in 0..m {
                if i != c && aug[i][c] != 0 {
                    let fac = aug[i][c];
                    for j in 0..2 * m {
                        let t = f.mul(fac, aug[c][j]);
                        aug[i][j] = f.sub(aug[i][j], t);
                    }
                }
            }
        }
        let mut out = vec![0 as Fq; m * m];
        for i in 0..m {
            out[i * m..(i + 1) * m].copy_from_slice(&aug[i][m..]);
        }
        out
    }

    pub fn identity_k(&self) -> Vec<Fq> {
        let m = self.m;
        let mut e = vec![0 as Fq; m * m];
        for i in 0..m {
            e[i * m + i] = 1;
        }
        e
    }

    pub fn perm_matrix(&self, w: &Perm) -> Vec<Fq> {
        let m = self.m;
        let mut e = vec![0 as Fq; m * m];
        for (j, &i) in w.0.iter().enumerate() {
            e[i * m + j] = 1;
        }
        e
    }

    /// Root-subgroup element `1 + x E_{i, i+1}`.
    pub fn root_elt(&self, i: usize, x: Fq) -> Vec<Fq> {
        let mut e = self.identity_k();
        e[i * self.m + i + 1] = x;
        e
    }

    /// Block membership map for the standard parabolic of type `J`:
    /// positions `i` and `i+1` share a block iff `alpha_i` is in `J`.
    fn blocks(&self, j: &JSet) -> Vec<usize> {
        let mut block = vec![0usize; self.m];
        for i in 1..self.m {
            block[i] = if j.contains(&(i - 1)) { block[i - 1] } else { block[i - 1] + 1 };
        }
        block
    }

    pub fn in_parabolic(&self, j: &JSet, g: &[Fq]) -> bool {
        let block = self.blocks(j);
        for i in 0..self.m {
            for jj in 0..i {
                if block[i] != block[jj] && g[i * self.m + jj] != 0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn in_borel(&self, g: &[Fq]) -> bool {
        self.in_parabolic(&JSet::new(), g)
    }

    pub fn borel_elements(&self) -> Vec<u32> {
        (0..self.order() as u32)
            .filter(|&i| self.in_borel(&self.elements[i as usize]))
            .collect()
    }

    /// Coset table for `P_J \ G`.
    pub fn coset_table(&self, j: &JSet) -> CosetTable {
        let n = self.order();
        let parabolic: Vec<u32> = (0..n as u32)
            .filter(|&i| self.in_parabolic(j, &self.elements[i as usize]))
            .collect();
        let mut coset_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n as u32 {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(g);
            let ge = &self.elements[g as usize];
            for &p in &parabolic {
                let pg = self.mul_k(&self.elements[p as usize], ge);
                coset_of[self.idx(&pg) as usize] = id;
            }
        }
        CosetTable { coset_of, reps }
    }
}

pub struct CosetTable {
    /// element index -> coset id
    pub coset_of: Vec<u32>,
    /// coset id -> smallest element index in the coset
    pub reps: Vec<u32>,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.reps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// The generalized Steinberg quotient `St_J` of `Ind_{P_J}^G 1`, realized as
/// the quotient by the explicit span of the inductions from the strictly
/// larger standard parabolics.
pub struct Steinberg {
    pub j: JSet,
    pub table: CosetTable,
    /// span of the larger-parabolic inductions inside the induced space
    pub sub: Subspace,
    pub dim_st: usize,
}

pub fn steinberg(ctx: &FiniteGroupCtx, j: &JSet) -> Steinberg {
    let table = ctx.coset_table(j);
    let n = table.len();
    let mut sub = Subspace::empty(n);
    for alpha in 0..ctx.m - 1 {
        if j.contains(&alpha) {
            continue;
        }
        let mut j2 = j.clone();
        j2.insert(alpha);
        let table2 = ctx.coset_table(&j2);
        for big in 0..table2.len() as u32 {
            let mut v = linalg::zeros(n);
            for c in 0..n {
                let rep = table.reps[c];
                if table2.coset_of[rep as usize] == big {
                    v[c] = 1;
                }
            }
            sub.insert(&ctx.field, v);
        }
    }
    let dim_st = n - sub.dim();
    Steinberg { j: j.clone(), table, sub, dim_st }
}

impl Steinberg {
    /// Image of an induced-space vector in the quotient, in the canonical
    /// reduced coordinates.
    pub fn project(&self, field: &Field, v: &Vector) -> Vector {
        self.sub.reduce(field, v.clone())
    }
}

/// The indicator function of `P_J w^{-1} B` inside `Ind_{P_J}^G 1`.
pub fn g_w_vector(ctx: &FiniteGroupCtx, table: &CosetTable, w: &Perm) -> Vector {
    let mut v = linalg::zeros(table.len());
    let winv = ctx.perm_matrix(&w.inverse());
    for &b in &ctx.borel_elements() {
        let x = ctx.mul_k(&winv, &ctx.elements[b as usize]);
        v[table.coset_of[ctx.idx(&x) as usize] as usize] = 1;
    }
    v
}

/// Right action of the Hecke operator `T_s` on a Borel-invariant function of
/// `P_J \ G`: `(f T_s)(x) = sum_{u in U_s} f(x u^{-1} s^{-1})`.
pub fn apply_ts(ctx: &FiniteGroupCtx, table: &CosetTable, v: &Vector, s: usize) -> Vector {
    let f = &ctx.field;
    let smat = ctx.perm_matrix(&Perm::simple(ctx.m, s));
    let sinv = ctx.inv_k(&smat);
    let mut out = linalg::zeros(table.len());
    for x in f.elements().collect::<Vec<_>>() {
        let u_inv = ctx.root_elt(s, f.neg(x));
        let t = ctx.mul_k(&u_inv, &sinv);
        for c in 0..table.len() {
            let rep = table.reps[c];
            let y = ctx.mul_k(&ctx.elements[rep as usize], &t);
            let target = table.coset_of[ctx.idx(&y) as usize] as usize;
            out[c] = f.add(out[c], v[target]);
        }
    }
    out
}

/// Generators of the Borel as abstract elements: torus scalings in each slot
/// plus additive generators of each simple root subgroup.
pub fn borel_generators(ctx: &FiniteGroupCtx) -> Vec<Vec<Fq>> {
    let f = &ctx.field;
    let mut gens = Vec::new();
    for i in 0..ctx.m {
        let mut t = ctx.identity_k();
        t[i * ctx.m + i] = f.mu;
        gens.push(t);
    }
    for i in 0..ctx.m - 1 {
        for b in 0..f.n {
            let x = f.from_coeffs(&{
                let mut c = vec![0u32; f.n as usize];
                c[b as usize] = 1;
                c
            });
            gens.push(ctx.root_elt(i, x));
        }
    }
    gens
}

/// Matrix of right translation by `h` on `Ind_{P_J}^G 1` coset coordinates:
/// `(h . f)(x) = f(x h)`, so coordinate `c` of the image reads coordinate
/// `coset(rep_c h)`.
pub fn translation_matrix(ctx: &FiniteGroupCtx, table: &CosetTable, h: &[Fq]) -> Matrix {
    let n = table.len();
    let mut mat = vec![linalg::zeros(n); n];
    for c in 0..n {
        let y = ctx.mul_k(&ctx.elements[table.reps[c] as usize], h);
        mat[c][table.coset_of[ctx.idx(&y) as usize] as usize] = 1;
    }
    mat
}

/// Basis of the Borel-invariant subspace of the Steinberg quotient, in the
/// quotient's reduced coordinates (vectors of the ambient induced space).
pub fn steinberg_b_invariants(ctx: &FiniteGroupCtx, st: &Steinberg) -> Vec<Vector> {
    let f = &ctx.field;
    let n = st.table.len();
    // stack (T_h - 1) conditions modulo the subrepresentation: v is invariant
    // iff h.v - v in sub for all Borel generators h
    let mut rows: Matrix = Vec::new();
    for h in borel_generators(ctx) {
        let t = translation_matrix(ctx, &st.table, &h);
        for c in 0..n {
            // condition row evaluated on e_c basis: (h.e_c - e_c) reduced
            let mut col = linalg::zeros(n);
            col[c] = 1;
            let moved = linalg::mat_vec(f, &t, &col);
            let diff = linalg::sub_vec(f, &moved, &col);
            let red = st.sub.reduce(f, diff);
            rows.push(red);
        }
    }
    // we built, for each generator h, the images (h - 1)e_c as rows; the
    // invariance conditions on v = sum v_c e_c are sum v_c ((h-1)e_c) = 0,
    // i.e. the kernel of the matrix whose columns are those images
    let n_gens = borel_generators(ctx).len();
    let mut cond: Matrix = Vec::new();
    for gi in 0..n_gens {
        for coord in 0..n {
            let mut row = linalg::zeros(n);
            for c in 0..n {
                row[c] = rows[gi * n + c][coord];
            }
            cond.push(row);
        }
    }
    let kernel = linalg::kernel_basis(f, &cond);
    // return reduced (quotient-canonical) representatives, dropping the ones
    // that die in the quotient
    let mut inv = Subspace::empty(n);
    for v in kernel {
        inv.insert(f, st.sub.reduce(f, v));
    }
    inv.basis
}

/// An irreducible `GL(2, k_D)` weight `V(r, chi) = (chi o det) (x) Sym^r`,
/// with the action matrices over `k_D` itself (which has characteristic `p`).
pub struct Gl2Weight {
    pub r_vec: Vec<u32>,
    pub chi_exp: i64,
    pub dim: usize,
    /// index of the highest monomial `X^r` (all `i_j = 0`)
    pub x_line: usize,
    /// index of the lowest monomial `Y^r` (all `i_j = r_j`)
    pub y_line: usize,
}

impl Gl2Weight {
    pub fn new(field: &Field, r_vec: Vec<u32>, chi_exp: i64) -> Result<Gl2Weight, FinError> {
        if r_vec.len() != field.n as usize {
            return Err(FinError::Unsupported(format!(
                "r must have f*d = {} components",
                field.n
            )));
        }
        if r_vec.iter().any(|&r| r >= field.p) {
            return Err(FinError::Unsupported("components of r must lie in [0, p-1]".into()));
        }
        let dim: u64 = r_vec.iter().map(|&r| (r + 1) as u64).product();
        if dim > WEIGHT_CAP {
            return Err(FinError::DimensionCap(dim, WEIGHT_CAP));
        }
        let dim = dim as usize;
        let mut strides = vec![1usize; r_vec.len()];
        for j in (0..r_vec.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * (r_vec[j + 1] + 1) as usize;
        }
        let y_line = r_vec
            .iter()
            .zip(&strides)
            .map(|(&r, &s)| r as usize * s)
            .sum();
        Ok(Gl2Weight { r_vec, chi_exp, dim, x_line: 0, y_line })
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.r_vec.len()];
        for j in (0..self.r_vec.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * (self.r_vec[j + 1] + 1) as usize;
        }
        strides
    }

    /// Action matrix of `[[a, b], [c, d]]` (given as a flat 2x2 residue
    /// matrix) on `V(r, chi)`.
    pub fn act(&self, field: &Field, g: &[Fq]) -> Matrix {
        let (a, b, c, d) = (g[0], g[1], g[2], g[3]);
        let det = field.sub(field.mul(a, d), field.mul(b, c));
        let twist = field
            .char_apply(self.chi_exp, det)
            .expect("group elements are invertible");
        let strides = self.strides();
        // per-factor action on Sym^{r_j} with entries twisted by x -> x^{p^j}
        let mut factor_mats: Vec<Matrix> = Vec::new();
        for (j, &r) in self.r_vec.iter().enumerate() {
            let pj = (field.p as i64).pow(j as u32);
            let tw = |x: Fq| field.pow(x, pj).unwrap_or(0);
            let (aj, bj, cj, dj) = (tw(a), tw(b), tw(c), tw(d));
            let n = (r + 1) as usize;
            // column i = image of X^{r-i} Y^i = (aX + cY)^{r-i} (bX + dY)^i
            let mut mat = vec![linalg::zeros(n); n];
            for i in 0..n {
                let poly1 = binomial_expand(field, aj, cj, r as usize - i);
                let poly2 = binomial_expand(field, bj, dj, i);
                // product polynomial in Y-degree
                for (e1, &c1) in poly1.iter().enumerate() {
                    if c1 == 0 {
                        continue;
                    }
                    for (e2, &c2) in poly2.iter().enumerate() {
                        if c2 == 0 {
                            continue;
                        }
                        let row = e1 + e2; // Y-degree of the monomial
                        mat[row][i] = field.add(mat[row][i], field.mul(c1, c2));
                    }
                }
            }
            factor_mats.push(mat);
        }
        // Kronecker product over the factors, with the chi twist
        let mut out = vec![linalg::zeros(self.dim); self.dim];
        for col in 0..self.dim {
            for row in 0..self.dim {
                let mut acc: Fq = twist;
                for (j, &r) in self.r_vec.iter().enumerate() {
                    let n = (r + 1) as usize;
                    let i_col = col / strides[j] % n;
                    let i_row = row / strides[j] % n;
                    acc = field.mul(acc, factor_mats[j][i_row][i_col]);
                    if acc == 0 {
                        break;
                    }
                }
                out[row][col] = acc;
            }
        }
        out
    }

    /// Projection onto the `U`-coinvariant line through `Y^r`, as a matrix.
    /// The kernel of the coinvariant map is spanned by `u.v - v`.
    pub fn p_u(&self, field: &Field) -> Matrix {
        let mut ker = Subspace::empty(self.dim);
        for x in field.elements() {
            if x == 0 {
                continue;
            }
            let u = [1, x, 0, 1];
            let mat = self.act(field, &u);
            for c in 0..self.dim {
                let mut e = linalg::zeros(self.dim);
                e[c] = 1;
                let diff = linalg::sub_vec(field, &linalg::mat_vec(field, &mat, &e), &e);
                ker.insert(field, diff);
            }
        }
        assert_eq!(ker.dim(), self.dim - 1, "coinvariants must be a line");
        // p_U(v) = t * e_{y_line} where reduce(v) = t * reduce(e_{y_line})
        let mut ey = linalg::zeros(self.dim);
        ey[self.y_line] = 1;
        let rey = ker.reduce(field, ey);
        let pos = rey.iter().position(|&x| x != 0).expect("Y^r spans the quotient");
        let norm = field.inv(rey[pos]).unwrap();
        let mut cols = Vec::with_capacity(self.dim);
        for c in 0..self.dim {
            let mut e = linalg::zeros(self.dim);
            e[c] = 1;
            let red = ker.reduce(field, e);
            cols.push(field.mul(red[pos], norm));
        }
        let mut out = vec![linalg::zeros(self.dim); self.dim];
        for (c, &t) in cols.iter().enumerate() {
            out[self.y_line][c] = t;
        }
        out
    }
}

fn binomial_expand(field: &Field, x: Fq, y: Fq, n: usize) -> Vec<Fq> {
    // coefficients of (xX + yY)^n by Y-degree: binom(n, k) x^{n-k} y^k
    let mut out = vec![0 as Fq; n + 1];
    // binomials mod p via Pascal in the field
    let mut binom = vec![0 as Fq; n + 1];
    binom[0] = 1;
    for _ in 0..n {
        for k in (1..=n).rev() {
            binom[k] = field.add(binom[k], binom[k - 1]);
        }
    }
    for (k, o) in out.iter_mut().enumerate() {
        let xe = field.pow(x, (n - k) as i64).unwrap_or(if n == k { 1 } else { 0 });
        let ye = field.pow(y, k as i64).unwrap_or(if k == 0 { 1 } else { 0 });
        *o = field.mul(binom[k], field.mul(xe, ye));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{all_jsets, wj_sets};

    fn ctx(p: u32, f: u32, m: usize) -> FiniteGroupCtx {
        FiniteGroupCtx::new(Field::new(p, f, 1, 0).unwrap(), m).unwrap()
    }

    #[test]
    fn group_orders() {
        assert_eq!(ctx(2, 1, 2).order(), 6);
        assert_eq!(ctx(2, 1, 3).order(), 168);
        assert_eq!(ctx(2, 2, 2).order(), 180);
        assert_eq!(ctx(3, 1, 2).order(), 48);
    }

    #[test]
    fn flag_counts() {
        // |B \ G| = q + 1 for GL(2, F_q)
        let c = ctx(2, 1, 2);
        assert_eq!(c.coset_table(&JSet::new()).len(), 3);
        let c = ctx(2, 2, 2);
        assert_eq!(c.coset_table(&JSet::new()).len(), 5);
        // GL(3, F_2): full flags 21 * ... = (q^2+q+1)(q+1) = 7 * 3 = 21
        let c = ctx(2, 1, 3);
        assert_eq!(c.coset_table(&JSet::new()).len(), 21);
        // |P_J \ G| graded by W^J: sum over W^J of q^{l(w)}
        for m in [2usize, 3] {
            let c = ctx(2, 1, m);
            for j in all_jsets(m) {
                let expect: u64 = wj_sets(m, &j).wj.iter().map(|w| 2u64.pow(w.len() as u32)).sum();
                assert_eq!(c.coset_table(&j).len() as u64, expect, "J={j:?}");
            }
        }
    }

    #[test]
    fn steinberg_dims_gl2() {
        // GL(2, F_q), J = empty: dim St = q, B-invariants 1-dimensional
        for (p, f) in [(2, 1), (3, 1), (2, 2)] {
            let c = ctx(p, f, 2);
            let st = steinberg(&c, &JSet::new());
            assert_eq!(st.dim_st as u32, c.field.size);
            let inv = steinberg_b_invariants(&c, &st);
            assert_eq!(inv.len(), 1);
            // J = Delta: trivial representation
            let full: JSet = [0usize].into_iter().collect();
            let st = steinberg(&c, &full);
            assert_eq!(st.dim_st, 1);
            assert_eq!(steinberg_b_invariants(&c, &st).len(), 1);
        }
    }

    #[test]
    fn steinberg_binvariants_match_wpr() {
        // GL(3, F_2), J = {alpha_1}: two-dimensional B-invariants
        let c = ctx(2, 1, 3);
        let j: JSet = [0usize].into_iter().collect();
        let st = steinberg(&c, &j);
        let inv = steinberg_b_invariants(&c, &st);
        assert_eq!(inv.len(), 2);
        assert_eq!(inv.len(), wj_sets(3, &j).wpr.len());
    }

    #[test]
    fn gw_vectors_span_invariants() {
        let c = ctx(2, 1, 3);
        for j in all_jsets(3) {
            let st = steinberg(&c, &j);
            let data = wj_sets(3, &j);
            let mut span = Subspace::empty(st.table.len());
            for w in &data.wpr {
                let v = g_w_vector(&c, &st.table, w);
                span.insert(&c.field, st.project(&c.field, &v));
            }
            assert_eq!(span.dim(), data.wpr.len(), "g_w not independent in St, J={j:?}");
            let inv = steinberg_b_invariants(&c, &st);
            assert_eq!(span.dim(), inv.len());
            for v in &inv {
                assert!(span.contains(&c.field, v));
            }
        }
    }

    #[test]
    fn ts_trichotomy_small() {
        // Lemma-style trichotomy for GL(2, F_2) and GL(3, F_2) on Ind
        for m in [2usize, 3] {
            let c = ctx(2, 1, m);
            for j in all_jsets(m) {
                let table = c.coset_table(&j);
                let data = wj_sets(m, &j);
                for w in &data.wj {
                    for s in 0..m - 1 {
                        let gw = g_w_vector(&c, &table, w);
                        let out = apply_ts(&c, &table, &gw, s);
                        let sw = Perm::simple(m, s).compose(w);
                        let swj = crate::weyl::min_coset_rep(&sw, &j);
                        if swj == *w {
                            assert!(linalg::is_zero_vec(&out), "case (a) m={m} J={j:?}");
                        } else if swj.len() > w.len() {
                            let expect = g_w_vector(&c, &table, &swj);
                            assert_eq!(out, expect, "case (b) m={m} J={j:?}");
                        } else {
                            let expect: Vector =
                                gw.iter().map(|&x| c.field.neg(x)).collect();
                            assert_eq!(out, expect, "case (c) m={m} J={j:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weight_dimensions_and_lines() {
        let f4 = Field::new(2, 1, 2, 1).unwrap();
        // r = 0: the character chi o det
        let w = Gl2Weight::new(&f4, vec![0, 0], 1).unwrap();
        assert_eq!(w.dim, 1);
        // p = 2, fd = 2: dim V(r, chi) = prod (r_j + 1)
        let w = Gl2Weight::new(&f4, vec![1, 1], 0).unwrap();
        assert_eq!(w.dim, 4);
        let f2 = Field::new(2, 1, 1, 0).unwrap();
        let w = Gl2Weight::new(&f2, vec![1], 0).unwrap();
        assert_eq!(w.dim, 2);
        // U-invariant line spanned by X: [[1,b],[0,1]] fixes X
        for b in f2.elements() {
            let mat = w.act(&f2, &[1, b, 0, 1]);
            let mut ex = linalg::zeros(2);
            ex[w.x_line] = 1;
            assert_eq!(linalg::mat_vec(&f2, &mat, &ex), ex);
        }
    }

    #[test]
    fn weight_borel_action_formulas() {
        // Lemma-style action on the extreme lines, checked entry-wise against
        // matrix conjugation for p in {2, 3}, fd <= 2
        for (p, f, d, a_d) in [(2, 1, 1, 0), (3, 1, 1, 0), (2, 1, 2, 1), (3, 1, 2, 1)] {
            let fld = Field::new(p, f, d, a_d).unwrap();
            let mut rvecs = vec![vec![0u32; fld.n as usize]];
            let mut r1 = vec![0u32; fld.n as usize];
            r1[0] = p - 1;
            rvecs.push(r1);
            if fld.n == 2 {
                rvecs.push(vec![1, p - 1]);
            }
            for rv in rvecs {
                for chi in 0..fld.unit_order().min(4) as i64 {
                    let w = Gl2Weight::new(&fld, rv.clone(), chi).unwrap();
                    let rexp: i64 = rv
                        .iter()
                        .enumerate()
                        .map(|(j, &r)| r as i64 * (p as i64).pow(j as u32))
                        .sum();
                    for a in fld.units() {
                        for dd in fld.units() {
                            for b in fld.elements() {
                                // upper triangular fixes X^r with weight chi(ad) a^r
                                let mat = w.act(&fld, &[a, b, 0, dd]);
                                let mut ex = linalg::zeros(w.dim);
                                ex[w.x_line] = 1;
                                let img = linalg::mat_vec(&fld, &mat, &ex);
                                let scal = fld.mul(
                                    fld.char_apply(chi, fld.mul(a, dd)).unwrap(),
                                    fld.pow(a, rexp).unwrap(),
                                );
                                assert_eq!(img, linalg::scale(&fld, &ex, scal));
                                // lower triangular fixes Y^r with weight chi(ad) d^r
                                let mat = w.act(&fld, &[a, 0, b, dd]);
                                let mut ey = linalg::zeros(w.dim);
                                ey[w.y_line] = 1;
                                let img = linalg::mat_vec(&fld, &mat, &ey);
                                let scal = fld.mul(
                                    fld.char_apply(chi, fld.mul(a, dd)).unwrap(),
                                    fld.pow(dd, rexp).unwrap(),
                                );
                                assert_eq!(img, linalg::scale(&fld, &ey, scal));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weight_is_homomorphism() {
        let f4 = Field::new(2, 1, 2, 1).unwrap();
        let w = Gl2Weight::new(&f4, vec![1, 0], 1).unwrap();
        let c = FiniteGroupCtx::new(f4.clone(), 2).unwrap();
        for a in c.elements.iter().take(40) {
            for b in c.elements.iter().take(20) {
                let lhs = w.act(&f4, &c.mul_k(a, b));
                let rhs = linalg::mat_mul(&f4, &w.act(&f4, a), &w.act(&f4, b));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn p_u_is_projection_onto_coinvariants() {
        let f2 = Field::new(2, 1, 1, 0).unwrap();
        let w = Gl2Weight::new(&f2, vec![1], 0).unwrap();
        let p = w.p_u(&f2);
        // p^2 = p and image is the Y-line
        assert_eq!(linalg::mat_mul(&f2, &p, &p), p);
        let mut ey = linalg::zeros(2);
        ey[w.y_line] = 1;
        assert_eq!(linalg::mat_vec(&f2, &p, &ey), ey);
        // kernel contains u.v - v
        let u = [1, 1, 0, 1];
        let mat = w.act(&f2, &u);
        for c in 0..2 {
            let mut e = linalg::zeros(2);
            e[c] = 1;
            let diff = linalg::sub_vec(&f2, &linalg::mat_vec(&f2, &mat, &e), &e);
            assert!(linalg::is_zero_vec(&linalg::mat_vec(&f2, &p, &diff)));
        }
    }
}
