//! Symmetric-group Coxeter combinatorics for type A: minimal coset
//! representatives `W^J`, primitive elements `W_pr^J`, the chain order `<_J`,
//! the rank of the boundary-map cokernel `M_J`, and dominance-order utilities
//! for integer exponent vectors.

use std::collections::{BTreeSet, HashMap, VecDeque};

/// A permutation of `{0, .., m-1}` in one-line notation: `perm[i]` is the
/// image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(m: usize) -> Perm {
        Perm((0..m).collect())
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    /// Longest element: `i -> m-1-i`.
    pub fn longest(m: usize) -> Perm {
        Perm((0..m).rev().collect())
    }

    /// Simple transposition `s_i` swapping `i` and `i+1`.
    pub fn simple(m: usize, i: usize) -> Perm {
        let mut v: Vec<usize> = (0..m).collect();
        v.swap(i, i + 1);
        Perm(v)
    }

    /// Coxeter length: the inversion count.
    pub fn len(&self) -> usize {
        let v = &self.0;
        let mut inv = 0;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                if v[i] > v[j] {
                    inv += 1;
                }
            }
        }
        inv
    }

    /// Composition: `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0; self.0.len()];
        for (i, &im) in self.0.iter().enumerate() {
            v[im] = i;
        }
        Perm(v)
    }

    /// A reduced word in the simple generators: bubble-sorting the one-line
    /// notation records right multiplications `w s_{i_1} ... s_{i_k} = e`,
    /// so `self = s_{i_k} ... s_{i_1}` as a group product.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut cur = self.0.clone();
        let mut word = Vec::new();
        loop {
            let mut moved = false;
            for i in 0..cur.len().saturating_sub(1) {
                if cur[i] > cur[i + 1] {
                    cur.swap(i, i + 1);
                    word.push(i);
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        word.reverse();
        word
    }

    /// Right descent at `alpha_i`: `l(w s_i) < l(w)`.
    pub fn right_descent(&self, i: usize) -> bool {
        self.0[i] > self.0[i + 1]
    }
}

/// All of `S_m`, in a deterministic order.
pub fn all_perms(m: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(Perm(cur.clone()));
        // next lexicographic permutation
        let mut i = m.wrapping_sub(2);
        while i < m && cur[i] >= cur[i + 1] {
            i = i.wrapping_sub(1);
        }
        if i >= m {
            break;
        }
        let mut j = m - 1;
        while cur[j] <= cur[i] {
            j -= 1;
        }
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// A set of simple-root indices, `J` a subset of `{0, .., m-2}`.
pub type JSet = BTreeSet<usize>;

pub fn all_jsets(m: usize) -> Vec<JSet> {
    let k = m - 1;
    (0u32..(1 << k))
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Minimal representative of `w W_J`: values sorted ascending within each
/// maximal `J`-interval of positions.
pub fn min_coset_rep(w: &Perm, j: &JSet) -> Perm {
    let m = w.m();
    let mut v = w.0.clone();
    let mut i = 0;
    while i < m {
        let mut end = i;
        while end + 1 < m && j.contains(&end) {
            end += 1;
        }
        v[i..=end].sort_unstable();
        i = end + 1;
    }
    Perm(v)
}

pub struct WJData {
    /// Minimal coset representatives of `W/W_J`, sorted.
    pub wj: Vec<Perm>,
    /// Primitive elements: representatives whose descents outside `J` are all
    /// descents.
    pub wpr: Vec<Perm>,
    /// The unique length-maximal element of `W^J`.
    pub zj: Perm,
}

/// `W^J`, `W_pr^J` and `z^J` for the symmetric group `S_m`.
pub fn wj_sets(m: usize, j: &JSet) -> WJData {
    let mut wj = Vec::new();
    let mut wpr = Vec::new();
    for w in all_perms(m) {
        let in_wj = (0..m - 1).filter(|i| j.contains(i)).all(|i| !w.right_descent(i));
        if !in_wj {
            continue;
        }
        let primitive = (0..m - 1)
            .filter(|i| !j.contains(i))
            .all(|i| w.right_descent(i));
        if primitive {
            wpr.push(w.clone());
        }
        wj.push(w);
    }
    let zj = wj
        .iter()
        .max_by_key(|w| w.len())
        .expect("W^J nonempty")
        .clone();
    WJData { wj, wpr, zj }
}

/// The chain order `w <_J w'`: a chain of left multiplications by simple
/// reflections staying inside `W^J` with length increasing by one at each
/// step (reflexive by the empty chain).
pub fn less_j(m: usize, w: &Perm, w2: &Perm, j: &JSet) -> Result<bool, String> {
    let data = wj_sets(m, j);
    let in_wj = |x: &Perm| data.wj.contains(x);
    if !in_wj(w) || !in_wj(w2) {
        return Err("arguments must lie in W^J".into());
    }
    if w == w2 {
        return Ok(true);
    }
    let target_len = w2.len();
    let mut queue = VecDeque::new();
    let mut seen = BTreeSet::new();
    queue.push_back(w.clone());
    seen.insert(w.clone());
    while let Some(cur) = queue.pop_front() {
        let lc = cur.len();
        if lc >= target_len {
            continue;
        }
        for i in 0..m - 1 {
            let next = Perm::simple(m, i).compose(&cur);
            if next.len() == lc + 1 && in_wj(&next) && seen.insert(next.clone()) {
                if next == *w2 {
                    return Ok(true);
                }
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

/// Rank of the free cokernel of the boundary map
/// `sum_{alpha not in J} Z[W^{J u {alpha}}] -> Z[W^J]`, computed by an
/// integer Smith normal form. Panics if the cokernel has torsion (it never
/// does for these boundary maps).
pub fn mj_rank(m: usize, j: &JSet) -> usize {
    let data_j = wj_sets(m, j);
    let index: HashMap<&Perm, usize> = data_j.wj.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let rows = data_j.wj.len();
    let mut cols: Vec<Vec<i64>> = Vec::new();
    for alpha in 0..m - 1 {
        if j.contains(&alpha) {
            continue;
        }
        let mut j2 = j.clone();
        j2.insert(alpha);
        let data_j2 = wj_sets(m, &j2);
        // the subgroup W_{J u alpha}
        let wj2_group: Vec<Perm> = all_perms(m)
            .into_iter()
            .filter(|w| {
                // generated by simple reflections in j2: w fixes the blocks
                min_coset_rep(w, &j2) == Perm::identity(m)
            })
            .collect();
        for w in &data_j2.wj {
            let mut col = vec![0i64; rows];
            let mut seen = BTreeSet::new();
            for u in &wj2_group {
                let rep = min_coset_rep(&w.compose(u), j);
                if seen.insert(rep.clone()) {
                    col[index[&rep]] += 1;
                }
            }
            cols.push(col);
        }
    }
    if cols.is_empty() {
        return rows;
    }
    // matrix with `rows` rows and `cols.len()` columns
    let mut mat: Vec<Vec<i64>> = (0..rows)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    let divisors = integer_smith(&mut mat);
    let rank = divisors.iter().filter(|&&d| d != 0).count();
    assert!(
        divisors.iter().all(|&d| d == 0 || d == 1),
        "cokernel of the boundary map has torsion: {divisors:?}"
    );
    rows - rank
}

/// In-place integer Smith normal form; returns the diagonal.
pub fn integer_smith(mat: &mut Vec<Vec<i64>>) -> Vec<i64> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let n = rows.min(cols);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        loop {
            // find a nonzero pivot of minimal absolute value
            let mut best: Option<(usize, usize, i64)> = None;
            for i in k..rows {
                for j in k..cols {
                    let v = mat[i][j];
                    if v != 0 && best.map_or(true, |(_, _, b)| v.abs() < b.abs()) {
                        best = Some((i, j, v));
                    }
                }
            }
            let (bi, bj, _) = match best {
                None => {
                    diag.push(0);
                    break;
                }
                Some(t) => t,
            };
            mat.swap(k, bi);
            for row in mat.iter_mut() {
                row.swap(k, bj);
            }
            let piv = mat[k][k];
            let mut clean = true;
            for i in (k + 1)..rows {
                let f = mat[i][k].div_euclid(piv);
                if f != 0 {
                    for j in k..cols {
                        mat[i][j] -= f * mat[k][j];
                    }
                }
                if mat[i][k] != 0 {
                    clean = false;
                }
            }
            for j in (k + 1)..cols {
                let f = mat[k][j].div_euclid(piv);
                if f != 0 {
                    for row in mat.iter_mut().take(rows).skip(k) {
                        row[j] -= f * row[k];
                    }
                }
                if mat[k][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                diag.push(piv.abs());
                break;
            }
        }
    }
    diag
}

/// Dominance order on equal-sum vectors sorted nonincreasing:
/// `lambda <= mu` iff all prefix sums of `lambda` are `<=` those of `mu`.
pub fn dominance_leq(lambda: &[i64], mu: &[i64]) -> bool {
    assert_eq!(lambda.len(), mu.len());
    let mut sl = lambda.to_vec();
    let mut sm = mu.to_vec();
    sl.sort_unstable_by(|a, b| b.cmp(a));
    sm.sort_unstable_by(|a, b| b.cmp(a));
    if sl.iter().sum::<i64>() != sm.iter().sum::<i64>() {
        return false;
    }
    let mut pa = 0i64;
    let mut pb = 0i64;
    for i in 0..sl.len() {
        pa += sl[i];
        pb += sm[i];
        if pa > pb {
            return false;
        }
    }
    true
}

/// All dominant (nonincreasing) `lambda` with `lambda <= mu`, for dominant
/// `mu`; includes `mu` itself. Entries may be negative.
pub fn dominance_interval(mu: &[i64]) -> Vec<Vec<i64>> {
    let m = mu.len();
    assert!(mu.windows(2).all(|w| w[0] >= w[1]), "mu must be dominant");
    let total: i64 = mu.iter().sum();
    let lo = *mu.last().unwrap();
    let hi = mu[0];
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(
        mu: &[i64],
        m: usize,
        total: i64,
        lo: i64,
        hi: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let k = cur.len();
        if k == m {
            if cur.iter().sum::<i64>() == total {
                out.push(cur.clone());
            }
            return;
        }
        let prefix: i64 = cur.iter().sum();
        let mu_prefix: i64 = mu.iter().take(k + 1).sum();
        let upper = if k == 0 { hi } else { cur[k - 1].min(mu_prefix - prefix) };
        let upper = upper.min(mu_prefix - prefix);
        for v in (lo..=upper).rev() {
            // remaining entries are each <= v, so we can still reach `total`
            // only if prefix + v + (m-k-1)*v >= total is possible downward
            // and prefix + v + (m-k-1)*lo <= total upward
            let rem = (m - k - 1) as i64;
            if prefix + v + rem * v < total || prefix + v + rem * lo > total {
                continue;
            }
            cur.push(v);
            rec(mu, m, total, lo, hi, cur, out);
            cur.pop();
        }
    }
    rec(mu, m, total, lo, hi, &mut cur, &mut out);
    out.retain(|l| dominance_leq(l, mu));
    out.sort_unstable();
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_and_words() {
        for m in 2..=5 {
            for w in all_perms(m) {
                let word = w.reduced_word();
                assert_eq!(word.len(), w.len(), "word not reduced for {w:?}");
                let mut acc = Perm::identity(m);
                for &i in &word {
                    acc = acc.compose(&Perm::simple(m, i));
                }
                assert_eq!(acc, w);
            }
        }
    }

    #[test]
    fn wj_extremes() {
        // J = Delta: W^J = {e} = W_pr^J
        for m in 2..=4 {
            let full: JSet = (0..m - 1).collect();
            let data = wj_sets(m, &full);
            assert_eq!(data.wj, vec![Perm::identity(m)]);
            assert_eq!(data.wpr, vec![Perm::identity(m)]);
            // J = empty: W_pr = {w_0}
            let empty = JSet::new();
            let data = wj_sets(m, &empty);
            assert_eq!(data.wpr, vec![Perm::longest(m)]);
            assert_eq!(data.wj.len(), data.wj.iter().collect::<BTreeSet<_>>().len());
        }
    }

    #[test]
    fn wj_m3_alpha1() {
        let m = 3;
        let j: JSet = [0usize].into_iter().collect();
        let data = wj_sets(m, &j);
        assert_eq!(data.wj.len(), 3);
        assert_eq!(data.wpr.len(), 2);
    }

    #[test]
    fn coset_counts_and_partition() {
        for m in 2..=5 {
            let fact: usize = (1..=m).product();
            for j in all_jsets(m) {
                let data = wj_sets(m, &j);
                let wj_group = all_perms(m)
                    .into_iter()
                    .filter(|w| min_coset_rep(w, &j) == Perm::identity(m))
                    .count();
                assert_eq!(data.wj.len() * wj_group, fact, "m={m} J={j:?}");
            }
            let total: usize = all_jsets(m).iter().map(|j| wj_sets(m, j).wpr.len()).sum();
            assert_eq!(total, fact, "partition of W by primitivity, m={m}");
        }
    }

    #[test]
    fn wpr_cardinality_lower_bound() {
        // |W_pr^J| >= 1 with equality iff J in {empty, Delta}
        for m in 2..=5 {
            for j in all_jsets(m) {
                let data = wj_sets(m, &j);
                assert!(!data.wpr.is_empty());
                let extreme = j.is_empty() || j.len() == m - 1;
                assert_eq!(data.wpr.len() == 1, extreme, "m={m} J={j:?}");
            }
        }
    }

    #[test]
    fn zj_is_w0_times_wj_longest() {
        for m in 2..=4 {
            for j in all_jsets(m) {
                let data = wj_sets(m, &j);
                // longest element of W_J
                let w0j = all_perms(m)
                    .into_iter()
                    .filter(|w| min_coset_rep(w, &j) == Perm::identity(m))
                    .max_by_key(|w| w.len())
                    .unwrap();
                assert_eq!(data.zj, Perm::longest(m).compose(&w0j));
                assert!(data.wpr.contains(&data.zj));
            }
        }
    }

    #[test]
    fn less_j_basics() {
        let m = 3;
        let empty = JSet::new();
        let e = Perm::identity(m);
        let w0 = Perm::longest(m);
        assert!(less_j(m, &e, &e, &empty).unwrap());
        assert!(less_j(m, &e, &w0, &empty).unwrap());
        assert!(!less_j(m, &w0, &e, &empty).unwrap());
        // antisymmetry + transitivity spot check over all pairs
        for j in all_jsets(m) {
            let data = wj_sets(m, &j);
            for a in &data.wj {
                for b in &data.wj {
                    let ab = less_j(m, a, b, &j).unwrap();
                    let ba = less_j(m, b, a, &j).unwrap();
                    if ab && ba {
                        assert_eq!(a, b);
                    }
                    if ab && a != b {
                        assert!(a.len() < b.len());
                    }
                }
            }
        }
    }

    #[test]
    fn zj_is_unique_less_j_maximum_of_wpr() {
        for m in 2..=4 {
            for j in all_jsets(m) {
                let data = wj_sets(m, &j);
                for w in &data.wpr {
                    assert!(less_j(m, w, &data.zj, &j).unwrap(), "m={m} J={j:?} w={w:?}");
                }
            }
        }
    }

    #[test]
    fn mj_rank_matches_wpr() {
        // J = Delta: the boundary has empty source, rank = |W^Delta| = 1
        let full: JSet = (0..1).collect();
        assert_eq!(mj_rank(2, &full), 1);
        // m=2, J=empty: rank 1
        assert_eq!(mj_rank(2, &JSet::new()), 1);
        // m=3, J={alpha_1}: rank 2, equal to |W_pr|
        let j: JSet = [0usize].into_iter().collect();
        assert_eq!(mj_rank(3, &j), 2);
        for m in 2..=4 {
            for j in all_jsets(m) {
                assert_eq!(mj_rank(m, &j), wj_sets(m, &j).wpr.len(), "m={m} J={j:?}");
            }
        }
    }

    #[test]
    fn integer_smith_small() {
        let mut mat = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]];
        let d = integer_smith(&mut mat);
        assert_eq!(d, vec![2, 2, 156]);
    }

    #[test]
    fn dominance_basics() {
        assert!(dominance_leq(&[1, 1], &[2, 0]));
        assert!(dominance_leq(&[2, 0], &[2, 0]));
        assert!(!dominance_leq(&[2, 0], &[1, 1]));
        let interval = dominance_interval(&[2, 0, 0]);
        assert_eq!(interval, vec![vec![2, 0, 0], vec![1, 1, 0]]);
        let interval = dominance_interval(&[2, 0]);
        assert_eq!(interval, vec![vec![2, 0], vec![1, 1]]);
        // exhaustive partial-sum cross-check over compositions
        let mu = [3, 1, 0];
        let total: i64 = mu.iter().sum();
        let mut brute = Vec::new();
        for a in -2..=4i64 {
            for b in -2..=4i64 {
                let c = total - a - b;
                if a >= b && b >= c && dominance_leq(&[a, b, c], &mu) {
                    brute.push(vec![a, b, c]);
                }
            }
        }
        let mut iv = dominance_interval(&mu);
        brute.sort_unstable();
        iv.sort_unstable();
        assert_eq!(iv, brute);
    }
}
