//! Dense exact linear algebra over a finite coefficient field, shared by the
//! finite-group and Hecke-module code. Vectors are `Vec<Fq>`, matrices are
//! row-major `Vec<Vec<Fq>>`; a matrix acts on column vectors from the left.

use crate::residue::{Field, Fq};

pub type Vector = Vec<Fq>;
pub type Matrix = Vec<Vector>;

pub fn zeros(n: usize) -> Vector {
    vec![0; n]
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            let mut r = zeros(n);
            r[i] = 1;
            r
        })
        .collect()
}

pub fn mat_vec(field: &Field, a: &Matrix, v: &Vector) -> Vector {
    a.iter()
        .map(|row| {
            let mut acc: Fq = 0;
            for (x, y) in row.iter().zip(v) {
                if *x != 0 && *y != 0 {
                    acc = field.add(acc, field.mul(*x, *y));
                }
            }
            acc
        })
        .collect()
}

pub fn mat_mul(field: &Field, a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![zeros(m); n];
    for i in 0..n {
        for l in 0..k {
            let ail = a[i][l];
            if ail == 0 {
                continue;
            }
            for j in 0..m {
                let blj = b[l][j];
                if blj != 0 {
                    out[i][j] = field.add(out[i][j], field.mul(ail, blj));
                }
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn scale(field: &Field, v: &Vector, c: Fq) -> Vector {
    v.iter().map(|&x| field.mul(x, c)).collect()
}

pub fn add_vec(field: &Field, a: &Vector, b: &Vector) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect()
}

pub fn sub_vec(field: &Field, a: &Vector, b: &Vector) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| field.sub(x, y)).collect()
}

pub fn is_zero_vec(v: &Vector) -> bool {
    v.iter().all(|&x| x == 0)
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref(field: &Field, rows: &mut Matrix) -> Vec<usize> {
    let n = rows.len();
    if n == 0 {
        return Vec::new();
    }
    let m = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(sel) = (r..n).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = field.inv(rows[r][c]).unwrap();
        for j in 0..m {
            rows[r][j] = field.mul(rows[r][j], inv);
        }
        for i in 0..n {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..m {
                    let t = field.mul(f, rows[r][j]);
                    rows[i][j] = field.sub(rows[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == n {
            break;
        }
    }
    rows.retain(|row| !is_zero_vec(row));
    pivots
}

pub fn rank(field: &Field, rows: &Matrix) -> usize {
    let mut copy = rows.clone();
    rref(field, &mut copy);
    copy.len()
}

/// Basis of `{x : A x = 0}` for an `n x m` matrix acting on column vectors.
pub fn kernel_basis(field: &Field, a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    let m = a[0].len();
    let mut rows = a.clone();
    let pivots = rref(field, &mut rows);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..m).filter(|c| !pivot_set.contains(c)) {
        let mut v = zeros(m);
        v[free] = 1;
        for (ri, &pc) in pivots.iter().enumerate() {
            // pivot row ri: x_pc = -sum_{free cols} row[free] x_free
            v[pc] = field.neg(rows[ri][free]);
        }
        basis.push(v);
    }
    basis
}

/// A subspace kept in reduced echelon form for fast membership tests.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub basis: Matrix,
    pivots: Vec<usize>,
    pub ambient: usize,
}

impl Subspace {
    pub fn empty(ambient: usize) -> Subspace {
        Subspace { basis: Vec::new(), pivots: Vec::new(), ambient }
    }

    pub fn from_vectors(field: &Field, vectors: &[Vector], ambient: usize) -> Subspace {
        let mut s = Subspace::empty(ambient);
        for v in vectors {
            s.insert(field, v.clone());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Reduces `v` against the basis; the nonzero remainder (if any) is
    /// returned.
    pub fn reduce(&self, field: &Field, mut v: Vector) -> Vector {
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if v[p] != 0 {
                let f = v[p];
                for j in 0..self.ambient {
                    let t = field.mul(f, row[j]);
                    v[j] = field.sub(v[j], t);
                }
            }
        }
        v
    }

    pub fn contains(&self, field: &Field, v: &Vector) -> bool {
        is_zero_vec(&self.reduce(field, v.clone()))
    }

    /// Inserts `v`; returns true when the dimension grew.
    pub fn insert(&mut self, field: &Field, v: Vector) -> bool {
        let mut r = self.reduce(field, v);
        let Some(p) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = field.inv(r[p]).unwrap();
        for x in r.iter_mut() {
            *x = field.mul(*x, inv);
        }
        // keep the stored basis reduced against the new row
        for (row, &q) in self.basis.iter_mut().zip(&self.pivots) {
            let _ = q;
            if row[p] != 0 {
                let f = row[p];
                for j in 0..self.ambient {
                    let t = field.mul(f, r[j]);
                    row[j] = field.sub(row[j], t);
                }
            }
        }
        let pos = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.pivots.insert(pos, p);
        self.basis.insert(pos, r);
        true
    }
}

/// Closure of the span of `seeds` under the action of `gens` (matrices acting
/// from the left). Returns the generated submodule as a [`Subspace`].
pub fn spin(field: &Field, gens: &[Matrix], seeds: &[Vector], ambient: usize) -> Subspace {
    let mut space = Subspace::empty(ambient);
    let mut queue: Vec<Vector> = Vec::new();
    for s in seeds {
        if space.insert(field, s.clone()) {
            queue.push(s.clone());
        }
    }
    while let Some(v) = queue.pop() {
        for g in gens {
            let w = mat_vec(field, g, &v);
            let r = space.reduce(field, w);
            if !is_zero_vec(&r) {
                let keep = r.clone();
                space.insert(field, r);
                queue.push(keep);
            }
        }
    }
    space
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::Field;

    #[test]
    fn kernel_and_rank() {
        let f = Field::new(3, 1, 1, 0).unwrap();
        // A = [[1,2,0],[2,1,0]] over F_3: rank 2, kernel spanned by e_3
        let a = vec![vec![1, 2, 0], vec![2, 1, 0]];
        assert_eq!(rank(&f, &a), 2);
        let k = kernel_basis(&f, &a);
        assert_eq!(k, vec![vec![0, 0, 1]]);
        for v in &k {
            assert!(is_zero_vec(&mat_vec(&f, &a, v)));
        }
    }

    #[test]
    fn subspace_membership() {
        let f = Field::new(2, 2, 1, 0).unwrap();
        let mut s = Subspace::empty(3);
        assert!(s.insert(&f, vec![1, f.mu, 0]));
        assert!(s.insert(&f, vec![0, 1, 1]));
        assert!(!s.insert(&f, vec![1, f.add(f.mu, 1), 1]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&f, &vec![1, f.mu, 0]));
        assert!(!s.contains(&f, &vec![0, 0, 1]));
    }

    #[test]
    fn spin_generates() {
        let f = Field::new(2, 1, 1, 0).unwrap();
        // cyclic shift on F_2^3 generates everything from e_1
        let shift = vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]];
        let s = spin(&f, &[shift], &[vec![1, 0, 0]], 3);
        assert_eq!(s.dim(), 3);
    }
}
