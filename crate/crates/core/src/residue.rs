//! Arithmetic in the residue field `k_D = F_{q^d}` (with `q = p^f`), its
//! Frobenius twist `x -> x^{q^{a_D}}`, discrete logarithms with respect to a
//! distinguished generator `mu`, and multiplicative characters.
//!
//! Elements are stored packed: an element `sum c_i X^i` of
//! `F_p[X]/(modulus)` is the integer `sum c_i p^i`. Packing is canonical, so
//! equality of field elements is integer equality. Multiplication and
//! inversion go through full log/antilog tables, which caps the field size at
//! `2^20` elements.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Packed field element. `0` is the zero element.
pub type Fq = u32;

/// Size cap for the log/antilog tables.
pub const TABLE_CAP: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("invalid field parameters: {0}")]
    InvalidParams(String),
    #[error("field size {0} exceeds the table cap {TABLE_CAP}")]
    TooLarge(u64),
    #[error("zero argument where a unit is required")]
    ZeroArgument,
    #[error("no embedding: {0}")]
    NoEmbedding(String),
}

/// Fixed modulus table: for each `(p, n)` the lexicographically least monic
/// irreducible polynomial of degree `n` over `F_p`, as coefficients
/// `c_0, .., c_{n-1}` of the non-leading terms (the leading coefficient is 1).
fn modulus_table(p: u32, n: u32) -> Option<&'static [u32]> {
    Some(match (p, n) {
        (2, 1) => &[0],
        (2, 2) => &[1, 1],
        (2, 3) => &[1, 1, 0],
        (2, 4) => &[1, 1, 0, 0],
        (2, 5) => &[1, 0, 1, 0, 0],
        (2, 6) => &[1, 1, 0, 0, 0, 0],
        (2, 7) => &[1, 1, 0, 0, 0, 0, 0],
        (2, 8) => &[1, 1, 0, 1, 1, 0, 0, 0],
        (2, 9) => &[1, 1, 0, 0, 0, 0, 0, 0, 0],
        (2, 10) => &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0],
        (2, 11) => &[1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 12) => &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 13) => &[1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 14) => &[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 15) => &[1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 16) => &[1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 17) => &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 18) => &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 19) => &[1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        (2, 20) => &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        (3, 1) => &[0],
        (3, 2) => &[1, 0],
        (3, 3) => &[1, 2, 0],
        (3, 4) => &[2, 1, 0, 0],
        (3, 5) => &[1, 2, 0, 0, 0],
        (3, 6) => &[2, 1, 0, 0, 0, 0],
        (3, 7) => &[2, 0, 1, 0, 0, 0, 0],
        (3, 8) => &[2, 0, 1, 0, 0, 0, 0, 0],
        (3, 9) => &[1, 0, 1, 2, 0, 0, 0, 0, 0],
        (3, 10) => &[1, 0, 2, 0, 0, 0, 0, 0, 0, 0],
        (3, 11) => &[2, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        (3, 12) => &[2, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        (5, 1) => &[0],
        (5, 2) => &[2, 0],
        (5, 3) => &[1, 1, 0],
        (5, 4) => &[2, 0, 0, 0],
        (5, 5) => &[1, 4, 0, 0, 0],
        (5, 6) => &[2, 1, 0, 0, 0, 0],
        (5, 7) => &[1, 1, 0, 0, 0, 0, 0],
        (5, 8) => &[2, 0, 0, 0, 0, 0, 0, 0],
        (7, 1) => &[0],
        (7, 2) => &[1, 0],
        (7, 3) => &[2, 0, 0],
        (7, 4) => &[1, 1, 0, 0],
        (7, 5) => &[3, 1, 0, 0, 0],
        (7, 6) => &[2, 0, 0, 0, 0, 0],
        (7, 7) => &[1, 6, 0, 0, 0, 0, 0],
        (11, 1) => &[0],
        (11, 2) => &[1, 0],
        (11, 3) => &[4, 1, 0],
        (11, 4) => &[2, 1, 0, 0],
        (11, 5) => &[2, 0, 0, 0, 0],
        (13, 1) => &[0],
        (13, 2) => &[2, 0],
        (13, 3) => &[2, 0, 0],
        (13, 4) => &[2, 0, 0, 0],
        (13, 5) => &[2, 4, 0, 0, 0],
        _ => return None,
    })
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u32;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The residue field `F_{q^d}` together with the Brauer twist data `a_D`.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct Field {
    pub p: u32,
    pub f: u32,
    pub d: u32,
    pub a_d: u32,
    /// `n = f * d`, the degree over the prime field.
    pub n: u32,
    /// `p^n`, the number of elements.
    pub size: u32,
    modulus: Vec<u32>,
    /// `exp[k] = mu^k` for `0 <= k < size - 1`.
    exp: Vec<Fq>,
    /// `log[x] = dlog_mu(x)` for `x != 0`; `log[0]` is a sentinel.
    log: Vec<u32>,
    /// Distinguished multiplicative generator.
    pub mu: Fq,
}

/// Serializable description of a [`Field`], the JSON surface of the type.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub f: u32,
    pub d: u32,
    #[serde(rename = "aD")]
    pub a_d: u32,
    /// Coefficients of the modulus over `F_p`, constant term first, leading 1
    /// included.
    pub modulus: Vec<u32>,
}

impl Field {
    /// Builds the field `F_{q^d}` with `q = p^f` and Brauer twist `a_D`.
    ///
    /// The modulus is taken from the built-in table so that identical
    /// parameters always produce identical element encodings.
    pub fn new(p: u32, f: u32, d: u32, a_d: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::InvalidParams(format!("p = {p} is not prime")));
        }
        if f == 0 || d == 0 {
            return Err(FieldError::InvalidParams("f and d must be positive".into()));
        }
        if d == 1 {
            if a_d != 0 {
                return Err(FieldError::InvalidParams("a_D must be 0 when d = 1".into()));
            }
        } else if a_d == 0 || a_d >= d || gcd(a_d, d) != 1 {
            return Err(FieldError::InvalidParams(format!(
                "a_D = {a_d} must lie in [1, {d}) and be coprime to d = {d}"
            )));
        }
        let n = f * d;
        let size64 = (p as u64).checked_pow(n).ok_or(FieldError::TooLarge(u64::MAX))?;
        if size64 > TABLE_CAP {
            return Err(FieldError::TooLarge(size64));
        }
        let size = size64 as u32;
        let lower = modulus_table(p, n)
            .ok_or_else(|| FieldError::InvalidParams(format!("no modulus tabulated for (p, n) = ({p}, {n})")))?;
        let mut modulus: Vec<u32> = lower.to_vec();
        modulus.push(1);

        let mut field = Field {
            p,
            f,
            d,
            a_d,
            n,
            size,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            mu: 0,
        };
        field.build_tables();
        Ok(field)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            f: self.f,
            d: self.d,
            a_d: self.a_d,
            modulus: self.modulus.clone(),
        }
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Field, FieldError> {
        let field = Field::new(spec.p, spec.f, spec.d, spec.a_d)?;
        if field.modulus != spec.modulus {
            return Err(FieldError::InvalidParams(
                "modulus in spec does not match the built-in table".into(),
            ));
        }
        Ok(field)
    }

    /// Order of the multiplicative group, `q^d - 1`.
    pub fn unit_order(&self) -> u32 {
        self.size - 1
    }

    fn unpack(&self, x: Fq) -> Vec<u32> {
        let mut c = vec![0u32; self.n as usize];
        let mut x = x;
        for ci in c.iter_mut() {
            *ci = x % self.p;
            x /= self.p;
        }
        c
    }

    fn pack(&self, c: &[u32]) -> Fq {
        let mut x = 0u64;
        for &ci in c.iter().rev() {
            x = x * self.p as u64 + (ci % self.p) as u64;
        }
        x as Fq
    }

    /// Coefficient vector of `x` over `F_p`, constant term first.
    pub fn coeffs(&self, x: Fq) -> Vec<u32> {
        self.unpack(x)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Fq {
        assert!(c.len() <= self.n as usize, "too many coefficients");
        let mut full = c.to_vec();
        full.resize(self.n as usize, 0);
        self.pack(&full)
    }

    fn raw_mul(&self, a: Fq, b: Fq) -> Fq {
        // Schoolbook product of coefficient vectors, reduced mod `modulus`.
        // Only used for table construction and embeddings.
        let n = self.n as usize;
        let ca = self.unpack(a);
        let cb = self.unpack(b);
        let mut prod = vec![0u32; 2 * n];
        for (i, &ai) in ca.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % self.p;
            }
        }
        for i in (n..2 * n).rev() {
            let c = prod[i];
            if c != 0 {
                prod[i] = 0;
                for j in 0..n {
                    let sub = (c * self.modulus[j]) % self.p;
                    prod[i - n + j] = (prod[i - n + j] + self.p - sub) % self.p;
                }
            }
        }
        self.pack(&prod[..n])
    }

    fn element_order(&self, x: Fq) -> u32 {
        let mut k = 1u32;
        let mut y = x;
        while y != 1 {
            y = self.raw_mul(y, x);
            k += 1;
        }
        k
    }

    fn build_tables(&mut self) {
        let order = self.unit_order();
        // Deterministic generator: smallest packed nonzero element of full
        // multiplicative order.
        let mut mu = 1u32;
        if order > 1 {
            mu = (2..self.size)
                .find(|&g| self.element_order(g) == order)
                .expect("a cyclic group has a generator");
        }
        self.mu = mu;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; self.size as usize];
        let mut cur: Fq = 1;
        for k in 0..order {
            exp.push(cur);
            log[cur as usize] = k;
            cur = self.raw_mul(cur, mu);
        }
        debug_assert_eq!(cur, 1);
        self.exp = exp;
        self.log = log;
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.p == 2 {
            return a ^ b;
        }
        let ca = self.unpack(a);
        let cb = self.unpack(b);
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&sum)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if self.p == 2 {
            return a;
        }
        let ca = self.unpack(a);
        let neg: Vec<u32> = ca.iter().map(|x| (self.p - x) % self.p).collect();
        self.pack(&neg)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(k % self.unit_order() as u64) as usize]
    }

    pub fn inv(&self, a: Fq) -> Result<Fq, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroArgument);
        }
        let k = self.log[a as usize];
        Ok(self.exp[((self.unit_order() - k) % self.unit_order()) as usize])
    }

    /// General integer power, exponent reduced on the unit order.
    pub fn pow(&self, a: Fq, e: i64) -> Result<Fq, FieldError> {
        if a == 0 {
            if e <= 0 {
                return Err(FieldError::ZeroArgument);
            }
            return Ok(0);
        }
        let ord = self.unit_order() as i64;
        let k = (self.log[a as usize] as i64 * (e.rem_euclid(ord))).rem_euclid(ord);
        Ok(self.exp[k as usize])
    }

    /// Discrete log base `mu`.
    pub fn dlog(&self, a: Fq) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroArgument);
        }
        Ok(self.log[a as usize])
    }

    /// `mu^k`.
    pub fn from_dlog(&self, k: i64) -> Fq {
        let ord = self.unit_order() as i64;
        self.exp[k.rem_euclid(ord) as usize]
    }

    /// `x^{q^{a_D j}}`, the `j`-th power of the distinguished Frobenius twist
    /// induced by conjugation with the uniformizer.
    pub fn frobenius_pow(&self, x: Fq, j: i64) -> Fq {
        if x == 0 {
            return 0;
        }
        let ord = self.unit_order() as i64;
        let q = (self.p as i64).pow(self.f);
        // q^{a_D j} mod ord, with j possibly negative: the twist has order
        // dividing d on the unit-group exponents.
        let step = mod_pow_i64(q, self.a_d as i64, ord);
        let jj = j.rem_euclid(self.d.max(1) as i64) as u32;
        let mut factor = 1i64;
        for _ in 0..jj {
            factor = factor * step % ord;
        }
        let k = (self.log[x as usize] as i64 * factor).rem_euclid(ord);
        self.exp[k as usize]
    }

    /// The multiplicative character of exponent `c`: `x -> mu^{c * dlog x}`.
    pub fn char_apply(&self, c: i64, x: Fq) -> Result<Fq, FieldError> {
        if x == 0 {
            return Err(FieldError::ZeroArgument);
        }
        let ord = self.unit_order() as i64;
        let k = (c.rem_euclid(ord) * self.log[x as usize] as i64).rem_euclid(ord);
        Ok(self.exp[k as usize])
    }

    /// Stabilizer index of the character of exponent `c` under the twist:
    /// the smallest `k > 0` with `c * q^{a_D k} = c` mod `q^d - 1`.
    /// Divides `d`.
    pub fn char_twist_order(&self, c: i64) -> u32 {
        let ord = self.unit_order() as i64;
        let q = (self.p as i64).pow(self.f);
        let step = mod_pow_i64(q, self.a_d as i64, ord);
        let c = c.rem_euclid(ord);
        let mut cur = c;
        for k in 1..=self.d {
            cur = cur * step % ord;
            if cur == c {
                return k;
            }
        }
        // The twist has order d on characters, so the loop always returns.
        unreachable!("twist orbit must close within d steps")
    }

    /// All nonzero elements, in dlog order.
    pub fn units(&self) -> impl Iterator<Item = Fq> + '_ {
        self.exp.iter().copied()
    }

    /// All elements including zero.
    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        std::iter::once(0).chain(self.exp.iter().copied())
    }

    /// Embedding of `self` into `big` (requires `self.n | big.n` and equal
    /// characteristic). Deterministic: the image of the variable is the root
    /// of `self.modulus` in `big` with the smallest packed encoding.
    pub fn embed_into(&self, big: &Field) -> Result<Embedding, FieldError> {
        if big.p != self.p || big.n % self.n != 0 {
            return Err(FieldError::NoEmbedding(format!(
                "F_{}^{} does not embed in F_{}^{}",
                self.p, self.n, big.p, big.n
            )));
        }
        let root = big
            .elements()
            .find(|&x| {
                // evaluate self.modulus at x inside big
                let mut acc: Fq = 0;
                for &c in self.modulus.iter().rev() {
                    acc = big.mul(acc, x);
                    let mut cv = 0;
                    for _ in 0..c {
                        cv = big.add(cv, 1);
                    }
                    acc = big.add(acc, cv);
                }
                acc == 0
            })
            .ok_or_else(|| FieldError::NoEmbedding("modulus has no root in the big field".into()))?;
        let mut map = vec![0u32; self.size as usize];
        for x in 0..self.size {
            let coeffs = self.unpack(x);
            let mut acc: Fq = 0;
            for &c in coeffs.iter().rev() {
                acc = big.mul(acc, root);
                let mut cv = 0;
                for _ in 0..c {
                    cv = big.add(cv, 1);
                }
                acc = big.add(acc, cv);
            }
            map[x as usize] = acc;
        }
        Ok(Embedding { map })
    }
}

fn mod_pow_i64(mut base: i64, mut e: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    base = base.rem_euclid(m);
    let mut acc = 1i64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

/// A field embedding, tabulated element-by-element.
#[derive(Debug, Clone)]
pub struct Embedding {
    map: Vec<Fq>,
}

impl Embedding {
    pub fn apply(&self, x: Fq) -> Fq {
        self.map[x as usize]
    }
}
