//! Finite fields `F_{p^k}` with compatible towers.
//!
//! Every field is built from a fixed Conway polynomial, so the root `x` of the
//! modulus is a primitive element and, for `m | k`, the element
//! `x^((p^k - 1)/(p^m - 1))` is the fixed generator of the subfield `F_{p^m}`.
//! Embeddings between fields of the same characteristic are therefore plain
//! exponent maps on discrete logarithms.
//!
//! Elements are small `Copy` handles ([`FieldElem`]) that only make sense
//! together with the [`FieldSpec`] they came from. The packed value of an
//! element is `sum c_i p^i` where `c_i` is the coefficient of `x^i`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order accepted by default.
pub const DEFAULT_MAX_ORDER: u32 = 625;

/// Conway polynomials, coefficients listed from the constant term upwards
/// (monic leading coefficient included).
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (2, 9, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (11, 1, &[9, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 1, &[11, 1]),
    (13, 2, &[2, 12, 1]),
    (17, 1, &[14, 1]),
    (17, 2, &[3, 16, 1]),
    (19, 1, &[17, 1]),
    (19, 2, &[2, 18, 1]),
    (23, 1, &[18, 1]),
    (23, 2, &[5, 21, 1]),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree {0} out of range")]
    BadDegree(u32),
    #[error("field order {p}^{k} exceeds the configured maximum {max}")]
    TooLarge { p: u32, k: u32, max: u32 },
    #[error("no built-in modulus for F_{p}^{k}")]
    NoModulus { p: u32, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete logarithm of zero")]
    LogOfZero,
    #[error("square root of zero requested")]
    SqrtOfZero,
    #[error("cannot embed F_{from} into F_{to}")]
    IncompatibleTower { from: u32, to: u32 },
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of some `F_{p^k}`; meaningful only relative to its [`FieldSpec`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(pub(crate) u16);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Packed base-`p` coefficient value.
    pub fn packed(self) -> u16 {
        self.0
    }

    pub fn from_packed(v: u16) -> Self {
        FieldElem(v)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F[{}]", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    Pow(u64),
}

struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    /// `exp[e]` is the packed value of `x^e`, `0 <= e < q - 1`.
    exp: Vec<u16>,
    /// `log[v]` for packed `v != 0`.
    log: Vec<u32>,
    /// Full addition and multiplication tables for small fields.
    add_table: Option<Vec<u16>>,
    mul_table: Option<Vec<u16>>,
}

/// A finite field together with its fixed modulus and generator.
///
/// Cheap to clone; all tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    data: Arc<FieldData>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.data.q)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.data.p == other.data.p && self.data.k == other.data.k
    }
}

impl Eq for FieldSpec {}

const SMALL_TABLE_LIMIT: u32 = 64;

impl FieldSpec {
    pub fn new(p: u32, k: u32) -> Result<Self, FieldError> {
        Self::with_max_order(p, k, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(p: u32, k: u32, max: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 || k > 9 {
            return Err(FieldError::BadDegree(k));
        }
        let q = (p as u64).pow(k);
        if q > max as u64 {
            return Err(FieldError::TooLarge { p, k, max });
        }
        let q = q as u32;
        let modulus = CONWAY
            .iter()
            .find(|(pp, kk, _)| *pp == p && *kk == k)
            .map(|(_, _, m)| m.to_vec())
            .ok_or(FieldError::NoModulus { p, k })?;
        Ok(Self::from_modulus(p, k, q, modulus))
    }

    /// Field of order `q` (a prime power).
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrime(q))?;
        Self::new(p, k)
    }

    fn from_modulus(p: u32, k: u32, q: u32, modulus: Vec<u32>) -> Self {
        let n = (q - 1) as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![0u32; q as usize];
        // x^0 = 1, then repeated multiplication by x in coefficient form.
        let mut cur = vec![0u32; k as usize];
        cur[0] = 1;
        if k == 1 {
            // the root of x - g is g = -modulus[0]
            let g = (p - modulus[0] % p) % p;
            let mut v = 1u32;
            for e in 0..n {
                exp.push(v as u16);
                log[v as usize] = e as u32;
                v = v * g % p;
            }
        } else {
            for e in 0..n {
                let v = pack(&cur, p);
                exp.push(v);
                log[v as usize] = e as u32;
                // multiply by x
                let top = cur[k as usize - 1];
                for i in (1..k as usize).rev() {
                    cur[i] = cur[i - 1];
                }
                cur[0] = 0;
                if top != 0 {
                    for (i, c) in cur.iter_mut().enumerate() {
                        *c = (*c + (p - top * modulus[i] % p)) % p;
                    }
                }
            }
        }
        let mut data = FieldData {
            p,
            k,
            q,
            modulus,
            exp,
            log,
            add_table: None,
            mul_table: None,
        };
        if q <= SMALL_TABLE_LIMIT {
            let mut add = vec![0u16; (q * q) as usize];
            let mut mul = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    let i = (a * q + b) as usize;
                    add[i] = add_digits(a as u16, b as u16, p, k);
                    mul[i] = mul_logs(&data, a as u16, b as u16);
                }
            }
            data.add_table = Some(add);
            data.mul_table = Some(mul);
        }
        FieldSpec {
            data: Arc::new(data),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.data.p
    }

    pub fn degree(&self) -> u32 {
        self.data.k
    }

    pub fn order(&self) -> u32 {
        self.data.q
    }

    /// Modulus coefficients from the constant term up.
    pub fn modulus(&self) -> &[u32] {
        &self.data.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// The fixed generator of the multiplicative group.
    pub fn generator(&self) -> FieldElem {
        if self.data.q == 2 {
            FieldElem(1)
        } else {
            FieldElem(self.data.exp[1])
        }
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElem {
        let p = self.data.p as i64;
        FieldElem(n.rem_euclid(p) as u16)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> FieldElem {
        let mut c = coeffs.to_vec();
        c.resize(self.data.k as usize, 0);
        for x in c.iter_mut() {
            *x %= self.data.p;
        }
        FieldElem(pack(&c, self.data.p))
    }

    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        unpack(a.0, self.data.p, self.data.k)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.data.q).map(|v| FieldElem(v as u16))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.data.q).map(|v| FieldElem(v as u16))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.data.add_table {
            Some(t) => FieldElem(t[(a.0 as u32 * self.data.q + b.0 as u32) as usize]),
            None => FieldElem(add_digits(a.0, b.0, self.data.p, self.data.k)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.data.p;
        if p == 2 {
            return a;
        }
        let c: Vec<u32> = self.coeffs(a).into_iter().map(|x| (p - x) % p).collect();
        FieldElem(pack(&c, p))
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.data.mul_table {
            Some(t) => FieldElem(t[(a.0 as u32 * self.data.q + b.0 as u32) as usize]),
            None => FieldElem(mul_logs(&self.data, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.data.q - 1;
        let l = self.data.log[a.0 as usize];
        Ok(FieldElem(self.data.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; `0^0 = 1`.
    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return self.one();
        }
        if a.is_zero() {
            return self.zero();
        }
        let n = (self.data.q - 1) as u64;
        let l = self.data.log[a.0 as usize] as u64;
        FieldElem(self.data.exp[((l * (e % n)) % n) as usize])
    }

    /// `a^e` for a possibly negative exponent.
    pub fn pow_signed(&self, a: FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn arith(&self, a: FieldElem, b: FieldElem, op: ArithOp) -> Result<FieldElem, FieldError> {
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Div => self.div(a, b)?,
            ArithOp::Neg => self.neg(a),
            ArithOp::Inv => self.inv(a)?,
            ArithOp::Pow(e) => self.pow(a, e),
        })
    }

    /// `generator^e`.
    pub fn exp(&self, e: i64) -> FieldElem {
        let n = (self.data.q - 1) as i64;
        FieldElem(self.data.exp[e.rem_euclid(n) as usize])
    }

    /// Discrete logarithm to the fixed generator, in `0..q-1`.
    pub fn dlog(&self, a: FieldElem) -> Result<u32, FieldError> {
        if a.is_zero() {
            return Err(FieldError::LogOfZero);
        }
        Ok(self.data.log[a.0 as usize])
    }

    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.data.p as u64)
    }

    pub fn is_square(&self, a: FieldElem) -> bool {
        if a.is_zero() || self.data.p == 2 {
            return true;
        }
        self.data.log[a.0 as usize].is_multiple_of(2)
    }

    /// Whether `a` lies in the subfield of order `p^m` (`m | k`).
    pub fn in_subfield(&self, a: FieldElem, m: u32) -> bool {
        if a.is_zero() {
            return true;
        }
        let p = self.data.p as u64;
        let step = ((self.data.q as u64) - 1) / (p.pow(m) - 1);
        (self.data.log[a.0 as usize] as u64).is_multiple_of(step)
    }

    /// Ring embedding of `a` (an element of `from`) into `self`.
    pub fn embed_from(&self, from: &FieldSpec, a: FieldElem) -> Result<FieldElem, FieldError> {
        from.embed(a, self)
    }

    /// Ring embedding `F_{p^m} -> F_{p^k}` sending the fixed generator to
    /// the fixed generator raised to `(p^k - 1)/(p^m - 1)`.
    pub fn embed(&self, a: FieldElem, target: &FieldSpec) -> Result<FieldElem, FieldError> {
        if self.data.p != target.data.p || !target.data.k.is_multiple_of(self.data.k) {
            return Err(FieldError::IncompatibleTower {
                from: self.data.q,
                to: target.data.q,
            });
        }
        if a.is_zero() {
            return Ok(target.zero());
        }
        let step = (target.data.q - 1) / (self.data.q - 1);
        let l = self.data.log[a.0 as usize];
        Ok(target.exp(l as i64 * step as i64))
    }

    /// Inverse of [`embed`](Self::embed) on the image; `None` when `a` is not
    /// in the subfield `sub`.
    pub fn restrict(&self, a: FieldElem, sub: &FieldSpec) -> Option<FieldElem> {
        if sub.data.p != self.data.p || !self.data.k.is_multiple_of(sub.data.k) {
            return None;
        }
        if a.is_zero() {
            return Some(sub.zero());
        }
        let step = (self.data.q - 1) / (sub.data.q - 1);
        let l = self.data.log[a.0 as usize];
        if !l.is_multiple_of(step) {
            return None;
        }
        Some(sub.exp((l / step) as i64))
    }

    /// Quadratic extension in the fixed tower.
    pub fn quadratic_extension(&self) -> Result<FieldSpec, FieldError> {
        FieldSpec::new(self.data.p, 2 * self.data.k)
    }

    /// A square root of `a` in the quadratic extension `ext`.
    ///
    /// Of the two roots, the one with even discrete logarithm in `ext` is
    /// returned; when both have the same parity the smaller logarithm wins.
    pub fn sqrt_ext(&self, a: FieldElem, ext: &FieldSpec) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::SqrtOfZero);
        }
        if ext.data.k != 2 * self.data.k || ext.data.p != self.data.p {
            return Err(FieldError::IncompatibleTower {
                from: self.data.q,
                to: ext.data.q,
            });
        }
        let e = ext.dlog(self.embed(a, ext)?)? as u64;
        let n = (ext.data.q - 1) as u64;
        // every element of F_q is a square in F_{q^2}, so e is even
        debug_assert!(e.is_multiple_of(2) || self.data.p == 2);
        let roots: Vec<u64> = if self.data.p == 2 {
            // squaring is a bijection; the unique root
            let inv2 = n.div_ceil(2);
            vec![(e * inv2) % n]
        } else {
            let r = e / 2;
            let mut v = vec![r, (r + n / 2) % n];
            v.sort_unstable();
            v
        };
        let pick = roots
            .iter()
            .copied()
            .find(|r| r % 2 == 0)
            .unwrap_or(roots[0]);
        Ok(ext.exp(pick as i64))
    }
}

fn pack(c: &[u32], p: u32) -> u16 {
    let mut v = 0u32;
    for &x in c.iter().rev() {
        v = v * p + x;
    }
    v as u16
}

fn unpack(mut v: u16, p: u32, k: u32) -> Vec<u32> {
    let mut c = Vec::with_capacity(k as usize);
    for _ in 0..k {
        c.push(v as u32 % p);
        v /= p as u16;
    }
    c
}

fn add_digits(a: u16, b: u16, p: u32, k: u32) -> u16 {
    if p == 2 {
        return a ^ b;
    }
    let (mut a, mut b) = (a as u32, b as u32);
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..k {
        let d = (a % p + b % p) % p;
        out += d * place;
        place *= p;
        a /= p;
        b /= p;
    }
    out as u16
}

fn mul_logs(d: &FieldData, a: u16, b: u16) -> u16 {
    if a == 0 || b == 0 {
        return 0;
    }
    let n = d.q - 1;
    d.exp[((d.log[a as usize] + d.log[b as usize]) % n) as usize]
}

/// `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut k = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}
