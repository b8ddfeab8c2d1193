//! Exact arithmetic in the cyclotomic integers `Z[zeta_n]`.
//!
//! A [`CycloNum`] keeps a sparse list of exponents of `zeta_n` modulo `n`.
//! That representation is not unique (`1 + zeta_3 + zeta_3^2 = 0`), so
//! comparisons and integer extraction go through [`CycloNum::reduced`], the
//! remainder modulo the `n`-th cyclotomic polynomial, which is canonical.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest conductor produced by merging operands.
pub const DEFAULT_MAX_CONDUCTOR: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor lcm({a}, {b}) exceeds {max}")]
    ConductorTooLarge { a: u32, b: u32, max: u64 },
    #[error("not rational: reduced form {repr:?} over conductor {n}")]
    NotRational { n: u32, repr: Vec<i64> },
    #[error("conductor must be at least 1")]
    ZeroConductor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycloOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone)]
pub struct CycloNum {
    n: u32,
    terms: BTreeMap<u32, i64>,
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl CycloNum {
    pub fn zero() -> Self {
        CycloNum {
            n: 1,
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(0, c);
        }
        CycloNum { n: 1, terms }
    }

    /// `zeta_n^j`; `n = 0` is treated as 1.
    pub fn root(n: u32, j: i64) -> Self {
        let n = n.max(1);
        let mut terms = BTreeMap::new();
        terms.insert(j.rem_euclid(n as i64) as u32, 1);
        CycloNum { n, terms }
    }

    /// `sum c zeta_n^e` over the given `(e, c)` pairs; exponents are reduced mod `n`.
    pub fn from_terms(n: u32, terms: impl IntoIterator<Item = (u32, i64)>) -> Self {
        let n = n.max(1);
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            bump(&mut out, e % n, c);
        }
        CycloNum { n, terms: out }
    }

    /// `zeta_n^j + zeta_n^{-j}`.
    pub fn root_sum(n: u32, j: i64) -> Self {
        Self::root(n, j) + Self::root(n, -j)
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    /// Nonzero `(exponent, coefficient)` pairs of the stored representation.
    pub fn terms(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    /// The same number written over conductor `m`, a multiple of `n`.
    pub fn lift(&self, m: u32) -> Self {
        assert!(
            m.is_multiple_of(self.n),
            "conductor {m} is not a multiple of {}",
            self.n
        );
        let f = m / self.n;
        CycloNum {
            n: m,
            terms: self.terms.iter().map(|(&e, &c)| (e * f, c)).collect(),
        }
    }

    fn merged(a: &Self, b: &Self, max: u64) -> Result<(Self, Self), CycloError> {
        if a.n == b.n {
            return Ok((a.clone(), b.clone()));
        }
        let m = lcm(a.n as u64, b.n as u64);
        if m > max {
            return Err(CycloError::ConductorTooLarge {
                a: a.n,
                b: b.n,
                max,
            });
        }
        Ok((a.lift(m as u32), b.lift(m as u32)))
    }

    pub fn arith(&self, other: &Self, op: CycloOp) -> Result<Self, CycloError> {
        self.arith_bounded(other, op, DEFAULT_MAX_CONDUCTOR)
    }

    pub fn arith_bounded(&self, other: &Self, op: CycloOp, max: u64) -> Result<Self, CycloError> {
        let (mut a, b) = Self::merged(self, other, max)?;
        match op {
            CycloOp::Add | CycloOp::Sub => {
                let s = if op == CycloOp::Add { 1 } else { -1 };
                for (e, c) in b.terms {
                    bump(&mut a.terms, e, s * c);
                }
                Ok(a)
            }
            CycloOp::Mul => {
                let n = a.n;
                let mut out = BTreeMap::new();
                for (&e1, &c1) in &a.terms {
                    for (&e2, &c2) in &b.terms {
                        bump(&mut out, (e1 + e2) % n, c1 * c2);
                    }
                }
                Ok(CycloNum { n, terms: out })
            }
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return CycloNum {
                n: self.n,
                terms: BTreeMap::new(),
            };
        }
        CycloNum {
            n: self.n,
            terms: self.terms.iter().map(|(&e, &c)| (e, c * k)).collect(),
        }
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        let n = self.n;
        CycloNum {
            n,
            terms: self.terms.iter().map(|(&e, &c)| ((n - e) % n, c)).collect(),
        }
    }

    /// Galois action `zeta_n -> zeta_n^k` for `k` coprime to `n`.
    pub fn galois(&self, k: i64) -> Self {
        let n = self.n as i64;
        let mut terms = BTreeMap::new();
        for (&e, &c) in &self.terms {
            bump(&mut terms, (e as i64 * k).rem_euclid(n) as u32, c);
        }
        CycloNum { n: self.n, terms }
    }

    /// Coefficients of the remainder modulo `Phi_n`, constant term first,
    /// trailing zeros removed. Two numbers over the same conductor are equal
    /// iff these vectors agree.
    pub fn reduced(&self) -> Vec<i64> {
        let n = self.n as usize;
        let phi = cyclotomic_poly(self.n);
        let deg = phi.len() - 1;
        let mut v = vec![0i64; n.max(1)];
        for (&e, &c) in &self.terms {
            v[e as usize] += c;
        }
        for top in (deg..n).rev() {
            let c = v[top];
            if c != 0 {
                for (i, &p) in phi.iter().enumerate() {
                    v[top - deg + i] -= c * p;
                }
            }
        }
        v.truncate(deg.max(1));
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.reduced().is_empty()
    }

    /// The rational integer equal to `self`, if there is one.
    pub fn as_integer(&self) -> Result<i64, CycloError> {
        let r = self.reduced();
        match r.len() {
            0 => Ok(0),
            1 => Ok(r[0]),
            _ => Err(CycloError::NotRational { n: self.n, repr: r }),
        }
    }

    /// Floating-point value, for display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (&e, &c) in &self.terms {
            let a = 2.0 * std::f64::consts::PI * e as f64 / self.n as f64;
            re += c as f64 * a.cos();
            im += c as f64 * a.sin();
        }
        (re, im)
    }

    /// Same number over the smallest conductor dividing `n` that holds it.
    pub fn minimal(&self) -> Self {
        let r = self.reduced();
        let mut best = CycloNum {
            n: self.n,
            terms: r
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(e, &c)| (e as u32, c))
                .collect(),
        };
        let n = self.n;
        for d in 1..n {
            if !n.is_multiple_of(d) {
                continue;
            }
            // candidate: every exponent of the reduced form is a multiple of n/d
            let f = n / d;
            if best.terms.keys().all(|e| e % f == 0) {
                let cand = CycloNum {
                    n: d,
                    terms: best.terms.iter().map(|(&e, &c)| (e / f, c)).collect(),
                };
                if cand.lift(n) == *self {
                    best = cand;
                    break;
                }
            }
        }
        best
    }
}

fn bump(m: &mut BTreeMap<u32, i64>, e: u32, c: i64) {
    if c == 0 {
        return;
    }
    let slot = m.entry(e).or_insert(0);
    *slot += c;
    if *slot == 0 {
        m.remove(&e);
    }
}

type PhiCache = Mutex<HashMap<u32, Arc<Vec<i64>>>>;

fn phi_cache() -> &'static PhiCache {
    static CACHE: OnceLock<PhiCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The `n`-th cyclotomic polynomial, constant term first.
///
/// Computed as `x^n - 1` divided by `Phi_d` for every proper divisor `d`.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    if let Some(p) = phi_cache()
        .lock()
        .expect("cyclotomic cache poisoned")
        .get(&n)
    {
        return Arc::clone(p);
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_poly(d);
            num = exact_div(&num, &div);
        }
    }
    let p = Arc::new(num);
    phi_cache()
        .lock()
        .expect("cyclotomic cache poisoned")
        .insert(n, Arc::clone(&p));
    p
}

/// Division of integer polynomials by a monic divisor; the remainder must be 0.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut r = num.to_vec();
    let qlen = num.len() - dn;
    let mut quo = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = r[i + dn];
        quo[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                r[i + j] -= c * d;
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    quo
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        match Self::merged(self, other, u64::MAX) {
            Ok((a, b)) => a
                .arith(&b, CycloOp::Sub)
                .map(|d| d.is_zero())
                .unwrap_or(false),
            Err(_) => false,
        }
    }
}

impl Eq for CycloNum {}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Ok(k) = self.as_integer() {
            return write!(f, "{k}");
        }
        let mut first = true;
        for (&e, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*z{}^{e}", self.n)?;
        }
        Ok(())
    }
}

impl From<i64> for CycloNum {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:expr) => {
        impl $tr<&CycloNum> for &CycloNum {
            type Output = CycloNum;
            /// # Panics
            /// When the merged conductor exceeds [`DEFAULT_MAX_CONDUCTOR`].
            fn $m(self, rhs: &CycloNum) -> CycloNum {
                self.arith(rhs, $op).expect("cyclotomic conductor bound")
            }
        }
        impl $tr<CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: &CycloNum) -> CycloNum {
                (&self).$m(rhs)
            }
        }
        impl $tr<CycloNum> for &CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                self.$m(&rhs)
            }
        }
        impl $tr<i64> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: i64) -> CycloNum {
                (&self).$m(&CycloNum::from_int(rhs))
            }
        }
    };
}

binop!(Add, add, CycloOp::Add);
binop!(Sub, sub, CycloOp::Sub);
binop!(Mul, mul, CycloOp::Mul);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        self.scale(-1)
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        self.scale(-1)
    }
}

impl std::iter::Sum for CycloNum {
    fn sum<I: Iterator<Item = CycloNum>>(iter: I) -> Self {
        iter.fold(CycloNum::zero(), |a, b| a + b)
    }
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m = self.minimal();
        let v: Vec<(u32, i64, u32)> = m.terms.iter().map(|(&e, &c)| (e, c, m.n)).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<(i64, i64, u32)> = Vec::deserialize(d)?;
        let mut acc = CycloNum::zero();
        for (e, c, n) in v {
            if n == 0 {
                return Err(D::Error::custom(CycloError::ZeroConductor));
            }
            let t = CycloNum::root(n, e).scale(c);
            acc = acc.arith(&t, CycloOp::Add).map_err(D::Error::custom)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: u32, j: i64) -> CycloNum {
        CycloNum::root(n, j)
    }

    #[test]
    fn small_identities() {
        assert!((r(4, 1) + r(4, 3)).is_zero());
        assert_eq!((r(3, 1) + r(3, 2)).as_integer(), Ok(-1));
        assert_eq!((r(5, 1) + r(5, 2) + r(5, 3) + r(5, 4)).as_integer(), Ok(-1));
        assert_eq!((r(6, 0).scale(5)).as_integer(), Ok(5));
        assert!(matches!(
            r(4, 1).as_integer(),
            Err(CycloError::NotRational { .. })
        ));
        assert_eq!(r(7, 3) * r(7, 4), CycloNum::one());
        assert_eq!(r(9, 0), CycloNum::one());
    }

    #[test]
    fn alpha_one_at_q4() {
        // alpha_1 = zeta_3 + zeta_3^{-1}
        assert_eq!(CycloNum::root_sum(3, 1).as_integer(), Ok(-1));
    }

    #[test]
    fn square_of_alpha() {
        for n in [3u32, 5, 7, 15] {
            for i in 0..n as i64 {
                let a = CycloNum::root_sum(n, i);
                assert_eq!(&a * &a, CycloNum::root_sum(n, 2 * i) + 2);
                assert_eq!(&a + &a.conj(), a.scale(2));
            }
        }
    }

    #[test]
    fn known_cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len() - 1, 48);
        assert_eq!(p105[7], -2);
        assert_eq!(cyclotomic_poly(255).len() - 1, 128);
    }

    #[test]
    fn mixed_conductors() {
        // zeta_3 = zeta_15^5
        assert_eq!(r(3, 1), r(15, 5));
        assert_eq!(r(3, 1) * r(5, 1), r(15, 8));
        assert_ne!(r(3, 1), r(5, 1));
        let big = r(1 << 11, 1);
        let other = r((1 << 10) + 1, 1);
        assert!(matches!(
            big.arith(&other, CycloOp::Mul),
            Err(CycloError::ConductorTooLarge { .. })
        ));
    }

    #[test]
    fn minimal_conductor() {
        let x = r(255, 85) + r(255, 170);
        let m = x.minimal();
        assert_eq!(m.conductor(), 1);
        assert_eq!(m.as_integer(), Ok(-1));
        let y = r(15, 5).minimal();
        assert_eq!(y.conductor(), 3);
    }

    #[test]
    fn serde_round_trip() {
        let x = r(15, 2).scale(3) - r(5, 1) + 7;
        let s = serde_json::to_string(&x).unwrap();
        let y: CycloNum = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        let z: CycloNum = serde_json::from_str("[[1,1,3],[2,1,3]]").unwrap();
        assert_eq!(z.as_integer(), Ok(-1));
        assert!(serde_json::from_str::<CycloNum>("[[1,1,0]]").is_err());
    }

    fn arb_cyclo() -> impl Strategy<Value = CycloNum> {
        (
            prop::sample::select(vec![1u32, 2, 3, 4, 5, 6, 8, 12, 15]),
            prop::collection::vec((0i64..60, -5i64..6), 0..6),
        )
            .prop_map(|(n, ts)| {
                ts.into_iter()
                    .map(|(e, c)| CycloNum::root(n, e).scale(c))
                    .sum()
            })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_cyclo(), b in arb_cyclo(), c in arb_cyclo()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn conj_is_involutive_ring_map(a in arb_cyclo(), b in arb_cyclo()) {
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
            prop_assert_eq!(a.conj().conj(), a.clone());
        }

        #[test]
        fn full_orbit_sum_vanishes(n in 2u32..40) {
            let s: CycloNum = (0..n as i64).map(|j| CycloNum::root(n, j)).sum();
            prop_assert!(s.is_zero());
        }

        #[test]
        fn norm_is_nonnegative_integer_on_real_axis(a in arb_cyclo()) {
            let nn = &a * &a.conj();
            let (re, im) = nn.to_complex();
            prop_assert!(im.abs() < 1e-6);
            prop_assert!(re > -1e-6);
        }
    }
}
