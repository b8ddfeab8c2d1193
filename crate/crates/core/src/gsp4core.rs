//! The finite groups `GSp(4, F_q)` and `Sp(4, F_q)`, the Levi-type subgroup
//! `M`, its coset `Mu`, and the Bruhat pieces `t_{c,d}`, `n_b`, `x`, `w`, `u`.
//!
//! The alternating form is `J = antidiag(1, 1, -1, -1)` and `GSp(4)` is the set
//! of `g` with `g^T J g = mu(g) J`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::ffield::{FieldElem, FieldError, FieldSpec};
use crate::linalg::Mat;
use crate::par::Exec;

/// Largest `q` for which whole groups may be enumerated.
pub const MAX_ENUM_Q: u32 = 5;

pub const CACHE_MAGIC: &[u8; 8] = b"GSP4GRP\0";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("not a symplectic similitude; g^T J g = {gram:?}")]
    NotSymplecticSimilitude { gram: [[u16; 4]; 4] },
    #[error("singular block X in M")]
    SingularBlock,
    #[error("group exceeds the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("enumeration needs q <= {MAX_ENUM_Q}, got {0}")]
    FieldTooLarge(u32),
    #[error("cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A 4x4 matrix over `F_q` together with its multiplier.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElem {
    m: [FieldElem; 16],
    mu: FieldElem,
}

impl GroupElem {
    pub fn entries(&self) -> &[FieldElem; 16] {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> FieldElem {
        self.m[4 * i + j]
    }

    pub fn mu(&self) -> FieldElem {
        self.mu
    }

    pub(crate) fn as_mat(&self) -> Mat {
        Mat::new(4, self.m.to_vec())
    }
}

impl std::fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<Vec<u16>> = (0..4)
            .map(|i| (0..4).map(|j| self.entry(i, j).packed()).collect())
            .collect();
        write!(f, "{rows:?} mu={}", self.mu.packed())
    }
}

/// `J[i][j]` as a small integer.
pub const J: [[i64; 4]; 4] = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]];

/// Group context: the base field and all matrix operations.
#[derive(Clone, Debug)]
pub struct Gsp4 {
    f: FieldSpec,
}

impl Gsp4 {
    pub fn new(q: u32) -> Result<Self, GroupError> {
        Ok(Gsp4 {
            f: FieldSpec::of_order(q)?,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.f
    }

    pub fn q(&self) -> u32 {
        self.f.order()
    }

    pub fn is_even(&self) -> bool {
        self.f.characteristic() == 2
    }

    /// `|M| = (q-1)(q^2-1)(q^2-q)`.
    pub fn order_m(&self) -> u64 {
        let q = self.q() as u64;
        (q - 1) * (q * q - 1) * (q * q - q)
    }

    pub fn order_sp(&self) -> u64 {
        let q = self.q() as u64;
        q.pow(4) * (q * q - 1) * (q.pow(4) - 1)
    }

    pub fn order_gsp(&self) -> u64 {
        (self.q() as u64 - 1) * self.order_sp()
    }

    fn gram(&self, m: &[FieldElem; 16]) -> [[FieldElem; 4]; 4] {
        let f = &self.f;
        // (g^T J g)_{ij} = sum_{k,l} g_{ki} J_{kl} g_{lj}
        let mut out = [[f.zero(); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut s = f.zero();
                for (k, jrow) in J.iter().enumerate() {
                    for (l, &jv) in jrow.iter().enumerate() {
                        if jv != 0 {
                            let t = f.mul(m[4 * k + i], m[4 * l + j]);
                            s = if jv > 0 { f.add(s, t) } else { f.sub(s, t) };
                        }
                    }
                }
                *cell = s;
            }
        }
        out
    }

    /// Builds an element, computing `mu` and rejecting matrices outside
    /// `GSp(4, F_q)`.
    pub fn mk_elem(&self, m: [FieldElem; 16]) -> Result<GroupElem, GroupError> {
        let g = self.gram(&m);
        let mu = g[0][3];
        let f = &self.f;
        let ok = !mu.is_zero()
            && (0..4).all(|i| {
                (0..4).all(|j| {
                    let want = match J[i][j] {
                        0 => f.zero(),
                        1 => mu,
                        _ => f.neg(mu),
                    };
                    g[i][j] == want
                })
            });
        if !ok {
            let mut gram = [[0u16; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    gram[i][j] = g[i][j].packed();
                }
            }
            return Err(GroupError::NotSymplecticSimilitude { gram });
        }
        Ok(GroupElem { m, mu })
    }

    /// [`mk_elem`](Self::mk_elem) from integer entries reduced mod `p`.
    pub fn mk_elem_int(&self, rows: [[i64; 4]; 4]) -> Result<GroupElem, GroupError> {
        let mut m = [self.f.zero(); 16];
        for i in 0..4 {
            for j in 0..4 {
                m[4 * i + j] = self.f.from_int(rows[i][j]);
            }
        }
        self.mk_elem(m)
    }

    pub fn identity(&self) -> GroupElem {
        self.scalar(self.f.one())
    }

    pub fn scalar(&self, a: FieldElem) -> GroupElem {
        let mut m = [self.f.zero(); 16];
        for i in 0..4 {
            m[5 * i] = a;
        }
        GroupElem {
            m,
            mu: self.f.mul(a, a),
        }
    }

    #[inline]
    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        let f = &self.f;
        let mut m = [f.zero(); 16];
        for i in 0..4 {
            for j in 0..4 {
                let mut s = f.mul(a.m[4 * i], b.m[j]);
                for k in 1..4 {
                    s = f.add(s, f.mul(a.m[4 * i + k], b.m[4 * k + j]));
                }
                m[4 * i + j] = s;
            }
        }
        GroupElem {
            m,
            mu: f.mul(a.mu, b.mu),
        }
    }

    /// `g^{-1} = -mu^{-1} J g^T J`.
    pub fn inv(&self, g: &GroupElem) -> GroupElem {
        let f = &self.f;
        let mi = f.inv(g.mu).expect("multiplier is a unit");
        // (J g^T J)_{ij} = J_{i,3-i} g_{3-j,3-i} J_{3-j,j}
        let mut m = [f.zero(); 16];
        for i in 0..4 {
            for j in 0..4 {
                let s = J[i][3 - i] * J[3 - j][j];
                let v = f.mul(g.m[4 * (3 - j) + (3 - i)], mi);
                m[4 * i + j] = if s > 0 { f.neg(v) } else { v };
            }
        }
        GroupElem { m, mu: mi }
    }

    /// `h g h^{-1}`.
    pub fn conj(&self, g: &GroupElem, h: &GroupElem) -> GroupElem {
        self.mul(&self.mul(h, g), &self.inv(h))
    }

    pub fn pow(&self, g: &GroupElem, mut e: u64) -> GroupElem {
        let mut acc = self.identity();
        let mut b = *g;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn order_of(&self, g: &GroupElem) -> u64 {
        let id = self.identity();
        let mut x = *g;
        let mut n = 1;
        while x != id {
            x = self.mul(&x, g);
            n += 1;
        }
        n
    }

    /// The element of `M` with upper block `X = [[a, b], [c, d]]` and
    /// similitude factor `lambda`; its multiplier is `lambda det X`.
    pub fn m_elem(
        &self,
        a: FieldElem,
        b: FieldElem,
        c: FieldElem,
        d: FieldElem,
        lambda: FieldElem,
    ) -> Result<GroupElem, GroupError> {
        let f = &self.f;
        let det = f.sub(f.mul(a, d), f.mul(b, c));
        if det.is_zero() || lambda.is_zero() {
            return Err(GroupError::SingularBlock);
        }
        let z = f.zero();
        let m = [
            a,
            b,
            z,
            z,
            c,
            d,
            z,
            z,
            z,
            z,
            f.mul(lambda, a),
            f.neg(f.mul(lambda, b)),
            z,
            z,
            f.neg(f.mul(lambda, c)),
            f.mul(lambda, d),
        ];
        Ok(GroupElem {
            m,
            mu: f.mul(lambda, det),
        })
    }

    /// Every element of `M` exactly once, ordered by `(lambda, a, b, c, d)`.
    pub fn enumerate_m(&self) -> Vec<GroupElem> {
        let f = &self.f;
        let mut out = Vec::with_capacity(self.order_m() as usize);
        for l in f.nonzero_elements() {
            for a in f.elements() {
                for b in f.elements() {
                    for c in f.elements() {
                        for d in f.elements() {
                            if let Ok(g) = self.m_elem(a, b, c, d, l) {
                                out.push(g);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The coset `Mu` in the order of [`enumerate_m`](Self::enumerate_m).
    pub fn enumerate_mu(&self) -> Vec<GroupElem> {
        let u = self.u();
        self.enumerate_m().iter().map(|m| self.mul(m, &u)).collect()
    }

    pub fn u(&self) -> GroupElem {
        self.mk_elem_int([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
            .expect("u is symplectic")
    }

    pub fn w(&self) -> GroupElem {
        self.mk_elem_int([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
            .expect("w is symplectic")
    }

    /// `n_b`, the element of `N` with parameter `b`.
    pub fn n(&self, b: FieldElem) -> GroupElem {
        let f = &self.f;
        let (o, z) = (f.one(), f.zero());
        self.mk_elem([o, b, z, z, z, o, z, z, z, z, o, f.neg(b), z, z, z, o])
            .expect("n_b is symplectic")
    }

    pub fn x(&self) -> GroupElem {
        self.n(self.f.one())
    }

    /// `t_{c,d} = diag(1, d, c, cd)`.
    pub fn t(&self, c: FieldElem, d: FieldElem) -> GroupElem {
        let f = &self.f;
        let z = f.zero();
        self.mk_elem([
            f.one(),
            z,
            z,
            z,
            z,
            d,
            z,
            z,
            z,
            z,
            c,
            z,
            z,
            z,
            z,
            f.mul(c, d),
        ])
        .expect("t_{c,d} is a similitude")
    }

    /// Symplectic transvection `v -> v + a <v, e> e` written as `I - a e e^T J`.
    fn transvection(&self, e: usize, a: FieldElem) -> GroupElem {
        let f = &self.f;
        let mut m = [f.zero(); 16];
        for i in 0..4 {
            m[5 * i] = f.one();
        }
        for j in 0..4 {
            let jv = J[e][j];
            if jv != 0 {
                let t = f.mul(a, f.from_int(jv));
                m[4 * e + j] = f.sub(m[4 * e + j], t);
            }
        }
        self.mk_elem(m).expect("transvection is symplectic")
    }

    /// Generators of `Sp(4, F_q)`: long and short root elements with
    /// parameters `1` and the field generator, and two Weyl elements.
    pub fn sp_generators(&self) -> Vec<GroupElem> {
        let f = &self.f;
        let g = f.generator();
        let s = self
            .mk_elem_int([[0, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]])
            .expect("s is symplectic");
        let mut gens = vec![self.transvection(0, f.one()), self.n(f.one()), self.w(), s];
        if g != f.one() {
            gens.push(self.transvection(0, g));
            gens.push(self.n(g));
        }
        gens
    }

    /// [`sp_generators`](Self::sp_generators) plus `diag(1, 1, g, g)`.
    pub fn gsp_generators(&self) -> Vec<GroupElem> {
        let mut gens = self.sp_generators();
        let g = self.f.generator();
        if g != self.f.one() {
            gens.push(self.t(g, self.f.one()));
        }
        gens
    }

    /// Base-`q` packing of the entries; injective for `q <= MAX_ENUM_Q`.
    #[inline]
    pub fn key(&self, g: &GroupElem) -> u64 {
        let q = self.q() as u64;
        g.m.iter()
            .rev()
            .fold(0u64, |k, e| k * q + e.packed() as u64)
    }

    /// Closure of `gens` under multiplication, by breadth-first search.
    ///
    /// Elements appear in BFS order from the identity, expanding each frontier
    /// element by every generator in turn; the order does not depend on `exec`.
    pub fn enumerate_group(
        &self,
        gens: &[GroupElem],
        cap: usize,
        exec: Exec,
    ) -> Result<EnumeratedGroup, GroupError> {
        if self.q() > MAX_ENUM_Q {
            return Err(GroupError::FieldTooLarge(self.q()));
        }
        let id = self.identity();
        let mut elems = vec![id];
        let mut index = FxHashMap::default();
        index.insert(self.key(&id), 0u32);
        let mut frontier = vec![id];
        while !frontier.is_empty() {
            let products: Vec<Vec<(u64, GroupElem)>> = exec.map(&frontier, |g| {
                gens.iter()
                    .map(|h| {
                        let p = self.mul(g, h);
                        (self.key(&p), p)
                    })
                    .collect()
            });
            let mut next = Vec::new();
            for (k, p) in products.into_iter().flatten() {
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(k) {
                    if elems.len() >= cap {
                        return Err(GroupError::CapExceeded { cap });
                    }
                    e.insert(elems.len() as u32);
                    elems.push(p);
                    next.push(p);
                }
            }
            frontier = next;
        }
        Ok(EnumeratedGroup {
            ctx: self.clone(),
            elems,
            index,
        })
    }

    pub fn enumerate_sp(&self, exec: Exec) -> Result<EnumeratedGroup, GroupError> {
        self.enumerate_group(&self.sp_generators(), self.order_sp() as usize, exec)
    }

    pub fn enumerate_gsp(&self, exec: Exec) -> Result<EnumeratedGroup, GroupError> {
        self.enumerate_group(&self.gsp_generators(), self.order_gsp() as usize, exec)
    }
}

/// A fully enumerated finite group with a hash index.
#[derive(Clone)]
pub struct EnumeratedGroup {
    ctx: Gsp4,
    elems: Vec<GroupElem>,
    index: FxHashMap<u64, u32>,
}

impl EnumeratedGroup {
    pub fn ctx(&self) -> &Gsp4 {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[GroupElem] {
        &self.elems
    }

    pub fn index_of(&self, g: &GroupElem) -> Option<usize> {
        self.index.get(&self.ctx.key(g)).map(|&i| i as usize)
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        self.index.contains_key(&self.ctx.key(g))
    }

    /// Partition into conjugacy classes: orbits under conjugation by `gens`,
    /// which must generate the group.
    pub fn conjugacy_classes(&self, gens: &[GroupElem], exec: Exec) -> ClassPartition {
        let ctx = &self.ctx;
        let pairs: Vec<(GroupElem, GroupElem)> = gens.iter().map(|h| (*h, ctx.inv(h))).collect();
        let n = self.elems.len();
        let mut class_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        for start in 0..n {
            if class_of[start] != u32::MAX {
                continue;
            }
            let cid = reps.len() as u32;
            reps.push(start as u32);
            class_of[start] = cid;
            let mut size = 1u64;
            let mut frontier = vec![start as u32];
            while !frontier.is_empty() {
                let imgs: Vec<Vec<u32>> = exec.map(&frontier, |&i| {
                    let g = &self.elems[i as usize];
                    pairs
                        .iter()
                        .map(|(h, hi)| {
                            let c = ctx.mul(&ctx.mul(h, g), hi);
                            self.index[&ctx.key(&c)]
                        })
                        .collect()
                });
                let mut next = Vec::new();
                for j in imgs.into_iter().flatten() {
                    if class_of[j as usize] == u32::MAX {
                        class_of[j as usize] = cid;
                        size += 1;
                        next.push(j);
                    }
                }
                frontier = next;
            }
            sizes.push(size);
        }
        ClassPartition {
            class_of,
            reps,
            sizes,
        }
    }

    /// Writes the element list to a versioned, `q`-tagged binary file.
    pub fn write_cache(&self, path: &Path) -> Result<(), GroupError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.ctx.q().to_le_bytes())?;
        w.write_all(&(self.elems.len() as u64).to_le_bytes())?;
        for g in &self.elems {
            let bytes: Vec<u8> = g.m.iter().map(|e| e.packed() as u8).collect();
            w.write_all(&bytes)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a file written by [`write_cache`](Self::write_cache), checking
    /// the header against `ctx` and every matrix for membership in `GSp(4)`.
    pub fn read_cache(ctx: &Gsp4, path: &Path) -> Result<Self, GroupError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(GroupError::Cache("bad magic".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != CACHE_VERSION {
            return Err(GroupError::Cache(format!("unsupported version {version}")));
        }
        r.read_exact(&mut b4)?;
        let q = u32::from_le_bytes(b4);
        if q != ctx.q() {
            return Err(GroupError::Cache(format!(
                "file is for q={q}, expected q={}",
                ctx.q()
            )));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut elems = Vec::with_capacity(n);
        let mut index = FxHashMap::default();
        let mut buf = [0u8; 16];
        for i in 0..n {
            r.read_exact(&mut buf)
                .map_err(|_| GroupError::Cache(format!("truncated at element {i}")))?;
            let mut m = [ctx.f.zero(); 16];
            for (slot, &b) in m.iter_mut().zip(buf.iter()) {
                if b as u32 >= q {
                    return Err(GroupError::Cache(format!(
                        "entry out of range at element {i}"
                    )));
                }
                *slot = FieldElem::from_packed(b as u16);
            }
            let g = ctx.mk_elem(m)?;
            index.insert(ctx.key(&g), i as u32);
            elems.push(g);
        }
        Ok(EnumeratedGroup {
            ctx: ctx.clone(),
            elems,
            index,
        })
    }
}

/// Conjugacy classes of an [`EnumeratedGroup`].
#[derive(Clone, Debug)]
pub struct ClassPartition {
    /// Class id of each element, by element index.
    pub class_of: Vec<u32>,
    /// Element index of the first member of each class.
    pub reps: Vec<u32>,
    pub sizes: Vec<u64>,
}

impl ClassPartition {
    pub fn num_classes(&self) -> usize {
        self.reps.len()
    }
}
