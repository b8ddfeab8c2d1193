//! Conjugacy-class labels and the classification of elements of `M` and `Mu`.
//!
//! Labels follow Enomoto for `q` even (classes of `Sp(4, q)`) and Shinoda for
//! `q` odd (classes of `GSp(4, q)` meeting `M` or `Mu`).
//!
//! Parameters are exponents. For `q` even they are the exponents `i` in
//! `gamma^i`, `theta^i`, `eta^i`, `delta^i`, where `theta` generates
//! `F_{q^2}^x`, `gamma = theta^{q+1}`, `eta = theta^{q-1}` and `delta` is the
//! fixed generator of `F_{q^4}^x` raised to `q^2 - 1`. For `q` odd every
//! parameter is a discrete logarithm in `F_{q^2}^x` (eigenvalues and
//! similitude factors alike).
//!
//! Classification reads off the multiplier, the eigenvalues of the
//! characteristic polynomial over `F_{q^4}` (resp. `F_{q^2}`), ranks of
//! `g - x`, and for unipotent or non-semisimple parts the restriction of the
//! symplectic form to the nilpotent part.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ffield::{FieldElem, FieldError, FieldSpec};
use crate::gsp4core::{GroupElem, J};
use crate::linalg::{roots_with_multiplicity, Mat};
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Even,
    Odd,
}

impl Scheme {
    pub fn of_q(q: u32) -> Scheme {
        if q.is_multiple_of(2) {
            Scheme::Even
        } else {
            Scheme::Odd
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Even => "even",
            Scheme::Odd => "odd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A1,
    A2,
    A31,
    A32,
    A41,
    A42,
    B1,
    B2,
    B3,
    B4,
    B5,
    C1,
    C2,
    C3,
    C4,
    D1,
    D2,
    D3,
    D4,
    A0,
    A21,
    B0,
    C0,
    D0,
    E0,
    F0,
    H0,
    I0,
    L0,
    B31,
    B32,
    C11,
    C12,
}

const EVEN_FAMILIES: &[(Family, &str, usize)] = &[
    (Family::A1, "A_1", 0),
    (Family::A2, "A_2", 0),
    (Family::A31, "A_31", 0),
    (Family::A32, "A_32", 0),
    (Family::A41, "A_41", 0),
    (Family::A42, "A_42", 0),
    (Family::B1, "B_1", 2),
    (Family::B2, "B_2", 1),
    (Family::B3, "B_3", 2),
    (Family::B4, "B_4", 2),
    (Family::B5, "B_5", 1),
    (Family::C1, "C_1", 1),
    (Family::C2, "C_2", 1),
    (Family::C3, "C_3", 1),
    (Family::C4, "C_4", 1),
    (Family::D1, "D_1", 1),
    (Family::D2, "D_2", 1),
    (Family::D3, "D_3", 1),
    (Family::D4, "D_4", 1),
];

const ODD_FAMILIES: &[(Family, &str, usize)] = &[
    (Family::A0, "A_0", 1),
    (Family::A21, "A_21", 1),
    (Family::B0, "B_0", 1),
    (Family::C0, "C_0", 1),
    (Family::D0, "D_0", 2),
    (Family::D1, "D_1", 2),
    (Family::E0, "E_0", 2),
    (Family::F0, "F_0", 1),
    (Family::H0, "H_0", 4),
    (Family::I0, "I_0", 2),
    (Family::L0, "L_0", 2),
    (Family::B31, "B_31", 1),
    (Family::B32, "B_32", 1),
    (Family::C11, "C_11", 1),
    (Family::C12, "C_12", 1),
];

fn families(s: Scheme) -> &'static [(Family, &'static str, usize)] {
    match s {
        Scheme::Even => EVEN_FAMILIES,
        Scheme::Odd => ODD_FAMILIES,
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        EVEN_FAMILIES
            .iter()
            .chain(ODD_FAMILIES)
            .find(|(f, _, _)| *f == self)
            .map(|(_, n, _)| *n)
            .expect("every family is listed")
    }

    /// Whether the family is one of the `C`-type labels.
    pub fn is_c_type(self) -> bool {
        self.name().starts_with('C')
    }
}

/// A conjugacy-class label: scheme, family and integer parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel {
    pub scheme: Scheme,
    pub family: Family,
    pub params: Vec<u32>,
}

impl ClassLabel {
    pub fn new(scheme: Scheme, family: Family, params: Vec<u32>) -> Self {
        ClassLabel {
            scheme,
            family,
            params,
        }
    }

    pub fn even(family: Family, params: &[u32]) -> Self {
        Self::new(Scheme::Even, family, params.to_vec())
    }

    pub fn odd(family: Family, params: &[u32]) -> Self {
        Self::new(Scheme::Odd, family, params.to_vec())
    }

    /// Parses the `FAMILY(p1,p2,...)` text form.
    pub fn parse(scheme: Scheme, s: &str) -> Result<Self, LabelError> {
        let s = s.trim();
        let (name, rest) = match s.find('(') {
            Some(i) => (&s[..i], Some(&s[i..])),
            None => (s, None),
        };
        let &(family, _, arity) = families(scheme)
            .iter()
            .find(|(_, n, _)| *n == name)
            .ok_or_else(|| LabelError::UnknownFamily(name.to_string()))?;
        let params: Vec<u32> = match rest {
            None => Vec::new(),
            Some(r) => {
                let inner = r
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| LabelError::Syntax(s.to_string()))?;
                inner
                    .split(',')
                    .map(|p| p.trim().parse::<u32>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| LabelError::Syntax(s.to_string()))?
            }
        };
        if params.len() != arity {
            return Err(LabelError::Arity {
                family: name.to_string(),
                want: arity,
                got: params.len(),
            });
        }
        Ok(ClassLabel::new(scheme, family, params))
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.name())?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(","))?;
        }
        Ok(())
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("unknown class family {0:?}")]
    UnknownFamily(String),
    #[error("malformed class label {0:?}")]
    Syntax(String),
    #[error("{family} takes {want} parameters, got {got}")]
    Arity {
        family: String,
        want: usize,
        got: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("unclassifiable element {elem}: {reason}")]
    Unclassifiable { reason: String, elem: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("q = {0} is outside the classifier's range")]
    UnsupportedQ(u32),
}

fn min_pm(i: u32, n: u32) -> u32 {
    let i = i % n;
    i.min((n - i) % n)
}

/// Canonical representative of an even-`q` label under the equivalences of
/// the family (sign changes, Frobenius orbits, swapping the two pairs).
pub fn canon_even(q: u32, l: &ClassLabel) -> ClassLabel {
    let (q1, qp, q2m, q2p) = (q - 1, q + 1, q * q - 1, q * q + 1);
    let p = &l.params;
    let params = match l.family {
        Family::B1 => sorted2(min_pm(p[0], q1), min_pm(p[1], q1)),
        Family::B4 => sorted2(min_pm(p[0], qp), min_pm(p[1], qp)),
        Family::B3 => vec![min_pm(p[0], q1), min_pm(p[1], qp)],
        Family::B2 => {
            let i = p[0] as u64 % q2m as u64;
            let (q, n) = (q as u64, q2m as u64);
            let orbit = [i, q * i % n, (n - i) % n, (n - q * i % n) % n];
            vec![*orbit.iter().min().expect("nonempty") as u32]
        }
        Family::B5 => {
            let n = q2p as u64;
            let mut i = p[0] as u64 % n;
            let mut best = i;
            for _ in 0..4 {
                i = i * q as u64 % n;
                best = best.min(i);
            }
            vec![best as u32]
        }
        Family::C1 | Family::C2 | Family::D1 | Family::D2 => vec![min_pm(p[0], q1)],
        Family::C3 | Family::C4 | Family::D3 | Family::D4 => vec![min_pm(p[0], qp)],
        _ => p.clone(),
    };
    ClassLabel::new(Scheme::Even, l.family, params)
}

fn sorted2(a: u32, b: u32) -> Vec<u32> {
    vec![a.min(b), a.max(b)]
}

/// Canonical representative of an odd-`q` label. All parameters are
/// discrete logarithms in `F_{q^2}^x`, so the equivalences become affine
/// maps on exponents modulo `q^2 - 1`.
pub fn canon_odd(q: u32, l: &ClassLabel) -> ClassLabel {
    let n = q * q - 1;
    let h = n / 2;
    let p: Vec<u32> = l.params.iter().map(|&x| x % n).collect();
    let frob = |x: u32| ((x as u64 * q as u64) % n as u64) as u32;
    let sub = |a: u32, b: u32| (a + n - b) % n;
    let params = match l.family {
        Family::A0 | Family::A21 => p,
        Family::B0 | Family::B31 | Family::B32 | Family::C0 | Family::C11 | Family::C12 => {
            vec![p[0].min((p[0] + h) % n)]
        }
        Family::D0 | Family::D1 => sorted2(p[0], p[1]),
        Family::E0 => vec![p[0], p[1].min((n - p[1]) % n)],
        Family::F0 => vec![p[0].min(frob(p[0]))],
        Family::H0 => {
            let mu = (p[0] + p[3]) % n;
            let a1 = *p.iter().min().expect("four entries");
            let a4 = sub(mu, a1);
            let a2 = *p
                .iter()
                .filter(|&&x| x != a1 && x != a4)
                .min()
                .unwrap_or(&a1);
            let a3 = sub(mu, a2);
            vec![a1, a2, a3, a4]
        }
        Family::I0 => {
            let (a, b) = (p[0], p[1]);
            let m = [a, frob(a), sub(b, a), sub(b, frob(a))];
            vec![*m.iter().min().expect("nonempty"), b]
        }
        Family::L0 => {
            let o1 = [p[0], frob(p[0])];
            let o2 = [p[1], frob(p[1])];
            let m1 = *o1.iter().min().expect("nonempty");
            let m2 = *o2.iter().min().expect("nonempty");
            if m1 <= m2 {
                vec![m1, m2]
            } else {
                vec![m2, m1]
            }
        }
        _ => p,
    };
    ClassLabel::new(Scheme::Odd, l.family, params)
}

pub fn canon(q: u32, l: &ClassLabel) -> ClassLabel {
    match l.scheme {
        Scheme::Even => canon_even(q, l),
        Scheme::Odd => canon_odd(q, l),
    }
}

/// The label of `z g` for a scalar `z` in `F_q^x` with `dlog_{F_{q^2}}(z) = s`.
pub fn scale_odd(q: u32, l: &ClassLabel, s: u32) -> ClassLabel {
    let n = q * q - 1;
    let add = |x: u32, k: u32| ((x as u64 + k as u64) % n as u64) as u32;
    let params = match l.family {
        Family::E0 => vec![add(l.params[0], s), l.params[1]],
        Family::I0 => vec![add(l.params[0], s), add(l.params[1], 2 * s % n)],
        _ => l.params.iter().map(|&x| add(x, s)).collect(),
    };
    canon_odd(q, &ClassLabel::new(Scheme::Odd, l.family, params))
}

/// Canonical label of the class modulo the centre: the least canonical label
/// among all scalar multiples. Even labels already live in `Sp(4)`.
pub fn projective(q: u32, l: &ClassLabel) -> ClassLabel {
    match l.scheme {
        Scheme::Even => canon_even(q, l),
        Scheme::Odd => (0..q - 1)
            .map(|k| scale_odd(q, l, k * (q + 1)))
            .min()
            .expect("q > 1"),
    }
}

/// Invariant-based classifier for one value of `q`.
#[derive(Clone, Debug)]
pub struct Classifier {
    q: u32,
    f: FieldSpec,
    ext: FieldSpec,
    /// Candidate eigenvalues in `ext`.
    cands: Vec<FieldElem>,
    /// Which trace value of the regular-unipotent invariant means `A_41`.
    a41_trace: u32,
}

/// Trace value of the regular-unipotent invariant assigned to `A_41`.
pub const A41_TRACE: u32 = 0;

impl Classifier {
    /// Supports `q` in `{2, 4}` and odd `q <= 25`.
    pub fn new(q: u32) -> Result<Self, ClassifyError> {
        let f = FieldSpec::of_order(q)?;
        let ext = if q.is_multiple_of(2) {
            if q > 4 {
                return Err(ClassifyError::UnsupportedQ(q));
            }
            FieldSpec::new(2, 4 * f.degree())?
        } else {
            f.quadratic_extension()
                .map_err(|_| ClassifyError::UnsupportedQ(q))?
        };
        let cands = if q.is_multiple_of(2) {
            // eigenvalues of Sp(4, q) have order dividing q^2 - 1 or q^2 + 1
            let n = ext.order() - 1;
            let (a, b) = (q * q + 1, q * q - 1);
            let mut es: Vec<u32> = (0..n).filter(|e| e % a == 0 || e % b == 0).collect();
            es.sort_unstable();
            es.into_iter().map(|e| ext.exp(e as i64)).collect()
        } else {
            ext.nonzero_elements().collect()
        };
        Ok(Classifier {
            q,
            f,
            ext,
            cands,
            a41_trace: A41_TRACE,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn scheme(&self) -> Scheme {
        Scheme::of_q(self.q)
    }

    pub fn classify(&self, g: &GroupElem) -> Result<ClassLabel, ClassifyError> {
        if self.q.is_multiple_of(2) {
            self.classify_even(g)
        } else {
            self.classify_odd(g)
        }
    }

    fn fail(&self, g: &GroupElem, reason: &str) -> ClassifyError {
        ClassifyError::Unclassifiable {
            reason: reason.to_string(),
            elem: format!("{g:?}"),
        }
    }

    fn eigen(&self, m: &Mat) -> Option<Vec<(FieldElem, usize)>> {
        let cp: Vec<FieldElem> = m
            .char_poly(&self.f)
            .iter()
            .map(|&c| self.f.embed(c, &self.ext).expect("tower"))
            .collect();
        let (roots, left) = roots_with_multiplicity(&self.ext, &cp, self.cands.iter().copied());
        (left == 0).then_some(roots)
    }

    fn rank_at(&self, m_ext: &Mat, x: FieldElem) -> usize {
        m_ext.minus_scalar(&self.ext, x).rank(&self.ext)
    }

    fn classify_even(&self, g: &GroupElem) -> Result<ClassLabel, ClassifyError> {
        let (f, e, q) = (&self.f, &self.ext, self.q);
        // q even: every multiplier has a unique square root
        let s = f.pow(g.mu(), (q / 2) as u64);
        let si = f.inv(s)?;
        let m0 = Mat::new(4, g.entries().iter().map(|&x| f.mul(x, si)).collect());
        let roots = self
            .eigen(&m0)
            .ok_or_else(|| self.fail(g, "eigenvalues outside F_{q^4}"))?;
        let me = m0.embed(f, e);
        let n = e.order() - 1;
        let dl = |x: FieldElem| e.dlog(x).expect("nonzero eigenvalue");
        let gamma_unit = (q * q + 1) * (q + 1);
        let eta_unit = (q * q + 1) * (q - 1);
        let is_gamma = |x: FieldElem| dl(x) % gamma_unit == 0;
        let is_eta = |x: FieldElem| dl(x) % eta_unit == 0;
        let mut mults: Vec<usize> = roots.iter().map(|r| r.1).collect();
        mults.sort_unstable();
        let lab = |fam, p: Vec<u32>| Ok(canon_even(q, &ClassLabel::new(Scheme::Even, fam, p)));
        match mults.as_slice() {
            [4] => {
                if roots[0].0 != e.one() {
                    return Err(self.fail(g, "single eigenvalue other than 1"));
                }
                self.unipotent_even(g, &m0)
            }
            [2, 2] => {
                let (x, y) = (roots[0].0, roots[1].0);
                let (one, other) = if x == e.one() {
                    (x, y)
                } else if y == e.one() {
                    (y, x)
                } else {
                    // {x, x, x^-1, x^-1}
                    let x = if dl(x) <= dl(y) { x } else { y };
                    let ss = self.rank_at(&me, x) == 2;
                    let ns = self.rank_at(&me, x) == 3;
                    if !(ss || ns) {
                        return Err(self.fail(g, "unexpected rank at double eigenvalue"));
                    }
                    return if is_gamma(x) {
                        lab(
                            if ss { Family::C2 } else { Family::D2 },
                            vec![dl(x) / gamma_unit],
                        )
                    } else if is_eta(x) {
                        lab(
                            if ss { Family::C4 } else { Family::D4 },
                            vec![dl(x) / eta_unit],
                        )
                    } else {
                        Err(self.fail(g, "double eigenvalue of unexpected order"))
                    };
                };
                let _ = one;
                Err(self.fail(g, &format!("eigenvalue 1 doubled against {}", dl(other))))
            }
            [1, 1, 2] => {
                let one = roots.iter().find(|r| r.1 == 2).expect("double root").0;
                if one != e.one() {
                    return Err(self.fail(g, "double eigenvalue other than 1"));
                }
                let x = roots.iter().find(|r| r.1 == 1).expect("simple root").0;
                let r1 = self.rank_at(&me, e.one());
                let ss = r1 == 2;
                if !(ss || r1 == 3) {
                    return Err(self.fail(g, "unexpected rank at eigenvalue 1"));
                }
                if is_gamma(x) {
                    lab(
                        if ss { Family::C1 } else { Family::D1 },
                        vec![dl(x) / gamma_unit],
                    )
                } else if is_eta(x) {
                    lab(
                        if ss { Family::C3 } else { Family::D3 },
                        vec![dl(x) / eta_unit],
                    )
                } else {
                    Err(self.fail(g, "eigenvalue of unexpected order"))
                }
            }
            [1, 1, 1, 1] => {
                let xs: Vec<FieldElem> = roots.iter().map(|r| r.0).collect();
                let x = xs[0];
                let xi = e.inv(x)?;
                let y = *xs
                    .iter()
                    .find(|&&y| y != x && y != xi)
                    .ok_or_else(|| self.fail(g, "eigenvalues do not pair"))?;
                let theta_unit = q * q + 1;
                let delta_unit = q * q - 1;
                match (is_gamma(x), is_eta(x), is_gamma(y), is_eta(y)) {
                    (true, _, true, _) => {
                        lab(Family::B1, vec![dl(x) / gamma_unit, dl(y) / gamma_unit])
                    }
                    (true, _, _, true) => {
                        lab(Family::B3, vec![dl(x) / gamma_unit, dl(y) / eta_unit])
                    }
                    (_, true, true, _) => {
                        lab(Family::B3, vec![dl(y) / gamma_unit, dl(x) / eta_unit])
                    }
                    (_, true, _, true) => lab(Family::B4, vec![dl(x) / eta_unit, dl(y) / eta_unit]),
                    _ if dl(x) % theta_unit == 0 => lab(Family::B2, vec![dl(x) / theta_unit]),
                    _ if dl(x) % delta_unit == 0 => lab(Family::B5, vec![dl(x) / delta_unit]),
                    _ => {
                        let _ = n;
                        Err(self.fail(g, "regular semisimple of unknown type"))
                    }
                }
            }
            _ => Err(self.fail(g, "unexpected eigenvalue multiplicities")),
        }
    }

    fn unipotent_even(&self, g: &GroupElem, m0: &Mat) -> Result<ClassLabel, ClassifyError> {
        let f = &self.f;
        let nmat = m0.minus_scalar(f, f.one());
        let lab = |fam| Ok(ClassLabel::new(Scheme::Even, fam, Vec::new()));
        match nmat.rank(f) {
            0 => lab(Family::A1),
            1 => lab(Family::A2),
            2 => {
                if !nmat.mul(f, &nmat).is_zero() {
                    return Err(self.fail(g, "rank-2 unipotent part with N^2 != 0"));
                }
                let b = jmat(f).mul(f, &nmat);
                let alternating = (0..4).all(|i| b.at(i, i).is_zero())
                    && (0..4).all(|i| (0..4).all(|j| b.at(i, j) == b.at(j, i)));
                lab(if alternating {
                    Family::A31
                } else {
                    Family::A32
                })
            }
            3 => {
                let n3 = nmat.mul(f, &nmat).mul(f, &nmat);
                let i = (0..4)
                    .find(|&i| (0..4).any(|r| !n3.at(r, i).is_zero()))
                    .ok_or_else(|| self.fail(g, "regular unipotent with N^3 = 0"))?;
                let mut v = vec![f.zero(); 4];
                v[i] = f.one();
                let num = form(f, &v, &nmat.apply(f, &v));
                let den = form(f, &v, &n3.apply(f, &v));
                if den.is_zero() {
                    return Err(self.fail(g, "degenerate regular unipotent"));
                }
                let t = abs_trace(f, f.div(num, den)?);
                lab(if t == self.a41_trace {
                    Family::A41
                } else {
                    Family::A42
                })
            }
            _ => Err(self.fail(g, "unipotent part of rank 4")),
        }
    }

    fn classify_odd(&self, g: &GroupElem) -> Result<ClassLabel, ClassifyError> {
        let (f, e, q) = (&self.f, &self.ext, self.q);
        let m = g.as_mat();
        let roots = self
            .eigen(&m)
            .ok_or_else(|| self.fail(g, "eigenvalues outside F_{q^2}"))?;
        let me = m.embed(f, e);
        let mu = f.embed(g.mu(), e)?;
        let dl = |x: FieldElem| e.dlog(x).expect("nonzero");
        let in_fq = |x: FieldElem| e.in_subfield(x, f.degree());
        let frob = |x: FieldElem| e.pow(x, q as u64);
        let lab = |fam, p: Vec<u32>| Ok(canon_odd(q, &ClassLabel::new(Scheme::Odd, fam, p)));
        let mut mults: Vec<usize> = roots.iter().map(|r| r.1).collect();
        mults.sort_unstable();
        match mults.as_slice() {
            [4] => {
                let x = roots[0].0;
                match self.rank_at(&me, x) {
                    0 => lab(Family::A0, vec![dl(x)]),
                    2 if self.is_hyperbolic_pair(&m, x) => lab(Family::A21, vec![dl(x)]),
                    _ => Err(self.fail(g, "unipotent part outside M")),
                }
            }
            [2, 2] => {
                let (x, y) = (roots[0].0, roots[1].0);
                let (rx, ry) = (self.rank_at(&me, x), self.rank_at(&me, y));
                let ss = rx == 2 && ry == 2;
                let ns = rx == 3 && ry == 3;
                if e.mul(x, y) == mu {
                    if in_fq(x) {
                        if ss {
                            return lab(Family::D0, vec![dl(x), dl(y)]);
                        }
                        if ns {
                            return lab(Family::D1, vec![dl(x), dl(y)]);
                        }
                    } else if ss && frob(x) == y {
                        return lab(Family::F0, vec![dl(x)]);
                    }
                    Err(self.fail(g, "paired double eigenvalues of unexpected shape"))
                } else if e.mul(x, x) == mu && e.mul(y, y) == mu {
                    if ss {
                        return lab(if in_fq(x) { Family::B0 } else { Family::C0 }, vec![dl(x)]);
                    }
                    if !ns {
                        return Err(self.fail(g, "mixed Jordan structure at x and -x"));
                    }
                    let ex = self.plane_invariant(&me, x);
                    let ey = self.plane_invariant(&me, y);
                    let (Some(ex), Some(ey)) = (ex, ey) else {
                        return Err(self.fail(g, "degenerate plane invariant"));
                    };
                    if in_fq(x) {
                        let sq = e.dlog(e.mul(ex, ey))? % (2 * (q + 1)) == 0;
                        lab(if sq { Family::B31 } else { Family::B32 }, vec![dl(x)])
                    } else {
                        let sq = e.is_square(ex);
                        lab(if sq { Family::C11 } else { Family::C12 }, vec![dl(x)])
                    }
                } else {
                    Err(self.fail(g, "double eigenvalues that do not pair"))
                }
            }
            [1, 1, 2] => {
                let c = roots.iter().find(|r| r.1 == 2).expect("double").0;
                let singles: Vec<FieldElem> =
                    roots.iter().filter(|r| r.1 == 1).map(|r| r.0).collect();
                let (a1, a2) = (singles[0], singles[1]);
                if e.mul(c, c) == mu
                    && e.mul(a1, a2) == mu
                    && in_fq(a1)
                    && self.rank_at(&me, c) == 2
                {
                    let a = e.div(a1, c)?;
                    lab(Family::E0, vec![dl(c), dl(a)])
                } else {
                    Err(self.fail(g, "three distinct eigenvalues of unexpected shape"))
                }
            }
            [1, 1, 1, 1] => {
                let xs: Vec<FieldElem> = roots.iter().map(|r| r.0).collect();
                let nf = xs.iter().filter(|&&x| in_fq(x)).count();
                match nf {
                    4 => {
                        let mut ds: Vec<u32> = xs.iter().map(|&x| dl(x)).collect();
                        ds.sort_unstable();
                        let n = q * q - 1;
                        let md = dl(mu);
                        let a1 = ds[0];
                        let a4 = (md + n - a1) % n;
                        let a2 = *ds
                            .iter()
                            .find(|&&x| x != a1 && x != a4)
                            .ok_or_else(|| self.fail(g, "eigenvalues do not pair"))?;
                        let a3 = (md + n - a2) % n;
                        if !(ds.contains(&a4) && ds.contains(&a3)) {
                            return Err(self.fail(g, "eigenvalues do not pair"));
                        }
                        lab(Family::H0, vec![a1, a2, a3, a4])
                    }
                    0 => {
                        let a = xs[0];
                        let others: Vec<FieldElem> = xs
                            .iter()
                            .copied()
                            .filter(|&x| x != a && x != frob(a))
                            .collect();
                        if others.len() != 2 {
                            return Err(self.fail(g, "Frobenius orbits of unexpected shape"));
                        }
                        if e.mul(a, frob(a)) == mu {
                            lab(Family::L0, vec![dl(a), dl(others[0])])
                        } else {
                            lab(Family::I0, vec![dl(a), dl(mu)])
                        }
                    }
                    _ => Err(self.fail(g, "mixed rational and irrational simple eigenvalues")),
                }
            }
            _ => Err(self.fail(g, "unexpected eigenvalue multiplicities")),
        }
    }

    /// For `g` with single eigenvalue `x` and `N = g - x` of rank 2 with
    /// `N^2 = 0`: whether the symmetric form `<v, N w>` on a complement of
    /// `ker N` is hyperbolic (discriminant `-1` up to squares).
    fn is_hyperbolic_pair(&self, m: &Mat, x: FieldElem) -> bool {
        let f = &self.f;
        let Some(xf) = self.ext.restrict(x, f) else {
            return false;
        };
        let nmat = m.minus_scalar(f, xf);
        if !nmat.mul(f, &nmat).is_zero() {
            return false;
        }
        // two basis vectors whose images under N are independent
        let cols: Vec<usize> = (0..4).collect();
        let mut pick = None;
        'outer: for &a in &cols {
            for &b in &cols {
                if a < b {
                    let mut sub = vec![f.zero(); 16];
                    for r in 0..4 {
                        sub[4 * r] = nmat.at(r, a);
                        sub[4 * r + 1] = nmat.at(r, b);
                    }
                    if Mat::new(4, sub).rank(f) == 2 {
                        pick = Some((a, b));
                        break 'outer;
                    }
                }
            }
        }
        let Some((a, b)) = pick else { return false };
        let unit = |i: usize| {
            let mut v = vec![f.zero(); 4];
            v[i] = f.one();
            v
        };
        let (va, vb) = (unit(a), unit(b));
        let bf = |v: &[FieldElem], w: &[FieldElem]| form(f, v, &nmat.apply(f, w));
        let disc = f.sub(
            f.mul(bf(&va, &va), bf(&vb, &vb)),
            f.mul(bf(&va, &vb), bf(&vb, &va)),
        );
        let md = f.neg(disc);
        !md.is_zero() && f.is_square(md)
    }

    /// `<v, (g - x) v> / x` for a vector `v` in the generalized `x`-eigenspace
    /// with `(g - x) v != 0`.
    fn plane_invariant(&self, me: &Mat, x: FieldElem) -> Option<FieldElem> {
        let e = &self.ext;
        let a = me.minus_scalar(e, x);
        let a2 = a.mul(e, &a);
        for v in a2.kernel(e) {
            let nv = a.apply(e, &v);
            if nv.iter().any(|c| !c.is_zero()) {
                let val = form(e, &v, &nv);
                return e.div(val, x).ok().filter(|r| !r.is_zero());
            }
        }
        None
    }
}

fn jmat(f: &FieldSpec) -> Mat {
    Mat::new(4, J.iter().flatten().map(|&x| f.from_int(x)).collect())
}

/// `<v, w> = v^T J w`.
fn form(f: &FieldSpec, v: &[FieldElem], w: &[FieldElem]) -> FieldElem {
    let mut s = f.zero();
    for (i, row) in J.iter().enumerate() {
        for (j, &jv) in row.iter().enumerate() {
            if jv != 0 {
                let t = f.mul(v[i], w[j]);
                s = if jv > 0 { f.add(s, t) } else { f.sub(s, t) };
            }
        }
    }
    s
}

/// Absolute trace `F_q -> F_2` as 0 or 1 (characteristic 2 only).
fn abs_trace(f: &FieldSpec, x: FieldElem) -> u32 {
    let mut t = f.zero();
    let mut y = x;
    for _ in 0..f.degree() {
        t = f.add(t, y);
        y = f.mul(y, y);
    }
    if t.is_zero() {
        0
    } else {
        1
    }
}

/// Multiset of labels with counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDistribution {
    pub counts: BTreeMap<ClassLabel, u64>,
    pub total: u64,
}

impl ClassDistribution {
    pub fn from_labels(labels: impl IntoIterator<Item = ClassLabel>) -> Self {
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for l in labels {
            *counts.entry(l).or_insert(0) += 1;
            total += 1;
        }
        ClassDistribution { counts, total }
    }

    fn from_terms(q: u32, terms: &[FormulaTerm], factor: u64) -> Self {
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for t in terms {
            let w = t.weight as u64 * factor;
            if w == 0 {
                continue;
            }
            *counts.entry(projective(q, &t.label)).or_insert(0) += w;
            total += w;
        }
        ClassDistribution { counts, total }
    }
}

/// Projective labels of a list of elements, classified in parallel.
pub fn classify_all(
    cl: &Classifier,
    elems: &[GroupElem],
    exec: Exec,
) -> Result<Vec<ClassLabel>, ClassifyError> {
    let q = cl.q();
    exec.map(elems, |g| cl.classify(g).map(|l| projective(q, &l)))
        .into_iter()
        .collect()
}

/// Distribution obtained by classifying every given element.
pub fn classify_distribution(
    cl: &Classifier,
    elems: &[GroupElem],
    exec: Exec,
) -> Result<ClassDistribution, ClassifyError> {
    Ok(ClassDistribution::from_labels(classify_all(
        cl, elems, exec,
    )?))
}

/// One summand `weight * chi(label)` of a finite-level formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulaTerm {
    pub label: ClassLabel,
    pub weight: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    Dim,
    Sig,
}

/// Divisor on the left side of the formula.
pub fn divisor(q: u32, which: Formula) -> i64 {
    let q = q as i64;
    match (q % 2 == 0, which) {
        (_, Formula::Dim) => (q * q - 1) * (q * q - q),
        (true, Formula::Sig) => q * (q * q - 1),
        (false, Formula::Sig) => 2 * q * (q * q - 1),
    }
}

/// Factor turning formula weights into element counts in `M` or `Mu`.
pub fn coset_factor(q: u32, which: Formula) -> u64 {
    let q = q as u64;
    match (q.is_multiple_of(2), which) {
        (_, Formula::Dim) => q - 1,
        (true, Formula::Sig) => (q - 1) * (q - 1),
        (false, Formula::Sig) => (q - 1) * (q - 1) / 2,
    }
}

pub fn formula_terms(q: u32, which: Formula) -> Result<Vec<FormulaTerm>, ClassifyError> {
    match (q.is_multiple_of(2), which) {
        (true, Formula::Dim) => Ok(even_dim_terms(q)),
        (true, Formula::Sig) => Ok(even_sig_terms(q)),
        (false, Formula::Dim) => odd_dim_terms(q),
        (false, Formula::Sig) => odd_sig_terms(q),
    }
}

fn term(q: u32, label: ClassLabel, weight: i64) -> FormulaTerm {
    FormulaTerm {
        label: canon(q, &label),
        weight,
    }
}

fn even_dim_terms(q: u32) -> Vec<FormulaTerm> {
    let qi = q as i64;
    let e = |fam, p: &[u32]| ClassLabel::even(fam, p);
    let mut t = vec![
        term(q, e(Family::A1, &[]), 1),
        term(q, e(Family::A31, &[]), qi * qi - 1),
    ];
    for i in 1..q.saturating_sub(1) {
        for j in 1..q - 1 {
            if i != j && i != q - 1 - j {
                t.push(term(q, e(Family::B1, &[i, j]), qi * (qi + 1) / 2));
            }
        }
    }
    for i in 1..q * q - 1 {
        if i % (q - 1) != 0 && i % (q + 1) != 0 {
            t.push(term(q, e(Family::B2, &[i]), qi * (qi - 1) / 2));
        }
    }
    for i in 1..q.saturating_sub(1) {
        t.push(term(q, e(Family::C1, &[i]), qi * (qi + 1)));
    }
    for i in 1..q.saturating_sub(1) {
        t.push(term(q, e(Family::C2, &[i]), (qi * qi + qi + 2) / 2));
    }
    for i in 1..=q {
        t.push(term(q, e(Family::C4, &[i]), qi * (qi - 1) / 2));
    }
    for i in 1..q.saturating_sub(1) {
        t.push(term(q, e(Family::D2, &[i]), qi * qi - 1));
    }
    t
}

fn even_sig_terms(q: u32) -> Vec<FormulaTerm> {
    let qi = q as i64;
    let e = |fam, p: &[u32]| ClassLabel::even(fam, p);
    let mut t = vec![
        term(q, e(Family::A31, &[]), 1),
        term(q, e(Family::A32, &[]), qi * qi - 1),
    ];
    for i in 1..q.saturating_sub(1) {
        t.push(term(q, e(Family::D2, &[i]), qi * (qi + 1) / 2));
    }
    for i in 1..=q {
        t.push(term(q, e(Family::D4, &[i]), qi * (qi - 1) / 2));
    }
    t
}

/// Fields and distinguished elements used by the odd-`q` formulas.
pub struct OddData {
    pub q: u32,
    pub f: FieldSpec,
    pub f2: FieldSpec,
    /// The fixed non-square `xi`, the generator of `F_q^x`.
    pub xi: FieldElem,
    /// `xi^{1/2}` in `F_{q^2}`.
    pub sqrt_xi: FieldElem,
}

impl OddData {
    pub fn new(q: u32) -> Result<Self, ClassifyError> {
        if q.is_multiple_of(2) {
            return Err(ClassifyError::UnsupportedQ(q));
        }
        let f = FieldSpec::of_order(q)?;
        let f2 = f
            .quadratic_extension()
            .map_err(|_| ClassifyError::UnsupportedQ(q))?;
        let xi = f.generator();
        let sqrt_xi = f.sqrt_ext(xi, &f2)?;
        Ok(OddData {
            q,
            f,
            f2,
            xi,
            sqrt_xi,
        })
    }

    /// `dlog` in `F_{q^2}` of an element of `F_q`.
    pub fn dl(&self, a: FieldElem) -> u32 {
        self.f2
            .dlog(self.f.embed(a, &self.f2).expect("tower"))
            .expect("nonzero")
    }

    pub fn dl2(&self, a: FieldElem) -> u32 {
        self.f2.dlog(a).expect("nonzero")
    }

    /// `a + b xi^{1/2}` in `F_{q^2}` for `a, b` in `F_q`.
    pub fn ext(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let e = &self.f2;
        e.add(
            self.f.embed(a, e).expect("tower"),
            e.mul(self.f.embed(b, e).expect("tower"), self.sqrt_xi),
        )
    }

    /// `alpha_0(-1) = (-1)^{(q-1)/2}`.
    pub fn alpha0_minus_one(&self) -> i64 {
        if ((self.q - 1) / 2).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

fn odd_dim_terms(q: u32) -> Result<Vec<FormulaTerm>, ClassifyError> {
    let d = OddData::new(q)?;
    let (f, qi) = (&d.f, q as i64);
    let o = |fam, p: &[u32]| ClassLabel::odd(fam, p);
    let one = f.one();
    let s = d.dl2(d.sqrt_xi);
    let mut t = vec![
        term(q, o(Family::A0, &[0]), 1),
        term(q, o(Family::A21, &[0]), qi * qi - 1),
        term(q, o(Family::B0, &[0]), qi * (qi + 1) / 2),
        term(q, o(Family::C0, &[s]), qi * (qi - 1) / 2),
    ];
    let units: Vec<FieldElem> = f.nonzero_elements().collect();
    for &b in units.iter().filter(|&&b| b != one) {
        t.push(term(
            q,
            o(Family::D0, &[0, d.dl(b)]),
            (qi * qi + qi + 2) / 2,
        ));
    }
    for &b in units.iter().filter(|&&b| b != one) {
        t.push(term(q, o(Family::D1, &[0, d.dl(b)]), qi * qi - 1));
    }
    for &a in units.iter().filter(|&&a| a != one && a != f.neg(one)) {
        t.push(term(q, o(Family::E0, &[0, d.dl(a)]), qi * (qi + 1)));
    }
    for a in f.elements() {
        t.push(term(
            q,
            o(Family::F0, &[d.dl2(d.ext(a, one))]),
            qi * (qi - 1) / 2,
        ));
    }
    for &a in units.iter().filter(|&&a| a != one) {
        for &b in units.iter().filter(|&&b| b != one) {
            if b != a && b != f.mul(a, a) {
                let ba = f.div(b, a)?;
                let p = [0, d.dl(a), d.dl(ba), d.dl(b)];
                t.push(term(q, o(Family::H0, &p), qi * (qi + 1) / 2));
            }
        }
    }
    for &b in units.iter().filter(|&&b| b != one && b != f.neg(one)) {
        let bb = f.neg(f.mul(b, d.xi));
        t.push(term(q, o(Family::I0, &[s, d.dl(bb)]), qi * (qi - 1) / 2));
    }
    for &a in &units {
        for &b in units.iter().filter(|&&b| b != one) {
            let bb = f.mul(b, f.sub(f.mul(a, a), d.xi));
            let p = [d.dl2(d.ext(a, one)), d.dl(bb)];
            t.push(term(q, o(Family::I0, &p), qi * (qi - 1) / 2));
        }
    }
    Ok(t)
}

fn odd_sig_terms(q: u32) -> Result<Vec<FormulaTerm>, ClassifyError> {
    let d = OddData::new(q)?;
    let (f, qi) = (&d.f, q as i64);
    let o = |fam, p: &[u32]| ClassLabel::odd(fam, p);
    let one = f.one();
    let m1 = f.neg(one);
    let s = d.dl2(d.sqrt_xi);
    let a0 = d.alpha0_minus_one();
    let big = qi * qi - 1;
    let mut t = vec![
        term(q, o(Family::B0, &[0]), 1),
        term(q, o(Family::C0, &[s]), 1),
        term(q, o(Family::B31, &[0]), big * (1 + a0) / 2),
        term(q, o(Family::B32, &[0]), big * (1 - a0) / 2),
        term(q, o(Family::C11, &[s]), big * (1 - a0) / 2),
        term(q, o(Family::C12, &[s]), big * (1 + a0) / 2),
        term(q, o(Family::D0, &[0, d.dl(m1)]), qi * qi),
        term(q, o(Family::F0, &[s]), qi * qi),
    ];
    let units: Vec<FieldElem> = f.nonzero_elements().collect();
    for &a in units.iter().filter(|&&a| a != one && a != m1) {
        let p = [0, d.dl(m1), d.dl(f.neg(a)), d.dl(a)];
        t.push(term(q, o(Family::H0, &p), qi * (qi + 1) / 2));
        t.push(term(
            q,
            o(Family::I0, &[s, d.dl(f.mul(d.xi, a))]),
            qi * (qi + 1) / 2,
        ));
    }
    for &a in &units {
        let x = d.ext(one, a);
        let b = f.add(m1, f.mul(f.mul(a, a), d.xi));
        t.push(term(
            q,
            o(Family::I0, &[d.dl2(x), d.dl(b)]),
            qi * (qi - 1) / 2,
        ));
        let y = d.ext(m1, f.neg(a));
        t.push(term(
            q,
            o(Family::L0, &[d.dl2(x), d.dl2(y)]),
            qi * (qi - 1) / 2,
        ));
    }
    Ok(t)
}

/// Distribution of projective classes in `M` (`Formula::Dim`) or `Mu`
/// (`Formula::Sig`) implied by the formula weights.
pub fn formula_distribution(q: u32, which: Formula) -> Result<ClassDistribution, ClassifyError> {
    let terms = formula_terms(q, which)?;
    Ok(ClassDistribution::from_terms(
        q,
        &terms,
        coset_factor(q, which),
    ))
}

/// Every class of `Sp(4, q)`, `q` even, as canonical labels in sorted order.
pub fn even_classes(q: u32) -> Vec<ClassLabel> {
    let e = |fam, p: Vec<u32>| canon_even(q, &ClassLabel::new(Scheme::Even, fam, p));
    let mut out = std::collections::BTreeSet::new();
    for fam in [
        Family::A1,
        Family::A2,
        Family::A31,
        Family::A32,
        Family::A41,
        Family::A42,
    ] {
        out.insert(e(fam, vec![]));
    }
    let (q1, qp, q2m, q2p) = (q - 1, q + 1, q * q - 1, q * q + 1);
    for i in 1..q1 {
        for j in 1..q1 {
            if i != j && (i + j) % q1 != 0 {
                out.insert(e(Family::B1, vec![i, j]));
            }
        }
        for j in 1..qp {
            out.insert(e(Family::B3, vec![i, j]));
        }
        for fam in [Family::C1, Family::C2, Family::D1, Family::D2] {
            out.insert(e(fam, vec![i]));
        }
    }
    for i in 1..qp {
        for j in 1..qp {
            if i != j && (i + j) % qp != 0 {
                out.insert(e(Family::B4, vec![i, j]));
            }
        }
        for fam in [Family::C3, Family::C4, Family::D3, Family::D4] {
            out.insert(e(fam, vec![i]));
        }
    }
    for i in 1..q2m {
        if i % q1 != 0 && i % qp != 0 {
            out.insert(e(Family::B2, vec![i]));
        }
    }
    for i in 1..q2p {
        out.insert(e(Family::B5, vec![i]));
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsp4core::Gsp4;
    use proptest::prelude::*;

    #[test]
    fn parse_and_print() {
        let l = ClassLabel::parse(Scheme::Even, "B_1(1,2)").unwrap();
        assert_eq!(l.to_string(), "B_1(1,2)");
        assert_eq!(
            ClassLabel::parse(Scheme::Even, "A_31").unwrap().family,
            Family::A31
        );
        assert_eq!(
            ClassLabel::parse(Scheme::Odd, "D_1(0, 4)").unwrap().params,
            vec![0, 4]
        );
        assert!(matches!(
            ClassLabel::parse(Scheme::Odd, "A_31"),
            Err(LabelError::UnknownFamily(_))
        ));
        assert!(matches!(
            ClassLabel::parse(Scheme::Odd, "H_0(1,2)"),
            Err(LabelError::Arity { .. })
        ));
        assert!(ClassLabel::parse(Scheme::Odd, "C_0(x)").is_err());
        assert_eq!(
            serde_json::to_string(&ClassLabel::even(Family::C4, &[1])).unwrap(),
            "\"C_4(1)\""
        );
    }

    #[test]
    fn class_counts_even() {
        // Sp(4, q), q even, has q^2 + 2q + 3 classes
        assert_eq!(even_classes(2).len(), 11);
        assert_eq!(even_classes(4).len(), 27);
        assert_eq!(even_classes(8).len(), 83);
    }

    #[test]
    fn even_table_equivalences() {
        let q = 4;
        let c = |fam, p: &[u32]| canon_even(q, &ClassLabel::even(fam, p));
        assert_eq!(c(Family::B1, &[1, 2]), c(Family::B1, &[2, 1]));
        assert_eq!(c(Family::B2, &[1]), c(Family::B2, &[4]));
        assert_eq!(c(Family::C2, &[1]), c(Family::C2, &[2]));
        assert_eq!(c(Family::C4, &[1]), c(Family::C4, &[4]));
        assert_eq!(c(Family::D2, &[1]), c(Family::D2, &[2]));
        assert_eq!(c(Family::D4, &[2]), c(Family::D4, &[3]));
        assert_eq!(c(Family::B5, &[1]), c(Family::B5, &[16]));
    }

    #[test]
    fn odd_table_equivalences() {
        let q = 5;
        let n = q * q - 1;
        let c = |fam, p: &[u32]| canon_odd(q, &ClassLabel::odd(fam, p));
        // B_0(a) = B_0(-a), C_0(a) = C_0(-a): -1 has dlog n/2
        assert_eq!(c(Family::B0, &[6]), c(Family::B0, &[6 + n / 2]));
        assert_eq!(c(Family::C0, &[3]), c(Family::C0, &[3 + n / 2]));
        assert_eq!(c(Family::D0, &[6, 12]), c(Family::D0, &[12, 6]));
        assert_eq!(c(Family::F0, &[1]), c(Family::F0, &[q]));
        assert_eq!(
            c(Family::H0, &[0, 6, 12, 18]),
            c(Family::H0, &[6, 0, 18, 12])
        );
        assert_eq!(c(Family::I0, &[1, 6]), c(Family::I0, &[q, 6]));
    }

    /// Shapes random exponents into parameters of a genuine class: `H_0`
    /// entries lie in `F_q` and pair up, the `I_0` multiplier lies in `F_q`.
    fn shaped(q: u32, fam: Family, ps: &[u32]) -> Vec<u32> {
        let n = q * q - 1;
        let r = |x: u32| x * (q + 1) % n;
        match fam {
            Family::H0 => {
                let mu = r(ps[0] + ps[3]);
                let (a, b) = (r(ps[0]), r(ps[1]));
                vec![a, b, (mu + n - b) % n, (mu + n - a) % n]
            }
            Family::I0 => vec![ps[0], r(ps[1])],
            _ => ps.to_vec(),
        }
    }

    fn q_odd() -> impl Strategy<Value = u32> {
        prop::sample::select(vec![3u32, 5, 7, 9, 11])
    }

    proptest! {
        #[test]
        fn canon_is_idempotent_odd(q in q_odd(), fam in prop::sample::select(ODD_FAMILIES.to_vec()),
                                   ps in prop::collection::vec(0u32..10_000, 4)) {
            let l = ClassLabel::odd(fam.0, &shaped(q, fam.0, &ps)[..fam.2]);
            let c = canon_odd(q, &l);
            prop_assert_eq!(canon_odd(q, &c), c.clone());
            let p = projective(q, &l);
            prop_assert_eq!(projective(q, &p), p);
        }

        #[test]
        fn canon_is_idempotent_even(q in prop::sample::select(vec![2u32, 4, 8, 16]),
                                    fam in prop::sample::select(EVEN_FAMILIES.to_vec()),
                                    ps in prop::collection::vec(0u32..10_000, 2)) {
            let l = ClassLabel::even(fam.0, &ps[..fam.2]);
            let c = canon_even(q, &l);
            prop_assert_eq!(canon_even(q, &c), c);
        }

        #[test]
        fn scaling_by_z_then_z_inverse(q in q_odd(), fam in prop::sample::select(ODD_FAMILIES.to_vec()),
                                       ps in prop::collection::vec(0u32..10_000, 4), k in 0u32..20) {
            let l = canon_odd(q, &ClassLabel::odd(fam.0, &shaped(q, fam.0, &ps)[..fam.2]));
            let n = q * q - 1;
            let s = (k % (q - 1)) * (q + 1);
            let back = scale_odd(q, &scale_odd(q, &l, s), (n - s) % n);
            prop_assert_eq!(back, l);
        }
    }

    #[test]
    fn formula_weights_sum_to_divisors() {
        for q in [2u32, 4, 8, 3, 5, 7, 9] {
            for w in [Formula::Dim, Formula::Sig] {
                let s: i64 = formula_terms(q, w).unwrap().iter().map(|t| t.weight).sum();
                assert_eq!(s, divisor(q, w), "q={q} {w:?}");
            }
        }
    }

    #[test]
    fn q2_distribution_of_m() {
        let d = formula_distribution(2, Formula::Dim).unwrap();
        let want: BTreeMap<ClassLabel, u64> = [
            (ClassLabel::even(Family::A1, &[]), 1),
            (ClassLabel::even(Family::A31, &[]), 3),
            (ClassLabel::even(Family::C4, &[1]), 2),
        ]
        .into_iter()
        .collect();
        assert_eq!(d.counts, want);
        assert_eq!(d.total, 6);
    }

    #[test]
    fn identity_and_scalars() {
        let g = Gsp4::new(4).unwrap();
        let cl = Classifier::new(4).unwrap();
        for a in g.field().nonzero_elements() {
            assert_eq!(
                cl.classify(&g.scalar(a)).unwrap(),
                ClassLabel::even(Family::A1, &[])
            );
        }
        let g3 = Gsp4::new(3).unwrap();
        let cl3 = Classifier::new(3).unwrap();
        let two = g3.field().from_int(2);
        // A_0(a) with dlog_{F_9}(2) = 4
        assert_eq!(
            cl3.classify(&g3.scalar(two)).unwrap(),
            ClassLabel::odd(Family::A0, &[4])
        );
    }

    #[test]
    fn even_table_representatives() {
        let g = Gsp4::new(2).unwrap();
        let cl = Classifier::new(2).unwrap();
        let a31 = g
            .mk_elem_int([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]])
            .unwrap();
        assert_eq!(cl.classify(&a31).unwrap().family, Family::A31);
        let a31b = g
            .mk_elem_int([[1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0], [0, 0, 0, 1]])
            .unwrap();
        assert_eq!(cl.classify(&a31b).unwrap().family, Family::A31);
        let a32 = g
            .mk_elem_int([[1, 1, 1, 1], [0, 1, 0, 1], [0, 0, 1, 1], [0, 0, 0, 1]])
            .unwrap();
        assert_eq!(cl.classify(&a32).unwrap().family, Family::A32);
        assert_eq!(cl.classify(&g.u()).unwrap().family, Family::A31);
    }

    #[test]
    fn odd_case_list_examples() {
        let q = 5;
        let g = Gsp4::new(q).unwrap();
        let f = g.field().clone();
        let cl = Classifier::new(q).unwrap();
        let d = OddData::new(q).unwrap();
        let fe = |n: i64| f.from_int(n);
        let u = g.u();
        let pr = |l: &ClassLabel| projective(q, l);
        let cls = |x: &GroupElem| pr(&cl.classify(x).unwrap());
        // t_{1,-1} u -> D_0(1,-1)
        let t = g.mul(&g.t(fe(1), fe(-1)), &u);
        assert_eq!(
            cls(&t),
            pr(&ClassLabel::odd(Family::D0, &[0, d.dl(fe(-1))]))
        );
        // t_{1,1} u -> B_0(1)
        assert_eq!(
            cls(&g.mul(&g.t(fe(1), fe(1)), &u)),
            pr(&ClassLabel::odd(Family::B0, &[0]))
        );
        // t_{xi,1} u -> C_0(xi^{1/2})
        let s = d.dl2(d.sqrt_xi);
        assert_eq!(
            cls(&g.mul(&g.t(d.xi, fe(1)), &u)),
            pr(&ClassLabel::odd(Family::C0, &[s]))
        );
        // q = 5: -1 is a square; t_{c,-1/4} x w u with -c square -> B_31(1/2)
        let c = fe(-1);
        let dq = f.neg(f.inv(fe(4)).unwrap());
        let el = [g.t(c, dq), g.x(), g.w(), u]
            .iter()
            .fold(g.identity(), |a, b| g.mul(&a, b));
        let half = d.dl(f.inv(fe(2)).unwrap());
        assert_eq!(cls(&el), pr(&ClassLabel::odd(Family::B31, &[half])));
        // t_{1,1} x u -> B_31(1) since -1 is a square
        let el = [g.t(fe(1), fe(1)), g.x(), u]
            .iter()
            .fold(g.identity(), |a, b| g.mul(&a, b));
        assert_eq!(cls(&el), pr(&ClassLabel::odd(Family::B31, &[0])));
        // t_{xi,1} x u -> C_12(xi^{1/2}) since -1 is a square
        let el = [g.t(d.xi, fe(1)), g.x(), u]
            .iter()
            .fold(g.identity(), |a, b| g.mul(&a, b));
        assert_eq!(cls(&el), pr(&ClassLabel::odd(Family::C12, &[s])));
    }

    #[test]
    fn odd_case_list_q3() {
        // q = 3: -1 is not a square
        let q = 3;
        let g = Gsp4::new(q).unwrap();
        let f = g.field().clone();
        let cl = Classifier::new(q).unwrap();
        let d = OddData::new(q).unwrap();
        let u = g.u();
        let pr = |l: &ClassLabel| projective(q, l);
        let s = d.dl2(d.sqrt_xi);
        let el = [g.t(f.one(), f.one()), g.x(), u]
            .iter()
            .fold(g.identity(), |a, b| g.mul(&a, b));
        assert_eq!(
            pr(&cl.classify(&el).unwrap()),
            pr(&ClassLabel::odd(Family::B32, &[0]))
        );
        let el = [g.t(d.xi, f.one()), g.x(), u]
            .iter()
            .fold(g.identity(), |a, b| g.mul(&a, b));
        assert_eq!(
            pr(&cl.classify(&el).unwrap()),
            pr(&ClassLabel::odd(Family::C11, &[s]))
        );
        // t_{c,-1/4} x w u with -c, -1 non-squares: c = 1
        let dq = f.neg(f.inv(f.from_int(4)).unwrap());
        let el = [g.t(f.one(), dq), g.x(), g.w(), u]
            .iter()
            .fold(g.identity(), |a, b| g.mul(&a, b));
        let half = f.inv(f.from_int(2)).unwrap();
        let lab = ClassLabel::odd(
            Family::C11,
            &[d.dl2(d.f2.mul(d.sqrt_xi, f.embed(half, &d.f2).unwrap()))],
        );
        assert_eq!(pr(&cl.classify(&el).unwrap()), pr(&lab));
    }

    #[test]
    fn unsupported_q() {
        assert!(matches!(
            Classifier::new(8),
            Err(ClassifyError::UnsupportedQ(8))
        ));
        assert!(Classifier::new(6).is_err());
    }
}
