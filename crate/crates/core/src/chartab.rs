//! Character tables keyed by [`CharId`] and [`ClassLabel`].
//!
//! Three sources: the built-in table of `Sp(4, q)`, `q` even (every cell a
//! [`CycloNum`] in `alpha`, `beta`, `theta`, `tau`), a loader for an external
//! `q`-odd table file, and a Dixon-style oracle computing the character
//! table of a small enumerated group from scratch.
//!
//! The odd table file is line oriented:
//!
//! ```text
//! scheme=odd q=3
//! # comment
//! chi_1(0,1) D_0(0,4) [[0,1,1]]
//! ```
//!
//! Each data line holds a character id, a class label and a cyclotomic
//! number in its JSON form (`[exponent, coefficient, conductor]` triples).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::classlabel::{
    canon, even_classes, ClassLabel, Classifier, ClassifyError, Family, Scheme,
};
use crate::cyclo::{lcm, CycloNum};
use crate::gsp4core::{ClassPartition, EnumeratedGroup, GroupElem, GroupError, Gsp4};
use crate::par::Exec;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharFamily {
    Theta(u8),
    Chi(u8),
    X(u8),
    Tau(u8),
    /// A class function outside the standard families, e.g. a permutation
    /// character built for testing.
    Custom(String),
}

impl fmt::Display for CharFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharFamily::Theta(i) => write!(f, "theta_{i}"),
            CharFamily::Chi(i) => write!(f, "chi_{i}"),
            CharFamily::X(i) => write!(f, "X_{i}"),
            CharFamily::Tau(i) => write!(f, "tau_{i}"),
            CharFamily::Custom(s) => write!(f, "custom:{s}"),
        }
    }
}

/// A (virtual) character family together with its parameters, reduced
/// modulo their moduli.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharId {
    pub scheme: Scheme,
    pub family: CharFamily,
    pub params: Vec<u32>,
}

#[derive(Debug, Error)]
pub enum ChartabError {
    #[error("unknown character family {0:?}")]
    UnknownFamily(String),
    #[error("{id} takes {want} parameters, got {got}")]
    Arity { id: String, want: usize, got: usize },
    #[error("malformed character id {0:?}")]
    Syntax(String),
    #[error("line {line}, {column}: {msg}")]
    Schema {
        line: usize,
        column: &'static str,
        msg: String,
    },
    #[error("no value for {char} at class {label}")]
    MissingCell { char: String, label: String },
    #[error("q = {0} is not supported here")]
    UnsupportedQ(u32),
    #[error("group of order {order} exceeds the oracle cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("class sizes: {0}")]
    ClassSizes(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl CharId {
    /// Moduli of the parameters, in order.
    pub fn moduli(scheme: Scheme, family: &CharFamily, q: u32) -> Result<Vec<u32>, ChartabError> {
        let (q1, qp, q2m, q2p) = (q - 1, q + 1, q * q - 1, q * q + 1);
        let bad = || ChartabError::UnknownFamily(family.to_string());
        Ok(match (scheme, family) {
            (_, CharFamily::Custom(_)) => vec![],
            (Scheme::Even, CharFamily::Theta(0..=5)) => vec![],
            (Scheme::Even, CharFamily::Chi(i)) => match i {
                1 => vec![q1, q1],
                2 => vec![q2m],
                3 => vec![q1, qp],
                4 => vec![qp, qp],
                5 => vec![q2p],
                6 | 7 | 10 | 11 => vec![q1],
                8 | 9 | 12 | 13 => vec![qp],
                _ => return Err(bad()),
            },
            (Scheme::Odd, CharFamily::X(i)) => match i {
                1 => vec![q1, q1, q1],
                2 | 3 => vec![q2m, q1],
                4 => vec![q1 * q2p],
                5 => vec![q2m, qp],
                _ => return Err(bad()),
            },
            (Scheme::Odd, CharFamily::Chi(i)) => match i {
                1..=4 => vec![q1, q1],
                5 | 6 => vec![qp, q1],
                7 | 8 => vec![q2m],
                _ => return Err(bad()),
            },
            (Scheme::Odd, CharFamily::Tau(i)) => match i {
                1 | 3 => vec![],
                2 => vec![q1],
                4 | 5 => vec![2 * q1],
                _ => return Err(bad()),
            },
            (Scheme::Odd, CharFamily::Theta(0..=5)) => vec![q1],
            _ => return Err(bad()),
        })
    }

    pub fn new(
        scheme: Scheme,
        family: CharFamily,
        params: &[u32],
        q: u32,
    ) -> Result<Self, ChartabError> {
        let m = Self::moduli(scheme, &family, q)?;
        if m.len() != params.len() {
            return Err(ChartabError::Arity {
                id: family.to_string(),
                want: m.len(),
                got: params.len(),
            });
        }
        let params = params.iter().zip(&m).map(|(&p, &n)| p % n).collect();
        Ok(CharId {
            scheme,
            family,
            params,
        })
    }

    pub fn custom(scheme: Scheme, name: &str) -> Self {
        CharId {
            scheme,
            family: CharFamily::Custom(name.to_string()),
            params: vec![],
        }
    }

    /// Parses `chi_1(1,2)`, `theta_0`, `custom:name` and so on.
    pub fn parse(scheme: Scheme, s: &str, q: u32) -> Result<Self, ChartabError> {
        let s = s.trim();
        if let Some(name) = s.strip_prefix("custom:") {
            return Ok(Self::custom(scheme, name));
        }
        let (name, rest) = match s.find('(') {
            Some(i) => (&s[..i], Some(&s[i..])),
            None => (s, None),
        };
        let (tag, idx) = name
            .split_once('_')
            .ok_or_else(|| ChartabError::UnknownFamily(name.to_string()))?;
        let idx: u8 = idx
            .parse()
            .map_err(|_| ChartabError::UnknownFamily(name.to_string()))?;
        let family = match tag {
            "theta" => CharFamily::Theta(idx),
            "chi" => CharFamily::Chi(idx),
            "X" => CharFamily::X(idx),
            "tau" => CharFamily::Tau(idx),
            _ => return Err(ChartabError::UnknownFamily(name.to_string())),
        };
        let params: Vec<u32> = match rest {
            None => vec![],
            Some(r) => r
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| ChartabError::Syntax(s.to_string()))?
                .split(',')
                .map(|p| p.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| ChartabError::Syntax(s.to_string()))?,
        };
        Self::new(scheme, family, &params, q)
    }

    /// Every parameter value of every standard family.
    pub fn all(scheme: Scheme, q: u32) -> Vec<CharId> {
        let fams: Vec<CharFamily> = match scheme {
            Scheme::Even => (0..=5)
                .map(CharFamily::Theta)
                .chain((1..=13).map(CharFamily::Chi))
                .collect(),
            Scheme::Odd => (1..=5)
                .map(CharFamily::X)
                .chain((1..=8).map(CharFamily::Chi))
                .chain((1..=5).map(CharFamily::Tau))
                .chain((0..=5).map(CharFamily::Theta))
                .collect(),
        };
        let mut out = Vec::new();
        for fam in fams {
            let m = Self::moduli(scheme, &fam, q).expect("standard family");
            let total: u32 = m.iter().product();
            for mut idx in 0..total {
                let mut ps = Vec::with_capacity(m.len());
                for &n in m.iter().rev() {
                    ps.push(idx % n);
                    idx /= n;
                }
                ps.reverse();
                out.push(CharId {
                    scheme,
                    family: fam.clone(),
                    params: ps,
                });
            }
        }
        out
    }
}

impl fmt::Display for CharId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(","))?;
        }
        Ok(())
    }
}

impl Serialize for CharId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Dense table of values, characters by classes.
#[derive(Debug, Clone)]
pub struct CharTable {
    scheme: Scheme,
    q: u32,
    chars: Vec<CharId>,
    classes: Vec<ClassLabel>,
    values: Vec<Vec<CycloNum>>,
    char_index: BTreeMap<CharId, usize>,
    class_index: BTreeMap<ClassLabel, usize>,
    class_sizes: Option<Vec<u64>>,
    provenance: Vec<String>,
}

impl CharTable {
    fn build(
        scheme: Scheme,
        q: u32,
        chars: Vec<CharId>,
        classes: Vec<ClassLabel>,
        values: Vec<Vec<CycloNum>>,
        provenance: Vec<String>,
    ) -> Self {
        let char_index = chars
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let class_index = classes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        CharTable {
            scheme,
            q,
            chars,
            classes,
            values,
            char_index,
            class_index,
            class_sizes: None,
            provenance,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn chars(&self) -> &[CharId] {
        &self.chars
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn row(&self, i: usize) -> &[CycloNum] {
        &self.values[i]
    }

    pub fn char_index(&self, c: &CharId) -> Option<usize> {
        self.char_index.get(c).copied()
    }

    pub fn class_index(&self, l: &ClassLabel) -> Option<usize> {
        self.class_index.get(&canon(self.q, l)).copied()
    }

    /// Value at a class, looked up through the canonical form of `l`.
    pub fn value(&self, c: &CharId, l: &ClassLabel) -> Option<&CycloNum> {
        Some(&self.values[self.char_index(c)?][self.class_index(l)?])
    }

    pub fn try_value(&self, c: &CharId, l: &ClassLabel) -> Result<&CycloNum, ChartabError> {
        self.value(c, l).ok_or_else(|| ChartabError::MissingCell {
            char: c.to_string(),
            label: l.to_string(),
        })
    }

    pub fn class_sizes(&self) -> Option<&[u64]> {
        self.class_sizes.as_deref()
    }

    /// Attaches class sizes, which must cover exactly the table's classes.
    pub fn with_class_sizes(
        mut self,
        sizes: &BTreeMap<ClassLabel, u64>,
    ) -> Result<Self, ChartabError> {
        let mut v = Vec::with_capacity(self.classes.len());
        for l in &self.classes {
            v.push(
                *sizes
                    .get(l)
                    .ok_or_else(|| ChartabError::ClassSizes(format!("no size for class {l}")))?,
            );
        }
        if sizes.len() != self.classes.len() {
            return Err(ChartabError::ClassSizes(format!(
                "{} sizes for {} classes",
                sizes.len(),
                self.classes.len()
            )));
        }
        self.class_sizes = Some(v);
        Ok(self)
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }
}

/// The built-in table of `Sp(4, q)`, `q` even, with every parameter value.
pub fn builtin_even(q: u32) -> Result<CharTable, ChartabError> {
    if !(q >= 2 && q.is_power_of_two() && q <= 64) {
        return Err(ChartabError::UnsupportedQ(q));
    }
    let chars = CharId::all(Scheme::Even, q);
    let classes = even_classes(q);
    let values = chars
        .iter()
        .map(|c| classes.iter().map(|l| even_value(q, c, l)).collect())
        .collect();
    Ok(CharTable::build(
        Scheme::Even,
        q,
        chars,
        classes,
        values,
        vec!["built-in table for Sp(4, q), q even".to_string()],
    ))
}

/// One cell of the even table. Blank cells are zero.
fn even_value(q: u32, c: &CharId, l: &ClassLabel) -> CycloNum {
    use CharFamily::{Chi, Theta};
    use Family::*;
    let qi = q as i64;
    let z = CycloNum::from_int;
    let al = |x: i64| CycloNum::root_sum(q - 1, x);
    let be = |x: i64| CycloNum::root_sum(q + 1, x);
    let th = |x: i64| CycloNum::root_sum(q * q - 1, x);
    let ta = |x: i64| CycloNum::root_sum(q * q + 1, x);
    let p = |k: usize| c.params[k] as i64;
    let (i, j) = (
        l.params.first().copied().unwrap_or(0) as i64,
        l.params.get(1).copied().unwrap_or(0) as i64,
    );
    let (q2, q4) = (qi * qi, qi * qi * qi * qi);
    let v: Option<CycloNum> = match (&c.family, l.family) {
        (Theta(0), _) => Some(z(1)),

        (Theta(1), A1) => Some(z(qi * (qi + 1) * (qi + 1) / 2)),
        (Theta(1), A2 | A31) => Some(z(qi * (qi + 1) / 2)),
        (Theta(1), A32 | A41) => Some(z(qi / 2)),
        (Theta(1), A42) => Some(z(-qi / 2)),
        (Theta(1), B1) => Some(z(2)),
        (Theta(1), B5) => Some(z(-1)),
        (Theta(1), C1 | C2) => Some(z(qi + 1)),
        (Theta(1), D1 | D2) => Some(z(1)),

        (Theta(2), A1) => Some(z(qi * (q2 + 1) / 2)),
        (Theta(2), A2) => Some(z(-qi * (qi - 1) / 2)),
        (Theta(2), A31) => Some(z(qi * (qi + 1) / 2)),
        (Theta(2), A32 | A42) => Some(z(qi / 2)),
        (Theta(2), A41) => Some(z(-qi / 2)),
        (Theta(2), B1 | B2 | C2 | D2) => Some(z(1)),
        (Theta(2), B3 | B4 | C3 | D3) => Some(z(-1)),
        (Theta(2), C1 | C4) => Some(z(qi)),

        (Theta(3), A1) => Some(z(qi * (q2 + 1) / 2)),
        (Theta(3), A2) => Some(z(qi * (qi + 1) / 2)),
        (Theta(3), A31) => Some(z(-qi * (qi - 1) / 2)),
        (Theta(3), A32 | A42) => Some(z(qi / 2)),
        (Theta(3), A41) => Some(z(-qi / 2)),
        (Theta(3), B1 | B3 | C1 | D1) => Some(z(1)),
        (Theta(3), B2 | B4 | C4 | D4) => Some(z(-1)),
        (Theta(3), C2 | C3) => Some(z(qi)),

        (Theta(4), A1) => Some(z(q4)),
        (Theta(4), B1 | B4 | B5) => Some(z(1)),
        (Theta(4), B2 | B3) => Some(z(-1)),
        (Theta(4), C1 | C2) => Some(z(qi)),
        (Theta(4), C3 | C4) => Some(z(-qi)),

        (Theta(5), A1) => Some(z(qi * (qi - 1) * (qi - 1) / 2)),
        (Theta(5), A2 | A31) => Some(z(-qi * (qi - 1) / 2)),
        (Theta(5), A32 | A41) => Some(z(qi / 2)),
        (Theta(5), A42) => Some(z(-qi / 2)),
        (Theta(5), B4) => Some(z(-2)),
        (Theta(5), B5) => Some(z(1)),
        (Theta(5), C3 | C4) => Some(z(qi - 1)),
        (Theta(5), D3 | D4) => Some(z(-1)),

        (Chi(1), A1) => Some(z((qi + 1) * (qi + 1) * (q2 + 1))),
        (Chi(1), A2 | A31) => Some(z((qi + 1) * (qi + 1))),
        (Chi(1), A32) => Some(z(2 * qi + 1)),
        (Chi(1), A41 | A42) => Some(z(1)),
        (Chi(1), B1) => Some(al(i * p(0)) * al(j * p(1)) + al(i * p(1)) * al(j * p(0))),
        (Chi(1), C1) => Some((al(i * p(0)) + al(i * p(1))) * (qi + 1)),
        (Chi(1), C2) => Some(al(i * p(0)) * al(i * p(1)) * (qi + 1)),
        (Chi(1), D1) => Some(al(i * p(0)) + al(i * p(1))),
        (Chi(1), D2) => Some(al(i * p(0)) * al(i * p(1))),

        (Chi(2), A1) => Some(z(q4 - 1)),
        (Chi(2), A2) => Some(z(q2 - 1)),
        (Chi(2), A31) => Some(z(-q2 - 1)),
        (Chi(2), A32 | A41 | A42) => Some(z(-1)),
        (Chi(2), B2) => Some(-(th(i * p(0)) + th(qi * i * p(0)))),
        (Chi(2), C2) => Some(al(i * p(0)) * (qi - 1)),
        (Chi(2), C4) => Some(be(i * p(0)) * (-qi - 1)),
        (Chi(2), D2) => Some(-al(i * p(0))),
        (Chi(2), D4) => Some(-be(i * p(0))),

        (Chi(3), A1) => Some(z(q4 - 1)),
        (Chi(3), A2) => Some(z(-q2 - 1)),
        (Chi(3), A31) => Some(z(q2 - 1)),
        (Chi(3), A32 | A41 | A42) => Some(z(-1)),
        (Chi(3), B3) => Some(-(al(i * p(0)) * be(j * p(1)))),
        (Chi(3), C1) => Some(al(i * p(0)) * (qi - 1)),
        (Chi(3), C3) => Some(be(i * p(1)) * (-qi - 1)),
        (Chi(3), D1) => Some(-al(i * p(0))),
        (Chi(3), D3) => Some(-be(i * p(1))),

        (Chi(4), A1) => Some(z((qi - 1) * (qi - 1) * (q2 + 1))),
        (Chi(4), A2 | A31) => Some(z((qi - 1) * (qi - 1))),
        (Chi(4), A32) => Some(z(-2 * qi + 1)),
        (Chi(4), A41 | A42) => Some(z(1)),
        (Chi(4), B4) => Some(be(i * p(0)) * be(j * p(1)) + be(i * p(1)) * be(j * p(0))),
        (Chi(4), C3) => Some((be(i * p(0)) + be(i * p(1))) * (1 - qi)),
        (Chi(4), C4) => Some(be(i * p(0)) * be(i * p(1)) * (1 - qi)),
        (Chi(4), D3) => Some(be(i * p(0)) + be(i * p(1))),
        (Chi(4), D4) => Some(be(i * p(0)) * be(i * p(1))),

        (Chi(5), A1) => Some(z((q2 - 1) * (q2 - 1))),
        (Chi(5), A2 | A31) => Some(z(1 - q2)),
        (Chi(5), A32 | A41 | A42) => Some(z(1)),
        (Chi(5), B5) => Some(ta(i * p(0)) + ta(qi * i * p(0))),

        (Chi(6), A1) => Some(z((qi + 1) * (q2 + 1))),
        (Chi(6), A2 | A32 | C4) => Some(z(qi + 1)),
        (Chi(6), A31) => Some(z(q2 + qi + 1)),
        (Chi(6), A41 | A42 | D4) => Some(z(1)),
        (Chi(6), B1) => Some(al(i * p(0)) * al(j * p(0))),
        (Chi(6), B2 | D1) => Some(al(i * p(0))),
        (Chi(6), C1) => Some(al(i * p(0)) * (qi + 1)),
        (Chi(6), C2) => Some(al(2 * i * p(0)) + (qi + 1)),
        (Chi(6), D2) => Some(al(2 * i * p(0)) + 1),

        (Chi(7), A1) => Some(z((qi + 1) * (q2 + 1))),
        (Chi(7), A2) => Some(z(q2 + qi + 1)),
        (Chi(7), A31 | A32 | C3) => Some(z(qi + 1)),
        (Chi(7), A41 | A42 | D3) => Some(z(1)),
        (Chi(7), B1) => Some(al(i * p(0)) + al(j * p(0))),
        (Chi(7), B3 | D2) => Some(al(i * p(0))),
        (Chi(7), C1) => Some(al(i * p(0)) + (qi + 1)),
        (Chi(7), C2) => Some(al(i * p(0)) * (qi + 1)),
        (Chi(7), D1) => Some(al(i * p(0)) + 1),

        (Chi(8), A1) => Some(z((qi - 1) * (q2 + 1))),
        (Chi(8), A2 | A32 | C2) => Some(z(qi - 1)),
        (Chi(8), A31) => Some(z(-q2 + qi - 1)),
        (Chi(8), A41 | A42 | D2) => Some(z(-1)),
        (Chi(8), B2 | D3) => Some(-be(i * p(0))),
        (Chi(8), B4) => Some(-(be(i * p(0)) * be(j * p(0)))),
        (Chi(8), C3) => Some(be(i * p(0)) * (qi - 1)),
        (Chi(8), C4) => Some(z(qi - 1) - be(2 * i * p(0))),
        (Chi(8), D4) => Some(z(-1) - be(2 * i * p(0))),

        (Chi(9), A1) => Some(z((qi - 1) * (q2 + 1))),
        (Chi(9), A2) => Some(z(-q2 + qi - 1)),
        (Chi(9), A31 | A32 | C1) => Some(z(qi - 1)),
        (Chi(9), A41 | A42 | D1) => Some(z(-1)),
        (Chi(9), B3) => Some(-be(j * p(0))),
        (Chi(9), B4) => Some(-(be(i * p(0)) + be(j * p(0)))),
        (Chi(9), C3) => Some(z(qi - 1) - be(i * p(0))),
        (Chi(9), C4) => Some(be(i * p(0)) * (qi - 1)),
        (Chi(9), D3) => Some(z(-1) - be(i * p(0))),
        (Chi(9), D4) => Some(-be(i * p(0))),

        (Chi(10), A1) => Some(z(qi * (qi + 1) * (q2 + 1))),
        (Chi(10), A2) => Some(z(qi * (qi + 1))),
        (Chi(10), A31 | A32) => Some(z(qi)),
        (Chi(10), B1) => Some(al(i * p(0)) * al(j * p(0))),
        (Chi(10), B2) => Some(-al(i * p(0))),
        (Chi(10), C1) => Some(al(i * p(0)) * (qi + 1)),
        (Chi(10), C2) => Some(al(2 * i * p(0)) * qi + (qi + 1)),
        (Chi(10), C4) => Some(z(-qi - 1)),
        (Chi(10), D1) => Some(al(i * p(0))),
        (Chi(10), D2) => Some(z(1)),
        (Chi(10), D4) => Some(z(-1)),

        (Chi(11), A1) => Some(z(qi * (qi + 1) * (q2 + 1))),
        (Chi(11), A2 | A32) => Some(z(qi)),
        (Chi(11), A31) => Some(z(qi * (qi + 1))),
        (Chi(11), B1) => Some(al(i * p(0)) + al(j * p(0))),
        (Chi(11), B3) => Some(-al(i * p(0))),
        (Chi(11), C1) => Some(al(i * p(0)) * qi + (qi + 1)),
        (Chi(11), C2) => Some(al(i * p(0)) * (qi + 1)),
        (Chi(11), C3) => Some(z(-qi - 1)),
        (Chi(11), D1) => Some(z(1)),
        (Chi(11), D2) => Some(al(i * p(0))),
        (Chi(11), D3) => Some(z(-1)),

        (Chi(12), A1) => Some(z(qi * (qi - 1) * (q2 + 1))),
        (Chi(12), A2) => Some(z(qi * (qi - 1))),
        (Chi(12), A31 | A32) => Some(z(-qi)),
        (Chi(12), B2) => Some(-be(i * p(0))),
        (Chi(12), B4) => Some(be(i * p(0)) * be(j * p(0))),
        (Chi(12), C2) => Some(z(qi - 1)),
        (Chi(12), C3) => Some(be(i * p(0)) * (1 - qi)),
        (Chi(12), C4) => Some(z(1 - qi) - be(2 * i * p(0)) * qi),
        (Chi(12), D2) => Some(z(-1)),
        (Chi(12), D3) => Some(be(i * p(0))),
        (Chi(12), D4) => Some(z(1)),

        (Chi(13), A1) => Some(z(qi * (qi - 1) * (q2 + 1))),
        (Chi(13), A2 | A32) => Some(z(-qi)),
        (Chi(13), A31) => Some(z(qi * (qi - 1))),
        (Chi(13), B3) => Some(-be(j * p(0))),
        (Chi(13), B4) => Some(be(i * p(0)) + be(j * p(0))),
        (Chi(13), C1) => Some(z(qi - 1)),
        (Chi(13), C3) => Some(z(1 - qi) - be(i * p(0)) * qi),
        (Chi(13), C4) => Some(be(i * p(0)) * (1 - qi)),
        (Chi(13), D1) => Some(z(-1)),
        (Chi(13), D3) => Some(z(1)),
        (Chi(13), D4) => Some(be(i * p(0))),

        _ => None,
    };
    v.unwrap_or_else(CycloNum::zero)
}

/// Loads an odd-`q` table file. With `apply_corrections`, the `tau_2`
/// values at every `C`-type class are negated.
pub fn load_odd(path: &Path, apply_corrections: bool) -> Result<CharTable, ChartabError> {
    let text = std::fs::read_to_string(path)?;
    parse_odd(&text, apply_corrections)
}

pub fn parse_odd(text: &str, apply_corrections: bool) -> Result<CharTable, ChartabError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or(ChartabError::Schema {
        line: 1,
        column: "header",
        msg: "empty file".into(),
    })?;
    let q = parse_header(hl, header)?;
    let mut cells: BTreeMap<(CharId, ClassLabel), CycloNum> = BTreeMap::new();
    for (ln, line) in lines {
        let mut parts = line.splitn(3, char::is_whitespace);
        let (Some(c), Some(l), Some(v)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ChartabError::Schema {
                line: ln,
                column: "row",
                msg: "expected `CharId ClassLabel value`".into(),
            });
        };
        let schema = |column, msg: String| ChartabError::Schema {
            line: ln,
            column,
            msg,
        };
        let cid = CharId::parse(Scheme::Odd, c, q).map_err(|e| schema("CharId", e.to_string()))?;
        let lab =
            ClassLabel::parse(Scheme::Odd, l).map_err(|e| schema("ClassLabel", e.to_string()))?;
        let lab = canon(q, &lab);
        let val: CycloNum =
            serde_json::from_str(v.trim()).map_err(|e| schema("value", e.to_string()))?;
        if cells.insert((cid.clone(), lab.clone()), val).is_some() {
            return Err(schema("row", format!("duplicate cell {cid} at {lab}")));
        }
    }
    let chars: Vec<CharId> = cells
        .keys()
        .map(|k| k.0.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let classes: Vec<ClassLabel> = cells
        .keys()
        .map(|k| k.1.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut values = Vec::with_capacity(chars.len());
    for c in &chars {
        let mut row = Vec::with_capacity(classes.len());
        for l in &classes {
            let v =
                cells
                    .remove(&(c.clone(), l.clone()))
                    .ok_or_else(|| ChartabError::MissingCell {
                        char: c.to_string(),
                        label: l.to_string(),
                    })?;
            let corrected =
                apply_corrections && c.family == CharFamily::Tau(2) && l.family.is_c_type();
            row.push(if corrected { -v } else { v });
        }
        values.push(row);
    }
    let mut provenance = vec![format!("external q-odd table, q = {q}")];
    if apply_corrections {
        provenance.push("tau_2 negated at every C-type class".to_string());
    }
    Ok(CharTable::build(
        Scheme::Odd,
        q,
        chars,
        classes,
        values,
        provenance,
    ))
}

fn parse_header(line: usize, h: &str) -> Result<u32, ChartabError> {
    let err = |msg: &str| ChartabError::Schema {
        line,
        column: "header",
        msg: msg.to_string(),
    };
    let mut scheme = None;
    let mut q = None;
    for kv in h.split_whitespace() {
        match kv.split_once('=') {
            Some(("scheme", v)) => scheme = Some(v),
            Some(("q", v)) => q = Some(v.parse::<u32>().map_err(|_| err("q is not an integer"))?),
            _ => return Err(err("expected `scheme=odd q=<q>`")),
        }
    }
    if scheme != Some("odd") {
        return Err(err("scheme must be odd"));
    }
    let q = q.ok_or_else(|| err("missing q"))?;
    if q % 2 == 0 || crate::ffield::prime_power(q).is_none() {
        return Err(err("q must be an odd prime power"));
    }
    Ok(q)
}

/// Serializes a table in the odd file format.
pub fn write_odd(t: &CharTable) -> String {
    let mut s = format!("scheme=odd q={}\n", t.q);
    for (i, c) in t.chars.iter().enumerate() {
        for (j, l) in t.classes.iter().enumerate() {
            let v = serde_json::to_string(&t.values[i][j]).expect("serializable");
            s.push_str(&format!("{c} {l} {v}\n"));
        }
    }
    s
}

/// Sizes of the conjugacy classes of `Sp(4, q)`, `q` even, from the orbit
/// partition of the enumerated group; each orbit is named by classifying a
/// representative.
pub fn even_class_sizes(
    q: u32,
    exec: Exec,
) -> Result<(BTreeMap<ClassLabel, u64>, u64), ChartabError> {
    let g = Gsp4::new(q)?;
    if !g.is_even() {
        return Err(ChartabError::UnsupportedQ(q));
    }
    let grp = g.enumerate_sp(exec)?;
    class_sizes_in(&grp, exec)
}

/// As [`even_class_sizes`], for an already enumerated `Sp(4, q)`.
pub fn class_sizes_in(
    grp: &EnumeratedGroup,
    exec: Exec,
) -> Result<(BTreeMap<ClassLabel, u64>, u64), ChartabError> {
    let g = grp.ctx();
    let q = g.q();
    if !g.is_even() {
        return Err(ChartabError::UnsupportedQ(q));
    }
    let part = grp.conjugacy_classes(&g.sp_generators(), exec);
    let cl = Classifier::new(q)?;
    let mut out = BTreeMap::new();
    for (c, &r) in part.reps.iter().enumerate() {
        let l = cl.classify(&grp.elements()[r as usize])?;
        if out.insert(l.clone(), part.sizes[c]).is_some() {
            return Err(ChartabError::ClassSizes(format!(
                "label {l} names two orbits"
            )));
        }
    }
    Ok((out, grp.len() as u64))
}

/// Inner products of all pairs of rows.
#[derive(Debug, Clone, Serialize)]
pub struct OrthReport {
    pub chars: Vec<CharId>,
    /// `<chi_a, chi_b>` for `a <= b`, or `None` when the sum is not a
    /// rational multiple of `|G|`.
    pub pairings: Vec<(usize, usize, Option<i64>)>,
    pub group_order: u64,
}

impl OrthReport {
    pub fn pairing(&self, a: usize, b: usize) -> Option<i64> {
        let (a, b) = (a.min(b), a.max(b));
        let n = self.chars.len();
        // row-major upper triangle
        let idx = a * n - a * (a + 1) / 2 + b;
        self.pairings[idx].2
    }

    pub fn norm(&self, a: usize) -> Option<i64> {
        self.pairing(a, a)
    }
}

fn common_conductor<'a>(vals: impl Iterator<Item = &'a CycloNum>) -> u32 {
    vals.fold(1u64, |m, v| lcm(m, v.conductor() as u64)) as u32
}

fn sparse(v: &CycloNum, n: u32) -> Vec<(u32, i64)> {
    v.lift(n).terms().collect()
}

/// `sum_C |C| chi(C) conj(psi(C))` over all pairs, divided by `|G|`.
pub fn norm_and_orthogonality(t: &CharTable, exec: Exec) -> Result<OrthReport, ChartabError> {
    let sizes = t
        .class_sizes()
        .ok_or_else(|| ChartabError::ClassSizes("table has no class sizes".into()))?;
    let order: u64 = sizes.iter().sum();
    let n = common_conductor(t.values.iter().flatten());
    let rows: Vec<Vec<Vec<(u32, i64)>>> = t
        .values
        .iter()
        .map(|r| r.iter().map(|v| sparse(v, n)).collect())
        .collect();
    let nc = rows.len();
    let pairs: Vec<(usize, usize)> = (0..nc).flat_map(|a| (a..nc).map(move |b| (a, b))).collect();
    let pairings = exec.map(&pairs, |&(a, b)| {
        let mut acc = vec![0i64; n as usize];
        for (c, &sz) in sizes.iter().enumerate() {
            for &(e1, c1) in &rows[a][c] {
                for &(e2, c2) in &rows[b][c] {
                    acc[((e1 + n - e2) % n) as usize] += sz as i64 * c1 * c2;
                }
            }
        }
        let s = CycloNum::from_terms(n, acc.into_iter().enumerate().map(|(e, c)| (e as u32, c)));
        let v = s
            .as_integer()
            .ok()
            .filter(|v| v % order as i64 == 0)
            .map(|v| v / order as i64);
        (a, b, v)
    });
    Ok(OrthReport {
        chars: t.chars.clone(),
        pairings,
        group_order: order,
    })
}

/// Indices of the distinct irreducible rows: norm 1, positive degree, first
/// occurrence of each class function.
pub fn irreducible_rows(t: &CharTable, rep: &OrthReport) -> Vec<usize> {
    let deg_col = t
        .classes
        .iter()
        .position(|l| l.family == Family::A1 || (l.family == Family::A0 && l.params == [0]));
    let mut seen: Vec<usize> = Vec::new();
    for a in 0..t.chars.len() {
        if rep.norm(a) != Some(1) {
            continue;
        }
        if let Some(dc) = deg_col {
            if t.values[a][dc].as_integer().map_or(true, |d| d <= 0) {
                continue;
            }
        }
        if seen.iter().all(|&b| t.values[b] != t.values[a]) {
            seen.push(a);
        }
    }
    seen
}

/// Checks `sum_chi chi(C) conj(chi(C')) = delta_{C,C'} |G| / |C|` over the
/// given rows. Returns the offending class pairs.
pub fn column_orthogonality(
    t: &CharTable,
    rows: &[usize],
    exec: Exec,
) -> Result<Vec<(ClassLabel, ClassLabel)>, ChartabError> {
    let sizes = t
        .class_sizes()
        .ok_or_else(|| ChartabError::ClassSizes("table has no class sizes".into()))?;
    let order: u64 = sizes.iter().sum();
    let k = t.classes.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let bad = exec.map(&pairs, |&(a, b)| {
        let s: CycloNum = rows
            .iter()
            .map(|&r| &t.values[r][a] * &t.values[r][b].conj())
            .sum();
        let want = if a == b { (order / sizes[a]) as i64 } else { 0 };
        (s.as_integer().ok() != Some(want)).then(|| (t.classes[a].clone(), t.classes[b].clone()))
    });
    Ok(bad.into_iter().flatten().collect())
}

/// Default cap on the order of groups given to [`dixon_oracle`].
pub const DIXON_CAP: usize = 10_000;

/// Character table of a small group computed from class multiplication
/// coefficients.
#[derive(Debug, Clone)]
pub struct DixonTable {
    pub partition: ClassPartition,
    pub reps: Vec<GroupElem>,
    pub orders: Vec<u64>,
    /// Characters by classes (partition order).
    pub chars: Vec<Vec<CycloNum>>,
    pub degrees: Vec<u64>,
    pub prime: u64,
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn is_prime_u64(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Kernel of an `r x c` matrix mod `p`.
fn kernel_mod(m: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = m.to_vec();
    let rows = a.len();
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = invmod(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let t = a[i][c];
                let pivot = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x = (*x + p - t * y % p) % p;
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !piv.contains(c))
        .map(|fc| {
            let mut v = vec![0; cols];
            v[fc] = 1;
            for (row, &pc) in piv.iter().enumerate() {
                v[pc] = (p - a[row][fc]) % p;
            }
            v
        })
        .collect()
}

/// Computes the character table of the enumerated group generated by
/// `gens`, exactly, by splitting the common eigenspaces of the class
/// multiplication matrices mod a prime and lifting through eigenvalue
/// multiplicities.
pub fn dixon_oracle(
    grp: &EnumeratedGroup,
    gens: &[GroupElem],
    exec: Exec,
) -> Result<DixonTable, ChartabError> {
    dixon_oracle_capped(grp, gens, exec, DIXON_CAP)
}

pub fn dixon_oracle_capped(
    grp: &EnumeratedGroup,
    gens: &[GroupElem],
    exec: Exec,
    cap: usize,
) -> Result<DixonTable, ChartabError> {
    let order = grp.len();
    if order > cap {
        return Err(ChartabError::CapExceeded { order, cap });
    }
    let ctx = grp.ctx();
    let elems = grp.elements();
    let part = grp.conjugacy_classes(gens, exec);
    let r = part.num_classes();
    let cls = |g: &GroupElem| part.class_of[grp.index_of(g).expect("closed")] as usize;
    let reps: Vec<GroupElem> = part.reps.iter().map(|&i| elems[i as usize]).collect();
    let orders: Vec<u64> = reps.iter().map(|g| ctx.order_of(g)).collect();
    let exponent = orders.iter().fold(1, |a, &o| lcm(a, o));
    let mut p = (2 * order as u64 / exponent + 1) * exponent + 1;
    while !is_prime_u64(p) {
        p += exponent;
    }
    // a[i][j][k] = #{x in C_i : x^-1 z_k in C_j}
    let rep_invs = reps.clone();
    let per_x = exec.map(elems, |x| {
        let xi = ctx.inv(x);
        rep_invs
            .iter()
            .map(|z| cls(&ctx.mul(&xi, z)))
            .collect::<Vec<usize>>()
    });
    let mut a = vec![vec![vec![0u64; r]; r]; r];
    for (xidx, js) in per_x.iter().enumerate() {
        let i = part.class_of[xidx] as usize;
        for (k, &j) in js.iter().enumerate() {
            a[i][j][k] += 1;
        }
    }
    let id_class = cls(&ctx.identity());
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..r)
        .map(|i| (0..r).map(|j| u64::from(i == j)).collect())
        .collect()];
    for mi in a.iter() {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for basis in spaces {
            if basis.len() == 1 {
                next.push(basis);
                continue;
            }
            // images M_i b for each basis vector b
            let imgs: Vec<Vec<u64>> = basis
                .iter()
                .map(|b| {
                    (0..r)
                        .map(|j| (0..r).fold(0, |s, k| (s + mi[j][k] * b[k]) % p))
                        .collect()
                })
                .collect();
            let d = basis.len();
            let splits = exec.map_range(p as usize, |lam| {
                let lam = lam as u64;
                let m: Vec<Vec<u64>> = (0..r)
                    .map(|j| {
                        (0..d)
                            .map(|c| (imgs[c][j] + p - lam * basis[c][j] % p) % p)
                            .collect()
                    })
                    .collect();
                let ker = kernel_mod(&m, d, p);
                (!ker.is_empty()).then(|| {
                    ker.iter()
                        .map(|cv| {
                            (0..r)
                                .map(|j| (0..d).fold(0, |s, c| (s + cv[c] * basis[c][j]) % p))
                                .collect()
                        })
                        .collect::<Vec<Vec<u64>>>()
                })
            });
            let parts: Vec<Vec<Vec<u64>>> = splits.into_iter().flatten().collect();
            if parts.iter().map(|s| s.len()).sum::<usize>() != d {
                return Err(ChartabError::Oracle(
                    "class sum acts non-diagonalisably".into(),
                ));
            }
            next.extend(parts);
        }
        spaces = next;
    }
    if spaces.len() != r {
        return Err(ChartabError::Oracle(format!(
            "{} eigenspaces for {r} classes",
            spaces.len()
        )));
    }
    let inv_class: Vec<usize> = reps.iter().map(|g| cls(&ctx.inv(g))).collect();
    let sizes = &part.sizes;
    // an element of order `exponent` in F_p^x
    let gen = (2..p)
        .find(|&g| {
            let mut n = p - 1;
            let mut f = 2;
            let mut ok = true;
            while f * f <= n {
                if n.is_multiple_of(f) {
                    ok &= powmod(g, (p - 1) / f, p) != 1;
                    while n.is_multiple_of(f) {
                        n /= f;
                    }
                }
                f += 1;
            }
            ok && (n == 1 || powmod(g, (p - 1) / n, p) != 1)
        })
        .expect("F_p^x is cyclic");
    let z = powmod(gen, (p - 1) / exponent, p);
    // classes of the powers of each representative
    let power_classes: Vec<Vec<usize>> = exec.map(&reps, |g| {
        let o = ctx.order_of(g);
        let mut h = ctx.identity();
        (0..o)
            .map(|_| {
                let c = cls(&h);
                h = ctx.mul(&h, g);
                c
            })
            .collect()
    });
    let mut chars = Vec::with_capacity(r);
    let mut degrees = Vec::with_capacity(r);
    for s in &spaces {
        let v0 = &s[0];
        let norm = invmod(v0[id_class], p);
        let w: Vec<u64> = v0.iter().map(|x| x * norm % p).collect();
        let ssum = (0..r).fold(0, |acc, k| {
            (acc + w[k] * w[inv_class[k]] % p * invmod(sizes[k] % p, p)) % p
        });
        let d2 = (order as u64 % p) * invmod(ssum, p) % p;
        let d = (1..=(order as f64).sqrt() as u64 + 1)
            .find(|d| d * d % p == d2)
            .ok_or_else(|| ChartabError::Oracle("degree is not an integer".into()))?;
        let chi_p: Vec<u64> = (0..r)
            .map(|k| d * w[k] % p * invmod(sizes[k] % p, p) % p)
            .collect();
        let mut row = Vec::with_capacity(r);
        for (k, pcs) in power_classes.iter().enumerate() {
            let o = orders[k];
            let zo = powmod(z, exponent / o, p);
            let oinv = invmod(o % p, p);
            let mut terms = Vec::new();
            let mut total = 0;
            for j in 0..o {
                let zj = powmod(zo, (o - j) % o, p);
                let mut s = 0;
                let mut zl = 1;
                for &c in pcs {
                    s = (s + chi_p[c] * zl) % p;
                    zl = zl * zj % p;
                }
                let m = s * oinv % p;
                if m > d {
                    return Err(ChartabError::Oracle(
                        "eigenvalue multiplicity out of range".into(),
                    ));
                }
                total += m;
                terms.push((j as u32, m as i64));
            }
            if total != d {
                return Err(ChartabError::Oracle(
                    "multiplicities do not add up to the degree".into(),
                ));
            }
            row.push(CycloNum::from_terms(o as u32, terms));
        }
        chars.push(row);
        degrees.push(d);
    }
    let mut idx: Vec<usize> = (0..r).collect();
    idx.sort_by_key(|&i| degrees[i]);
    Ok(DixonTable {
        chars: idx.iter().map(|&i| chars[i].clone()).collect(),
        degrees: idx.iter().map(|&i| degrees[i]).collect(),
        partition: part,
        reps,
        orders,
        prime: p,
    })
}

/// Result of matching oracle characters against table rows.
#[derive(Debug, Clone, Serialize)]
pub struct DixonMatch {
    /// `(table row, oracle row)` pairs.
    pub matched: Vec<(CharId, usize)>,
    pub unmatched_table: Vec<CharId>,
    pub unmatched_oracle: Vec<usize>,
    /// Oracle classes whose size disagrees with the table.
    pub size_mismatches: Vec<ClassLabel>,
}

impl DixonMatch {
    pub fn is_bijection(&self) -> bool {
        self.unmatched_table.is_empty()
            && self.unmatched_oracle.is_empty()
            && self.size_mismatches.is_empty()
    }
}

/// Matches the oracle's characters with the distinct irreducible rows of
/// `t`, after naming each oracle class by classifying its representative.
pub fn match_dixon(
    d: &DixonTable,
    t: &CharTable,
    rows: &[usize],
) -> Result<DixonMatch, ChartabError> {
    let cl = Classifier::new(t.q())?;
    let mut col_of = Vec::with_capacity(d.reps.len());
    let mut size_mismatches = Vec::new();
    for (k, g) in d.reps.iter().enumerate() {
        let l = cl.classify(g)?;
        let c = t
            .class_index(&l)
            .ok_or_else(|| ChartabError::Oracle(format!("oracle class {l} missing from table")))?;
        if let Some(sz) = t.class_sizes() {
            if sz[c] != d.partition.sizes[k] {
                size_mismatches.push(l.clone());
            }
        }
        col_of.push(c);
    }
    let mut used = vec![false; d.chars.len()];
    let mut matched = Vec::new();
    let mut unmatched_table = Vec::new();
    for &r in rows {
        let hit = (0..d.chars.len()).find(|&o| {
            !used[o] && (0..d.reps.len()).all(|k| d.chars[o][k] == t.values[r][col_of[k]])
        });
        match hit {
            Some(o) => {
                used[o] = true;
                matched.push((t.chars[r].clone(), o));
            }
            None => unmatched_table.push(t.chars[r].clone()),
        }
    }
    Ok(DixonMatch {
        matched,
        unmatched_table,
        unmatched_oracle: (0..used.len()).filter(|&o| !used[o]).collect(),
        size_mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_id_round_trip() {
        let c = CharId::parse(Scheme::Even, "chi_1(1,5)", 4).unwrap();
        assert_eq!(c.params, vec![1, 2]);
        assert_eq!(c.to_string(), "chi_1(1,2)");
        assert!(matches!(
            CharId::parse(Scheme::Even, "chi_14(1)", 4),
            Err(ChartabError::UnknownFamily(_))
        ));
        assert!(matches!(
            CharId::parse(Scheme::Odd, "X_1(1)", 3),
            Err(ChartabError::Arity { .. })
        ));
        assert_eq!(
            CharId::parse(Scheme::Odd, "custom:perm", 3)
                .unwrap()
                .to_string(),
            "custom:perm"
        );
    }

    #[test]
    fn family_counts() {
        assert_eq!(CharId::all(Scheme::Even, 4).len(), 119);
        assert_eq!(
            CharId::all(Scheme::Even, 2).len(),
            6 + 1 + 3 + 3 + 9 + 5 + 4 + 4 * 3
        );
    }

    #[test]
    fn builtin_examples() {
        let t = builtin_even(2).unwrap();
        let a1 = ClassLabel::even(Family::A1, &[]);
        let th0 = CharId::parse(Scheme::Even, "theta_0", 2).unwrap();
        assert!(t
            .classes()
            .iter()
            .all(|l| t.value(&th0, l) == Some(&CycloNum::one())));
        let chi2 = CharId::parse(Scheme::Even, "chi_2(1)", 2).unwrap();
        assert_eq!(t.value(&chi2, &a1).unwrap().as_integer().unwrap(), 15);
        let t4 = builtin_even(4).unwrap();
        let chi4 = CharId::parse(Scheme::Even, "chi_4(1,2)", 4).unwrap();
        let b4 = ClassLabel::even(Family::B4, &[1, 3]);
        let be = |x: i64| CycloNum::root_sum(5, x);
        assert_eq!(
            t4.value(&chi4, &b4).unwrap(),
            &(be(1) * be(6) + be(2) * be(3))
        );
        // lookups canonicalize: B_4(1,3) = B_4(4,2)
        assert_eq!(
            t4.value(&chi4, &ClassLabel::even(Family::B4, &[4, 2])),
            t4.value(&chi4, &b4)
        );
    }

    #[test]
    fn parameter_negation_symmetry() {
        let t = builtin_even(4).unwrap();
        for c in t.chars() {
            let neg = CharId {
                params: c
                    .params
                    .iter()
                    .zip(CharId::moduli(Scheme::Even, &c.family, 4).unwrap())
                    .map(|(&p, n)| (n - p) % n)
                    .collect(),
                ..c.clone()
            };
            for l in t.classes() {
                assert_eq!(t.value(c, l).unwrap().conj(), *t.value(&neg, l).unwrap());
            }
        }
    }

    const SAMPLE: &str = "scheme=odd q=3
# two characters, two classes
tau_2(0) C_0(2) [[0,5,1]]
tau_2(0) A_0(0) [[0,2,1]]
theta_0(1) C_0(6) [[0,-1,1]]
theta_0(1) A_0(0) [[0,1,1]]
";

    #[test]
    fn odd_loader_and_correction() {
        let on = parse_odd(SAMPLE, true).unwrap();
        let off = parse_odd(SAMPLE, false).unwrap();
        let tau = CharId::parse(Scheme::Odd, "tau_2(0)", 3).unwrap();
        let c0 = ClassLabel::odd(Family::C0, &[2]);
        assert_eq!(on.value(&tau, &c0).unwrap().as_integer().unwrap(), -5);
        assert_eq!(off.value(&tau, &c0).unwrap().as_integer().unwrap(), 5);
        let a0 = ClassLabel::odd(Family::A0, &[0]);
        assert_eq!(on.value(&tau, &a0).unwrap().as_integer().unwrap(), 2);
        assert_eq!(on.provenance().len(), 2);
        assert_eq!(off.provenance().len(), 1);
        // C_0(6) is C_0(2) after canonicalization
        assert_eq!(on.classes().len(), 2);
        let round = parse_odd(&write_odd(&on), false).unwrap();
        assert_eq!(round.value(&tau, &c0), on.value(&tau, &c0));
    }

    #[test]
    fn odd_loader_errors() {
        let missing = SAMPLE.replace("theta_0(1) C_0(6) [[0,-1,1]]\n", "");
        match parse_odd(&missing, true) {
            Err(ChartabError::MissingCell { label, .. }) => assert_eq!(label, "C_0(2)"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_odd("scheme=even q=3\n", true),
            Err(ChartabError::Schema { line: 1, .. })
        ));
        let bad = SAMPLE.replace("[[0,5,1]]", "five");
        assert!(matches!(
            parse_odd(&bad, true),
            Err(ChartabError::Schema {
                line: 3,
                column: "value",
                ..
            })
        ));
        let bad = SAMPLE.replace("C_0(2)", "Q_9");
        assert!(matches!(
            parse_odd(&bad, true),
            Err(ChartabError::Schema {
                column: "ClassLabel",
                ..
            })
        ));
    }

    #[test]
    fn dixon_on_cyclic_group_of_order_3() {
        let g = Gsp4::new(2).unwrap();
        let (o, l) = (g.field().zero(), g.field().one());
        let x = g.m_elem(o, l, l, l, l).unwrap();
        assert_eq!(g.order_of(&x), 3);
        let grp = g.enumerate_group(&[x], 100, Exec::Sequential).unwrap();
        assert_eq!(grp.len(), 3);
        let d = dixon_oracle(&grp, &[x], Exec::Sequential).unwrap();
        assert_eq!(d.degrees, vec![1, 1, 1]);
        let xc = grp
            .index_of(&x)
            .map(|i| d.partition.class_of[i] as usize)
            .unwrap();
        let mut vals: Vec<CycloNum> = d.chars.iter().map(|r| r[xc].clone()).collect();
        let want = [CycloNum::one(), CycloNum::root(3, 1), CycloNum::root(3, 2)];
        for w in &want {
            let i = vals
                .iter()
                .position(|v| v == w)
                .expect("character value present");
            vals.remove(i);
        }
    }

    #[test]
    fn dixon_cap() {
        let g = Gsp4::new(2).unwrap();
        let grp = g.enumerate_sp(Exec::Sequential).unwrap();
        assert!(matches!(
            dixon_oracle_capped(&grp, &g.sp_generators(), Exec::Sequential, 100),
            Err(ChartabError::CapExceeded {
                order: 720,
                cap: 100
            })
        ));
    }
}
