//! Fixed-vector dimensions and signatures per representation type, as data.
//!
//! Each row stores conductor conditions as linear constraints on exponents
//! `a(.) in {0, 1}`, and `dim`/`s` as integer polynomials in sign symbols
//! taking values `+-1`. Rows are written in a compact syntax:
//! conditions `"sigma=1; chi1+chi2=1"`, expressions `"1+2chi1"`,
//! `"sigma+chi1*sigma"`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::classlabel::Scheme;

/// Conductor exponent variables appearing in row conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conductor {
    Chi1,
    Chi2,
    Chi,
    Sigma,
    Xi,
    ChiSigma,
    Chi1Sigma,
    Chi2Sigma,
}

const CONDUCTORS: [(Conductor, &str, &str); 8] = [
    (Conductor::Chi1, "chi1", "a(chi_1)"),
    (Conductor::Chi2, "chi2", "a(chi_2)"),
    (Conductor::Chi, "chi", "a(chi)"),
    (Conductor::Sigma, "sigma", "a(sigma)"),
    (Conductor::Xi, "xi", "a(xi)"),
    (Conductor::ChiSigma, "chisigma", "a(chi sigma)"),
    (Conductor::Chi1Sigma, "chi1sigma", "a(chi_1 sigma)"),
    (Conductor::Chi2Sigma, "chi2sigma", "a(chi_2 sigma)"),
];

/// Sign inputs, each `+-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Chi1,
    Chi,
    Sigma,
    Xi,
    LambdaT,
    LambdaSigma2T,
    OmegaLambda,
    ThetaT,
    Omega,
}

const SIGNS: [(Sign, &str, &str); 9] = [
    (Sign::Chi1, "chi1", "chi_1(-1)"),
    (Sign::Chi, "chi", "chi(-1)"),
    (Sign::Sigma, "sigma", "sigma(-1)"),
    (Sign::Xi, "xi", "xi(-1)"),
    (Sign::LambdaT, "Lt", "Lambda(t)"),
    (Sign::LambdaSigma2T, "Ls2t", "Lambda sigma^2(t)"),
    (Sign::OmegaLambda, "wL", "omega_Lambda(-1)"),
    (Sign::ThetaT, "Tt", "Theta(t)"),
    (Sign::Omega, "w", "omega(-1)"),
];

macro_rules! named {
    ($t:ty, $table:ident) => {
        impl $t {
            pub fn short(self) -> &'static str {
                $table.iter().find(|e| e.0 == self).unwrap().1
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str($table.iter().find(|e| e.0 == *self).unwrap().2)
            }
        }
        impl FromStr for $t {
            type Err = RepError;
            fn from_str(s: &str) -> Result<Self, RepError> {
                let s = s.trim();
                $table
                    .iter()
                    .find(|e| e.1 == s || e.2 == s)
                    .map(|e| e.0)
                    .ok_or_else(|| RepError::Syntax(format!("unknown symbol '{s}'")))
            }
        }
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    };
}
named!(Conductor, CONDUCTORS);
named!(Sign, SIGNS);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepError {
    #[error("syntax: {0}")]
    Syntax(String),
    #[error("no row of type '{0}'")]
    UnknownType(String),
    #[error("no branch of '{key}' matches {conds}")]
    NoBranch { key: String, conds: String },
    #[error("{n} branches of '{key}' match {conds}")]
    Ambiguous {
        key: String,
        conds: String,
        n: usize,
    },
    #[error("sign {0} not supplied")]
    MissingSign(Sign),
    #[error("sign {0} must be +1 or -1, got {1}")]
    BadSign(Sign, i64),
}

/// Integer polynomial in sign symbols. Monomials are sorted, squarefree
/// symbol sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr(Vec<(i64, Vec<Sign>)>);

impl Expr {
    pub fn signs(&self) -> BTreeSet<Sign> {
        self.0.iter().flat_map(|(_, m)| m.iter().copied()).collect()
    }

    pub fn eval(&self, signs: &BTreeMap<Sign, i64>) -> Result<i64, RepError> {
        let mut acc = 0;
        for (c, m) in &self.0 {
            let mut v = *c;
            for s in m {
                let x = *signs.get(s).ok_or(RepError::MissingSign(*s))?;
                if x != 1 && x != -1 {
                    return Err(RepError::BadSign(*s, x));
                }
                v *= x;
            }
            acc += v;
        }
        Ok(acc)
    }
}

impl FromStr for Expr {
    type Err = RepError;
    fn from_str(s: &str) -> Result<Self, RepError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms: BTreeMap<Vec<Sign>, i64> = BTreeMap::new();
        let mut rest = s.as_str();
        if rest.is_empty() {
            return Err(RepError::Syntax("empty expression".into()));
        }
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'-' => (-1, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            let digits = term
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(term.len());
            let coeff: i64 = if digits == 0 {
                1
            } else {
                term[..digits]
                    .parse()
                    .map_err(|_| RepError::Syntax(term.into()))?
            };
            let mut mono = Vec::new();
            let syms = term[digits..].trim_start_matches('*');
            if !syms.is_empty() {
                for name in syms.split('*') {
                    let sg: Sign = name.parse()?;
                    // s^2 = 1
                    match mono.iter().position(|&x| x == sg) {
                        Some(i) => {
                            mono.remove(i);
                        }
                        None => mono.push(sg),
                    }
                }
            } else if digits == 0 {
                return Err(RepError::Syntax(format!("empty term in '{s}'")));
            }
            mono.sort();
            *terms.entry(mono).or_default() += sign * coeff;
        }
        Ok(Expr(
            terms
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(m, c)| (c, m))
                .collect(),
        ))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, m)) in self.0.iter().enumerate() {
            let a = c.abs();
            match (i, *c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_empty() || a != 1 {
                write!(f, "{a}")?;
            }
            for s in m {
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `sum of a(vars) = value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub vars: Vec<Conductor>,
    pub value: u8,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<String> = self.vars.iter().map(|v| v.to_string()).collect();
        write!(f, "{}={}", lhs.join("+"), self.value)
    }
}

pub fn parse_constraints(s: &str) -> Result<Vec<Constraint>, RepError> {
    let mut out = Vec::new();
    for part in s.split([';', ',']).map(str::trim).filter(|p| !p.is_empty()) {
        let (lhs, rhs) = part
            .split_once('=')
            .ok_or_else(|| RepError::Syntax(format!("missing '=' in '{part}'")))?;
        let value: u8 = rhs
            .trim()
            .parse()
            .map_err(|_| RepError::Syntax(part.into()))?;
        let vars = lhs
            .split('+')
            .map(str::parse)
            .collect::<Result<Vec<Conductor>, _>>()?;
        out.push(Constraint { vars, value });
    }
    Ok(out)
}

/// Parses `"chi=1,sigma=0"` into an assignment of conductor exponents.
pub fn parse_assignment(s: &str) -> Result<BTreeMap<Conductor, u8>, RepError> {
    let mut out = BTreeMap::new();
    for c in parse_constraints(s)? {
        match c.vars.as_slice() {
            [v] if c.value <= 1 => {
                out.insert(*v, c.value);
            }
            _ => return Err(RepError::Syntax(format!("'{c}' is not a single exponent"))),
        }
    }
    Ok(out)
}

/// Parses `"Lt=-1,sigma=1"` into sign values.
pub fn parse_signs(s: &str) -> Result<BTreeMap<Sign, i64>, RepError> {
    let mut out = BTreeMap::new();
    for part in s.split([';', ',']).map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| RepError::Syntax(format!("missing '=' in '{part}'")))?;
        let sg: Sign = k.parse()?;
        let v: i64 = v
            .trim()
            .parse()
            .map_err(|_| RepError::Syntax(part.into()))?;
        out.insert(sg, v);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RepRow {
    pub scheme: Scheme,
    /// `I`, `IIa`, ..., `XIb`, or `s.c.`
    #[serde(rename = "type")]
    pub tag: &'static str,
    /// Lookup key: the type tag, or `sc:<inducing character>` for supercuspidals.
    pub key: &'static str,
    pub pi: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub central: Option<&'static str>,
    #[serde(serialize_with = "ser_conds")]
    pub conditions: Vec<Constraint>,
    pub dim: Expr,
    pub s: Expr,
}

fn ser_conds<S: Serializer>(c: &[Constraint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(c.iter().map(|x| x.to_string()))
}

impl RepRow {
    pub fn signs(&self) -> BTreeSet<Sign> {
        let mut s = self.dim.signs();
        s.extend(self.s.signs());
        s
    }

    /// All constrained variables are assigned and every constraint holds.
    pub fn matches(&self, a: &BTreeMap<Conductor, u8>) -> bool {
        self.conditions.iter().all(|c| {
            let mut sum = 0;
            for v in &c.vars {
                match a.get(v) {
                    Some(x) => sum += *x,
                    None => return false,
                }
            }
            sum == c.value
        })
    }

    pub fn eval(&self, signs: &BTreeMap<Sign, i64>) -> Result<(i64, i64), RepError> {
        Ok((self.dim.eval(signs)?, self.s.eval(signs)?))
    }

    pub fn condition_text(&self) -> String {
        let v: Vec<String> = self.conditions.iter().map(|c| c.to_string()).collect();
        v.join(", ")
    }
}

type Raw = (
    &'static str,
    &'static str,
    &'static str,
    Option<&'static str>,
    &'static str,
    &'static str,
    &'static str,
);

#[rustfmt::skip]
const EVEN: &[Raw] = &[
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", None, "chi1=0; chi2=0", "12", "4"),
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", None, "chi1+chi2=1", "4", "2"),
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", None, "chi1=1; chi2=1; sigma+chi1sigma=1; sigma+chi2sigma=1", "3", "3"),
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", None, "chi1=1; chi2=1; sigma=1; chi1sigma=1; chi2sigma=1", "2", "2"),
    ("IIa", "IIa", "chi St_GL(2) ⋊ sigma", None, "chi=0", "5", "1"),
    ("IIa", "IIa", "chi St_GL(2) ⋊ sigma", None, "chi=1", "1", "1"),
    ("IIb", "IIb", "chi 1_GL(2) ⋊ sigma", None, "chi=0", "7", "3"),
    ("IIb", "IIb", "chi 1_GL(2) ⋊ sigma", None, "chi=1", "2", "2"),
    ("IIIa", "IIIa", "chi ⋊ sigma St_GL(2)", None, "chi=0", "8", "2"),
    ("IIIa", "IIIa", "chi ⋊ sigma St_GL(2)", None, "chi=1", "3", "1"),
    ("IIIb", "IIIb", "chi ⋊ sigma 1_GL(2)", None, "chi=0", "4", "2"),
    ("IIIb", "IIIb", "chi ⋊ sigma 1_GL(2)", None, "chi=1", "1", "1"),
    ("IVa", "IVa", "sigma St_G", None, "sigma=0", "2", "0"),
    ("IVb", "IVb", "L(nu^2, nu^-1 sigma St_GSp(2))", None, "sigma=0", "6", "2"),
    ("IVc", "IVc", "L(nu^3/2 St_GL(2), nu^-3/2 sigma)", None, "sigma=0", "3", "1"),
    ("IVd", "IVd", "sigma 1_G", None, "sigma=0", "1", "1"),
    ("Va", "Va", "delta([xi, nu xi], nu^-1/2 sigma)", None, "sigma=0", "2", "0"),
    ("Vb", "Vb", "L(nu^1/2 xi St_GL(2), nu^-1/2 sigma)", None, "sigma=0", "3", "1"),
    ("Vc", "Vc", "L(nu^1/2 xi St_GL(2), nu^-1/2 xi sigma)", None, "sigma=0", "3", "1"),
    ("Vd", "Vd", "L(nu xi, xi ⋊ nu^-1/2 sigma)", None, "sigma=0", "4", "2"),
    ("VIa", "VIa", "tau(S, nu^-1/2 sigma)", None, "sigma=0", "5", "1"),
    ("VIb", "VIb", "tau(T, nu^-1/2 sigma)", None, "sigma=0", "3", "1"),
    ("VIc", "VIc", "L(nu^1/2 St_GL(2), nu^-1/2 sigma)", None, "sigma=0", "0", "0"),
    ("VId", "VId", "L(nu, 1_F^x ⋊ nu^-1/2 sigma)", None, "sigma=0", "4", "2"),
    ("VII", "VII", "chi ⋊ rho", None, "chi=0", "4", "0"),
    ("VII", "VII", "chi ⋊ rho", None, "chi=1", "2", "0"),
    ("VIIIa", "VIIIa", "tau(S, rho)", None, "", "3", "-1"),
    ("VIIIb", "VIIIb", "tau(T, rho)", None, "", "1", "1"),
    ("IXa", "IXa", "delta(nu xi, nu^-1/2 rho)", None, "", "3", "-1"),
    ("IXb", "IXb", "L(nu xi, nu^-1/2 rho)", None, "", "1", "1"),
    ("X", "X", "rho ⋊ sigma", None, "sigma=0", "1", "-1"),
    ("X", "X", "rho ⋊ sigma", None, "sigma=1", "0", "0"),
    ("XIa", "XIa", "delta(nu^1/2 rho, nu^-1/2 sigma)", None, "sigma=0", "1", "-1"),
    ("XIb", "XIb", "L(nu^1/2 rho, nu^-1/2 sigma)", None, "sigma=0", "0", "0"),
    ("s.c.", "sc:chi_5", "c-Ind_ZK^G chi_5(k)", None, "", "0", "0"),
    ("s.c.", "sc:chi_4", "c-Ind_ZK^G chi_4(k,l)", None, "", "2", "-2"),
    ("s.c.", "sc:theta_5", "c-Ind_ZK^G theta_5", None, "", "0", "0"),
];

#[rustfmt::skip]
const ODD: &[Raw] = &[
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", Some("chi_1 chi_2 sigma^2"), "sigma=0; chi1=0; chi2=0", "12", "4"),
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", Some("chi_1 chi_2 sigma^2"), "sigma=1; chi1=0; chi2=0", "6", "2sigma"),
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", Some("chi_1 chi_2 sigma^2"), "sigma=1; chi1+chi2=1", "4", "2sigma"),
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", Some("chi_1 chi_2 sigma^2"), "chi1=1; chi2=1; sigma+chi1sigma=1; sigma+chi2sigma=1", "2+chi1", "1+2chi1"),
    ("I", "I", "chi_1 x chi_2 ⋊ sigma", Some("chi_1 chi_2 sigma^2"), "chi1=1; chi2=1; sigma=1; chi1sigma=1; chi2sigma=1", "1+chi1", "sigma+chi1*sigma"),
    ("IIa", "IIa", "chi St_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=0; chi=0", "5", "1"),
    ("IIa", "IIa", "chi St_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=0; chi=1", "2+chi", "1+2chi"),
    ("IIa", "IIa", "chi St_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=1; chi=0", "4", "2sigma"),
    ("IIa", "IIa", "chi St_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=1; chi=1; chisigma=0", "1", "sigma"),
    ("IIa", "IIa", "chi St_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=1; chi=1; chisigma=1", "1+chi", "sigma+chi*sigma"),
    ("IIb", "IIb", "chi 1_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=0; chi=0", "7", "3"),
    ("IIb", "IIb", "chi 1_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=0; chi=1", "0", "0"),
    ("IIb", "IIb", "chi 1_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=1; chi=0", "2", "0"),
    ("IIb", "IIb", "chi 1_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=1; chi=1; chisigma=0", "1+chi", "1+chi"),
    ("IIb", "IIb", "chi 1_GL(2) ⋊ sigma", Some("chi^2 sigma^2"), "sigma=1; chi=1; chisigma=1", "0", "0"),
    ("IIIa", "IIIa", "chi ⋊ sigma St", Some("chi sigma^2"), "sigma=0; chi=0", "8", "2"),
    ("IIIa", "IIIa", "chi ⋊ sigma St", Some("chi sigma^2"), "sigma=1; chi=0", "5", "sigma"),
    ("IIIa", "IIIa", "chi ⋊ sigma St", Some("chi sigma^2"), "sigma=1; chi=1", "3", "sigma"),
    ("IIIb", "IIIb", "chi ⋊ sigma 1", Some("chi sigma^2"), "sigma=0", "4", "2"),
    ("IIIb", "IIIb", "chi ⋊ sigma 1", Some("chi sigma^2"), "sigma=1", "1", "sigma"),
    ("IVa", "IVa", "sigma St_G", Some("sigma^2"), "sigma=0", "2", "0"),
    ("IVa", "IVa", "sigma St_G", Some("sigma^2"), "sigma=1", "3", "sigma"),
    ("IVb", "IVb", "L(nu^2, nu^-1 sigma St_GSp(2))", Some("sigma^2"), "sigma=0", "6", "2"),
    ("IVb", "IVb", "L(nu^2, nu^-1 sigma St_GSp(2))", Some("sigma^2"), "sigma=1", "2", "0"),
    ("IVc", "IVc", "L(nu^3/2 St_GL(2), nu^-3/2 sigma)", Some("sigma^2"), "sigma=0", "3", "1"),
    ("IVc", "IVc", "L(nu^3/2 St_GL(2), nu^-3/2 sigma)", Some("sigma^2"), "sigma=1", "1", "sigma"),
    ("IVd", "IVd", "sigma 1_G", Some("sigma^2"), "sigma=0", "1", "1"),
    ("IVd", "IVd", "sigma 1_G", Some("sigma^2"), "sigma=1", "0", "0"),
    ("Va", "Va", "delta([xi, nu xi], nu^-1/2 sigma)", Some("sigma^2"), "xi=0; sigma=0", "2", "0"),
    ("Va", "Va", "delta([xi, nu xi], nu^-1/2 sigma)", Some("sigma^2"), "xi=0; sigma=1", "3", "sigma"),
    ("Va", "Va", "delta([xi, nu xi], nu^-1/2 sigma)", Some("sigma^2"), "xi=1", "1", "xi"),
    ("Vb", "Vb", "L(nu^1/2 xi St_GL(2), nu^-1/2 sigma)", Some("sigma^2"), "xi=0; sigma=0", "3", "1"),
    ("Vb", "Vb", "L(nu^1/2 xi St_GL(2), nu^-1/2 sigma)", Some("sigma^2"), "xi=0; sigma=1", "1", "sigma"),
    ("Vb", "Vb", "L(nu^1/2 xi St_GL(2), nu^-1/2 sigma)", Some("sigma^2"), "xi=1; sigma=0", "1+xi", "1+xi"),
    ("Vb", "Vb", "L(nu^1/2 xi St_GL(2), nu^-1/2 sigma)", Some("sigma^2"), "xi=1; sigma=1", "0", "0"),
    ("Vc", "Vc", "L(nu^1/2 xi St_GL(2), nu^-1/2 xi sigma)", Some("sigma^2"), "xi=0; sigma=0", "3", "1"),
    ("Vc", "Vc", "L(nu^1/2 xi St_GL(2), nu^-1/2 xi sigma)", Some("sigma^2"), "xi=0; sigma=1", "1", "sigma"),
    ("Vc", "Vc", "L(nu^1/2 xi St_GL(2), nu^-1/2 xi sigma)", Some("sigma^2"), "xi=1; sigma=0", "0", "0"),
    ("Vc", "Vc", "L(nu^1/2 xi St_GL(2), nu^-1/2 xi sigma)", Some("sigma^2"), "xi=1; sigma=1", "1+sigma", "1+sigma"),
    ("Vd", "Vd", "L(nu xi, xi ⋊ nu^-1/2 sigma)", Some("sigma^2"), "xi=0; sigma=0", "4", "2"),
    ("Vd", "Vd", "L(nu xi, xi ⋊ nu^-1/2 sigma)", Some("sigma^2"), "xi=0; sigma=1", "1", "sigma"),
    ("Vd", "Vd", "L(nu xi, xi ⋊ nu^-1/2 sigma)", Some("sigma^2"), "xi=1", "0", "0"),
    ("VIa", "VIa", "tau(S, nu^-1/2 sigma)", Some("sigma^2"), "sigma=0", "5", "1"),
    ("VIa", "VIa", "tau(S, nu^-1/2 sigma)", Some("sigma^2"), "sigma=1", "4", "2sigma"),
    ("VIb", "VIb", "tau(T, nu^-1/2 sigma)", Some("sigma^2"), "sigma=0", "3", "1"),
    ("VIb", "VIb", "tau(T, nu^-1/2 sigma)", Some("sigma^2"), "sigma=1", "1", "-sigma"),
    ("VIc", "VIc", "L(nu^1/2 St_GL(2), nu^-1/2 sigma)", Some("sigma^2"), "", "0", "0"),
    ("VId", "VId", "L(nu, 1_F^x ⋊ nu^-1/2 sigma)", None, "sigma=0", "4", "2"),
    ("VId", "VId", "L(nu, 1_F^x ⋊ nu^-1/2 sigma)", None, "sigma=1", "1", "sigma"),
    ("VII", "VII", "chi ⋊ rho", Some("chi omega_rho"), "chi=0", "4", "0"),
    ("VII", "VII", "chi ⋊ rho", Some("chi omega_rho"), "chi=1", "1+chi", "0"),
    ("VIIIa", "VIIIa", "tau(S, rho)", Some("omega_rho"), "", "3", "-Lt"),
    ("VIIIb", "VIIIb", "tau(T, rho)", Some("omega_rho"), "", "1", "Lt"),
    ("IXa", "IXa", "delta(nu xi, nu^-1/2 rho)", Some("xi omega_rho"), "xi=0", "3", "-Lt"),
    ("IXa", "IXa", "delta(nu xi, nu^-1/2 rho)", Some("xi omega_rho"), "xi=1", "0", "0"),
    ("IXb", "IXb", "L(nu xi, nu^-1/2 rho)", Some("xi omega_rho"), "xi=0", "1", "-Lt"),
    ("IXb", "IXb", "L(nu xi, nu^-1/2 rho)", Some("xi omega_rho"), "xi=1", "0", "0"),
    ("X", "X", "rho ⋊ sigma", Some("omega_rho sigma^2"), "sigma=0", "2-Lt", "1-2Lt"),
    ("X", "X", "rho ⋊ sigma", Some("omega_rho sigma^2"), "sigma=1", "1-Ls2t", "sigma-sigma*Ls2t"),
    ("XIa", "XIa", "delta(nu^1/2 rho, nu^-1/2 sigma)", Some("sigma^2"), "sigma=0", "1", "-wL"),
    ("XIa", "XIa", "delta(nu^1/2 rho, nu^-1/2 sigma)", Some("sigma^2"), "sigma=1", "1+wL", "sigma+sigma*wL"),
    ("XIb", "XIb", "L(nu^1/2 rho, nu^-1/2 sigma)", Some("sigma^2"), "sigma=0", "1-wL", "1-wL"),
    ("XIb", "XIb", "L(nu^1/2 rho, nu^-1/2 sigma)", Some("sigma^2"), "sigma=1", "0", "0"),
    ("s.c.", "sc:X_4", "c-Ind_ZK^G X_4(Theta)", Some("Theta~"), "", "1-Tt", "0"),
    ("s.c.", "sc:X_5", "c-Ind_ZK^G X_5(Lambda, omega)", Some("Lambda~"), "", "1+w", "-Lt-Lt*w"),
    ("s.c.", "sc:theta_2", "c-Ind_ZK^G theta_2", Some("1"), "", "0", "0"),
];

fn build(scheme: Scheme, raw: &[Raw]) -> Vec<RepRow> {
    raw.iter()
        .map(|&(tag, key, pi, central, cond, dim, s)| RepRow {
            scheme,
            tag,
            key,
            pi,
            central,
            conditions: parse_constraints(cond).expect("table condition"),
            dim: dim.parse().expect("table expression"),
            s: s.parse().expect("table expression"),
        })
        .collect()
}

/// All rows for one parity of `q`.
pub fn rows(scheme: Scheme) -> &'static [RepRow] {
    static EVEN_ROWS: OnceLock<Vec<RepRow>> = OnceLock::new();
    static ODD_ROWS: OnceLock<Vec<RepRow>> = OnceLock::new();
    match scheme {
        Scheme::Even => EVEN_ROWS.get_or_init(|| build(Scheme::Even, EVEN)),
        Scheme::Odd => ODD_ROWS.get_or_init(|| build(Scheme::Odd, ODD)),
    }
}

pub fn keys(scheme: Scheme) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = Vec::new();
    for r in rows(scheme) {
        if !out.contains(&r.key) {
            out.push(r.key);
        }
    }
    out
}

/// The unique branch of `key` whose conditions hold under `conds`.
pub fn find_row(
    scheme: Scheme,
    key: &str,
    conds: &BTreeMap<Conductor, u8>,
) -> Result<&'static RepRow, RepError> {
    let all: Vec<&RepRow> = rows(scheme).iter().filter(|r| r.key == key).collect();
    if all.is_empty() {
        return Err(RepError::UnknownType(key.into()));
    }
    let hits: Vec<&RepRow> = all.into_iter().filter(|r| r.matches(conds)).collect();
    let text = || {
        let v: Vec<String> = conds.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{{{}}}", v.join(", "))
    };
    match hits.as_slice() {
        [r] => Ok(r),
        [] => Err(RepError::NoBranch {
            key: key.into(),
            conds: text(),
        }),
        _ => Err(RepError::Ambiguous {
            key: key.into(),
            conds: text(),
            n: hits.len(),
        }),
    }
}

pub fn lookup(
    scheme: Scheme,
    key: &str,
    conds: &BTreeMap<Conductor, u8>,
    signs: &BTreeMap<Sign, i64>,
) -> Result<(i64, i64), RepError> {
    find_row(scheme, key, conds)?.eval(signs)
}

/// Every assignment of `+-1` to the signs of `row`, with its `(dim, s)`.
pub fn sweep(row: &RepRow) -> Vec<(BTreeMap<Sign, i64>, i64, i64)> {
    let syms: Vec<Sign> = row.signs().into_iter().collect();
    (0..1u32 << syms.len())
        .map(|mask| {
            let a: BTreeMap<Sign, i64> = syms
                .iter()
                .enumerate()
                .map(|(i, s)| (*s, if mask >> i & 1 == 1 { -1 } else { 1 }))
                .collect();
            let (d, s) = row.eval(&a).expect("all signs assigned");
            (a, d, s)
        })
        .collect()
}

pub const ALLOWED_DIMS: [i64; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 12];

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub scheme: Scheme,
    pub key: &'static str,
    pub condition: String,
    pub signs: BTreeMap<Sign, i64>,
    pub dim: i64,
    pub s: i64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    pub rows: usize,
    pub assignments: usize,
    pub achieved: BTreeSet<i64>,
    pub violations: Vec<Violation>,
}

impl CorollaryReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn corollary_check() -> CorollaryReport {
    let mut rep = CorollaryReport {
        rows: 0,
        assignments: 0,
        achieved: BTreeSet::new(),
        violations: Vec::new(),
    };
    for scheme in [Scheme::Even, Scheme::Odd] {
        for row in rows(scheme) {
            rep.rows += 1;
            for (signs, dim, s) in sweep(row) {
                rep.assignments += 1;
                rep.achieved.insert(dim);
                let reason = if !ALLOWED_DIMS.contains(&dim) {
                    Some("dimension outside allowed set")
                } else if s.abs() > dim {
                    Some("|s| > dim")
                } else if (dim - s).rem_euclid(2) != 0 {
                    Some("s and dim differ in parity")
                } else {
                    None
                };
                if let Some(reason) = reason {
                    rep.violations.push(Violation {
                        scheme,
                        key: row.key,
                        condition: row.condition_text(),
                        signs,
                        dim,
                        s,
                        reason,
                    });
                }
            }
        }
    }
    rep
}

/// Rows of both schemes as JSON.
pub fn export_json() -> serde_json::Value {
    serde_json::json!({
        "even": rows(Scheme::Even),
        "odd": rows(Scheme::Odd),
    })
}
