//! Fixed-vector dimensions and involution signatures at the finite level.
//!
//! For a class function `chi` with trivial central character,
//! `dim V^H = |M|^{-1} sum_{m in M} chi(m)` and `s = |M|^{-1} sum chi(mu)`.
//! Grouping `M` and `Mu` by conjugacy class gives the weighted sums of
//! [`crate::classlabel::formula_terms`]; this module evaluates them against a
//! [`CharTable`], evaluates the closed forms tabulated per family, and
//! recomputes both averages by brute force.
//!
//! Character values in the odd closed forms come from exponents: with `xi`
//! the fixed generator of `F_q^x`, a character of `F_q^x` with exponent `k`
//! sends `xi` to `zeta_{q-1}^k`, hence `-1 = xi^{(q-1)/2}` to `(-1)^k`. For
//! `Lambda` on `F_{q^2}^x` (exponent `k` relative to the generator `g` with
//! `g^{q+1} = xi`), `xi^{1/2} = g^{(q+1)/2}` gives
//! `Lambda(xi^{1/2}) = zeta_{2(q-1)}^k` and `Lambda|_{F_q^x}` has exponent
//! `k mod q-1`. `omega` on the norm-one subgroup `<g^{q-1}>` sends
//! `-1 = (g^{q-1})^{(q+1)/2}` to `(-1)^k`, and `omega~ = omega(x^{q-1})` has
//! exponent `k(q-1)` on `F_{q^2}^x`. `Theta` lives on the subgroup of order
//! `(q-1)(q^2+1)` of `F_{q^4}^x`, which contains `xi^{1/2}` as the
//! `(q^2+1)/2`-th power of its generator, so `Theta(xi^{1/2})` is again
//! `zeta_{2(q-1)}^k`.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::chartab::{CharFamily, CharId, CharTable, ChartabError};
use crate::classlabel::{divisor, formula_terms, ClassifyError, Formula, FormulaTerm, Scheme};
use crate::cyclo::{CycloError, CycloNum};
use crate::gsp4core::GroupElem;
use crate::par::Exec;

/// Dimension of the `M`-fixed vectors and signature of `u` for one
/// (virtual) character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixvecRow {
    #[serde(rename = "char")]
    pub char_id: CharId,
    #[serde(rename = "M")]
    pub m: i64,
    pub s: i64,
}

#[derive(Debug, Error)]
pub enum FixvecError {
    #[error("{char}: numerator {numerator} is not divisible by {divisor}")]
    NonIntegral {
        char: String,
        numerator: String,
        divisor: i64,
    },
    #[error("{0} has nontrivial central character")]
    NontrivialCentral(String),
    #[error("{0} does not match the parity of q")]
    WrongScheme(String),
    #[error("{0} has no closed form")]
    NoClosedForm(String),
    #[error(transparent)]
    Table(#[from] ChartabError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

/// Right-hand side of a formula: `sum weight * chi(label)`.
pub fn numerator(
    terms: &[FormulaTerm],
    c: &CharId,
    t: &CharTable,
) -> Result<CycloNum, FixvecError> {
    let mut acc = CycloNum::zero();
    for term in terms.iter().filter(|t| t.weight != 0) {
        acc = acc + t.try_value(c, &term.label)?.scale(term.weight);
    }
    Ok(acc)
}

fn divide(c: &CharId, num: &CycloNum, d: i64) -> Result<i64, FixvecError> {
    let non = || FixvecError::NonIntegral {
        char: c.to_string(),
        numerator: num.to_string(),
        divisor: d,
    };
    let n = num.as_integer().map_err(|_| non())?;
    if n % d != 0 {
        return Err(non());
    }
    Ok(n / d)
}

fn evaluate(
    q: u32,
    which: Formula,
    c: &CharId,
    t: &CharTable,
    scheme: Scheme,
) -> Result<i64, FixvecError> {
    if Scheme::of_q(q) != scheme || t.scheme() != scheme || t.q() != q {
        return Err(FixvecError::WrongScheme(c.to_string()));
    }
    let terms = formula_terms(q, which)?;
    divide(c, &numerator(&terms, c, t)?, divisor(q, which))
}

pub fn dim_even(q: u32, c: &CharId, t: &CharTable) -> Result<i64, FixvecError> {
    evaluate(q, Formula::Dim, c, t, Scheme::Even)
}

pub fn sig_even(q: u32, c: &CharId, t: &CharTable) -> Result<i64, FixvecError> {
    evaluate(q, Formula::Sig, c, t, Scheme::Even)
}

pub fn dim_odd(q: u32, c: &CharId, t: &CharTable) -> Result<i64, FixvecError> {
    evaluate(q, Formula::Dim, c, t, Scheme::Odd)
}

pub fn sig_odd(q: u32, c: &CharId, t: &CharTable) -> Result<i64, FixvecError> {
    evaluate(q, Formula::Sig, c, t, Scheme::Odd)
}

/// Both formulas for every character of `t`, in table order. Rows whose
/// evaluation fails carry the error.
pub fn formula_rows(
    t: &CharTable,
    exec: Exec,
) -> Result<Vec<Result<FixvecRow, FixvecError>>, FixvecError> {
    let q = t.q();
    let dt = formula_terms(q, Formula::Dim)?;
    let st = formula_terms(q, Formula::Sig)?;
    let (dd, sd) = (divisor(q, Formula::Dim), divisor(q, Formula::Sig));
    Ok(exec.map(t.chars(), |c| {
        Ok(FixvecRow {
            char_id: c.clone(),
            m: divide(c, &numerator(&dt, c, t)?, dd)?,
            s: divide(c, &numerator(&st, c, t)?, sd)?,
        })
    }))
}

/// Closed form for `q` even, with every parameter reduced mod its modulus.
pub fn closed_form_even(q: u32, c: &CharId) -> Result<FixvecRow, FixvecError> {
    if c.scheme != Scheme::Even {
        return Err(FixvecError::WrongScheme(c.to_string()));
    }
    let d = |a: i64, b: i64, n: u32| i64::from((a - b).rem_euclid(n as i64) == 0);
    let (q1, qp, q2m) = (q - 1, q + 1, q * q - 1);
    let p = |i: usize| c.params[i] as i64;
    let qi = q as i64;
    let (m, s) = match c.family {
        CharFamily::Theta(0) => (1, 1),
        CharFamily::Theta(1) | CharFamily::Theta(2) => (3, 1),
        CharFamily::Theta(3) | CharFamily::Theta(5) => (0, 0),
        CharFamily::Theta(4) => (2, 0),
        CharFamily::Chi(1) => {
            let (k, l) = (p(0), p(1));
            let z = d(k, 0, q1) + d(l, 0, q1);
            let e = d(k, l, q1) + d(k, -l, q1);
            (2 + 2 * z * z + e, 2 + e)
        }
        CharFamily::Chi(2) => {
            let k = p(0);
            let a = d((qi + 1) * k, 0, q2m);
            let b = d((qi - 1) * k, 0, q2m);
            (a - b - 2 * d(k, 0, q2m), -a - b)
        }
        CharFamily::Chi(3) => (2 + 2 * d(p(0), 0, q1), 0),
        CharFamily::Chi(4) => {
            let e = d(p(0), p(1), qp) + d(p(0), -p(1), qp);
            (2 - e, -2 + e)
        }
        CharFamily::Chi(5) => (0, 0),
        CharFamily::Chi(i) => {
            let n = if matches!(i, 6 | 7 | 10 | 11) { q1 } else { qp };
            let z = d(p(0), 0, n);
            match i {
                6 => (2 + 5 * z, 2 + z),
                7 => (1 + 3 * z, 1 + z),
                8 => (-z, -z),
                9 => (1 + z, 1 - z),
                10 => (1 + 4 * z, 1),
                11 => (3 + 5 * z, 1 + z),
                12 => (1 - 2 * z, -1),
                13 => (3 - z, -1 + z),
                _ => return Err(FixvecError::NoClosedForm(c.to_string())),
            }
        }
        _ => return Err(FixvecError::NoClosedForm(c.to_string())),
    };
    Ok(FixvecRow {
        char_id: c.clone(),
        m,
        s,
    })
}

/// Exponent on `F_q^x` (relative to `xi`) of the central character.
pub fn central_exponent(q: u32, c: &CharId) -> Result<u32, FixvecError> {
    let n = q - 1;
    let p = |i: usize| c.params[i];
    Ok(match &c.family {
        CharFamily::X(1) => p(0) + p(1) + 2 * p(2),
        CharFamily::X(2) => 2 * p(1) + p(0),
        CharFamily::X(3) => p(1) + p(0),
        CharFamily::X(4) | CharFamily::X(5) => p(0),
        CharFamily::Chi(1) | CharFamily::Chi(2) => p(0) + 2 * p(1),
        CharFamily::Chi(3) | CharFamily::Chi(4) => 2 * p(0) + 2 * p(1),
        CharFamily::Chi(5) | CharFamily::Chi(6) => 2 * p(1),
        CharFamily::Chi(7) | CharFamily::Chi(8) => p(0),
        CharFamily::Tau(1) | CharFamily::Tau(3) => 0,
        CharFamily::Tau(2) => 2 * p(0),
        CharFamily::Tau(4) | CharFamily::Tau(5) => p(0),
        CharFamily::Theta(_) => 2 * p(0),
        _ => return Err(FixvecError::NoClosedForm(c.to_string())),
    } % n)
}

/// Closed form for `q` odd. Only defined for trivial central character.
pub fn closed_form_odd(q: u32, c: &CharId) -> Result<FixvecRow, FixvecError> {
    if c.scheme != Scheme::Odd {
        return Err(FixvecError::WrongScheme(c.to_string()));
    }
    if central_exponent(q, c)? != 0 {
        return Err(FixvecError::NontrivialCentral(c.to_string()));
    }
    let n1 = q - 1;
    let n2 = q * q - 1;
    let h = (q - 1) / 2;
    let p = |i: usize| c.params[i];
    let one = CycloNum::one;
    let int = |x: i64| CycloNum::from_int(x);
    let dl = |a: u32, b: u32, n: u32| int(i64::from((a + n - b % n).is_multiple_of(n)));
    let sign = |k: u32| int(if k.is_multiple_of(2) { 1 } else { -1 });
    // chi(-1) for a character of F_q^x with exponent k
    let at_m1 = |k: u32| sign(k * h);
    let a0 = at_m1(h);
    // Lambda(xi^{1/2}), Theta(xi^{1/2})
    let at_sqrt = |k: u32| CycloNum::root(2 * n1, k as i64);
    let at_xi = |k: u32| CycloNum::root(n1, k as i64);
    let (m, s): (CycloNum, CycloNum) = match &c.family {
        CharFamily::X(1) => {
            let (l, mu, nu) = (p(0), p(1), p(2));
            let (dn, dln) = (dl(nu, 0, n1), dl(l + nu, 0, n1));
            let (dlam, dmu) = (dl(l, 0, n1), dl(mu, 0, n1));
            let m =
                one() + at_m1(l) + &dn + &dln + (&dlam + &dmu).scale(2) + (&dlam * &dn).scale(4);
            let s = at_m1(nu) * (one() + &dln) + at_m1(l + nu) * (one() + &dn);
            (m, s)
        }
        CharFamily::X(2) => {
            let (lam, nu) = (p(0), p(1));
            let dn = dl(nu, 0, n1);
            let dln = dl(lam + nu * (q + 1), 0, n2);
            let dlam = dl(lam, 0, n2);
            let t = at_sqrt(lam) * at_xi(nu);
            let m = one() - &t + &dn - &dln - (&dn * &dlam).scale(2);
            let s = at_m1(nu) * (one() - &t * (one() + &dn) - &dln);
            (m, s)
        }
        CharFamily::X(3) => {
            let nu = p(1);
            (one() + at_m1(nu) + dl(nu, 0, n1).scale(2), int(0))
        }
        CharFamily::X(4) => (one() - at_sqrt(p(0)), int(0)),
        CharFamily::X(5) => {
            let (lam, om) = (p(0), p(1));
            let om_m1 = sign(om);
            let dlam = dl(lam, 0, n2);
            let dlw = dl(lam + om * (q - 1), 0, n2);
            let m = one() + &om_m1 - &dlam - &dlw;
            let s = -(at_sqrt(lam) * (one() + &om_m1)) + &om_m1 * (&dlam + &dlw);
            (m, s)
        }
        CharFamily::Chi(1) => {
            let nu = p(1);
            let dn = dl(nu, 0, n1);
            (one() + dn.scale(3), at_m1(nu) + dn)
        }
        CharFamily::Chi(2) => {
            let nu = p(1);
            let dn = dl(nu, 0, n1);
            (
                int(3) + dn.scale(3) + dl(2 * nu, 0, n1).scale(2),
                at_m1(nu) + dn,
            )
        }
        CharFamily::Chi(3) => {
            let (l, nu) = (p(0), p(1));
            let dln = dl(l + nu, 0, n1);
            let (dlam, dn) = (dl(l, 0, n1), dl(nu, 0, n1));
            let base = &dln * (one() + at_m1(l));
            (
                &base + dlam.scale(2) + (&dlam * &dn).scale(3),
                &base + &dlam * &dn,
            )
        }
        CharFamily::Chi(4) => {
            let (l, nu) = (p(0), p(1));
            let dla = dl(l + nu, h, n1);
            let (dlam, dn) = (dl(l, 0, n1), dl(nu, 0, n1));
            let m = one() + at_m1(l) * &dla + &dn + dlam.scale(2) + &dlam * &dn;
            let s = at_m1(nu) + &a0 * (one() + &dn) * &dla;
            (m, s)
        }
        CharFamily::Chi(5) => {
            let (om, nu) = (p(0), p(1));
            let v = dl(nu, 0, n1) * (one() - sign(om) - dl(om, 0, q + 1));
            (v.clone(), v)
        }
        CharFamily::Chi(6) => {
            let (om, nu) = (p(0), p(1));
            let dna = dl(nu, h, n1);
            let dw0 = dl(om, q.div_ceil(2), q + 1);
            let m = one() + &dna * (sign(om) - &dw0) - (dl(nu, 0, n1) * dl(om, 0, q + 1)).scale(2);
            // nu(-xi) = nu(-1) nu(xi)
            let s = -(sign(om) * at_m1(nu) * at_xi(nu)) + at_m1(nu) * &dna * (one() - &dw0);
            (m, s)
        }
        CharFamily::Chi(7) => {
            let dlam = dl(p(0), 0, n2);
            (one() + &dlam, at_sqrt(p(0)) - &dlam)
        }
        CharFamily::Chi(8) => {
            let dlam = dl(p(0), 0, n2);
            (int(3) - &dlam, -at_sqrt(p(0)) + &dlam)
        }
        CharFamily::Tau(1) | CharFamily::Tau(4) | CharFamily::Tau(5) => (int(0), int(0)),
        CharFamily::Tau(2) => {
            let v = dl(p(0), 0, n1) * (one() + &a0);
            (v.clone(), v)
        }
        CharFamily::Tau(3) => (one(), a0.clone()),
        CharFamily::Theta(i) => {
            let nu = p(0);
            let dn = dl(nu, 0, n1);
            match i {
                0 => (dn.clone(), dn),
                1 => (one() + dn.scale(2), at_m1(nu)),
                2 | 4 => (int(0), int(0)),
                3 => (one() + dn.scale(2), -at_m1(nu) + dn.scale(2)),
                5 => (int(3) - &dn, at_m1(nu) - &dn),
                _ => return Err(FixvecError::NoClosedForm(c.to_string())),
            }
        }
        _ => return Err(FixvecError::NoClosedForm(c.to_string())),
    };
    Ok(FixvecRow {
        char_id: c.clone(),
        m: m.as_integer()?,
        s: s.as_integer()?,
    })
}

pub fn closed_form(q: u32, c: &CharId) -> Result<FixvecRow, FixvecError> {
    match Scheme::of_q(q) {
        Scheme::Even => closed_form_even(q, c),
        Scheme::Odd => closed_form_odd(q, c),
    }
}

/// Closed forms of every standard character with trivial central
/// character, in canonical order.
pub fn closed_form_table(q: u32) -> Vec<FixvecRow> {
    let scheme = Scheme::of_q(q);
    CharId::all(scheme, q)
        .iter()
        .filter_map(|c| closed_form(q, c).ok())
        .collect()
}

/// Exact average of `f` over `elems`.
pub fn brute_average<F>(elems: &[GroupElem], f: F, exec: Exec) -> Result<Ratio<i64>, FixvecError>
where
    F: Fn(&GroupElem) -> Result<CycloNum, FixvecError> + Sync + Send,
{
    let vals = exec.map(elems, |g| f(g));
    let mut acc = CycloNum::zero();
    for v in vals {
        acc = acc + v?;
    }
    Ok(Ratio::new(acc.as_integer()?, elems.len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartab::builtin_even;

    fn id(s: Scheme, txt: &str, q: u32) -> CharId {
        CharId::parse(s, txt, q).unwrap()
    }

    #[test]
    fn even_examples() {
        let t2 = builtin_even(2).unwrap();
        let th1 = id(Scheme::Even, "theta_1", 2);
        assert_eq!(dim_even(2, &th1, &t2).unwrap(), 3);
        assert_eq!(sig_even(2, &th1, &t2).unwrap(), 1);
        let th0 = id(Scheme::Even, "theta_0", 2);
        assert_eq!(
            (
                dim_even(2, &th0, &t2).unwrap(),
                sig_even(2, &th0, &t2).unwrap()
            ),
            (1, 1)
        );
        let t4 = builtin_even(4).unwrap();
        let c1 = id(Scheme::Even, "chi_1(0,0)", 4);
        assert_eq!(dim_even(4, &c1, &t4).unwrap(), 12);
        let c4 = id(Scheme::Even, "chi_4(1,2)", 4);
        assert_eq!(sig_even(4, &c4, &t4).unwrap(), -2);
        assert!(matches!(
            dim_odd(4, &c1, &t4),
            Err(FixvecError::WrongScheme(_))
        ));
    }

    #[test]
    fn even_closed_forms() {
        let row = |s: &str| closed_form_even(4, &id(Scheme::Even, s, 4)).unwrap();
        assert_eq!((row("chi_1(0,0)").m, row("chi_1(0,0)").s), (12, 4));
        for k in 0..17 {
            let r = row(&format!("chi_5({k})"));
            assert_eq!((r.m, r.s), (0, 0));
        }
        assert_eq!((row("chi_4(1,2)").m, row("chi_4(1,2)").s), (2, -2));
    }

    #[test]
    fn odd_closed_forms() {
        let row = |s: &str| closed_form_odd(3, &id(Scheme::Odd, s, 3)).unwrap();
        assert_eq!(row("X_1(0,0,0)").m, 12);
        assert_eq!((row("theta_0(0)").m, row("theta_0(0)").s), (1, 1));
        assert_eq!((row("tau_1").m, row("tau_1").s), (0, 0));
        // q = 3: alpha_0(-1) = -1
        assert_eq!((row("tau_3").m, row("tau_3").s), (1, -1));
        assert!(matches!(
            closed_form_odd(3, &id(Scheme::Odd, "chi_7(1)", 3)),
            Err(FixvecError::NontrivialCentral(_))
        ));
    }

    #[test]
    fn odd_closed_forms_are_integral() {
        for q in [3u32, 5, 7, 9] {
            let rows = closed_form_table(q);
            assert!(!rows.is_empty());
            for c in CharId::all(Scheme::Odd, q) {
                match closed_form_odd(q, &c) {
                    Ok(_) | Err(FixvecError::NontrivialCentral(_)) => {}
                    Err(e) => panic!("{c} at q={q}: {e}"),
                }
            }
        }
    }

    #[test]
    fn averages() {
        let g = crate::Gsp4::new(3).unwrap();
        let m = g.enumerate_m();
        let one = brute_average(&m, |_| Ok(CycloNum::one()), Exec::Sequential).unwrap();
        assert_eq!(one, Ratio::from_integer(1));
        let e = g.identity();
        let ind = brute_average(
            &m,
            |h| Ok(CycloNum::from_int(i64::from(*h == e))),
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(ind, Ratio::new(1, 96));
    }
}
