use std::collections::BTreeMap;

use gsp4_core::chartab::CharFamily;
use gsp4_core::fixvec::{closed_form_even, closed_form_odd, FixvecError};
use gsp4_core::reptables::{lookup, rows, sweep, Sign};
use gsp4_core::{CharId, Scheme};

fn sc(scheme: Scheme, key: &str) -> (i64, i64) {
    lookup(scheme, key, &BTreeMap::new(), &BTreeMap::new()).unwrap()
}

#[test]
fn even_supercuspidals_match_closed_forms() {
    for q in [2, 4, 8] {
        for c in CharId::all(Scheme::Even, q) {
            let key = match c.family {
                CharFamily::Chi(4)
                    if c.params[0] != c.params[1] && c.params[0] + c.params[1] != q + 1 =>
                {
                    "sc:chi_4"
                }
                CharFamily::Chi(5) => "sc:chi_5",
                CharFamily::Theta(5) => "sc:theta_5",
                _ => continue,
            };
            let r = closed_form_even(q, &c).unwrap();
            assert_eq!((r.m, r.s), sc(Scheme::Even, key), "{c} at q={q}");
        }
    }
}

/// `X_5(Lambda, omega)` with `Lambda` or `Lambda omega~` trivial is not cuspidal.
fn x5_generic(q: u32, c: &CharId) -> bool {
    let n = q * q - 1;
    let (kl, kw) = (c.params[0], c.params[1]);
    kl % n != 0 && !(kl + kw * (q - 1)).is_multiple_of(n)
}

/// Odd closed forms with trivial central character land among the row's
/// sign sweep; for `X_5` the sign `omega(-1) = (-1)^k` is pinned.
#[test]
fn odd_supercuspidals_consistent_with_closed_forms() {
    for q in [3, 5, 7, 9] {
        let mut seen = 0;
        for c in CharId::all(Scheme::Odd, q) {
            let key = match c.family {
                CharFamily::X(4) => "sc:X_4",
                CharFamily::X(5) if x5_generic(q, &c) => "sc:X_5",
                CharFamily::Theta(2) => "sc:theta_2",
                _ => continue,
            };
            let r = match closed_form_odd(q, &c) {
                Ok(r) => r,
                Err(FixvecError::NontrivialCentral(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let row = rows(Scheme::Odd).iter().find(|r| r.key == key).unwrap();
            let ok = sweep(row).into_iter().any(|(signs, d, s)| {
                let pinned = c.family != CharFamily::X(5)
                    || signs[&Sign::Omega] == if c.params[1] % 2 == 0 { 1 } else { -1 };
                pinned && (d, s) == (r.m, r.s)
            });
            assert!(ok, "{c} at q={q}: ({}, {})", r.m, r.s);
            seen += 1;
        }
        assert!(seen > 0);
    }
}
