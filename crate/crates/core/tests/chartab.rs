use gsp4_core::chartab::{
    builtin_even, column_orthogonality, dixon_oracle, even_class_sizes, irreducible_rows,
    match_dixon, norm_and_orthogonality, CharTable,
};
use gsp4_core::{CharId, Exec, Gsp4, Scheme};

fn sized(q: u32) -> CharTable {
    let (sizes, _) = even_class_sizes(q, Exec::default()).unwrap();
    builtin_even(q).unwrap().with_class_sizes(&sizes).unwrap()
}

fn check_orthogonality(q: u32) {
    let t = sized(q);
    let rep = norm_and_orthogonality(&t, Exec::default()).unwrap();
    let irr = irreducible_rows(&t, &rep);
    assert_eq!(
        irr.len(),
        t.classes().len(),
        "one irreducible per class at q={q}"
    );
    // norm-1 rows pair to 1 with equal rows, -1 with negatives, 0 otherwise
    let norm1: Vec<usize> = (0..t.chars().len())
        .filter(|&a| rep.norm(a) == Some(1))
        .collect();
    for &a in &norm1 {
        for &b in &norm1 {
            let want = if t.row(a) == t.row(b) {
                1
            } else if t.row(a).iter().zip(t.row(b)).all(|(x, y)| *x == -y) {
                -1
            } else {
                0
            };
            assert_eq!(
                rep.pairing(a, b),
                Some(want),
                "{} vs {}",
                t.chars()[a],
                t.chars()[b]
            );
        }
    }
    assert!(column_orthogonality(&t, &irr, Exec::default())
        .unwrap()
        .is_empty());
}

#[test]
fn orthogonality_q2() {
    check_orthogonality(2);
}

#[test]
fn orthogonality_q4() {
    check_orthogonality(4);
}

#[test]
fn spot_pairings() {
    let t = sized(2);
    let rep = norm_and_orthogonality(&t, Exec::default()).unwrap();
    let id = |s: &str| {
        t.char_index(&CharId::parse(Scheme::Even, s, 2).unwrap())
            .unwrap()
    };
    assert_eq!(rep.norm(id("theta_0")), Some(1));
    assert_eq!(rep.pairing(id("theta_1"), id("theta_2")), Some(0));
    assert!(rep.norm(id("chi_1(0,0)")).unwrap() > 1);
}

#[test]
fn dixon_matches_table_at_q2() {
    let g = Gsp4::new(2).unwrap();
    let grp = g.enumerate_sp(Exec::default()).unwrap();
    let d = dixon_oracle(&grp, &g.sp_generators(), Exec::default()).unwrap();
    assert_eq!(d.chars.len(), 11);
    assert_eq!(d.degrees.iter().map(|x| x * x).sum::<u64>(), 720);
    let t = sized(2);
    let rep = norm_and_orthogonality(&t, Exec::default()).unwrap();
    let irr = irreducible_rows(&t, &rep);
    let m = match_dixon(&d, &t, &irr).unwrap();
    assert!(m.is_bijection(), "{m:?}");
    let mut degs = d.degrees.clone();
    degs.sort_unstable();
    assert_eq!(degs, vec![1, 1, 5, 5, 5, 5, 9, 9, 10, 10, 16]);
}
