use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use gsp4_core::classlabel::{canon, Classifier};
use gsp4_core::{ClassLabel, CycloNum, Gsp4};
use serde_json::Value;

fn gsp4(args: &[&str], cache: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gsp4"));
    c.args(args).env_remove("GSP4_CACHE_DIR");
    if let Some(dir) = cache {
        c.env("GSP4_CACHE_DIR", dir);
    }
    c.output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn table3_q2() {
    let o = gsp4(&["table3", "--q", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["status"], "pass");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 43);
    assert!(rows
        .iter()
        .any(|r| r["char"] == "theta_0" && r["M"] == 1 && r["s"] == 1));

    let o = gsp4(&["--format", "csv", "table3", "--q", "2"], None);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("char,M,s\ntheta_0,1,1\n"));
    assert!(text.contains("\"chi_4(1,1)\","));
}

#[test]
fn output_does_not_depend_on_threads() {
    let a = gsp4(&["table3", "--q", "4"], None);
    let b = gsp4(&["--threads", "1", "table3", "--q", "4"], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_dixon_uses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let a = gsp4(&["verify-dixon"], Some(dir.path()));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        json_of(&a)["summary"],
        "11/11 characters matched, all M/Mu averages agree"
    );
    assert!(dir.path().join("sp4_q2.bin").exists());
    let b = gsp4(&["verify-dixon"], Some(dir.path()));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_classes_and_orthogonality() {
    let o = gsp4(&["verify-classes", "--q", "3", "--orbits"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["M"]["total"], 96);
    assert_eq!(v["orbits"]["conflicts"].as_array().unwrap().len(), 0);

    let o = gsp4(&["verify-orthogonality", "--q", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o)["group_order"], 720);
}

#[test]
fn lookup_and_corollary() {
    let o = gsp4(
        &[
            "lookup", "--scheme", "odd", "--type", "X", "--cond", "sigma=0", "--signs", "Lt=-1",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!((v["dim"].as_i64(), v["s"].as_i64()), (Some(3), Some(3)));

    let o = gsp4(
        &[
            "lookup", "--scheme", "odd", "--type", "IVd", "--cond", "sigma=1",
        ],
        None,
    );
    assert_eq!(
        (json_of(&o)["dim"].as_i64(), json_of(&o)["s"].as_i64()),
        (Some(0), Some(0))
    );

    let o = gsp4(&["lookup", "--scheme", "even", "--type", "XII"], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_of(&o)["status"], "usage");

    let o = gsp4(&["corollary"], None);
    assert_eq!(o.status.code(), Some(0));
    let dims: Vec<i64> = json_of(&o)["achieved"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_i64().unwrap())
        .collect();
    assert!(dims
        .iter()
        .all(|d| [0, 1, 2, 3, 4, 5, 6, 7, 8, 12].contains(d)));
}

#[test]
fn export_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.json");
    let o = gsp4(&["export", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["even"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["key"] == "sc:chi_4" && r["s"] == "-2"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(gsp4(&["table3", "--q", "3"], None).status.code(), Some(2));
    assert_eq!(gsp4(&["table5", "--q", "4"], None).status.code(), Some(2));
    assert_eq!(gsp4(&["no-such-command"], None).status.code(), Some(2));
    assert_eq!(
        gsp4(&["verify-classes", "--q", "5", "--orbits"], None)
            .status
            .code(),
        Some(2)
    );
}

/// A table holding only `theta_0(k)`, built from `mu` of each element.
fn partial_table(q: u32) -> String {
    let g = Gsp4::new(q).unwrap();
    let f = g.field().clone();
    let cl = Classifier::new(q).unwrap();
    let mut cells: BTreeMap<(u32, ClassLabel), CycloNum> = BTreeMap::new();
    for el in g.enumerate_m().iter().chain(g.enumerate_mu().iter()) {
        let l = canon(q, &cl.classify(el).unwrap());
        let e = f.dlog(el.mu()).unwrap() as i64;
        for k in 0..q - 1 {
            cells.insert((k, l.clone()), CycloNum::root(q - 1, k as i64 * e));
        }
    }
    let mut s = format!("scheme=odd q={q}\n");
    for ((k, l), v) in cells {
        s.push_str(&format!(
            "theta_0({k}) {l} {}\n",
            serde_json::to_string(&v).unwrap()
        ));
    }
    s
}

#[test]
fn table5_with_partial_file_reports_missing_cells() {
    let o = gsp4(&["table5", "--q", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o)["source"], "closed_form");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q3.txt");
    std::fs::write(&path, partial_table(3)).unwrap();
    let p = path.to_str().unwrap();
    let o = gsp4(&["table5", "--q", "3", "--odd-table", p], None);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&o);
    assert_eq!(v["status"], "fail");
    let rows = v["rows"].as_array().unwrap();
    assert!(rows
        .iter()
        .any(|r| r["char"] == "theta_0(0)" && r["M"] == 1 && r["s"] == 1));
    assert!(v["failures"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f["char"] == "X_1(0,0,0)"));

    let o = gsp4(&["table5", "--q", "5", "--odd-table", p], None);
    assert_eq!(o.status.code(), Some(2));
    let o = gsp4(
        &[
            "table5",
            "--q",
            "3",
            "--odd-table",
            p,
            "--apply-shinoda-corrections",
            "false",
        ],
        None,
    );
    assert_eq!(json_of(&o)["provenance"].as_array().unwrap().len(), 1);
}

#[test]
fn info_q9() {
    let v = json_of(&gsp4(&["info", "--q", "9"], None));
    assert_eq!(v["scheme"], "odd");
    assert_eq!(v["order_M"].as_u64(), Some(8 * 80 * 72));
}
