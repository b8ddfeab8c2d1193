use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use gsp4_core::chartab::{
    builtin_even, class_sizes_in, column_orthogonality, dixon_oracle, irreducible_rows, load_odd,
    match_dixon, norm_and_orthogonality,
};
use gsp4_core::classlabel::{
    classify_distribution, divisor, even_classes, formula_distribution, formula_terms, Classifier,
    Formula,
};
use gsp4_core::fixvec::{
    brute_average, closed_form_even, closed_form_odd, closed_form_table, dim_odd, formula_rows,
    sig_odd, FixvecError, FixvecRow,
};
use gsp4_core::gsp4core::EnumeratedGroup;
use gsp4_core::reptables::{self, parse_assignment, parse_signs};
use gsp4_core::{par, CharId, ClassLabel, Exec, GroupElem, Gsp4, Scheme};
use num_rational::Ratio;
use serde_json::{json, Value};

/// Finite-group computations for level-p^2 Siegel fixed vectors of GSp(4).
#[derive(Parser)]
#[command(name = "gsp4", version)]
struct Cli {
    /// Output format; CSV is a projection of the JSON report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; 1 runs every stage sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory holding enumerated-group caches.
    #[arg(long, global = true, env = "GSP4_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Even,
    Odd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension and signature per virtual character, q even, checked against closed forms.
    Table3 {
        #[arg(long)]
        q: u32,
    },
    /// Closed forms for q odd; with a table file, also the formula evaluation.
    Table5 {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        odd_table: Option<PathBuf>,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        apply_shinoda_corrections: bool,
    },
    /// Classify M and Mu and compare with the formula class distributions.
    VerifyClasses {
        #[arg(long)]
        q: u32,
        /// Also compare labels with the conjugacy classes of the enumerated group (q <= 4).
        #[arg(long)]
        orbits: bool,
    },
    /// Orthogonality of the built-in character table against enumerated class sizes.
    VerifyOrthogonality {
        #[arg(long)]
        q: u32,
    },
    /// Brute-force character table of Sp(4,2) against the built-in table and the averages.
    VerifyDixon,
    /// Dimension and signature of one representation type.
    Lookup {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long = "type")]
        ty: String,
        /// Conductor exponents, e.g. "sigma=1,chi=0".
        #[arg(long, default_value = "")]
        cond: String,
        /// Sign values, e.g. "Lt=-1".
        #[arg(long, default_value = "")]
        signs: String,
    },
    /// Sweep all representation rows and sign assignments.
    Corollary,
    /// All representation rows.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group orders and table sizes for one q.
    Info {
        #[arg(long)]
        q: u32,
    },
}

enum CliError {
    Usage(String),
    Failure(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Report {
    ok: bool,
    json: Value,
    table: Option<Table>,
}

impl Report {
    fn new(ok: bool, mut json: Value, table: Option<Table>) -> Self {
        if let Value::Object(m) = &mut json {
            m.insert("status".into(), json!(if ok { "pass" } else { "fail" }));
        }
        Report { ok, json, table }
    }

    fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json)? + "\n"),
            Format::Csv => {
                let t = self
                    .table
                    .as_ref()
                    .ok_or_else(|| usage("this subcommand has no CSV projection"))?;
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
                String::from_utf8(
                    w.into_inner()
                        .map_err(|e| CliError::Failure(e.to_string()))?,
                )
                .map_err(|e| CliError::Failure(e.to_string()))
            }
        }
    }
}

struct Ctx {
    exec: Exec,
    cache_dir: Option<PathBuf>,
}

impl Ctx {
    fn group(&self, g: &Gsp4, sp: bool) -> Result<EnumeratedGroup, CliError> {
        let enumerate = || {
            if sp {
                g.enumerate_sp(self.exec)
            } else {
                g.enumerate_gsp(self.exec)
            }
        };
        let Some(dir) = &self.cache_dir else {
            return Ok(enumerate()?);
        };
        let path = dir.join(format!("{}4_q{}.bin", if sp { "sp" } else { "gsp" }, g.q()));
        if path.exists() {
            return Ok(EnumeratedGroup::read_cache(g, &path)?);
        }
        let grp = enumerate()?;
        fs::create_dir_all(dir)?;
        grp.write_cache(&path)?;
        Ok(grp)
    }
}

fn even_q(q: u32) -> Result<(), CliError> {
    if q.is_multiple_of(2) && Gsp4::new(q).is_ok() {
        Ok(())
    } else {
        Err(usage(format!("q={q} is not a supported even prime power")))
    }
}

fn odd_q(q: u32) -> Result<(), CliError> {
    if q % 2 == 1 && Gsp4::new(q).is_ok() {
        Ok(())
    } else {
        Err(usage(format!("q={q} is not a supported odd prime power")))
    }
}

fn row_json(r: &FixvecRow) -> Value {
    json!({"char": r.char_id.to_string(), "M": r.m, "s": r.s})
}

fn fixvec_table(rows: &[Value]) -> Table {
    Table {
        header: vec!["char", "M", "s"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r["char"].as_str().unwrap_or("").to_string(),
                    r["M"].to_string(),
                    r["s"].to_string(),
                ]
            })
            .collect(),
    }
}

fn table3(ctx: &Ctx, q: u32) -> Result<Report, CliError> {
    even_q(q)?;
    let t = builtin_even(q)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in formula_rows(&t, ctx.exec)? {
        match r {
            Ok(r) => {
                let c = closed_form_even(q, &r.char_id)?;
                if (c.m, c.s) != (r.m, r.s) {
                    failures.push(json!({"char": r.char_id.to_string(), "formula": [r.m, r.s], "closed_form": [c.m, c.s]}));
                }
                rows.push(row_json(&r));
            }
            Err(e) => failures.push(json!({"error": e.to_string()})),
        }
    }
    let table = fixvec_table(&rows);
    Ok(Report::new(
        failures.is_empty(),
        json!({"q": q, "rows": rows, "failures": failures}),
        Some(table),
    ))
}

fn table5(ctx: &Ctx, q: u32, file: Option<&Path>, apply: bool) -> Result<Report, CliError> {
    odd_q(q)?;
    let Some(path) = file else {
        let rows: Vec<Value> = closed_form_table(q).iter().map(row_json).collect();
        let table = fixvec_table(&rows);
        return Ok(Report::new(
            true,
            json!({"q": q, "source": "closed_form", "rows": rows}),
            Some(table),
        ));
    };
    let t = load_odd(path, apply)?;
    if t.q() != q {
        return Err(usage(format!("table file is for q={}, not q={q}", t.q())));
    }
    let ids = CharId::all(Scheme::Odd, q);
    let results = ctx.exec.map(&ids, |c| -> Result<Option<Value>, Value> {
        let want = match closed_form_odd(q, c) {
            Ok(w) => w,
            Err(FixvecError::NontrivialCentral(_)) => return Ok(None),
            Err(e) => return Err(json!({"char": c.to_string(), "error": e.to_string()})),
        };
        let got = dim_odd(q, c, &t).and_then(|m| Ok((m, sig_odd(q, c, &t)?)));
        match got {
            Ok((m, s)) if (m, s) == (want.m, want.s) => {
                Ok(Some(json!({"char": c.to_string(), "M": m, "s": s})))
            }
            Ok((m, s)) => Err(
                json!({"char": c.to_string(), "formula": [m, s], "closed_form": [want.m, want.s]}),
            ),
            Err(e) => Err(json!({"char": c.to_string(), "error": e.to_string()})),
        }
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut skipped = 0;
    for r in results {
        match r {
            Ok(Some(v)) => rows.push(v),
            Ok(None) => skipped += 1,
            Err(v) => failures.push(v),
        }
    }
    let table = fixvec_table(&rows);
    let json = json!({
        "q": q,
        "source": path.display().to_string(),
        "provenance": t.provenance(),
        "rows": rows,
        "skipped_nontrivial_central": skipped,
        "failures": failures,
    });
    Ok(Report::new(failures.is_empty(), json, Some(table)))
}

fn orbit_check(ctx: &Ctx, g: &Gsp4, cl: &Classifier) -> Result<Value, CliError> {
    let sp = g.is_even();
    let grp = ctx.group(g, sp)?;
    let gens = if sp {
        g.sp_generators()
    } else {
        g.gsp_generators()
    };
    let part = grp.conjugacy_classes(&gens, ctx.exec);
    let mut wanted = vec![sp; part.num_classes()];
    for h in g.enumerate_m().iter().chain(g.enumerate_mu().iter()) {
        let i = grp
            .index_of(h)
            .ok_or_else(|| CliError::Failure("M element outside the group".into()))?;
        wanted[part.class_of[i] as usize] = true;
    }
    let labels = ctx.exec.map(grp.elements(), |h| cl.classify(h));
    let mut label_of: HashMap<u32, ClassLabel> = HashMap::new();
    let mut class_of: BTreeMap<ClassLabel, u32> = BTreeMap::new();
    let mut conflicts = Vec::new();
    for (i, l) in labels.into_iter().enumerate() {
        let c = part.class_of[i];
        if !wanted[c as usize] {
            continue;
        }
        let l = l?;
        let p = label_of.entry(c).or_insert_with(|| l.clone());
        if *p != l {
            conflicts.push(format!("class {c} carries {p} and {l}"));
        }
        let p = class_of.entry(l.clone()).or_insert(c);
        if *p != c {
            conflicts.push(format!("{l} names classes {p} and {c}"));
        }
    }
    conflicts.sort();
    conflicts.dedup();
    Ok(json!({
        "group_order": grp.len(),
        "classes_checked": wanted.iter().filter(|w| **w).count(),
        "labels": class_of.len(),
        "conflicts": conflicts,
    }))
}

fn verify_classes(ctx: &Ctx, q: u32, orbits: bool) -> Result<Report, CliError> {
    let g = Gsp4::new(q).map_err(|e| usage(e.to_string()))?;
    let cl = Classifier::new(q).map_err(|e| usage(e.to_string()))?;
    let mut ok = true;
    let mut out = serde_json::Map::new();
    out.insert("q".into(), json!(q));
    let mut csv_rows = Vec::new();
    for (name, elems, which) in [
        ("M", g.enumerate_m(), Formula::Dim),
        ("Mu", g.enumerate_mu(), Formula::Sig),
    ] {
        let got = classify_distribution(&cl, &elems, ctx.exec)?;
        let want = formula_distribution(q, which)?;
        ok &= got == want;
        let mut labels: Vec<&ClassLabel> = got.counts.keys().chain(want.counts.keys()).collect();
        labels.sort();
        labels.dedup();
        let mut rows = Vec::new();
        for l in labels {
            let (a, b) = (
                got.counts.get(l).copied().unwrap_or(0),
                want.counts.get(l).copied().unwrap_or(0),
            );
            rows.push(json!({"label": l.to_string(), "count": a, "expected": b}));
            csv_rows.push(vec![
                name.to_string(),
                l.to_string(),
                a.to_string(),
                b.to_string(),
            ]);
        }
        out.insert(
            name.into(),
            json!({"total": got.total, "agree": got == want, "classes": rows}),
        );
    }
    if orbits {
        if q > 4 {
            return Err(usage("orbit comparison needs q <= 4"));
        }
        let o = orbit_check(ctx, &g, &cl)?;
        ok &= o["conflicts"].as_array().is_some_and(|c| c.is_empty());
        out.insert("orbits".into(), o);
    }
    let table = Table {
        header: vec!["set", "label", "count", "expected"],
        rows: csv_rows,
    };
    Ok(Report::new(ok, Value::Object(out), Some(table)))
}

fn verify_orthogonality(ctx: &Ctx, q: u32) -> Result<Report, CliError> {
    even_q(q)?;
    let g = Gsp4::new(q)?;
    let grp = ctx.group(&g, true)?;
    let (sizes, order) = class_sizes_in(&grp, ctx.exec)?;
    let t = builtin_even(q)?.with_class_sizes(&sizes)?;
    let rep = norm_and_orthogonality(&t, ctx.exec)?;
    let irr = irreducible_rows(&t, &rep);
    let mut failures = Vec::new();
    for &a in &irr {
        for &b in &irr {
            let want = i64::from(t.row(a) == t.row(b));
            if rep.pairing(a, b) != Some(want) {
                failures.push(format!(
                    "<{}, {}> = {:?}",
                    t.chars()[a],
                    t.chars()[b],
                    rep.pairing(a, b)
                ));
            }
        }
    }
    let mut distinct: Vec<usize> = Vec::new();
    for &a in &irr {
        if !distinct.iter().any(|&b| t.row(b) == t.row(a)) {
            distinct.push(a);
        }
    }
    if distinct.len() != t.classes().len() {
        failures.push(format!(
            "{} distinct irreducible rows for {} classes",
            distinct.len(),
            t.classes().len()
        ));
    }
    for (a, b) in column_orthogonality(&t, &distinct, ctx.exec)? {
        failures.push(format!("columns {} and {} not orthogonal", a, b));
    }
    let pairings: Vec<Value> = rep
        .pairings
        .iter()
        .map(|&(a, b, v)| json!({"a": t.chars()[a].to_string(), "b": t.chars()[b].to_string(), "pairing": v}))
        .collect();
    let table = Table {
        header: vec!["a", "b", "pairing"],
        rows: rep
            .pairings
            .iter()
            .map(|&(a, b, v)| {
                let v = v.map_or_else(|| "irrational".to_string(), |v| v.to_string());
                vec![t.chars()[a].to_string(), t.chars()[b].to_string(), v]
            })
            .collect(),
    };
    let json = json!({
        "q": q,
        "group_order": order,
        "classes": t.classes().len(),
        "characters": t.chars().len(),
        "irreducible_rows": irr.len(),
        "failures": failures,
        "pairings": pairings,
    });
    Ok(Report::new(failures.is_empty(), json, Some(table)))
}

fn verify_dixon(ctx: &Ctx) -> Result<Report, CliError> {
    let q = 2;
    let g = Gsp4::new(q)?;
    let grp = ctx.group(&g, true)?;
    let d = dixon_oracle(&grp, &g.sp_generators(), ctx.exec)?;
    let (sizes, _) = class_sizes_in(&grp, ctx.exec)?;
    let t = builtin_even(q)?.with_class_sizes(&sizes)?;
    let rep = norm_and_orthogonality(&t, ctx.exec)?;
    let m = match_dixon(&d, &t, &irreducible_rows(&t, &rep))?;
    let (ms, mus) = (g.enumerate_m(), g.enumerate_mu());
    let mut rows = Vec::new();
    let mut disagree = Vec::new();
    for (cid, o) in &m.matched {
        let chi = |h: &GroupElem| {
            let c = d.partition.class_of[grp.index_of(h).expect("M inside Sp(4,2)")] as usize;
            Ok(d.chars[*o][c].clone())
        };
        let am = brute_average(&ms, chi, ctx.exec)?;
        let au = brute_average(&mus, chi, ctx.exec)?;
        let r = closed_form_even(q, cid)?;
        if am != Ratio::from_integer(r.m) || au != Ratio::from_integer(r.s) {
            disagree.push(cid.to_string());
        }
        rows.push(json!({
            "char": cid.to_string(),
            "degree": d.degrees[*o],
            "avg_M": am.to_string(),
            "avg_Mu": au.to_string(),
            "M": r.m,
            "s": r.s,
        }));
    }
    let ok = m.is_bijection() && disagree.is_empty();
    let summary = format!(
        "{}/{} characters matched, {}",
        m.matched.len(),
        d.chars.len(),
        if disagree.is_empty() {
            "all M/Mu averages agree".to_string()
        } else {
            format!("{} averages disagree", disagree.len())
        }
    );
    let table = Table {
        header: vec!["char", "degree", "avg_M", "avg_Mu", "M", "s"],
        rows: rows
            .iter()
            .map(|r| {
                ["char", "degree", "avg_M", "avg_Mu", "M", "s"]
                    .iter()
                    .map(|k| {
                        r[*k]
                            .as_str()
                            .map_or_else(|| r[*k].to_string(), str::to_string)
                    })
                    .collect()
            })
            .collect(),
    };
    let json = json!({
        "summary": summary,
        "prime": d.prime,
        "unmatched_table": m.unmatched_table.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "unmatched_oracle": m.unmatched_oracle,
        "size_mismatches": m.size_mismatches.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "disagreeing_averages": disagree,
        "characters": rows,
    });
    Ok(Report::new(ok, json, Some(table)))
}

fn scheme_of(s: SchemeArg) -> Scheme {
    match s {
        SchemeArg::Even => Scheme::Even,
        SchemeArg::Odd => Scheme::Odd,
    }
}

fn lookup(scheme: SchemeArg, ty: &str, cond: &str, signs: &str) -> Result<Report, CliError> {
    let scheme = scheme_of(scheme);
    let conds = parse_assignment(cond).map_err(|e| usage(e.to_string()))?;
    let signs = parse_signs(signs).map_err(|e| usage(e.to_string()))?;
    let row = reptables::find_row(scheme, ty, &conds).map_err(|e| usage(e.to_string()))?;
    let (dim, s) = row.eval(&signs).map_err(|e| usage(e.to_string()))?;
    let json = json!({
        "type": row.tag,
        "key": row.key,
        "pi": row.pi,
        "condition": row.condition_text(),
        "dim": dim,
        "s": s,
    });
    let table = Table {
        header: vec!["key", "condition", "dim", "s"],
        rows: vec![vec![
            row.key.into(),
            row.condition_text(),
            dim.to_string(),
            s.to_string(),
        ]],
    };
    Ok(Report::new(true, json, Some(table)))
}

fn corollary() -> Report {
    let r = reptables::corollary_check();
    let json = serde_json::to_value(&r).expect("report serialises");
    let table = Table {
        header: vec!["dim"],
        rows: r.achieved.iter().map(|d| vec![d.to_string()]).collect(),
    };
    Report::new(r.ok(), json, Some(table))
}

fn export() -> Report {
    let mut rows = Vec::new();
    for scheme in [Scheme::Even, Scheme::Odd] {
        for r in reptables::rows(scheme) {
            rows.push(vec![
                format!("{scheme:?}").to_lowercase(),
                r.tag.into(),
                r.key.into(),
                r.pi.into(),
                r.condition_text(),
                r.dim.to_string(),
                r.s.to_string(),
            ]);
        }
    }
    let table = Table {
        header: vec!["scheme", "type", "key", "pi", "conditions", "dim", "s"],
        rows,
    };
    Report::new(true, reptables::export_json(), Some(table))
}

fn info(q: u32) -> Result<Report, CliError> {
    let g = Gsp4::new(q).map_err(|e| usage(e.to_string()))?;
    let scheme = Scheme::of_q(q);
    let mut out = json!({
        "q": q,
        "scheme": format!("{scheme:?}").to_lowercase(),
        "order_M": g.order_m(),
        "order_Sp4": g.order_sp(),
        "order_GSp4": g.order_gsp(),
        "characters": CharId::all(scheme, q).len(),
        "dim_terms": formula_terms(q, Formula::Dim)?.len(),
        "sig_terms": formula_terms(q, Formula::Sig)?.len(),
        "dim_divisor": divisor(q, Formula::Dim),
        "sig_divisor": divisor(q, Formula::Sig),
    });
    if scheme == Scheme::Even {
        out["classes"] = json!(even_classes(q).len());
    }
    Ok(Report::new(true, out, None))
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be positive"));
        }
        par::set_threads(n).map_err(CliError::Failure)?;
    }
    let ctx = Ctx {
        exec: if cli.threads == Some(1) {
            Exec::Sequential
        } else {
            Exec::default()
        },
        cache_dir: cli.cache_dir.clone(),
    };
    match &cli.cmd {
        Cmd::Table3 { q } => table3(&ctx, *q),
        Cmd::Table5 {
            q,
            odd_table,
            apply_shinoda_corrections,
        } => table5(&ctx, *q, odd_table.as_deref(), *apply_shinoda_corrections),
        Cmd::VerifyClasses { q, orbits } => verify_classes(&ctx, *q, *orbits),
        Cmd::VerifyOrthogonality { q } => verify_orthogonality(&ctx, *q),
        Cmd::VerifyDixon => verify_dixon(&ctx),
        Cmd::Lookup {
            scheme,
            ty,
            cond,
            signs,
        } => lookup(*scheme, ty, cond, signs),
        Cmd::Corollary => Ok(corollary()),
        Cmd::Export { .. } => Ok(export()),
        Cmd::Info { q } => info(*q),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|r| {
        let text = r.render(cli.format)?;
        Ok((r.ok, text))
    });
    match result {
        Ok((ok, text)) => {
            let written = match &cli.cmd {
                Cmd::Export { out: Some(p) } => fs::write(p, &text),
                _ => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            let (code, kind, msg) = match e {
                CliError::Usage(m) => (2, "usage", m),
                CliError::Failure(m) => (1, "error", m),
            };
            println!("{}", json!({"status": kind, "message": msg}));
            eprintln!("{kind}: {msg}");
            ExitCode::from(code)
        }
    }
}
