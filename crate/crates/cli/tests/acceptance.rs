//! End-to-end acceptance checks. Runs without the libtest harness so every
//! check prints its own PASS/FAIL line; exits nonzero if any check fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use inertia_lab::linalg::eig_hermitian;
use inertia_lab::linalg::random::random_hermitian;
use inertia_lab::search::{family_arrays, known_catalog, task_rng};
use inertia_lab::{BipartiteDims, Inertia};
use inertia_lab_cli::{run, RunReport};
use rand::Rng;
use serde_json::Value;

struct Outcome {
    code: i32,
    text: String,
    report: RunReport,
}

fn cli(args: &[&str], dir: &Path) -> Outcome {
    let path = dir.join("report.json");
    let mut full = vec!["inertia-lab", "--report", path.to_str().unwrap()];
    full.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(full, &mut out, &mut err);
    let report = serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|_| {
        panic!("no report for {args:?}: {}", String::from_utf8_lossy(&err))
    }))
    .unwrap();
    Outcome { code, text: String::from_utf8(out).unwrap(), report }
}

fn dims(m: usize, n: usize) -> BipartiteDims {
    BipartiteDims::new(m, n).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("expected a number, got {v}"))
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    if elapsed > Duration::from_secs(limit_secs) {
        return Err(format!("took {:.1}s, limit {limit_secs}s", elapsed.as_secs_f64()));
    }
    Ok(())
}

/// Every known member is found, certified with the required spectral gap.
fn reproduce_catalog(d: BipartiteDims, extra: &[&str], limit_secs: u64, dir: &Path) -> Result<String, String> {
    let start = Instant::now();
    let members = known_catalog(d).known_members;
    let mut worst_sep = f64::INFINITY;
    for target in &members {
        let t = format!("{},{},{}", target.neg, target.zero, target.pos);
        let ds = d.to_string();
        let mut args = vec!["search", "--dims", ds.as_str(), "--target", t.as_str()];
        args.extend_from_slice(extra);
        let o = cli(&args, dir);
        let r = &o.report.results;
        if o.code != 0 || r["status"] != "found" {
            return Err(format!("{target} not found (residual {})", r["residual"]));
        }
        let ratio = f(&o.report.config["separation_ratio"]);
        let sep = f(&r["certification"]["separation"]);
        if ratio < 1e4 || sep < 1e4 {
            return Err(format!("{target}: separation {sep:.3e}, ratio {ratio:.1e}"));
        }
        if !o.text.starts_with("FOUND") {
            return Err(format!("{target}: unexpected text {}", o.text));
        }
        worst_sep = worst_sep.min(sep);
    }
    within(start.elapsed(), limit_secs)?;
    Ok(format!(
        "{}/{} certified at {d}, min separation {worst_sep:.2e}, {:.1}s",
        members.len(),
        members.len(),
        start.elapsed().as_secs_f64()
    ))
}

/// Excluded targets stay unfound with residual at least 100x the threshold,
/// and the output labels this as corroboration.
fn corroborate_exclusions(d: BipartiteDims, targets: &[Inertia], dir: &Path) -> Result<String, String> {
    let mut parts = Vec::new();
    for target in targets {
        let t = format!("{},{},{}", target.neg, target.zero, target.pos);
        let ds = d.to_string();
        let o = cli(&["search", "--dims", &ds, "--target", &t, "--restarts", "200"], dir);
        let r = &o.report.results;
        if r["status"] != "not-found" {
            return Err(format!("{target} reported {}", r["status"]));
        }
        if f(&r["restarts_used"]) < 200.0 {
            return Err(format!("{target}: only {} restarts", r["restarts_used"]));
        }
        let ratio = f(&r["residual"]) / f(&r["certification_threshold"]);
        if ratio < 100.0 {
            return Err(format!("{target}: residual only {ratio:.2e} x threshold"));
        }
        let note = r["note"].as_str().unwrap_or_default();
        if !note.contains("not proof") || !o.text.contains("not proof") {
            return Err(format!("{target}: output does not label corroboration: {note}"));
        }
        if !o.text.starts_with("NOT FOUND (consistent with exclusion)") {
            return Err(format!("{target}: unexpected text {}", o.text));
        }
        parts.push(format!("{target} residual {:.2e} ({ratio:.1e} x threshold)", f(&r["residual"])));
    }
    Ok(parts.join(", "))
}

fn two_by_three_catalog(dir: &Path) -> Result<String, String> {
    reproduce_catalog(dims(2, 3), &[], 60, dir)
}

fn qutrit_catalog(dir: &Path) -> Result<String, String> {
    reproduce_catalog(dims(3, 3), &["--restarts", "50"], 15 * 60, dir)
}

fn qutrit_exclusions(dir: &Path) -> Result<String, String> {
    corroborate_exclusions(dims(3, 3), &[Inertia::new(4, 1, 4), Inertia::new(3, 2, 4)], dir)
}

fn three_by_four_exclusions(dir: &Path) -> Result<String, String> {
    let o = cli(&["census", "--dims", "3x4", "--samples", "100000", "--ranks", "mixed"], dir);
    let r = &o.report.results;
    if o.code != 0 {
        return Err(format!("census exit {}: {}", o.code, o.text));
    }
    let hits = r["excluded_hits"].as_array().unwrap();
    if !hits.is_empty() {
        return Err(format!("census observed excluded arrays {hits:?}"));
    }
    let total: u64 = r["rows"].as_array().unwrap().iter().map(|row| row["count"].as_u64().unwrap()).sum();
    if total != 100_000 {
        return Err(format!("census counted {total} samples"));
    }
    let searches = corroborate_exclusions(dims(3, 4), &[Inertia::new(7, 0, 5), Inertia::new(6, 2, 4)], dir)?;
    Ok(format!("census 1e5 samples, no excluded arrays; {searches}"))
}

fn lemma_suite(dir: &Path) -> Result<String, String> {
    let start = Instant::now();
    let o = cli(&["verify", "all", "--trials", "1000"], dir);
    let outcomes = o.report.results["outcomes"].as_array().unwrap().clone();
    let failed: Vec<&str> = outcomes.iter().filter(|x| x["failed"] != 0).map(|x| x["name"].as_str().unwrap()).collect();
    if o.code != 0 || !failed.is_empty() {
        return Err(format!("failed: {failed:?}"));
    }
    let required = [
        "product-tran",
        "vector-tran (i)",
        "vector-tran (ii)",
        "sumdif",
        "projection",
        "projection (principal submatrix)",
        "sub-lem",
        "cross-lem",
        "det-lem",
        "negative-change (i)",
        "negative-change (ii)",
        "ker-trans",
        "ew-positive-count",
    ];
    for name in required {
        let x = outcomes.iter().find(|x| x["name"] == name).ok_or(format!("missing check {name}"))?;
        if x["trials"] != 1000 || x["passed"] != 1000 {
            return Err(format!("{name}: {x}"));
        }
    }
    let product = outcomes.iter().find(|x| x["name"] == "product-tran").unwrap();
    let defect = f(&product["worst_defect"]);
    if defect > 1e-12 {
        return Err(format!("product-tran defect {defect:.3e}"));
    }
    within(start.elapsed(), 5 * 60)?;
    Ok(format!(
        "{} checks x 1000 trials passed, product-tran defect {defect:.2e}, {:.1}s",
        outcomes.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn eigensolver_quality(_: &Path) -> Result<String, String> {
    let mut rng = task_rng(2024, 0);
    let (mut worst_rec, mut worst_orth) = (0.0f64, 0.0f64);
    for trial in 0..1000 {
        let n = rng.random_range(2..=12);
        let m = random_hermitian(&mut rng, n);
        let e = eig_hermitian(&m).map_err(|e| e.to_string())?;
        let scale = m.frobenius_norm();
        let rec = e.reconstruct().distance(&m) / scale;
        let orth = e.orthonormality_defect() / scale;
        if rec > 1e-10 || orth > 1e-10 {
            return Err(format!("trial {trial} (order {n}): reconstruction {rec:.2e}, orthonormality {orth:.2e}"));
        }
        worst_rec = worst_rec.max(rec);
        worst_orth = worst_orth.max(orth);
    }
    Ok(format!("1000 matrices, worst relative reconstruction {worst_rec:.2e}, orthonormality {worst_orth:.2e}"))
}

fn family_formula(dir: &Path) -> Result<String, String> {
    for n in 2..=5 {
        let c = known_catalog(dims(3, n));
        let o = cli(&["catalog", "--dims", &format!("3x{n}")], dir);
        let listed = o.report.results["family"].as_array().unwrap().len();
        let want = (n - 1) * (2 * n - 1);
        if c.family.len() != want || listed != want || family_arrays(n).len() != want {
            return Err(format!("n={n}: {} arrays, {listed} listed, want {want}", c.family.len()));
        }
        if let Some(bad) = c.family.iter().find(|i| i.order() != 3 * n) {
            return Err(format!("n={n}: {bad} does not sum to {}", 3 * n));
        }
    }
    let c = known_catalog(dims(3, 3));
    if let Some(bad) = c.family.iter().find(|i| !c.is_member(i)) {
        return Err(format!("{bad} outside the 13-array catalog"));
    }
    Ok("n=2..5 give 3, 10, 21, 36 arrays summing to 3n; n=3 family inside the catalog".into())
}

fn determinism(dir: &Path) -> Result<String, String> {
    let (a_dir, b_dir) = (dir.join("a"), dir.join("b"));
    std::fs::create_dir_all(&a_dir).unwrap();
    std::fs::create_dir_all(&b_dir).unwrap();
    let mut me = inertia_lab::linalg::ComplexMatrix::identity(9);
    me[(0, 4)] = inertia_lab::C64::new(0.5, 0.25);
    me[(4, 0)] = inertia_lab::C64::new(0.5, -0.25);
    let input = dir.join("input.json");
    inertia_lab_cli::MatrixFile::from_matrix(&me, dims(3, 3)).write(&input).unwrap();
    let commands: Vec<Vec<String>> = [
        "inertia --input INPUT",
        "search --dims 3x3 --target 2,3,4 --seed 11 --out OUT",
        "search --dims 3x3 --target 4,1,4 --restarts 6 --seed 4",
        "catalog --dims 3x4",
        "verify all --trials 100 --seed 21",
        "census --dims 3x4 --samples 5000 --seed 9 --out OUT",
    ]
    .iter()
    .map(|c| c.split(' ').map(str::to_string).collect())
    .collect();
    for cmd in &commands {
        let mut payloads = Vec::new();
        let mut files = Vec::new();
        for d in [&a_dir, &b_dir] {
            // identical flags: the output path is the same string for both runs
            let out = dir.join("artifact");
            let args: Vec<String> = cmd
                .iter()
                .map(|a| match a.as_str() {
                    "INPUT" => input.display().to_string(),
                    "OUT" => out.display().to_string(),
                    _ => a.clone(),
                })
                .collect();
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let o = cli(&refs, d);
            payloads.push(serde_json::to_string(&o.report.payload()).unwrap());
            files.push(std::fs::read(&out).ok());
            let _ = std::fs::remove_file(&out);
        }
        if payloads[0] != payloads[1] {
            return Err(format!("`{}` reports differ", cmd.join(" ")));
        }
        if files[0] != files[1] {
            return Err(format!("`{}` output files differ", cmd.join(" ")));
        }
    }
    Ok(format!("{} commands repeated with byte-identical payloads", commands.len()))
}

type Check = fn(&Path) -> Result<String, String>;

fn main() {
    let checks: [(&str, Check); 8] = [
        ("2x3 catalog reproduction", two_by_three_catalog),
        ("3x3 catalog reproduction", qutrit_catalog),
        ("3x3 exclusion corroboration", qutrit_exclusions),
        ("3x4 exclusions", three_by_four_exclusions),
        ("lemma suite", lemma_suite),
        ("eigensolver quality", eigensolver_quality),
        ("family formula", family_formula),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let dir = tempfile::tempdir().unwrap();
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| check(dir.path())))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {}. {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {}. {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
