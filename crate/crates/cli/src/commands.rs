use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use inertia_lab::linalg::eigvalsh;
use inertia_lab::ptrans::{inertia, partial_transpose};
use inertia_lab::search::{
    inertia_census, known_catalog, target_inertia_search, verify_lemma, CensusRow, RankSchedule, SearchConfig,
    SearchStatus,
};
use inertia_lab::{BipartiteDims, Inertia};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::matrix_file::MatrixFile;
use crate::report::RunReport;

/// What a command produced: the report, human-readable text and exit status.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: RunReport,
    pub text: String,
    pub exit_code: i32,
}

fn inertia_list(items: impl IntoIterator<Item = Inertia>) -> Vec<String> {
    items.into_iter().map(|i| i.to_string()).collect()
}

fn path_value(path: Option<&Path>) -> Value {
    path.map_or(Value::Null, |p| Value::String(p.display().to_string()))
}

pub fn cmd_inertia(input: &Path, dims: Option<BipartiteDims>, zero_tol: f64) -> Result<CommandOutput, CliError> {
    let file = MatrixFile::read(input)?;
    let file_dims = file.dims()?;
    if let Some(d) = dims.filter(|d| *d != file_dims) {
        return Err(inertia_lab::Error::DimensionMismatch(format!("--dims {d} but the file holds {file_dims}")).into());
    }
    let m = file.to_matrix()?;
    let pt = partial_transpose(&m, file_dims)?;
    let (im, ipt) = (inertia(&m, zero_tol)?, inertia(&pt, zero_tol)?);
    let report = RunReport::new(
        "inertia",
        json!({ "input": input.display().to_string(), "dims": file_dims.to_string(), "zero_tol": zero_tol }),
        json!({
            "inertia": im.to_string(),
            "partial_transpose_inertia": ipt.to_string(),
            "eigenvalues": eigvalsh(&m.hermitian_part())?,
            "partial_transpose_eigenvalues": eigvalsh(&pt.hermitian_part())?,
        }),
    );
    let text = format!("In(M)       = {im}\nIn(M^Gamma) = {ipt}\n");
    Ok(CommandOutput { report, text, exit_code: 0 })
}

pub fn cmd_search(config: &SearchConfig, out: Option<&Path>) -> Result<CommandOutput, CliError> {
    let catalog = known_catalog(config.dims);
    let standing = if catalog.is_member(&config.target) {
        "known member"
    } else if catalog.is_excluded(&config.target) {
        "known exclusion"
    } else {
        "unknown"
    };
    let result = target_inertia_search(config)?;
    let threshold = config.certification_threshold();
    let mut text = String::new();
    let mut written: Option<PathBuf> = None;
    match result.status {
        SearchStatus::Found => {
            let c = result.certification.as_ref().expect("found results carry a certification");
            let _ = writeln!(text, "FOUND {} at {} after {} restarts", config.target, config.dims, result.restarts_used);
            let _ = writeln!(text, "  state min eigenvalue   {:.3e}", c.state_min_eigenvalue);
            let _ = writeln!(text, "  max |zero eigenvalue|  {:.3e}", c.max_zero_eigenvalue);
            let _ = writeln!(text, "  min |nonzero|          {:.3e}", c.min_nonzero_eigenvalue);
            let _ = writeln!(text, "  separation             {:.3e}", c.separation);
            if let (Some(path), Some(w)) = (out, result.witness.as_ref()) {
                MatrixFile::from_matrix(w, config.dims).write(path)?;
                let _ = writeln!(text, "  witness written to {}", path.display());
                written = Some(path.to_path_buf());
            }
        }
        SearchStatus::NotFound => {
            if catalog.is_excluded(&config.target) {
                let _ = writeln!(text, "NOT FOUND (consistent with exclusion)");
                let _ = writeln!(
                    text,
                    "  {} is a known exclusion at {}; this run is numerical corroboration, not proof",
                    config.target, config.dims
                );
            } else {
                let _ = writeln!(text, "NOT FOUND {} at {}", config.target, config.dims);
            }
            let _ = writeln!(
                text,
                "  best residual {:.3e} after {} restarts (certification threshold {:.3e}, ratio {:.3e})",
                result.residual,
                result.restarts_used,
                threshold,
                result.residual / threshold
            );
            let _ = writeln!(text, "  closest inertia reached {}", result.achieved);
        }
    }
    let note = match (result.status, standing) {
        (SearchStatus::NotFound, "known exclusion") => "not found, consistent with exclusion; corroboration, not proof",
        (SearchStatus::Found, "known exclusion") => "found a certified witness for a known exclusion",
        (SearchStatus::Found, _) => "certified witness",
        _ => "not found",
    };
    let report = RunReport::new(
        "search",
        json!({
            "dims": config.dims.to_string(),
            "target": config.target.to_string(),
            "restarts": config.restarts,
            "max_iters": config.max_iters,
            "seed": config.seed,
            "zero_tol": config.zero_tol,
            "margin": config.margin,
            "separation_ratio": config.separation_ratio,
            "out": path_value(out),
        }),
        json!({
            "status": result.status,
            "catalog_standing": standing,
            "note": note,
            "achieved": result.achieved.to_string(),
            "residual": result.residual,
            "certification_threshold": threshold,
            "restarts_used": result.restarts_used,
            "certification": result.certification,
            "witness_path": path_value(written.as_deref()),
        }),
    );
    Ok(CommandOutput { report, text, exit_code: 0 })
}

pub fn cmd_catalog(dims: BipartiteDims) -> Result<CommandOutput, CliError> {
    let c = known_catalog(dims);
    let mut text = String::new();
    let _ = writeln!(text, "{dims}: {} known members, {} known exclusions", c.known_members.len(), c.known_excluded.len());
    let _ = writeln!(text, "complete: {}", c.complete);
    let join = |v: Vec<String>| if v.is_empty() { "-".to_string() } else { v.join(" ") };
    let _ = writeln!(text, "members:    {}", join(inertia_list(c.known_members.iter().copied())));
    let _ = writeln!(text, "excluded:   {}", join(inertia_list(c.known_excluded.iter().copied())));
    if !c.family.is_empty() {
        let _ = writeln!(text, "family ({}): {}", c.family.len(), join(inertia_list(c.family.iter().copied())));
    }
    let report = RunReport::new(
        "catalog",
        json!({ "dims": dims.to_string() }),
        json!({
            "complete": c.complete,
            "members": inertia_list(c.known_members.iter().copied()),
            "excluded": inertia_list(c.known_excluded.iter().copied()),
            "family": inertia_list(c.family.iter().copied()),
        }),
    );
    Ok(CommandOutput { report, text, exit_code: 0 })
}

pub fn cmd_verify(lemma: &str, trials: usize, seed: u64) -> Result<CommandOutput, CliError> {
    let r = verify_lemma(lemma, trials, seed)?;
    let mut text = String::new();
    for o in &r.outcomes {
        let _ = writeln!(
            text,
            "{:<4} {:<36} {:>6}/{:<6} worst defect {:.3e} (tolerance {:.0e})",
            if o.ok() { "PASS" } else { "FAIL" },
            o.name,
            o.passed,
            o.trials,
            o.worst_defect,
            o.tolerance
        );
    }
    let failed = r.outcomes.iter().filter(|o| !o.ok()).count();
    let _ = writeln!(text, "{} checks, {failed} failed", r.outcomes.len());
    let report = RunReport::new(
        "verify",
        json!({ "lemma": lemma, "trials": trials, "seed": seed }),
        json!({ "all_passed": r.all_passed(), "outcomes": r.outcomes }),
    );
    Ok(CommandOutput { report, text, exit_code: if r.all_passed() { 0 } else { 1 } })
}

/// `mixed`, `full`, or a comma-separated list of ranks.
pub fn parse_ranks(text: &str, dims: BipartiteDims) -> Result<RankSchedule, CliError> {
    let schedule = match text.trim() {
        "mixed" => RankSchedule::mixed(dims),
        "full" => RankSchedule::full(dims),
        list => RankSchedule {
            ranks: list
                .split(',')
                .map(|r| r.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| inertia_lab::Error::InvalidConfig(format!("cannot parse rank schedule `{list}`")))?,
        },
    };
    schedule.validate(dims)?;
    Ok(schedule)
}

fn rows_json(rows: &[CensusRow]) -> Value {
    Value::Array(rows.iter().map(|r| json!({ "inertia": r.inertia().to_string(), "count": r.count })).collect())
}

pub fn write_census_csv(rows: &[CensusRow], path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn cmd_census(
    dims: BipartiteDims,
    samples: usize,
    ranks: &str,
    seed: u64,
    zero_tol: f64,
    out: Option<&Path>,
) -> Result<CommandOutput, CliError> {
    let schedule = parse_ranks(ranks, dims)?;
    let census = inertia_census(dims, samples, &schedule, seed, zero_tol)?;
    let catalog = known_catalog(dims);
    let class = census.classify(&catalog);
    if let Some(path) = out {
        write_census_csv(&census.rows, path)?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "{samples} samples at {dims}, ranks {:?}, zero_tol {zero_tol:e}", schedule.ranks);
    let _ = writeln!(text, "{:>4} {:>4} {:>4} {:>8}", "neg", "zero", "pos", "count");
    for r in &census.rows {
        let tag = if catalog.is_excluded(&r.inertia()) {
            "  EXCLUDED"
        } else if r.neg > 0 && !catalog.is_member(&r.inertia()) {
            if catalog.complete {
                "  OUTSIDE COMPLETE CATALOG"
            } else {
                "  new - outside known catalog"
            }
        } else {
            ""
        };
        let _ = writeln!(text, "{:>4} {:>4} {:>4} {:>8}{tag}", r.neg, r.zero, r.pos, r.count);
    }
    let _ = writeln!(text, "ppt {}, npt {}", class.ppt, class.npt);
    if class.ew_violations > 0 {
        let _ = writeln!(text, "{} NPT samples with fewer than three positive eigenvalues", class.ew_violations);
    }
    let flagged = class.flagged();
    let _ = writeln!(text, "{}", if flagged { "FLAGGED" } else { "no flagged arrays" });
    if let Some(path) = out {
        let _ = writeln!(text, "csv written to {}", path.display());
    }
    let report = RunReport::new(
        "census",
        json!({
            "dims": dims.to_string(),
            "samples": samples,
            "ranks": schedule.ranks,
            "seed": seed,
            "zero_tol": zero_tol,
            "out": path_value(out),
        }),
        json!({
            "rows": rows_json(&census.rows),
            "ppt": class.ppt,
            "npt": class.npt,
            "excluded_hits": rows_json(&class.excluded_hits),
            "outside_complete_catalog": rows_json(&class.outside_complete),
            "new_outside_catalog": rows_json(&class.new_outside_catalog),
            "ew_violations": class.ew_violations,
            "flagged": flagged,
        }),
    );
    Ok(CommandOutput { report, text, exit_code: if flagged { 1 } else { 0 } })
}
