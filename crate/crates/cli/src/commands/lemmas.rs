use cdlab_core::multiindex::verify_grid;
use serde::Serialize;

use super::Run;
use crate::config::Format;
use crate::error::{CliError, ExitStatus};

#[derive(Serialize)]
struct VerdictRow {
    kind: &'static str,
    m: usize,
    l: u32,
    k: u32,
    eta: String,
    checked: u64,
    counterexamples: usize,
}

#[derive(Serialize)]
struct CounterexampleRow {
    kind: &'static str,
    m: usize,
    l: u32,
    k: u32,
    eta: String,
    alpha: String,
    step: Option<usize>,
    lhs: String,
    rhs: String,
}

#[derive(Serialize)]
struct LemmaDocument<'a> {
    config_hash: &'a str,
    report: &'a cdlab_core::multiindex::GridReport,
}

/// Runs the exhaustive factorial-inequality grids.
pub fn verify_lemmas_cmd(run: &mut Run) -> Result<(ExitStatus, String), CliError> {
    let report = verify_grid(&run.cfg.lemmas.grid())?;
    let rows: Vec<VerdictRow> = report
        .verdicts
        .iter()
        .map(|v| VerdictRow {
            kind: v.kind.label(),
            m: v.m,
            l: v.l,
            k: v.k,
            eta: v.eta.to_string(),
            checked: v.checked_count,
            counterexamples: v.counterexamples.len(),
        })
        .collect();
    let bad: Vec<CounterexampleRow> = report
        .verdicts
        .iter()
        .flat_map(|v| {
            v.counterexamples.iter().map(move |c| CounterexampleRow {
                kind: v.kind.label(),
                m: v.m,
                l: v.l,
                k: v.k,
                eta: v.eta.to_string(),
                alpha: c.alpha.to_string(),
                step: c.step,
                lhs: c.lhs.clone(),
                rhs: c.rhs.clone(),
            })
        })
        .collect();
    let formats = run.cfg.output.formats.clone();
    let hash = run.hash.clone();
    let out = run.out()?;
    if formats.contains(&Format::Csv) {
        out.write_csv("lemmas.csv", &rows)?;
    }
    if formats.contains(&Format::Json) {
        out.write_json(
            "lemmas.json",
            &LemmaDocument {
                config_hash: &hash,
                report: &report,
            },
        )?;
    }
    // Itemized counterexamples are always written when there are any.
    if !bad.is_empty() {
        out.write_csv("counterexamples.csv", &bad)?;
    }
    let msg = format!(
        "{} checks over {} grid points, {} counterexamples",
        report.total_checked,
        report.verdicts.len(),
        report.total_counterexamples
    );
    let status = if report.passed() {
        ExitStatus::Ok
    } else {
        ExitStatus::CheckFailed
    };
    Ok((status, msg))
}
