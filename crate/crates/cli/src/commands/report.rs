use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cdlab_core::certify::CERTIFICATE_SCHEMA;
use serde::Serialize;
use serde_json::Value;

use super::{RUN_RECORD, RUN_RECORD_SCHEMA};
use crate::error::{CliError, ExitStatus};
use crate::output::OutputDir;

pub const SUMMARY_MD: &str = "summary.md";
pub const SUMMARY_CSV: &str = "summary.csv";

fn json_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::io(dir, e))?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            json_files(&p, out)?;
        } else if p.extension().is_some_and(|x| x == "json") {
            out.push(p);
        }
    }
    Ok(())
}

fn relative(root: &Path, p: &Path) -> String {
    let rel = p.strip_prefix(root).unwrap_or(p);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

fn parent_key(rel: &str) -> String {
    rel.rsplit_once('/')
        .map_or(String::new(), |(d, _)| d.to_string())
}

#[derive(Serialize)]
struct SummaryRow {
    path: String,
    kind: String,
    model_id: String,
    verdict: String,
    detail: String,
    config_hash: String,
    seed: u64,
}

fn s(v: &Value, key: &str) -> String {
    match &v[key] {
        Value::String(x) => x.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn fmt_f(v: &Value) -> String {
    v.as_f64().map_or("n/a".into(), |x| format!("{x:.3}"))
}

fn evidence_detail(cert: &Value) -> String {
    let ev = &cert["evidence"];
    match ev["method"].as_str() {
        Some("extraction") => {
            let mut d = format!(
                "target degree {}{}, worst log10 relative error {} at {}, recovered rank {} of {}",
                ev["target_degree"],
                if ev["covers_support"] == Value::Bool(true) {
                    " (whole support)"
                } else {
                    ""
                },
                fmt_f(&ev["log10_worst_relative_error"]),
                index_str(&ev["worst_index"]),
                ev["recovered_family_rank"],
                ev["coefficient_family_rank"],
            );
            if let Some(ff) = ev["first_failure"].as_array() {
                let _ = write!(
                    d,
                    ", first failure at {}",
                    index_str(&Value::Array(ff.clone()))
                );
            }
            d
        }
        Some("krylov-rank") => {
            let mut d = format!(
                "numerical rank {} of {} from {} columns at relative tolerance {}",
                ev["numerical_rank"],
                ev["ambient_dimension"],
                ev["column_count"],
                ev["svd_tolerance"]
            );
            if let Some(w) = ev["warning"].as_str() {
                let _ = write!(d, "; warning: {w}");
            }
            d
        }
        _ => "unrecognized evidence".into(),
    }
}

fn index_str(v: &Value) -> String {
    match v.as_array() {
        Some(a) => format!(
            "({})",
            a.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
        None => "n/a".into(),
    }
}

/// Merges certificates and run records found under `dir` into
/// `summary.md` and `summary.csv`. Output depends only on file contents and
/// relative paths.
pub fn report_cmd(dir: &Path, dest: Option<&Path>) -> Result<(ExitStatus, String), CliError> {
    if !dir.is_dir() {
        return Err(CliError::MissingInput(vec![format!(
            "run directory {}",
            dir.display()
        )]));
    }
    let mut files = Vec::new();
    json_files(dir, &mut files)?;
    let mut certs = Vec::new();
    let mut runs: BTreeMap<String, Value> = BTreeMap::new();
    for p in &files {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
        let Ok(v) = serde_json::from_str::<Value>(&text) else {
            continue;
        };
        let rel = relative(dir, p);
        match v["schema"].as_str() {
            Some(CERTIFICATE_SCHEMA) => certs.push((rel, v)),
            Some(RUN_RECORD_SCHEMA) => {
                runs.insert(parent_key(&rel), v);
            }
            _ => {}
        }
    }
    if certs.is_empty() && runs.is_empty() {
        return Err(CliError::MissingInput(vec![
            format!("certificate.json under {}", dir.display()),
            format!("{RUN_RECORD} under {}", dir.display()),
        ]));
    }

    let mut rows = Vec::new();
    let mut md = String::from("# cdlab run summary\n");
    let mut covered = std::collections::BTreeSet::new();
    for (rel, c) in &certs {
        let key = parent_key(rel);
        covered.insert(key.clone());
        let method = c["evidence"]["method"]
            .as_str()
            .unwrap_or("unknown")
            .to_string();
        let detail = evidence_detail(c);
        let _ = writeln!(md, "\n## {rel}\n");
        let _ = writeln!(
            md,
            "- model: {} (ambient dimension {})",
            s(c, "model_id"),
            c["ambient_dimension"]
        );
        let _ = writeln!(md, "- method: {method}");
        let _ = writeln!(md, "- verdict: {}", s(c, "verdict"));
        let _ = writeln!(md, "- evidence: {detail}");
        let _ = writeln!(md, "- vector: {}", s(&c["vector"], "kind"));
        let _ = writeln!(
            md,
            "- config hash: {}, seed {}",
            s(c, "config_hash"),
            c["seed"]
        );
        if let Some(r) = runs.get(&key) {
            let _ = writeln!(
                md,
                "- run: `{}` exited {}: {}",
                s(r, "command"),
                r["exit_code"],
                s(r, "message")
            );
        }
        rows.push(SummaryRow {
            path: rel.clone(),
            kind: method,
            model_id: s(c, "model_id"),
            verdict: s(c, "verdict"),
            detail,
            config_hash: s(c, "config_hash"),
            seed: c["seed"].as_u64().unwrap_or_default(),
        });
    }
    for (key, r) in runs.iter().filter(|(k, _)| !covered.contains(*k)) {
        let path = if key.is_empty() {
            RUN_RECORD.to_string()
        } else {
            format!("{key}/{RUN_RECORD}")
        };
        let _ = writeln!(md, "\n## {path}\n");
        let _ = writeln!(md, "- run: `{}` exited {}", s(r, "command"), r["exit_code"]);
        let _ = writeln!(md, "- message: {}", s(r, "message"));
        let _ = writeln!(
            md,
            "- config hash: {}, seed {}",
            s(r, "config_hash"),
            r["seed"]
        );
        rows.push(SummaryRow {
            path,
            kind: format!("run:{}", s(r, "command")),
            model_id: String::new(),
            verdict: if r["exit_code"].as_i64() == Some(0) {
                "pass".into()
            } else {
                "fail".into()
            },
            detail: s(r, "message"),
            config_hash: s(r, "config_hash"),
            seed: r["seed"].as_u64().unwrap_or_default(),
        });
    }

    let mut out = OutputDir::create(dest.unwrap_or(dir))?;
    out.write_bytes(SUMMARY_MD, md.as_bytes())?;
    out.write_csv(SUMMARY_CSV, &rows)?;
    Ok((
        ExitStatus::Ok,
        format!(
            "{} sections written to {}",
            rows.len(),
            out.root().join(SUMMARY_MD).display()
        ),
    ))
}
