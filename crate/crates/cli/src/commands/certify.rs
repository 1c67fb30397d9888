use std::collections::BTreeMap;

use cdlab_core::certify::{
    certify_extraction, certify_krylov, run_structure_suite, CertificateMeta, CyclicityCertificate,
    Evidence, StructureOptions, SuiteReport,
};
use cdlab_core::model::TruncatedTupleModel;
use cdlab_core::multiindex::{enumerate_layer, enumerate_up_to, MultiIndex};
use cdlab_core::synth::{
    extract_all, layer_approximant, max_feasible_k, naive_layer0, synthesize, CorrectionMode,
    ExtractionOptions, ExtractionReport, SynthOptions, WeightedSeries,
};
use serde::Serialize;

use super::{build_model, Run};
use crate::config::{ExtractionMode, Format};
use crate::error::{CliError, ExitStatus};
use crate::output::log10_opt;

#[derive(Serialize)]
struct CheckRow<'a> {
    check: &'a str,
    passed: bool,
    measured: f64,
    threshold: f64,
    detail: &'a str,
}

fn structure(run: &mut Run, model: &TruncatedTupleModel) -> Result<Option<SuiteReport>, CliError> {
    if !run.cfg.structure.enabled {
        return Ok(None);
    }
    let report = run_structure_suite(model, &StructureOptions::at_real(run.cfg.point()));
    let rows: Vec<CheckRow> = report
        .checks
        .iter()
        .map(|c| CheckRow {
            check: &c.name,
            passed: c.passed,
            measured: c.measured,
            threshold: c.threshold,
            detail: &c.detail,
        })
        .collect();
    let csv = run.cfg.output.wants(Format::Csv);
    let out = run.out()?;
    out.write_json("structure.json", &report)?;
    if csv {
        out.write_csv("structure.csv", &rows)?;
    }
    Ok(Some(report))
}

fn structure_message(report: &Option<SuiteReport>) -> Option<String> {
    let r = report.as_ref()?;
    let failed: Vec<&str> = r
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    (!failed.is_empty()).then(|| format!("structure checks failed: {}", failed.join(", ")))
}

/// Builds the model, writes its coefficient/matrix bundle and runs the
/// structure suite.
pub fn build_model_cmd(run: &mut Run) -> Result<(ExitStatus, String), CliError> {
    let (model, spanning) = build_model(&run.cfg)?;
    let json = run.cfg.output.wants(Format::Json);
    let out = run.out()?;
    if json {
        out.write_json("model.json", &model.bundle())?;
    }
    if let Some(s) = &spanning {
        out.write_json("spanning.json", s)?;
    }
    let report = structure(run, &model)?;
    match structure_message(&report) {
        Some(msg) => Ok((ExitStatus::CheckFailed, msg)),
        None => Ok((
            ExitStatus::Ok,
            format!(
                "model {} with ambient dimension {}",
                model.id(),
                model.ambient_dim()
            ),
        )),
    }
}

#[derive(Serialize)]
struct SynthesisTerm {
    index: String,
    degree: u32,
    log10_coefficient: f64,
}

#[derive(Serialize)]
struct SynthesisDocument<'a> {
    config_hash: &'a str,
    model_id: &'a str,
    options: SynthOptions,
    log10_norm: Option<f64>,
    log10_norm_bound: f64,
    terms: &'a [SynthesisTerm],
}

fn synthesis_options(run: &Run) -> SynthOptions {
    SynthOptions {
        precision: run.cfg.synthesis.precision,
        reach: run.cfg.synthesis.reach,
    }
}

fn write_synthesis(run: &mut Run, model: &TruncatedTupleModel) -> Result<WeightedSeries, CliError> {
    let options = synthesis_options(run);
    let synth = synthesize(model, &options)?;
    let terms: Vec<SynthesisTerm> = synth
        .series
        .terms()
        .map(|(i, c)| SynthesisTerm {
            index: i.to_string(),
            degree: i.degree(),
            log10_coefficient: c.log10_f64(),
        })
        .collect();
    let (csv, json) = (
        run.cfg.output.wants(Format::Csv),
        run.cfg.output.wants(Format::Json),
    );
    let hash = run.hash.clone();
    let out = run.out()?;
    if csv {
        out.write_csv("synthesis.csv", &terms)?;
    }
    if json {
        out.write_json(
            "synthesis.json",
            &SynthesisDocument {
                config_hash: &hash,
                model_id: model.id(),
                options,
                log10_norm: log10_opt(&synth.norm),
                log10_norm_bound: synth.norm_bound.log10_f64(),
                terms: &terms,
            },
        )?;
    }
    Ok(synth.series)
}

/// Builds the model and the weighted series `f`, checking its norm bound.
pub fn synthesize_cmd(run: &mut Run) -> Result<(ExitStatus, String), CliError> {
    let (model, _) = build_model(&run.cfg)?;
    let f = write_synthesis(run, &model)?;
    Ok((
        ExitStatus::Ok,
        format!("synthesized {} terms on {}", f.len(), model.id()),
    ))
}

#[derive(Serialize)]
struct ExtractionCsvRow {
    degree: u32,
    index: String,
    k: u32,
    log10_error: Option<f64>,
    log10_relative_error: Option<f64>,
    log10_bound: f64,
    within_bound: bool,
    within_tolerance: bool,
}

fn extraction_rows(report: &ExtractionReport) -> Vec<ExtractionCsvRow> {
    report
        .rows
        .iter()
        .map(|r| ExtractionCsvRow {
            degree: r.degree,
            index: r.index.to_string(),
            k: r.k,
            log10_error: log10_opt(&r.error),
            log10_relative_error: log10_opt(&r.relative_error),
            log10_bound: r.bound.log10_f64(),
            within_bound: r.within_bound,
            within_tolerance: r.within_tolerance,
        })
        .collect()
}

#[derive(Serialize)]
struct PlotRow {
    layer: u32,
    k: u32,
    /// Largest error over the indices of the layer.
    log10_error: Option<f64>,
    log10_bound: f64,
}

/// Error against `k` per layer with exact lower corrections, for every
/// feasible `k ≤ max_k`.
fn plot_rows(
    f: &WeightedSeries,
    model: &TruncatedTupleModel,
    target: u32,
    max_k: u32,
) -> Result<Vec<PlotRow>, CliError> {
    let m = model.dimension();
    let p = f.precision();
    let mut rows = Vec::new();
    for layer in 0..=target {
        let known: BTreeMap<MultiIndex, WeightedSeries> = if layer == 0 {
            BTreeMap::new()
        } else {
            enumerate_up_to(m, layer - 1)
                .into_iter()
                .map(|b| {
                    let u = WeightedSeries::unit(model, &b, p);
                    (b, u)
                })
                .collect()
        };
        let top = max_feasible_k(f, layer).map_or(max_k, |k| k.min(max_k));
        for k in 1..=top {
            let mut worst = None;
            let mut bound = None;
            for alpha in enumerate_layer(m, layer) {
                let a = layer_approximant(f, model, &alpha, k, &known)?;
                bound.get_or_insert_with(|| a.bound.log10_f64());
                if let Some(e) = log10_opt(&a.error) {
                    worst = Some(worst.map_or(e, |w: f64| w.max(e)));
                }
            }
            rows.push(PlotRow {
                layer,
                k,
                log10_error: worst,
                log10_bound: bound.expect("every layer has an index"),
            });
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct NaiveRow {
    k: u32,
    error: f64,
    bound: f64,
    violated: bool,
}

#[derive(Serialize)]
struct NaiveDocument<'a> {
    config_hash: &'a str,
    model_id: &'a str,
    selected_k: u32,
    explanation: &'a str,
    rows: &'a [NaiveRow],
}

const NAIVE_EXPLANATION: &str = "Layer 0 computed in IEEE doubles: f is materialized with \
ξ_α = 1/(|α|!)^{α!} as a double, shifted by (k+1)ε and divided by ξ_{(k+1)ε}. For large \
anchors ξ underflows to 0, the division produces NaN or infinity and the measured error \
leaves the factorial bound. Small anchors may instead flush the true error to 0.0, which is \
below the bound but wrong. The log-domain extraction does not have either failure.";

fn naive(run: &mut Run, model: &TruncatedTupleModel) -> Result<(ExitStatus, String), CliError> {
    let cfg = &run.cfg.extraction;
    let selected = cfg.k_schedule.k_for(0, cfg.target_degree)?;
    let max_k = cfg.plot_max_k.max(selected);
    let rows: Vec<NaiveRow> = (1..=max_k)
        .map(|k| {
            let r = naive_layer0(model, k);
            NaiveRow {
                k,
                error: r.error,
                bound: r.bound,
                violated: r.violated,
            }
        })
        .collect();
    let hash = run.hash.clone();
    let csv = run.cfg.output.wants(Format::Csv);
    let out = run.out()?;
    if csv {
        out.write_csv("naive.csv", &rows)?;
    }
    out.write_json(
        "naive.json",
        &NaiveDocument {
            config_hash: &hash,
            model_id: model.id(),
            selected_k: selected,
            explanation: NAIVE_EXPLANATION,
            rows: &rows,
        },
    )?;
    let sel = &rows[selected as usize - 1];
    if sel.violated {
        return Err(CliError::BoundViolation(format!(
            "double-precision layer-0 error {:e} exceeds the bound {:e} at k = {selected}; see naive.json",
            sel.error, sel.bound
        )));
    }
    Ok((
        ExitStatus::Ok,
        format!(
            "double-precision layer-0 error {:e} within the bound {:e} at k = {selected}",
            sel.error, sel.bound
        ),
    ))
}

fn verdict_line(cert: &CyclicityCertificate) -> String {
    let method = match &cert.evidence {
        Evidence::Extraction { .. } => "extraction",
        Evidence::KrylovRank { .. } => "krylov",
    };
    format!("{method} certificate: {:?}", cert.verdict).to_lowercase()
}

/// Full pipeline: model, structure suite, synthesis, extraction table, plot
/// data, extraction certificate and the optional Krylov cross-check.
pub fn certify_cmd(run: &mut Run) -> Result<(ExitStatus, String), CliError> {
    let (model, spanning) = build_model(&run.cfg)?;
    if let Some(s) = &spanning {
        run.out()?.write_json("spanning.json", s)?;
    }
    let report = structure(run, &model)?;
    let f = write_synthesis(run, &model)?;

    let ec = run.cfg.extraction.clone();
    let mode = match ec.mode {
        ExtractionMode::Naive => return naive(run, &model),
        ExtractionMode::Exact => CorrectionMode::Exact,
        ExtractionMode::Recovered => CorrectionMode::Recovered,
    };
    let (csv, json) = (
        run.cfg.output.wants(Format::Csv),
        run.cfg.output.wants(Format::Json),
    );
    let plot = plot_rows(&f, &model, ec.target_degree, ec.plot_max_k)?;
    if csv {
        run.out()?.write_csv("plot_data.csv", &plot)?;
    }
    let options = ExtractionOptions {
        schedule: ec.k_schedule.clone(),
        mode,
        target_degree: ec.target_degree,
        tolerance: ec.tolerance,
        policy: ec.bound_policy,
    };
    let extraction = extract_all(&f, &model, &options)?;
    let out = run.out()?;
    if csv {
        out.write_csv("extraction.csv", &extraction_rows(&extraction))?;
    }
    if json {
        out.write_json("extraction.json", &extraction)?;
    }

    let meta = CertificateMeta::new(run.hash.clone(), run.cfg.seed);
    let cc = run.cfg.certificate.clone();
    let cert = certify_extraction(
        &model,
        &f,
        &cc.k_schedule,
        run.cfg.certificate_target(),
        cc.tolerance,
        &meta,
    )?;
    run.out()?.write_json("certificate.json", &cert)?;
    let mut lines = vec![verdict_line(&cert)];
    let mut ok = cert.passed();
    if run.cfg.krylov.enabled {
        let k = certify_krylov(
            &model,
            &f,
            run.cfg.krylov_degree(model.support_degree()),
            run.cfg.krylov.svd_tolerance,
            &meta,
        )?;
        run.out()?.write_json("krylov_certificate.json", &k)?;
        lines.push(verdict_line(&k));
        ok &= k.passed();
    }
    if !extraction.passed() {
        ok = false;
        lines.push(match extraction.first_failure() {
            Some(r) => format!("extraction table fails at {}", r.index),
            None => "extraction table failed".into(),
        });
    }
    if let Some(msg) = structure_message(&report) {
        ok = false;
        lines.push(msg);
    }
    let status = if ok {
        ExitStatus::Ok
    } else {
        ExitStatus::CheckFailed
    };
    Ok((status, lines.join("; ")))
}
