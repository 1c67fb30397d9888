mod certify;
mod lemmas;
mod report;

pub use certify::{build_model_cmd, certify_cmd, synthesize_cmd};
pub use lemmas::verify_lemmas_cmd;
pub use report::report_cmd;

use cdlab_core::model::{
    build_rank1, build_rank_n, random_sections, spanning_sections, GrowthSpec, SectionPolynomial,
    TruncatedTupleModel,
};
use cdlab_core::multiindex::MultiIndex;
use cdlab_core::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{RunConfig, SectionsConfig};
use crate::error::{CliError, ExitStatus};
use crate::output::OutputDir;

pub const RUN_RECORD_SCHEMA: &str = "cdlab.run/v1";
pub const EFFECTIVE_CONFIG: &str = "effective_config.toml";
pub const RUN_RECORD: &str = "run.json";

/// A resolved configuration plus the lazily created output directory.
pub struct Run {
    pub cfg: RunConfig,
    pub hash: String,
    out: Option<OutputDir>,
}

impl Run {
    pub fn new(cfg: RunConfig) -> Self {
        let hash = cfg.hash();
        Self {
            cfg,
            hash,
            out: None,
        }
    }

    /// Creates the output directory on first use and echoes the effective
    /// configuration into it.
    pub fn out(&mut self) -> Result<&mut OutputDir, CliError> {
        if self.out.is_none() {
            let mut dir = OutputDir::create(&self.cfg.output.directory)?;
            dir.write_bytes(EFFECTIVE_CONFIG, self.cfg.to_toml().as_bytes())?;
            self.out = Some(dir);
        }
        Ok(self.out.as_mut().expect("just created"))
    }

    pub fn has_output(&self) -> bool {
        self.out.is_some()
    }

    /// Writes the run record when anything was written.
    pub fn finish(
        &mut self,
        command: &str,
        status: ExitStatus,
        message: &str,
    ) -> Result<(), CliError> {
        let hash = self.hash.clone();
        let seed = self.cfg.seed;
        let Some(out) = self.out.as_mut() else {
            return Ok(());
        };
        let mut artifacts: Vec<String> = out.written().to_vec();
        artifacts.push(RUN_RECORD.to_string());
        artifacts.sort();
        let record = RunRecord {
            schema: RUN_RECORD_SCHEMA,
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash: &hash,
            seed,
            exit_code: status.code(),
            message,
            artifacts,
        };
        out.write_json(RUN_RECORD, &record)
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    schema: &'a str,
    command: &'a str,
    tool_version: &'a str,
    config_hash: &'a str,
    seed: u64,
    exit_code: i32,
    message: &'a str,
    artifacts: Vec<String>,
}

/// How the sections of a direct sum were chosen.
#[derive(Debug, Clone, Serialize)]
pub struct SpanningRecord {
    pub configured: String,
    pub ambient_dimension: usize,
    pub attempts: Vec<SpanningAttempt>,
    /// Label of the accepted attempt.
    pub accepted: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanningAttempt {
    pub label: String,
    pub rank: usize,
}

/// Builds the configured model. Rank-n models whose configured sections do
/// not span are retried with seeded random sections.
pub fn build_model(
    cfg: &RunConfig,
) -> Result<(TruncatedTupleModel, Option<SpanningRecord>), CliError> {
    let mc = &cfg.model;
    let growth = GrowthSpec::new(cfg.delta().to_vec(), mc.growth_constant);
    let base = build_rank1(
        &mc.profile,
        mc.dimension,
        mc.truncation_degree,
        cfg.radii(),
        &growth,
    )?;
    let n = mc.rank;
    if n == 1 {
        return Ok((base, None));
    }
    let m = mc.dimension;
    let degree = mc.truncation_degree;
    let (label, sections) = match &mc.sections {
        SectionsConfig::Monomial => (
            "monomial",
            (0..n as u32)
                .map(|i| {
                    let mut e = vec![0; m];
                    e[0] = i;
                    SectionPolynomial::monomial(MultiIndex::new(e).expect("m ≥ 1"))
                })
                .collect(),
        ),
        SectionsConfig::Spanning => ("spanning", spanning_sections(m, degree, n)),
        SectionsConfig::Explicit { polynomials } => (
            "explicit",
            polynomials
                .iter()
                .map(|terms| SectionPolynomial::from_terms(m, terms))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let models = vec![base; n];
    let mut record = SpanningRecord {
        configured: label.to_string(),
        ambient_dimension: 0,
        attempts: Vec::new(),
        accepted: String::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut candidate = sections;
    let mut attempt_label = label.to_string();
    for attempt in 0..=mc.spanning_retries {
        match build_rank_n(&models, &candidate) {
            Ok(model) => {
                record.ambient_dimension = model.ambient_dim();
                record.attempts.push(SpanningAttempt {
                    label: attempt_label.clone(),
                    rank: model.ambient_dim(),
                });
                record.accepted = attempt_label;
                return Ok((model, Some(record)));
            }
            Err(CoreError::SpanningFailure { rank, ambient }) => {
                record.ambient_dimension = ambient;
                record.attempts.push(SpanningAttempt {
                    label: attempt_label.clone(),
                    rank,
                });
            }
            Err(e) => return Err(e.into()),
        }
        attempt_label = format!("random-{}", attempt + 1);
        candidate = random_sections(m, degree, n, &mut rng);
    }
    let last = record.attempts.last().map_or(0, |a| a.rank);
    Err(CliError::CheckFailed(format!(
        "no section choice spans: last attempt reached rank {last} of {} after {} random retries",
        record.ambient_dimension, mc.spanning_retries
    )))
}
