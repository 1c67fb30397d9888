//! Run configuration: a versioned TOML document with strict keys.
//!
//! Omitted fields take defaults, and [`RunConfig::resolve`] writes every
//! default back so the effective configuration echoed next to the outputs is
//! complete.

use std::path::{Path, PathBuf};

use cdlab_core::certify::DEFAULT_SVD_TOLERANCE;
use cdlab_core::logweight::DEFAULT_PRECISION;
use cdlab_core::model::{SectionTerm, WeightProfile};
use cdlab_core::multiindex::LemmaGrid;
use cdlab_core::synth::{BoundPolicy, KSchedule, Reach};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub lemmas: LemmaConfig,
    #[serde(default)]
    pub structure: StructureConfig,
    #[serde(default)]
    pub synthesis: SynthesisConfig,
    #[serde(default)]
    pub extraction: ExtractionConfig,
    #[serde(default)]
    pub certificate: CertificateConfig,
    #[serde(default)]
    pub krylov: KrylovConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub dimension: usize,
    pub truncation_degree: u32,
    /// Number of rank-one copies in the direct sum.
    pub rank: usize,
    pub profile: WeightProfile,
    /// Polydisc radii; defaults to 0.5 in every coordinate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Growth radii `δ`; defaults to 1 in every coordinate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    /// Growth constant `M`; the tightest value over the model when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_constant: Option<f64>,
    pub sections: SectionsConfig,
    /// Seeded random sections tried after the configured ones fail to span.
    pub spanning_retries: u32,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            truncation_degree: 8,
            rank: 1,
            profile: WeightProfile::Hardy,
            radii: None,
            delta: None,
            growth_constant: None,
            sections: SectionsConfig::Monomial,
            spanning_retries: 8,
        }
    }
}

/// Sections `φ_i` multiplying the rank-one frames of a direct sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SectionsConfig {
    /// `φ_i = z_1^{i−1}`.
    Monomial,
    /// `φ_i = z_1^{(i−1)(N+1)}`.
    Spanning,
    /// One term list per component.
    Explicit { polynomials: Vec<Vec<SectionTerm>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaConfig {
    pub dimensions: Vec<usize>,
    pub layers: Vec<u32>,
    pub ks: Vec<u32>,
    pub max_extra_degree: u32,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        let g = LemmaGrid::default();
        Self {
            dimensions: g.dimensions,
            layers: g.layers,
            ks: g.ks,
            max_extra_degree: g.max_extra_degree,
        }
    }
}

impl LemmaConfig {
    pub fn grid(&self) -> LemmaGrid {
        LemmaGrid {
            dimensions: self.dimensions.clone(),
            layers: self.layers.clone(),
            ks: self.ks.clone(),
            max_extra_degree: self.max_extra_degree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StructureConfig {
    pub enabled: bool,
    /// Real point for the eigenvector and kernel checks; defaults to
    /// `(0.3, 0.2, 0.1, …)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
}

impl Default for StructureConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            point: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthesisConfig {
    /// Bits of the log-domain floats.
    pub precision: usize,
    pub reach: Reach,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            precision: DEFAULT_PRECISION,
            reach: Reach::Unbounded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractionMode {
    /// Corrections use the model's true lower coefficients.
    Exact,
    /// Corrections use previously recovered coefficients.
    Recovered,
    /// Layer 0 only, in doubles, to show where plain floats break down.
    Naive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractionConfig {
    pub mode: ExtractionMode,
    pub k_schedule: KSchedule,
    pub target_degree: u32,
    pub tolerance: f64,
    pub bound_policy: BoundPolicy,
    /// Largest `k` in the plot table.
    pub plot_max_k: u32,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            mode: ExtractionMode::Exact,
            k_schedule: KSchedule::Constant { k: 2 },
            target_degree: 3,
            tolerance: 1e-10,
            bound_policy: BoundPolicy::Enforce,
            plot_max_k: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertificateConfig {
    /// Recovered-corrections schedule for the extraction certificate.
    pub k_schedule: KSchedule,
    /// Defaults to the extraction target degree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_degree: Option<u32>,
    pub tolerance: f64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            k_schedule: KSchedule::Descending { top: 1, step: 2 },
            target_degree: None,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KrylovConfig {
    pub enabled: bool,
    /// Largest `|β|` in the orbit; the model's support degree when absent,
    /// which is the smallest value that can reach full rank.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    pub svd_tolerance: f64,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            max_degree: None,
            svd_tolerance: DEFAULT_SVD_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Not part of the configuration hash.
    pub directory: PathBuf,
    /// Formats for tables and auxiliary documents. Certificates and the run
    /// record are always JSON.
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("cdlab-out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub precision: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            model: ModelConfig::default(),
            lemmas: LemmaConfig::default(),
            structure: StructureConfig::default(),
            synthesis: SynthesisConfig::default(),
            extraction: ExtractionConfig::default(),
            certificate: CertificateConfig::default(),
            krylov: KrylovConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(config_err(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    /// Reads `path`, or the defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    if e.kind() == std::io::ErrorKind::NotFound {
                        CliError::MissingInput(vec![p.display().to_string()])
                    } else {
                        CliError::Io {
                            path: p.to_path_buf(),
                            source: e,
                        }
                    }
                })?;
                Self::parse(&text)
            }
        }
    }

    /// Applies overrides, fills every default and validates.
    pub fn resolve(mut self, overrides: &Overrides) -> Result<Self, CliError> {
        if let Some(out) = &overrides.out {
            self.output.directory = out.clone();
        }
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(p) = overrides.precision {
            self.synthesis.precision = p;
        }
        let m = self.model.dimension;
        if m == 0 {
            return Err(config_err("model.dimension must be at least 1"));
        }
        if self.model.rank == 0 {
            return Err(config_err("model.rank must be at least 1"));
        }
        self.model.radii.get_or_insert_with(|| vec![0.5; m]);
        self.model.delta.get_or_insert_with(|| vec![1.0; m]);
        self.structure.point.get_or_insert_with(|| {
            (0..m)
                .map(|i| match i {
                    0 => 0.3,
                    1 => 0.2,
                    _ => 0.1,
                })
                .collect()
        });
        self.certificate
            .target_degree
            .get_or_insert(self.extraction.target_degree);
        self.output.formats.sort();
        self.output.formats.dedup();
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), CliError> {
        let m = self.model.dimension;
        let check_len = |name: &str, v: &Option<Vec<f64>>| match v {
            Some(v) if v.len() != m => Err(config_err(format!(
                "{name} has {} entries for dimension {m}",
                v.len()
            ))),
            _ => Ok(()),
        };
        check_len("model.radii", &self.model.radii)?;
        check_len("model.delta", &self.model.delta)?;
        check_len("structure.point", &self.structure.point)?;
        if let SectionsConfig::Explicit { polynomials } = &self.model.sections {
            if polynomials.len() != self.model.rank {
                return Err(config_err(format!(
                    "{} section polynomials for rank {}",
                    polynomials.len(),
                    self.model.rank
                )));
            }
        }
        if self.synthesis.precision < 64 {
            return Err(config_err(format!(
                "synthesis.precision must be at least 64 bits, got {}",
                self.synthesis.precision
            )));
        }
        for (name, t) in [
            ("extraction.tolerance", self.extraction.tolerance),
            ("certificate.tolerance", self.certificate.tolerance),
            ("krylov.svd_tolerance", self.krylov.svd_tolerance),
        ] {
            if !(t > 0.0 && t < 1.0) {
                return Err(config_err(format!("{name} must lie in (0, 1), got {t}")));
            }
        }
        if self.extraction.plot_max_k == 0 {
            return Err(config_err("extraction.plot_max_k must be at least 1"));
        }
        if self.output.formats.is_empty() {
            return Err(config_err("output.formats must not be empty"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    /// SHA-256 of the effective configuration without the output directory,
    /// so the same run written to two places hashes the same.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.directory = PathBuf::new();
        hex::encode(Sha256::digest(c.to_toml().as_bytes()))
    }

    pub fn radii(&self) -> &[f64] {
        self.model.radii.as_deref().unwrap_or_default()
    }

    pub fn delta(&self) -> &[f64] {
        self.model.delta.as_deref().unwrap_or_default()
    }

    pub fn point(&self) -> &[f64] {
        self.structure.point.as_deref().unwrap_or_default()
    }

    pub fn certificate_target(&self) -> u32 {
        self.certificate
            .target_degree
            .unwrap_or(self.extraction.target_degree)
    }

    pub fn krylov_degree(&self, support_degree: u32) -> u32 {
        self.krylov.max_degree.unwrap_or(support_degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_the_echo() {
        let cfg = RunConfig::default().resolve(&Overrides::default()).unwrap();
        let echo = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(echo, cfg);
        assert_eq!(
            echo.resolve(&Overrides::default()).unwrap().hash(),
            cfg.hash()
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::parse("schema_version = 1\n[model]\ndimenson = 2\n").unwrap_err();
        assert!(matches!(err, CliError::Config(_)), "{err}");
    }

    #[test]
    fn hash_ignores_output_directory_only() {
        let a = RunConfig::default().resolve(&Overrides::default()).unwrap();
        let b = RunConfig::default()
            .resolve(&Overrides {
                out: Some("elsewhere".into()),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::default()
            .resolve(&Overrides {
                seed: Some(9),
                ..Default::default()
            })
            .unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn profile_and_schedule_tables_parse() {
        let cfg = RunConfig::parse(
            r#"
schema_version = 1
[model]
profile = { name = "custom", table = [{ index = [0, 0], value = 1.0 }] }
[synthesis]
reach = { truncated = 8 }
[extraction]
k_schedule = { kind = "per-layer", ks = [3, 2] }
"#,
        )
        .unwrap();
        assert_eq!(cfg.model.profile.name(), "custom");
        assert_eq!(cfg.synthesis.reach, Reach::Truncated(8));
        assert_eq!(
            cfg.extraction.k_schedule,
            KSchedule::PerLayer { ks: vec![3, 2] }
        );
    }

    #[test]
    fn wrong_schema_version_is_a_config_error() {
        assert!(matches!(
            RunConfig::parse("schema_version = 7"),
            Err(CliError::Config(_))
        ));
    }
}
