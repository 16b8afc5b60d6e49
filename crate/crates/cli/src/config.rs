//! Declarative run configuration: one TOML document drives the whole
//! pipeline. Unknown keys are rejected, mode-dependent requirements are
//! validated up front, and the resolved form is emitted into the output
//! bundle so every number in a report can be reproduced from one file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use efqse_core::chemio::OrbsymConvention;
use efqse_core::symmetry::Irrep;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
    Noisy,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
            Mode::Noisy => "noisy",
        }
    }

    /// All modes the pipeline produces up to and including this one.
    pub fn ladder(self) -> Vec<Mode> {
        match self {
            Mode::Exact => vec![Mode::Exact],
            Mode::Sampled => vec![Mode::Exact, Mode::Sampled],
            Mode::Noisy => vec![Mode::Exact, Mode::Sampled, Mode::Noisy],
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            "noisy" => Ok(Mode::Noisy),
            other => Err(format!("unknown mode `{other}` (exact|sampled|noisy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ActiveSpaceConfig {
    /// 0-based orbital indices into the FCIDUMP, strictly increasing.
    pub orbitals: Vec<usize>,
    pub electrons: usize,
    #[serde(default)]
    pub frozen: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub p01: f64,
    pub p10: f64,
    #[serde(default = "default_true")]
    pub twirl: bool,
    #[serde(default = "default_true")]
    pub post_select: bool,
    #[serde(default = "default_true")]
    pub rescale: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// exact | sampled objective for the variational loop.
    #[serde(default = "default_objective")]
    pub objective: String,
}

fn default_max_iterations() -> usize {
    400
}
fn default_restarts() -> usize {
    3
}
fn default_tolerance() -> f64 {
    1e-8
}
fn default_objective() -> String {
    "exact".to_string()
}

impl Default for OptimizerSection {
    fn default() -> Self {
        OptimizerSection {
            max_iterations: default_max_iterations(),
            restarts: default_restarts(),
            tolerance: default_tolerance(),
            objective: default_objective(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QseSection {
    /// Overlap threshold; if absent, exact mode uses 1e-8 and sampled
    /// modes use max(1e-8, 3 median sigma_M).
    #[serde(default)]
    pub epsilon_m: Option<f64>,
    #[serde(default = "default_epsilon_s")]
    pub epsilon_s: f64,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    #[serde(default = "default_reference_irrep")]
    pub reference_irrep: String,
}

fn default_epsilon_s() -> f64 {
    0.1
}
fn default_resamples() -> usize {
    200
}
fn default_reference_irrep() -> String {
    "A1".to_string()
}

impl Default for QseSection {
    fn default() -> Self {
        QseSection {
            epsilon_m: None,
            epsilon_s: default_epsilon_s(),
            bootstrap_resamples: default_resamples(),
            reference_irrep: default_reference_irrep(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CasciSection {
    #[serde(default = "default_n_states")]
    pub n_states: usize,
}

fn default_n_states() -> usize {
    16
}

impl Default for CasciSection {
    fn default() -> Self {
        CasciSection {
            n_states: default_n_states(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbsymSection {
    /// Irrep labels for ORBSYM integers 1..=4.
    pub mapping: [String; 4],
}

/// The full run configuration as parsed from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub fcidump: PathBuf,
    #[serde(default)]
    pub molecule: Option<String>,
    pub mode: Mode,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub active_space: Option<ActiveSpaceConfig>,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub qse: QseSection,
    #[serde(default)]
    pub casci: CasciSection,
    #[serde(default)]
    pub orbsym: Option<OrbsymSection>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: RunConfig = toml::from_str(&text)?;
        if let Some(mode) = overrides.mode {
            config.mode = mode;
        }
        if let Some(shots) = overrides.shots {
            config.shots = Some(shots);
        }
        if let Some(seed) = overrides.seed {
            config.seed = Some(seed);
        }
        if let Some(dir) = &overrides.output_dir {
            config.output_dir = dir.clone();
        }
        if let Some(threads) = overrides.threads {
            config.threads = Some(threads);
        }
        // paths in the file are relative to the file's directory
        let base = path.parent().unwrap_or(Path::new("."));
        if config.fcidump.is_relative() {
            config.fcidump = base.join(&config.fcidump);
        }
        if config.output_dir.is_relative() {
            config.output_dir = base.join(&config.output_dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.mode != Mode::Exact {
            if self.shots.is_none() {
                return Err(ConfigError::Invalid(format!(
                    "mode `{}` requires `shots`",
                    self.mode.label()
                )));
            }
            if self.seed.is_none() {
                return Err(ConfigError::Invalid(format!(
                    "mode `{}` requires `seed`",
                    self.mode.label()
                )));
            }
            if self.shots == Some(0) {
                return Err(ConfigError::Invalid("`shots` must be positive".into()));
            }
        }
        if self.mode == Mode::Noisy && self.noise.is_none() {
            return Err(ConfigError::Invalid(
                "mode `noisy` requires a [noise] section".into(),
            ));
        }
        if let Some(noise) = &self.noise {
            for p in [noise.p01, noise.p10] {
                if !(0.0..0.5).contains(&p) {
                    return Err(ConfigError::Invalid(format!(
                        "readout probability {p} outside [0, 0.5)"
                    )));
                }
            }
        }
        if let Some(active) = &self.active_space {
            if active.orbitals.is_empty() {
                return Err(ConfigError::Invalid(
                    "[active_space] lists no orbitals".into(),
                ));
            }
            if !active.orbitals.windows(2).all(|w| w[0] < w[1]) {
                return Err(ConfigError::Invalid(
                    "[active_space] orbitals must be strictly increasing".into(),
                ));
            }
        }
        if !["exact", "sampled"].contains(&self.optimizer.objective.as_str()) {
            return Err(ConfigError::Invalid(format!(
                "optimizer objective `{}` (exact|sampled)",
                self.optimizer.objective
            )));
        }
        self.reference_irrep()?;
        self.orbsym_convention()?;
        Ok(())
    }

    pub fn reference_irrep(&self) -> Result<Irrep, ConfigError> {
        Irrep::parse(&self.qse.reference_irrep)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn orbsym_convention(&self) -> Result<OrbsymConvention, ConfigError> {
        match &self.orbsym {
            None => Ok(OrbsymConvention::default()),
            Some(section) => {
                let mut labels = [Irrep::A1; 4];
                for (i, label) in section.mapping.iter().enumerate() {
                    labels[i] =
                        Irrep::parse(label).map_err(|e| ConfigError::Invalid(e.to_string()))?;
                }
                Ok(OrbsymConvention { labels })
            }
        }
    }

    /// Canonical serialized form recorded in the output bundle.
    pub fn resolved_text(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
