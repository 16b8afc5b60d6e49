//! Pipeline orchestration: casci -> forge -> qse -> compare, with every
//! stage writing its artifact into the output bundle. Stages are
//! deterministic for a fixed config; artifacts are reused only when the
//! bundle's recorded config matches the current one byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use efqse_core::bipartite::bipartition;
use efqse_core::casci::{casci_spectrum, CasciOptions};
use efqse_core::chemio::{freeze_core, parse_fcidump_with, ActiveSpaceSpec, MolecularIntegrals};
use efqse_core::fermion::build_hamiltonian;
use efqse_core::forging::{
    optimize_ground_state, ExecutionMode, ForgedAnsatz, NoisePlan, OptimizerConfig, ShotPlan,
};
use efqse_core::noise::ReadoutModel;
use efqse_core::qse::{
    adaptive_epsilon_m, block_and_classify, bootstrap_uncertainty, build_excitation_basis,
    ClassifyOptions, SubspaceOperators,
};
use efqse_core::seeding;
use efqse_core::spectrum::LabeledSpectrum;

use crate::config::{Mode, RunConfig};
use crate::report::{comparison_csv, deviation_report, text_report, DeviationReport};

#[derive(Debug, Error)]
#[error("stage `{stage}` failed: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

fn fail<E: std::fmt::Display>(stage: &'static str) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError {
        stage,
        message: e.to_string(),
    }
}

/// The optimized ground-state record stored as ansatz.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzRecord {
    pub ansatz: ForgedAnsatz,
    pub energy_hartree: f64,
    pub sigma_hartree: f64,
    pub converged: bool,
    pub n_evaluations: usize,
    pub objective: String,
}

/// Everything a full run produces, for programmatic use.
#[derive(Debug)]
pub struct RunArtifacts {
    pub casci: LabeledSpectrum,
    pub ansatz: AnsatzRecord,
    pub qse: BTreeMap<Mode, LabeledSpectrum>,
    pub deviations: DeviationReport,
}

pub struct Pipeline {
    config: RunConfig,
    resolved: String,
    /// Whether existing artifacts in the bundle were produced by this
    /// exact config and may be reloaded instead of recomputed.
    reuse: bool,
}

const SEED_FORGE_OBJECTIVE: u64 = 1;
const SEED_QSE_SAMPLED: u64 = 2;
const SEED_QSE_NOISY: u64 = 3;
const SEED_BOOTSTRAP: u64 = 4;
const SEED_NOISE_MODEL: u64 = 6;
const SEED_OPTIMIZER: u64 = 10;

impl Pipeline {
    pub fn new(config: RunConfig) -> Result<Pipeline, PipelineError> {
        let resolved = config.resolved_text();
        let dir = config.output_dir.clone();
        fs::create_dir_all(&dir).map_err(fail("setup"))?;
        let marker = dir.join("resolved_config");
        let reuse = fs::read_to_string(&marker)
            .map(|existing| existing == resolved)
            .unwrap_or(false);
        fs::write(&marker, &resolved).map_err(fail("setup"))?;
        Ok(Pipeline {
            config,
            resolved,
            reuse,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    fn path(&self, name: &str) -> PathBuf {
        self.config.output_dir.join(name)
    }

    fn master_seed(&self) -> u64 {
        self.config.seed.unwrap_or(0)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), PipelineError> {
        let mut text = serde_json::to_string_pretty(value).map_err(fail("serialize"))?;
        text.push('\n');
        fs::write(self.path(name), text).map_err(fail("write"))
    }

    fn load_json<T: for<'de> Deserialize<'de>>(&self, name: &str) -> Option<T> {
        if !self.reuse {
            return None;
        }
        let text = fs::read_to_string(self.path(name)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Integrals after the optional frozen-core / active-space reduction.
    pub fn integrals(&self) -> Result<MolecularIntegrals, PipelineError> {
        let stage = "chemio";
        let text = fs::read_to_string(&self.config.fcidump).map_err(fail(stage))?;
        let convention = self.config.orbsym_convention().map_err(fail(stage))?;
        let full = parse_fcidump_with(&text, &convention).map_err(fail(stage))?;
        match &self.config.active_space {
            None => Ok(full),
            Some(active) => {
                let spec = ActiveSpaceSpec {
                    active_orbital_indices: active.orbitals.clone(),
                    n_active_electrons: active.electrons,
                };
                freeze_core(&full, &spec, &active.frozen).map_err(fail(stage))
            }
        }
    }

    pub fn casci(&self) -> Result<LabeledSpectrum, PipelineError> {
        if let Some(spectrum) = self.load_json::<LabeledSpectrum>("spectrum_casci.json") {
            return Ok(spectrum);
        }
        let stage = "casci";
        let ints = self.integrals()?;
        let options = CasciOptions {
            n_states: self.config.casci.n_states,
            ..CasciOptions::default()
        };
        let spectrum =
            casci_spectrum(&ints, ints.n_alpha, ints.n_beta, &options).map_err(fail(stage))?;
        self.write_json("spectrum_casci.json", &spectrum)?;
        Ok(spectrum)
    }

    fn objective_mode(&self) -> ExecutionMode {
        match self.config.optimizer.objective.as_str() {
            "sampled" => ExecutionMode::Sampled(ShotPlan {
                shots: self.config.shots.unwrap_or(100_000),
                seed: seeding::derive(self.master_seed(), &[SEED_FORGE_OBJECTIVE]),
            }),
            _ => ExecutionMode::Exact,
        }
    }

    pub fn forge(&self) -> Result<AnsatzRecord, PipelineError> {
        if let Some(record) = self.load_json::<AnsatzRecord>("ansatz.json") {
            return Ok(record);
        }
        let stage = "forge";
        let ints = self.integrals()?;
        let hamiltonian = build_hamiltonian(&ints);
        let bip = bipartition(&hamiltonian, ints.n_orbitals).map_err(fail(stage))?;
        let template = ForgedAnsatz::default_for(
            ints.n_electrons(),
            ints.n_orbitals,
            &ints.orbital_irreps,
        )
        .map_err(fail(stage))?;
        let optimizer = OptimizerConfig {
            max_iterations: self.config.optimizer.max_iterations,
            restarts: self.config.optimizer.restarts,
            seed: seeding::derive(self.master_seed(), &[SEED_OPTIMIZER]),
            tolerance: self.config.optimizer.tolerance,
            ..OptimizerConfig::default()
        };
        let result = optimize_ground_state(&template, &bip, &self.objective_mode(), &optimizer)
            .map_err(fail(stage))?;
        let record = AnsatzRecord {
            ansatz: result.ansatz,
            energy_hartree: result.energy,
            sigma_hartree: result.sigma,
            converged: result.converged,
            n_evaluations: result.n_evaluations,
            objective: self.config.optimizer.objective.clone(),
        };
        self.write_json("ansatz.json", &record)?;
        Ok(record)
    }

    fn execution_mode(&self, mode: Mode) -> Result<ExecutionMode, PipelineError> {
        let master = self.master_seed();
        Ok(match mode {
            Mode::Exact => ExecutionMode::Exact,
            Mode::Sampled => ExecutionMode::Sampled(ShotPlan {
                shots: self.config.shots.unwrap_or(100_000),
                seed: seeding::derive(master, &[SEED_QSE_SAMPLED]),
            }),
            Mode::Noisy => {
                let noise = self.config.noise.as_ref().ok_or(PipelineError {
                    stage: "qse",
                    message: "noisy mode without a [noise] section".into(),
                })?;
                let ints = self.integrals()?;
                let model = ReadoutModel::new(
                    vec![noise.p01; ints.n_orbitals],
                    vec![noise.p10; ints.n_orbitals],
                    seeding::derive(master, &[SEED_NOISE_MODEL]),
                )
                .map_err(fail("qse"))?;
                let mut plan = NoisePlan::mitigated(model);
                plan.twirl = noise.twirl;
                plan.post_select = noise.post_select;
                plan.rescale = noise.rescale;
                ExecutionMode::Noisy(
                    ShotPlan {
                        shots: self.config.shots.unwrap_or(100_000),
                        seed: seeding::derive(master, &[SEED_QSE_NOISY]),
                    },
                    plan,
                )
            }
        })
    }

    /// QSE spectra for every mode up to the configured one.
    pub fn qse(&self) -> Result<BTreeMap<Mode, LabeledSpectrum>, PipelineError> {
        let modes = self.config.mode.ladder();
        let mut out = BTreeMap::new();
        let mut missing = Vec::new();
        for &mode in &modes {
            match self.load_json::<LabeledSpectrum>(&spectrum_file(mode)) {
                Some(s) => {
                    out.insert(mode, s);
                }
                None => missing.push(mode),
            }
        }
        if missing.is_empty() {
            return Ok(out);
        }

        let stage = "qse";
        let ints = self.integrals()?;
        let record = self.forge()?;
        let ansatz = &record.ansatz;
        let dominant = ansatz
            .schmidt
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(k, _)| k)
            .unwrap_or(0);
        let reference = ansatz.bitstrings[dominant];
        let basis = build_excitation_basis(&reference, &ints.orbital_irreps);
        let hamiltonian = build_hamiltonian(&ints);
        let operators = SubspaceOperators::build(&basis, &hamiltonian).map_err(fail(stage))?;
        let reference_irrep = self.config.reference_irrep().map_err(fail(stage))?;

        for mode in missing {
            let execution = self.execution_mode(mode)?;
            let matrices = operators.assemble(ansatz, &execution).map_err(fail(stage))?;
            let epsilon_m = match self.config.qse.epsilon_m {
                Some(e) => e,
                None if mode == Mode::Exact => 1e-8,
                None => adaptive_epsilon_m(&matrices),
            };
            let options = ClassifyOptions {
                epsilon_m,
                epsilon_s: self.config.qse.epsilon_s,
                reference_irrep,
            };
            let mut spectrum = if mode == Mode::Exact {
                block_and_classify(&matrices, &basis, &options)
                    .map_err(fail(stage))?
                    .0
            } else {
                bootstrap_uncertainty(
                    &matrices,
                    &basis,
                    &options,
                    self.config.qse.bootstrap_resamples,
                    seeding::derive(self.master_seed(), &[SEED_BOOTSTRAP, mode as u64]),
                )
                .map_err(fail(stage))?
            };
            spectrum.mode = Some(mode.label().to_string());
            if mode != Mode::Exact {
                spectrum.shots = self.config.shots;
                spectrum.seed = self.config.seed;
            }
            self.write_json(&spectrum_file(mode), &spectrum)?;
            out.insert(mode, spectrum);
        }
        Ok(out)
    }

    /// Per-state comparison CSV plus the deviation summary.
    pub fn compare(&self) -> Result<RunArtifacts, PipelineError> {
        let stage = "compare";
        let casci = self.casci()?;
        let record = self.forge()?;
        let qse = self.qse()?;
        let mut spectra: Vec<(&str, &LabeledSpectrum)> = vec![("casci", &casci)];
        for (mode, spectrum) in &qse {
            spectra.push((mode.label(), spectrum));
        }
        let deviations = deviation_report(&spectra).map_err(fail(stage))?;
        fs::write(self.path("comparison.csv"), comparison_csv(&spectra))
            .map_err(fail(stage))?;
        self.write_json("deviation_summary.json", &deviations)?;
        Ok(RunArtifacts {
            casci,
            ansatz: record,
            qse,
            deviations,
        })
    }

    /// Full pipeline plus the rendered text report.
    pub fn report(&self) -> Result<String, PipelineError> {
        let artifacts = self.compare()?;
        let mut spectra: Vec<(&str, &LabeledSpectrum)> = vec![("casci", &artifacts.casci)];
        for (mode, spectrum) in &artifacts.qse {
            spectra.push((mode.label(), spectrum));
        }
        let text = text_report(&spectra, Some(&artifacts.deviations));
        fs::write(self.path("report.txt"), &text).map_err(fail("report"))?;
        Ok(text)
    }

    /// True when this construction found a bundle produced by the same
    /// resolved config.
    pub fn reusing(&self) -> bool {
        self.reuse
    }

    pub fn resolved_text(&self) -> &str {
        &self.resolved
    }
}

fn spectrum_file(mode: Mode) -> String {
    format!("spectrum_{}.json", mode.label())
}

/// Convenience wrapper: run every stage and return the artifacts.
pub fn run_pipeline(config: RunConfig) -> Result<RunArtifacts, PipelineError> {
    Pipeline::new(config)?.compare()
}
