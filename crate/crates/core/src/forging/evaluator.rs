//! Forged expectation values.
//!
//! Every quantity is assembled from per-circuit Pauli expectations over
//! the diagonal states U|x_k> and the superpositions U(|x_k> + i^p
//! |x_l>)/sqrt(2). In exact mode the expectations come from the
//! statevector; in sampled mode from seeded finite-shot histograms with
//! qubit-wise-commuting strings sharing a measurement setting; in noisy
//! mode the histograms pass through a readout channel with twirling,
//! particle-number post-selection on number-basis settings, and
//! calibrated rescaling on the rotated ones.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{build_forged_circuit, CircuitMode, ForgedAnsatz, ForgedError};
use crate::bipartite::BipartiteOperator;
use crate::noise::{self, ReadoutModel};
use crate::pauli::{PauliString, PauliSum};
use crate::seeding;
use crate::statevector::{sample_from_probabilities, MeasurementBasis, QubitState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotPlan {
    pub shots: u64,
    pub seed: u64,
}

/// Readout channel plus the mitigation steps applied on top of it. The
/// fixed order is twirl, then post-selection on number-basis settings,
/// then calibrated rescaling of the remaining settings.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePlan {
    pub model: ReadoutModel,
    pub twirl: bool,
    pub post_select: bool,
    pub rescale: bool,
    pub n_twirls: usize,
}

impl NoisePlan {
    pub fn mitigated(model: ReadoutModel) -> Self {
        NoisePlan {
            model,
            twirl: true,
            post_select: true,
            rescale: true,
            n_twirls: noise::DEFAULT_TWIRLS,
        }
    }

    pub fn unmitigated(model: ReadoutModel) -> Self {
        NoisePlan {
            model,
            twirl: false,
            post_select: false,
            rescale: false,
            n_twirls: noise::DEFAULT_TWIRLS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExecutionMode {
    Exact,
    Sampled(ShotPlan),
    Noisy(ShotPlan, NoisePlan),
}

impl ExecutionMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, ExecutionMode::Exact)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ExecutionMode::Exact => "exact",
            ExecutionMode::Sampled(_) => "sampled",
            ExecutionMode::Noisy(..) => "noisy",
        }
    }
}

/// Coefficient set for reconstructing off-diagonal matrix elements from
/// the four phase superpositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconstructionConvention {
    /// (-i)^p / 2 under normalized |phi^p>; reproduces <x_k|A|x_l>.
    Normalized,
    /// (-i)^p / 4 as typeset; yields exactly half the matrix element.
    /// Kept as a documented regression variant.
    AsPrinted,
}

impl ReconstructionConvention {
    pub fn coefficient(self, p: u8) -> Complex64 {
        let minus_i_p = crate::pauli::i_power((4 - (p % 4)) % 4);
        match self {
            ReconstructionConvention::Normalized => minus_i_p * 0.5,
            ReconstructionConvention::AsPrinted => minus_i_p * 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredComplex {
    pub value: Complex64,
    pub sigma: f64,
}

/// Register all Pauli strings of `op` that require measurement.
pub fn collect_strings(op: &BipartiteOperator, into: &mut BTreeSet<PauliString>) {
    for t in op.terms() {
        if !t.alpha.is_identity() {
            into.insert(t.alpha);
        }
        if !t.beta.is_identity() {
            into.insert(t.beta);
        }
    }
}

/// One measurement setting: a basis per qubit, shared by the qubit-wise
/// commuting strings assigned to it.
#[derive(Debug, Clone)]
struct Setting {
    bases: Vec<MeasurementBasis>,
    strings: Vec<PauliString>,
}

impl Setting {
    fn is_number_basis(&self) -> bool {
        self.bases.iter().all(|&b| b == MeasurementBasis::Z)
    }
}

fn string_letter(s: &PauliString, q: usize) -> Option<MeasurementBasis> {
    let bit = 1u64 << q;
    match ((s.x & bit) != 0, (s.z & bit) != 0) {
        (false, false) => None,
        (true, false) => Some(MeasurementBasis::X),
        (true, true) => Some(MeasurementBasis::Y),
        (false, true) => Some(MeasurementBasis::Z),
    }
}

/// First-fit grouping of strings into shared settings; unconstrained
/// qubits measure Z. Deterministic for a sorted string list.
fn group_settings(strings: &BTreeSet<PauliString>, n_qubits: usize) -> Vec<Setting> {
    let mut drafts: Vec<(Vec<Option<MeasurementBasis>>, Vec<PauliString>)> = Vec::new();
    'strings: for &s in strings {
        'drafts: for (bases, members) in drafts.iter_mut() {
            for q in 0..n_qubits {
                if let Some(letter) = string_letter(&s, q) {
                    if let Some(assigned) = bases[q] {
                        if assigned != letter {
                            continue 'drafts;
                        }
                    }
                }
            }
            for q in 0..n_qubits {
                if let Some(letter) = string_letter(&s, q) {
                    bases[q] = Some(letter);
                }
            }
            members.push(s);
            continue 'strings;
        }
        let mut bases = vec![None; n_qubits];
        for q in 0..n_qubits {
            bases[q] = string_letter(&s, q);
        }
        drafts.push((bases, vec![s]));
    }
    drafts
        .into_iter()
        .map(|(bases, strings)| Setting {
            bases: bases
                .into_iter()
                .map(|b| b.unwrap_or(MeasurementBasis::Z))
                .collect(),
            strings,
        })
        .collect()
}

/// Per-circuit, per-string expectation estimates with standard errors.
type Table = BTreeMap<PauliString, Measured>;

/// Evaluator for forged expectation values over a fixed set of Pauli
/// strings. Build once with every string the batch needs, then evaluate
/// any number of bipartite operators against the same measurement data.
#[derive(Debug)]
pub struct ForgedEvaluator {
    n_qubits: usize,
    lambdas: Vec<f64>,
    exact: bool,
    /// Tables indexed like `circuits()`: diagonals first, then the four
    /// phase superpositions (two-bitstring ansatz only).
    tables: Vec<Table>,
}

fn circuits_for(k_strings: usize) -> Vec<CircuitMode> {
    let mut out: Vec<CircuitMode> = (0..k_strings).map(CircuitMode::Diagonal).collect();
    if k_strings == 2 {
        for p in 0..4 {
            out.push(CircuitMode::Superposition(0, 1, p));
        }
    }
    out
}

impl ForgedEvaluator {
    pub fn build(
        ansatz: &ForgedAnsatz,
        mode: &ExecutionMode,
        strings: &BTreeSet<PauliString>,
    ) -> Result<ForgedEvaluator, ForgedError> {
        ansatz.validate()?;
        let k = ansatz.bitstrings.len();
        if k > 2 {
            return Err(ForgedError::InvalidAnsatz(format!(
                "evaluation supports at most two Schmidt terms, ansatz has {k}"
            )));
        }
        if k == 2 {
            ansatz.swap_positions(0, 1)?;
        }
        let modes = circuits_for(k);
        let tables = build_tables(ansatz, &modes, strings, mode)?;
        Ok(ForgedEvaluator {
            n_qubits: ansatz.n_qubits,
            lambdas: ansatz.schmidt.clone(),
            exact: mode.is_exact(),
            tables,
        })
    }

    fn lookup(&self, circuit: usize, s: &PauliString) -> Result<Measured, ForgedError> {
        self.tables[circuit]
            .get(s)
            .copied()
            .ok_or_else(|| ForgedError::InvalidAnsatz(format!(
                "Pauli string {} was not registered before evaluation",
                s.letters(self.n_qubits)
            )))
    }

    /// Off-diagonal matrix element <x_0|U+ P U|x_1> from the four phase
    /// superpositions.
    fn cross_element(
        &self,
        s: &PauliString,
        convention: ReconstructionConvention,
    ) -> Result<Complex64, ForgedError> {
        let base = self.lambdas.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..4u8 {
            let est = self.lookup(base + p as usize, s)?;
            acc += convention.coefficient(p) * est.value;
        }
        Ok(acc)
    }

    /// Forged expectation of a bipartite operator, with first-order
    /// shot-noise propagation for the real part.
    pub fn evaluate(&self, op: &BipartiteOperator) -> Result<MeasuredComplex, ForgedError> {
        if op.n_qubits != self.n_qubits {
            return Err(ForgedError::RegisterMismatch {
                op: op.n_qubits,
                ansatz: self.n_qubits,
            });
        }
        let k = self.lambdas.len();
        let conv = ReconstructionConvention::Normalized;
        let mut value = Complex64::new(0.0, 0.0);
        let mut gradients: BTreeMap<(usize, PauliString), f64> = BTreeMap::new();

        for term in op.terms() {
            let c = term.coeff;
            let mut r = 0.0;
            for (ki, &lambda) in self.lambdas.iter().enumerate() {
                if lambda == 0.0 && self.exact {
                    continue;
                }
                let a = self.lookup(ki, &term.alpha)?;
                let b = self.lookup(ki, &term.beta)?;
                r += lambda * lambda * a.value * b.value;
                if !self.exact {
                    let w = c.re * lambda * lambda;
                    *gradients.entry((ki, term.alpha)).or_insert(0.0) += w * b.value;
                    *gradients.entry((ki, term.beta)).or_insert(0.0) += w * a.value;
                }
            }
            if k == 2 {
                let a01 = self.cross_element(&term.alpha, conv)?;
                let b01 = self.cross_element(&term.beta, conv)?;
                let weight = 2.0 * self.lambdas[0] * self.lambdas[1];
                r += weight * (a01 * b01).re;
                if !self.exact {
                    for p in 0..4u8 {
                        let gamma = conv.coefficient(p);
                        let ga = c.re * weight * (gamma * b01).re;
                        let gb = c.re * weight * (a01 * gamma).re;
                        *gradients.entry((k + p as usize, term.alpha)).or_insert(0.0) += ga;
                        *gradients.entry((k + p as usize, term.beta)).or_insert(0.0) += gb;
                    }
                }
            }
            value += c * r;
        }

        let mut variance = 0.0;
        if !self.exact {
            for ((circuit, s), grad) in &gradients {
                let est = self.lookup(*circuit, s)?;
                variance += grad * grad * est.sigma * est.sigma;
            }
        }
        Ok(MeasuredComplex {
            value,
            sigma: variance.sqrt(),
        })
    }
}

/// Single-operator convenience: expectation of a Hermitian bipartite
/// operator under the forged protocol.
pub fn forged_expectation(
    ansatz: &ForgedAnsatz,
    op: &BipartiteOperator,
    mode: &ExecutionMode,
) -> Result<Measured, ForgedError> {
    let mut strings = BTreeSet::new();
    collect_strings(op, &mut strings);
    let evaluator = ForgedEvaluator::build(ansatz, mode, &strings)?;
    let m = evaluator.evaluate(op)?;
    Ok(Measured {
        value: m.value.re,
        sigma: m.sigma,
    })
}

/// Off-diagonal elements <x_k|U+ A U|x_l> for a batch of register
/// operators, reconstructed from the four phase-superposition circuits.
pub fn off_diagonal_element(
    ansatz: &ForgedAnsatz,
    k: usize,
    l: usize,
    operators: &[PauliSum],
    mode: &ExecutionMode,
    convention: ReconstructionConvention,
) -> Result<Vec<MeasuredComplex>, ForgedError> {
    ansatz.validate()?;
    if k == l {
        return Err(ForgedError::WrongEntry(k));
    }
    ansatz.swap_positions(k, l)?;
    let mut strings = BTreeSet::new();
    for op in operators {
        for t in op.terms() {
            if !t.string.is_identity() {
                strings.insert(t.string);
            }
        }
    }
    let modes: Vec<CircuitMode> = (0..4)
        .map(|p| CircuitMode::Superposition(k, l, p))
        .collect();
    let tables = build_tables(ansatz, &modes, &strings, mode)?;

    let mut out = Vec::with_capacity(operators.len());
    for op in operators {
        if op.n_qubits() != ansatz.n_qubits {
            return Err(ForgedError::RegisterMismatch {
                op: op.n_qubits(),
                ansatz: ansatz.n_qubits,
            });
        }
        let mut value = Complex64::new(0.0, 0.0);
        let mut variance = 0.0;
        for t in op.terms() {
            for p in 0..4u8 {
                let gamma = convention.coefficient(p);
                let est = tables[p as usize].get(&t.string).copied().unwrap_or(Measured {
                    value: 1.0,
                    sigma: 0.0,
                });
                value += t.coeff * gamma * est.value;
                variance += (t.coeff * gamma).norm_sqr() * est.sigma * est.sigma;
            }
        }
        out.push(MeasuredComplex {
            value,
            sigma: variance.sqrt(),
        });
    }
    Ok(out)
}

/// Simulate each circuit and produce the per-string estimate tables for
/// the requested mode.
fn build_tables(
    ansatz: &ForgedAnsatz,
    modes: &[CircuitMode],
    strings: &BTreeSet<PauliString>,
    mode: &ExecutionMode,
) -> Result<Vec<Table>, ForgedError> {
    let n = ansatz.n_qubits;
    let mut states: Vec<QubitState> = Vec::with_capacity(modes.len());
    for &m in modes {
        states.push(QubitState::run(&build_forged_circuit(ansatz, m)?)?);
    }

    let mut tables: Vec<Table> = match mode {
        ExecutionMode::Exact => states
            .par_iter()
            .map(|state| {
                strings
                    .iter()
                    .map(|s| {
                        (*s, Measured {
                            value: state.expectation_string(s),
                            sigma: 0.0,
                        })
                    })
                    .collect()
            })
            .collect(),
        ExecutionMode::Sampled(plan) => {
            let settings = group_settings(strings, n);
            sampled_tables(&states, &settings, plan, None, ansatz.electron_pair_weight())?
        }
        ExecutionMode::Noisy(plan, noise_plan) => {
            let settings = group_settings(strings, n);
            sampled_tables(
                &states,
                &settings,
                plan,
                Some(noise_plan),
                ansatz.electron_pair_weight(),
            )?
        }
    };

    let identity = PauliString::identity();
    for table in &mut tables {
        table.insert(identity, Measured { value: 1.0, sigma: 0.0 });
    }
    Ok(tables)
}

/// Estimates for every (circuit, setting) pair from seeded histograms.
/// Each pair is an independent task with a derived seed, so results do
/// not depend on scheduling.
fn sampled_tables(
    states: &[QubitState],
    settings: &[Setting],
    plan: &ShotPlan,
    noise_plan: Option<&NoisePlan>,
    conserved_weight: u32,
) -> Result<Vec<Table>, ForgedError> {
    let attenuations = match noise_plan {
        Some(np) if np.rescale => Some(noise::calibrate_attenuations(
            &np.model,
            plan.shots,
            seeding::derive(plan.seed, &[0xCA11B]),
            np.n_twirls,
        )?),
        _ => None,
    };

    let tasks: Vec<(usize, usize)> = (0..states.len())
        .flat_map(|c| (0..settings.len()).map(move |s| (c, s)))
        .collect();

    let results: Vec<Vec<(PauliString, Measured)>> = tasks
        .par_iter()
        .map(|&(c, s)| -> Result<Vec<(PauliString, Measured)>, ForgedError> {
            let setting = &settings[s];
            let probs = states[c].measurement_probabilities(&setting.bases)?;
            let n = states[c].n_qubits;
            let task_seed = seeding::derive(plan.seed, &[c as u64, s as u64]);

            let (counts, post_selected) = match noise_plan {
                None => {
                    let mut rng = seeding::rng_for(task_seed, &[]);
                    (
                        sample_from_probabilities(n, &probs, plan.shots, &mut rng)?,
                        false,
                    )
                }
                Some(np) => {
                    let corrupted = if np.twirl {
                        noise::twirled_counts(
                            n,
                            |mask, k_shots, k| {
                                let permuted: Vec<f64> = (0..probs.len())
                                    .map(|b| probs[b ^ mask as usize])
                                    .collect();
                                let mut rng = seeding::rng_for(task_seed, &[0x1DEA, k]);
                                Ok(sample_from_probabilities(n, &permuted, k_shots, &mut rng)
                                    .map_err(noise::NoiseError::from)?)
                            },
                            &np.model,
                            plan.shots,
                            task_seed,
                            np.n_twirls,
                        )?
                    } else {
                        let mut rng = seeding::rng_for(task_seed, &[]);
                        let ideal = sample_from_probabilities(n, &probs, plan.shots, &mut rng)?;
                        let mut noise_rng = seeding::rng_for(task_seed, &[0xBAD]);
                        noise::corrupt_counts_with_rng(&ideal, &np.model, &mut noise_rng)?
                    };
                    if np.post_select && setting.is_number_basis() {
                        let (kept, _rate) = noise::post_select(&corrupted, conserved_weight)?;
                        (kept, true)
                    } else {
                        (corrupted, false)
                    }
                }
            };

            let mut entries = Vec::with_capacity(setting.strings.len());
            for string in &setting.strings {
                let (mut est, mut sigma) = counts.parity_expectation(string.support());
                if let (Some(atts), false) = (&attenuations, post_selected) {
                    let mut attenuation = 1.0;
                    for q in 0..n {
                        if string.support() >> q & 1 == 1 {
                            attenuation *= atts[q];
                        }
                    }
                    if attenuation < 0.1 {
                        return Err(noise::NoiseError::UnreliableMitigation(attenuation).into());
                    }
                    est /= attenuation;
                    sigma /= attenuation;
                }
                entries.push((*string, Measured { value: est, sigma }));
            }
            Ok(entries)
        })
        .collect::<Result<_, _>>()?;

    let mut tables = vec![Table::new(); states.len()];
    for (&(c, _), entries) in tasks.iter().zip(results.iter()) {
        for &(s, m) in entries {
            tables[c].insert(s, m);
        }
    }
    Ok(tables)
}
