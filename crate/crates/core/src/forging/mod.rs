//! The forged ansatz: a Schmidt sum of identical N-qubit circuit states
//! on the alpha and beta registers, the circuits that prepare its
//! diagonal and superposition states, a direct 2N-qubit reference state,
//! and the resource accounting of the circuit family.

mod evaluator;
mod optimize;

pub use evaluator::{
    collect_strings, forged_expectation, off_diagonal_element, ExecutionMode, ForgedEvaluator,
    Measured, MeasuredComplex, NoisePlan, ReconstructionConvention, ShotPlan,
};
pub use optimize::{optimize_ground_state, OptimizerConfig, OptimizationResult};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fermion::FermionError;
use crate::noise::NoiseError;
use crate::statevector::{BitString, Circuit, Gate, QubitState, StateError, VprepVariant};
use crate::symmetry::Irrep;

/// Largest register for which the 2N-qubit reference state is built.
pub const ORACLE_QUBIT_CAP: usize = 14;

pub const SCHMIDT_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ForgedError {
    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),
    #[error("bitstrings differ in {distance} positions; superposition circuits support exactly 2")]
    UnsupportedSuperposition { distance: usize },
    #[error("off-diagonal element requested for identical bitstring indices {0}")]
    WrongEntry(usize),
    #[error("register of {n} orbitals exceeds the {cap}-orbital cap for the 2N-qubit state")]
    StateTooLarge { n: usize, cap: usize },
    #[error("operator register size {op} does not match ansatz register {ansatz}")]
    RegisterMismatch { op: usize, ansatz: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Fermion(#[from] FermionError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Bitstrings, hop-gate layout, angles, and Schmidt coefficients of the
/// forged wavefunction sum_k lambda_k U(theta)|x_k> (x) U(theta)|x_k>.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgedAnsatz {
    pub n_qubits: usize,
    /// Computational basis strings x_k, equal Hamming weight.
    pub bitstrings: Vec<BitString>,
    /// Ordered hop-gate qubit pairs.
    pub hop_layout: Vec<(usize, usize)>,
    /// Gate position -> parameter index; sharing allowed.
    pub param_map: Vec<usize>,
    /// One angle per distinct parameter, radians.
    pub thetas: Vec<f64>,
    /// Schmidt coefficients, one per bitstring, sum of squares 1.
    pub schmidt: Vec<f64>,
}

/// Which prepared state a circuit realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitMode {
    /// U(theta) |x_k>
    Diagonal(usize),
    /// U(theta) (|x_k> + i^p |x_l>)/sqrt(2)
    Superposition(usize, usize, u8),
}

impl ForgedAnsatz {
    /// Default ansatz for an (n_electrons, n_orbitals) active space: the
    /// closed-shell reference string plus its single swap between the
    /// highest occupied and the lowest unoccupied orbital of matching
    /// irrep, hop-gates on adjacent pairs (a full ladder plus extra
    /// virtual-block gates), all angles zero, Schmidt vector (1, 0).
    pub fn default_for(
        n_electrons: usize,
        n_orbitals: usize,
        irreps: &[Irrep],
    ) -> Result<ForgedAnsatz, ForgedError> {
        if n_electrons % 2 != 0 {
            return Err(ForgedError::InvalidAnsatz(
                "odd electron count; the forging bipartition needs a closed shell".into(),
            ));
        }
        let n_occ = n_electrons / 2;
        if n_occ == 0 || n_occ >= n_orbitals {
            return Err(ForgedError::InvalidAnsatz(format!(
                "{n_electrons} electrons in {n_orbitals} orbitals leaves no occupied/virtual pair"
            )));
        }
        if !irreps.is_empty() && irreps.len() != n_orbitals {
            return Err(ForgedError::InvalidAnsatz(format!(
                "{} irrep labels for {} orbitals",
                irreps.len(),
                n_orbitals
            )));
        }

        let reference = BitString::new((1u64 << n_occ) - 1, n_orbitals);
        let (occ_swap, virt_swap) = swap_pair(n_occ, n_orbitals, irreps);
        let partner = BitString::new(
            reference.bits & !(1u64 << occ_swap) | (1u64 << virt_swap),
            n_orbitals,
        );

        let n_virt = n_orbitals - n_occ;
        let mut hop_layout: Vec<(usize, usize)> = (0..n_orbitals - 1).map(|i| (i, i + 1)).collect();
        for j in 0..n_virt.saturating_sub(2) {
            hop_layout.push((n_orbitals - 2 - j, n_orbitals - 1 - j));
        }
        let n_hops = hop_layout.len();

        let ansatz = ForgedAnsatz {
            n_qubits: n_orbitals,
            bitstrings: vec![reference, partner],
            hop_layout,
            param_map: (0..n_hops).collect(),
            thetas: vec![0.0; n_hops],
            schmidt: vec![1.0, 0.0],
        };
        ansatz.validate()?;
        Ok(ansatz)
    }

    pub fn validate(&self) -> Result<(), ForgedError> {
        if self.bitstrings.is_empty() {
            return Err(ForgedError::InvalidAnsatz("no bitstrings".into()));
        }
        let weight = self.bitstrings[0].weight();
        for b in &self.bitstrings {
            if b.len != self.n_qubits {
                return Err(ForgedError::InvalidAnsatz(format!(
                    "bitstring {b} does not span {} qubits",
                    self.n_qubits
                )));
            }
            if b.weight() != weight {
                return Err(ForgedError::InvalidAnsatz(format!(
                    "bitstring {b} breaks the equal-Hamming-weight requirement"
                )));
            }
        }
        if self.schmidt.len() != self.bitstrings.len() {
            return Err(ForgedError::InvalidAnsatz(format!(
                "{} Schmidt coefficients for {} bitstrings",
                self.schmidt.len(),
                self.bitstrings.len()
            )));
        }
        let norm: f64 = self.schmidt.iter().map(|l| l * l).sum();
        if (norm - 1.0).abs() > SCHMIDT_NORM_TOLERANCE {
            return Err(ForgedError::InvalidAnsatz(format!(
                "Schmidt coefficients have squared norm {norm}, expected 1"
            )));
        }
        if self.param_map.len() != self.hop_layout.len() {
            return Err(ForgedError::InvalidAnsatz(
                "parameter map length differs from hop layout".into(),
            ));
        }
        for &(q1, q2) in &self.hop_layout {
            if q1 >= self.n_qubits || q2 >= self.n_qubits {
                return Err(ForgedError::InvalidAnsatz(format!(
                    "hop pair ({q1},{q2}) out of range"
                )));
            }
            if q1 == q2 {
                return Err(ForgedError::InvalidAnsatz(format!(
                    "hop pair ({q1},{q2}) repeats a qubit"
                )));
            }
        }
        for &p in &self.param_map {
            if p >= self.thetas.len() {
                return Err(ForgedError::InvalidAnsatz(format!(
                    "parameter index {p} out of range for {} angles",
                    self.thetas.len()
                )));
            }
        }
        Ok(())
    }

    pub fn electron_pair_weight(&self) -> u32 {
        self.bitstrings[0].weight()
    }

    /// Distinct hop angles plus the two Schmidt parameters.
    pub fn n_parameters(&self) -> usize {
        let distinct: std::collections::BTreeSet<usize> = self.param_map.iter().copied().collect();
        distinct.len() + 2
    }

    pub fn with_parameters(&self, thetas: &[f64], schmidt: &[f64]) -> ForgedAnsatz {
        let mut out = self.clone();
        out.thetas = thetas.to_vec();
        out.schmidt = schmidt.to_vec();
        out
    }

    fn hop_gates(&self) -> impl Iterator<Item = Gate> + '_ {
        self.hop_layout
            .iter()
            .zip(self.param_map.iter())
            .map(|(&(q1, q2), &p)| Gate::Hop {
                theta: self.thetas[p],
                q1,
                q2,
            })
    }

    /// The two positions in which x_k and x_l differ, ordered as
    /// (occupied in k, occupied in l); errors unless the distance is 2.
    pub fn swap_positions(&self, k: usize, l: usize) -> Result<(usize, usize), ForgedError> {
        let xk = &self.bitstrings[k];
        let xl = &self.bitstrings[l];
        let diff = xk.difference(xl);
        if diff.len() != 2 {
            return Err(ForgedError::UnsupportedSuperposition {
                distance: diff.len(),
            });
        }
        if xk.bit(diff[0]) {
            Ok((diff[0], diff[1]))
        } else {
            Ok((diff[1], diff[0]))
        }
    }
}

/// Highest occupied / lowest unoccupied orbital pair sharing an irrep;
/// falls back to the HOMO/LUMO pair when no irreps match.
fn swap_pair(n_occ: usize, n_orbitals: usize, irreps: &[Irrep]) -> (usize, usize) {
    if !irreps.is_empty() {
        for o in (0..n_occ).rev() {
            for v in n_occ..n_orbitals {
                if irreps[o] == irreps[v] {
                    return (o, v);
                }
            }
        }
    }
    (n_occ - 1, n_occ)
}

/// The state-preparation circuit for one mode of the forged protocol:
/// X gates on the occupied bits (diagonal) or on the shared occupied bits
/// followed by the phi^p block on the differing pair (superposition),
/// then the hop-gate ladder. Measurement basis rotations are appended by
/// the caller.
pub fn build_forged_circuit(
    ansatz: &ForgedAnsatz,
    mode: CircuitMode,
) -> Result<Circuit, ForgedError> {
    ansatz.validate()?;
    let mut circuit = Circuit::new(ansatz.n_qubits);
    match mode {
        CircuitMode::Diagonal(k) => {
            for q in ansatz.bitstrings[k].set_bits() {
                circuit.gates.push(Gate::X(q));
            }
        }
        CircuitMode::Superposition(k, l, p) => {
            let (occ, virt) = ansatz.swap_positions(k, l)?;
            let shared = BitString::new(
                ansatz.bitstrings[k].bits & ansatz.bitstrings[l].bits,
                ansatz.n_qubits,
            );
            for q in shared.set_bits() {
                circuit.gates.push(Gate::X(q));
            }
            circuit.gates.push(Gate::Vprep {
                occupied: occ,
                unoccupied: virt,
                variant: VprepVariant::Phi(p % 4),
            });
        }
    }
    circuit.gates.extend(ansatz.hop_gates());
    Ok(circuit)
}

/// The 2N-qubit state sum_k lambda_k (U|x_k>) (x) (U|x_k>), alpha register
/// in the low qubits. Reference route for the forged protocol.
pub fn direct_statevector(ansatz: &ForgedAnsatz) -> Result<QubitState, ForgedError> {
    ansatz.validate()?;
    let n = ansatz.n_qubits;
    if n > ORACLE_QUBIT_CAP {
        return Err(ForgedError::StateTooLarge {
            n,
            cap: ORACLE_QUBIT_CAP,
        });
    }
    let dim = 1usize << n;
    let mut joint = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (k, &lambda) in ansatz.schmidt.iter().enumerate() {
        if lambda == 0.0 {
            continue;
        }
        let circuit = build_forged_circuit(ansatz, CircuitMode::Diagonal(k))?;
        let psi = QubitState::run(&circuit)?;
        let amps = psi.amplitudes();
        for (b_beta, a_beta) in amps.iter().enumerate() {
            if a_beta.norm_sqr() == 0.0 {
                continue;
            }
            for (b_alpha, a_alpha) in amps.iter().enumerate() {
                joint[(b_beta << n) | b_alpha] += lambda * a_alpha * a_beta;
            }
        }
    }
    let state = QubitState::from_amplitudes(2 * n, joint)?;
    Ok(state)
}

/// Circuit resources for the superposition-mode template with per-qubit
/// measurement blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResourceCount {
    pub qubits: usize,
    pub parameters: usize,
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
}

/// Gate accounting with per-block costs of (4, 1) for a V block, (4, 3)
/// for a hop-gate and (2, 0) for each measured qubit. The depth column
/// follows the hardware template packing: a serialized V block of depth
/// 5, hop bands of depth 6 (one band per four hop-gates, plus two), and
/// a depth-3 measurement block.
pub fn resource_count(ansatz: &ForgedAnsatz) -> Result<ResourceCount, ForgedError> {
    ansatz.validate()?;
    if ansatz.bitstrings.len() != 2 {
        return Err(ForgedError::InvalidAnsatz(format!(
            "resource template is defined for 2 bitstrings, ansatz has {}",
            ansatz.bitstrings.len()
        )));
    }
    // the superposition circuit prepares the shared occupied bits with X
    ansatz.swap_positions(0, 1)?;
    let n = ansatz.n_qubits;
    let n_occ = ansatz.electron_pair_weight() as usize;
    let n_hops = ansatz.hop_layout.len();
    let x_gates = n_occ - 1;

    let single_qubit_gates = x_gates + 4 + 4 * n_hops + 2 * n;
    let two_qubit_gates = 1 + 3 * n_hops;
    let bands = if n_hops == 0 { 0 } else { n_hops / 4 + 2 };
    let depth = 5 + 6 * bands + 3;

    Ok(ResourceCount {
        qubits: n,
        parameters: ansatz.n_parameters(),
        single_qubit_gates,
        two_qubit_gates,
        depth,
    })
}
