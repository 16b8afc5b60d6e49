//! Dense N-qubit statevector simulation for the gate set used by the
//! forged circuits: Pauli X, the two-qubit preparation blocks V, the
//! parameterized hop-gate, and pre-measurement basis rotations.
//!
//! Basis indexing is little-endian: bit i of a basis index is the state
//! of qubit i, and qubit i represents spatial orbital i.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::pauli::{PauliError, PauliString, PauliSum};

pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("qubit {qubit} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("two-qubit gate applied to identical qubits {0}")]
    DuplicateQubits(usize),
    #[error("sampling requires at least one shot")]
    ZeroShots,
    #[error("state norm deviates from 1 by {0:e}")]
    NormViolation(f64),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("basis list has {found} entries for {expected} qubits")]
    BasisLengthMismatch { expected: usize, found: usize },
}

/// Occupation pattern of an N-qubit register, printed with orbital 0 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    pub bits: u64,
    pub len: usize,
}

impl BitString {
    pub fn new(bits: u64, len: usize) -> Self {
        assert!(len <= 64 && bits < (1u64 << len.min(63)) << u64::from(len == 64));
        BitString { bits, len }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let mut bits = 0u64;
        for (i, c) in text.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return None,
            }
        }
        Some(BitString {
            bits,
            len: text.len(),
        })
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn set_bits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.bit(i))
    }

    /// Positions where the two strings differ.
    pub fn difference(&self, other: &BitString) -> Vec<usize> {
        let d = self.bits ^ other.bits;
        (0..self.len.max(other.len)).filter(|&i| d >> i & 1 == 1).collect()
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        Ok(())
    }
}

impl serde::Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        BitString::parse(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("`{text}` is not a 0/1 string")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasurementBasis {
    X,
    Y,
    Z,
}

impl MeasurementBasis {
    /// Single-qubit rotation bringing this basis onto Z.
    fn rotation(self) -> Option<[[Complex64; 2]; 2]> {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let r = |v: f64| Complex64::new(v, 0.0);
        match self {
            MeasurementBasis::Z => None,
            // H
            MeasurementBasis::X => Some([
                [r(inv_sqrt2), r(inv_sqrt2)],
                [r(inv_sqrt2), -r(inv_sqrt2)],
            ]),
            // H S^dagger
            MeasurementBasis::Y => Some([
                [r(inv_sqrt2), Complex64::new(0.0, -inv_sqrt2)],
                [r(inv_sqrt2), Complex64::new(0.0, inv_sqrt2)],
            ]),
        }
    }
}

/// Preparation blocks acting on a (occupied-slot, unoccupied-slot) pair
/// starting from |00>.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VprepVariant {
    /// |10>: occupied slot filled.
    Ten,
    /// |01>: unoccupied slot filled.
    ZeroOne,
    /// (|10> + i^p |01>)/sqrt(2), p in 0..=3.
    Phi(u8),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    Vprep {
        occupied: usize,
        unoccupied: usize,
        variant: VprepVariant,
    },
    Hop {
        theta: f64,
        q1: usize,
        q2: usize,
    },
    Rotate {
        qubit: usize,
        basis: MeasurementBasis,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }
}

/// The hop-gate matrix on the local basis (|00>, |10>, |01>, |11>):
/// |00> -> |00>, |01> -> cos t |01> + sin t |10>,
/// |10> -> sin t |01> - cos t |10>, |11> -> -|11>.
/// Number-conserving by construction.
pub fn hop_matrix(theta: f64) -> [[Complex64; 4]; 4] {
    let r = |v: f64| Complex64::new(v, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (s, c) = theta.sin_cos();
    // local index m = bit(q1) + 2 bit(q2); m=1 is |10>, m=2 is |01>
    [
        [r(1.0), zero, zero, zero],
        [zero, -r(c), r(s), zero],
        [zero, r(s), r(c), zero],
        [zero, zero, zero, -r(1.0)],
    ]
}

/// Dense state of an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    pub n_qubits: usize,
    amps: Vec<Complex64>,
}

impl QubitState {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        QubitState { n_qubits, amps }
    }

    pub fn from_bitstring(bits: BitString) -> Self {
        let mut state = QubitState::zero(bits.len);
        state.amps[0] = Complex64::new(0.0, 0.0);
        state.amps[bits.bits as usize] = Complex64::new(1.0, 0.0);
        state
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self, StateError> {
        assert_eq!(amps.len(), 1 << n_qubits);
        let state = QubitState { n_qubits, amps };
        state.check_norm()?;
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_norm(&self) -> Result<(), StateError> {
        let dev = (self.norm_sqr() - 1.0).abs();
        if dev > NORM_TOLERANCE {
            return Err(StateError::NormViolation(dev));
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<(), StateError> {
        if q >= self.n_qubits {
            return Err(StateError::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) -> Result<(), StateError> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let a0 = self.amps[b];
                let a1 = self.amps[b | bit];
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Two-qubit gate in the local basis m = bit(q1) + 2 bit(q2).
    pub fn apply_pair(
        &mut self,
        q1: usize,
        q2: usize,
        m: [[Complex64; 4]; 4],
    ) -> Result<(), StateError> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(StateError::DuplicateQubits(q1));
        }
        let b1 = 1usize << q1;
        let b2 = 1usize << q2;
        for b in 0..self.amps.len() {
            if b & b1 == 0 && b & b2 == 0 {
                let idx = [b, b | b1, b | b2, b | b1 | b2];
                let a: Vec<Complex64> = idx.iter().map(|&i| self.amps[i]).collect();
                for (row, &i) in idx.iter().enumerate() {
                    self.amps[i] =
                        m[row][0] * a[0] + m[row][1] * a[1] + m[row][2] * a[2] + m[row][3] * a[3];
                }
            }
        }
        Ok(())
    }

    pub fn apply_x(&mut self, q: usize) -> Result<(), StateError> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        self.apply_single(q, [[zero, one], [one, zero]])
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), StateError> {
        match *gate {
            Gate::X(q) => self.apply_x(q),
            Gate::Hop { theta, q1, q2 } => apply_hop_gate(self, theta, q1, q2),
            Gate::Vprep {
                occupied,
                unoccupied,
                variant,
            } => apply_vprep(self, occupied, unoccupied, variant),
            Gate::Rotate { qubit, basis } => {
                if let Some(m) = basis.rotation() {
                    self.apply_single(qubit, m)
                } else {
                    self.check_qubit(qubit)
                }
            }
        }
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), StateError> {
        for g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn run(circuit: &Circuit) -> Result<QubitState, StateError> {
        let mut state = QubitState::zero(circuit.n_qubits);
        state.apply_circuit(circuit)?;
        Ok(state)
    }

    /// Exact expectation of one Hermitian Pauli string.
    pub fn expectation_string(&self, s: &PauliString) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let (b2, phase) = s.apply_to_basis(b as u64);
            acc += self.amps[b2 as usize].conj() * phase * amp;
        }
        acc.re
    }

    /// Probability distribution over basis outcomes after rotating each
    /// qubit into its measurement basis.
    pub fn measurement_probabilities(
        &self,
        bases: &[MeasurementBasis],
    ) -> Result<Vec<f64>, StateError> {
        if bases.len() != self.n_qubits {
            return Err(StateError::BasisLengthMismatch {
                expected: self.n_qubits,
                found: bases.len(),
            });
        }
        let mut rotated = self.clone();
        for (q, basis) in bases.iter().enumerate() {
            if let Some(m) = basis.rotation() {
                rotated.apply_single(q, m)?;
            }
        }
        Ok(rotated.amps.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Finite-shot sampling of the Born distribution; deterministic for a
    /// fixed seed. The histogram totals `shots`.
    pub fn sample_counts(
        &self,
        bases: &[MeasurementBasis],
        shots: u64,
        seed: u64,
    ) -> Result<Counts, StateError> {
        let mut rng = crate::seeding::rng_for(seed, &[]);
        let probs = self.measurement_probabilities(bases)?;
        sample_from_probabilities(self.n_qubits, &probs, shots, &mut rng)
    }
}

/// Draw an exact multinomial sample by chained binomial splits over the
/// outcomes in ascending basis order.
pub fn sample_from_probabilities(
    n_qubits: usize,
    probs: &[f64],
    shots: u64,
    rng: &mut impl Rng,
) -> Result<Counts, StateError> {
    if shots == 0 {
        return Err(StateError::ZeroShots);
    }
    let total: f64 = probs.iter().sum();
    let mut remaining_shots = shots;
    let mut remaining_prob = total;
    let mut map = BTreeMap::new();
    for (b, &p) in probs.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        if remaining_prob <= 0.0 {
            break;
        }
        let cond = (p / remaining_prob).clamp(0.0, 1.0);
        let n = if b + 1 == probs.len() || cond >= 1.0 {
            remaining_shots
        } else {
            Binomial::new(remaining_shots, cond)
                .expect("conditional probability in [0,1]")
                .sample(rng)
        };
        if n > 0 {
            map.insert(b as u64, n);
        }
        remaining_shots -= n;
        remaining_prob -= p;
    }
    if remaining_shots > 0 {
        // numerical leftover lands on the final outcome
        *map.entry(probs.len() as u64 - 1).or_insert(0) += remaining_shots;
    }
    Ok(Counts {
        n_qubits,
        map,
    })
}

/// Shot histogram over basis-state outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    pub n_qubits: usize,
    pub map: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn empty(n_qubits: usize) -> Self {
        Counts {
            n_qubits,
            map: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> u64 {
        self.map.values().sum()
    }

    pub fn add(&mut self, outcome: u64, n: u64) {
        if n > 0 {
            *self.map.entry(outcome).or_insert(0) += n;
        }
    }

    /// Mean of the Z-parity over the support mask, with its standard error.
    pub fn parity_expectation(&self, support: u64) -> (f64, f64) {
        let total = self.total();
        if total == 0 {
            return (0.0, 0.0);
        }
        let mut acc: i64 = 0;
        for (&b, &n) in &self.map {
            let parity = if (b & support).count_ones() % 2 == 0 {
                1i64
            } else {
                -1i64
            };
            acc += parity * n as i64;
        }
        let mean = acc as f64 / total as f64;
        let var = ((1.0 - mean * mean) / total as f64).max(1.0 / (total as f64 * total as f64));
        (mean, var.sqrt())
    }
}

/// Hop-gate application; see [`hop_matrix`] for the convention.
pub fn apply_hop_gate(
    state: &mut QubitState,
    theta: f64,
    q1: usize,
    q2: usize,
) -> Result<(), StateError> {
    state.apply_pair(q1, q2, hop_matrix(theta))
}

/// V-block application on a pair assumed to start in |00>.
pub fn apply_vprep(
    state: &mut QubitState,
    occupied: usize,
    unoccupied: usize,
    variant: VprepVariant,
) -> Result<(), StateError> {
    match variant {
        VprepVariant::Ten => state.apply_x(occupied),
        VprepVariant::ZeroOne => state.apply_x(unoccupied),
        VprepVariant::Phi(p) => {
            // |00> -> |10> -> (|10> + |01>)/sqrt(2), then the phase gate
            // R_p in {I, ZS, Z, S} on the occupied slot fixes i^p.
            state.apply_x(occupied)?;
            apply_hop_gate(state, 3.0 * std::f64::consts::FRAC_PI_4, occupied, unoccupied)?;
            let phase = match p % 4 {
                0 => return Ok(()),
                1 => Complex64::new(0.0, -1.0), // ZS
                2 => Complex64::new(-1.0, 0.0), // Z
                _ => Complex64::new(0.0, 1.0),  // S
            };
            let zero = Complex64::new(0.0, 0.0);
            let one = Complex64::new(1.0, 0.0);
            state.apply_single(occupied, [[one, zero], [zero, phase]])
        }
    }
}

/// Exact expectation value of a Hermitian Pauli sum; the imaginary residue
/// (below 1e-10 by Hermiticity) is discarded.
pub fn expectation(state: &QubitState, op: &PauliSum) -> Result<f64, StateError> {
    op.check_hermitian(1e-10)?;
    let mut acc = 0.0;
    for t in op.terms() {
        acc += t.coeff.re * state.expectation_string(&t.string);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hop_zero_angle_preserves_weights() {
        let mut state = QubitState::zero(2);
        state.apply_x(0).unwrap();
        let before = state.clone();
        apply_hop_gate(&mut state, 0.0, 0, 1).unwrap();
        // weight-1 amplitudes unchanged up to the documented sign
        for (b, amp) in state.amplitudes().iter().enumerate() {
            assert_abs_diff_eq!(amp.norm(), before.amplitudes()[b].norm(), epsilon = 1e-14);
        }
    }

    #[test]
    fn hop_half_pi_swaps_excitation() {
        // |01> in |q1 q2> notation = q2 excited = basis index 2
        let mut state = QubitState::zero(2);
        state.apply_x(1).unwrap();
        apply_hop_gate(&mut state, std::f64::consts::FRAC_PI_2, 0, 1).unwrap();
        // cos(pi/2)|01> + sin(pi/2)|10> = |10> = q1 excited = index 1
        assert_abs_diff_eq!(state.amplitudes()[1].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(state.amplitudes()[2].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn hop_conserves_particle_number() {
        let mut rng = crate::seeding::rng_for(7, &[]);
        for _ in 0..20 {
            let theta: f64 = rng.random_range(-3.0..3.0);
            let mut amps: Vec<Complex64> = (0..8)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            let state = QubitState::from_amplitudes(3, amps).unwrap();
            let weight_before: f64 = state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(b, a)| (b.count_ones() as f64) * a.norm_sqr())
                .sum();
            let mut after = state.clone();
            apply_hop_gate(&mut after, theta, 0, 2).unwrap();
            let weight_after: f64 = after
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(b, a)| (b.count_ones() as f64) * a.norm_sqr())
                .sum();
            assert_abs_diff_eq!(weight_before, weight_after, epsilon = 1e-12);
            after.check_norm().unwrap();
        }
    }

    #[test]
    fn phi_superpositions() {
        // phi_0 on pair (0, 1): amplitudes 1/sqrt2 at index 1 (|10>) and 2 (|01>)
        let mut state = QubitState::zero(2);
        apply_vprep(&mut state, 0, 1, VprepVariant::Phi(0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(state.amplitudes()[1].re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(state.amplitudes()[2].re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(state.amplitudes()[0].norm(), 0.0, epsilon = 1e-14);

        // phi_2 = (|10> - |01>)/sqrt2 up to global phase
        let mut state = QubitState::zero(2);
        apply_vprep(&mut state, 0, 1, VprepVariant::Phi(2)).unwrap();
        let ratio = state.amplitudes()[2] / state.amplitudes()[1];
        assert_abs_diff_eq!(ratio.re, -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ratio.im, 0.0, epsilon = 1e-13);

        // phi_1 = (|10> + i|01>)/sqrt2 up to global phase
        let mut state = QubitState::zero(2);
        apply_vprep(&mut state, 0, 1, VprepVariant::Phi(1)).unwrap();
        let ratio = state.amplitudes()[2] / state.amplitudes()[1];
        assert_abs_diff_eq!(ratio.re, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ratio.im, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn phi1_matches_dense_evaluation_for_yx() {
        let mut state = QubitState::zero(2);
        apply_vprep(&mut state, 0, 1, VprepVariant::Phi(1)).unwrap();
        // Y on qubit 0, X on qubit 1
        let op = PauliSum::from_terms(
            2,
            vec![crate::pauli::PauliTerm::new(
                Complex64::new(1.0, 0.0),
                PauliString::from_letters("YX").unwrap(),
            )],
        );
        let via_engine = expectation(&state, &op).unwrap();
        // dense 4x4 route
        let dense = op.dense();
        let amps = nalgebra::DVector::from_column_slice(state.amplitudes());
        let direct = (amps.adjoint() * &dense * &amps)[(0, 0)];
        assert_abs_diff_eq!(via_engine, direct.re, epsilon = 1e-12);
        assert_abs_diff_eq!(direct.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_basics() {
        let state = QubitState::zero(1);
        let z = PauliSum::from_terms(
            1,
            vec![crate::pauli::PauliTerm::new(
                Complex64::new(1.0, 0.0),
                PauliString::from_letters("Z").unwrap(),
            )],
        );
        assert_abs_diff_eq!(expectation(&state, &z).unwrap(), 1.0, epsilon = 1e-14);

        // (|10> + |01>)/sqrt2 has <Z (x) I> = 0
        let mut bell = QubitState::zero(2);
        apply_vprep(&mut bell, 0, 1, VprepVariant::Phi(0)).unwrap();
        let zi = PauliSum::from_terms(
            2,
            vec![crate::pauli::PauliTerm::new(
                Complex64::new(1.0, 0.0),
                PauliString::from_letters("ZI").unwrap(),
            )],
        );
        assert_abs_diff_eq!(expectation(&bell, &zi).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn sampling_is_deterministic_and_totals_shots() {
        let state = QubitState::zero(1);
        let counts = state
            .sample_counts(&[MeasurementBasis::Z], 1000, 42)
            .unwrap();
        assert_eq!(counts.total(), 1000);
        assert_eq!(counts.map.get(&0), Some(&1000));

        let mut plus = QubitState::zero(1);
        plus.apply_single(
            0,
            MeasurementBasis::X.rotation().unwrap(),
        )
        .unwrap();
        let a = plus.sample_counts(&[MeasurementBasis::Z], 100_000, 7).unwrap();
        let b = plus.sample_counts(&[MeasurementBasis::Z], 100_000, 7).unwrap();
        assert_eq!(a, b);
        let ones = *a.map.get(&1).unwrap() as f64;
        let frac = ones / 100_000.0;
        // 5 sigma of a fair binomial
        let sigma = 0.5 / (100_000.0f64).sqrt();
        assert!((frac - 0.5).abs() < 5.0 * sigma, "frac = {frac}");
    }

    #[test]
    fn zero_shots_rejected() {
        let state = QubitState::zero(1);
        assert!(matches!(
            state.sample_counts(&[MeasurementBasis::Z], 0, 1),
            Err(StateError::ZeroShots)
        ));
    }
}
