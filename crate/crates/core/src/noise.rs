//! Software-simulated readout noise and the two mitigation techniques
//! applied to it: twirled readout error mitigation and particle-number
//! post-selection.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::seeding;
use crate::statevector::{Counts, StateError};

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("readout probability {0} outside [0, 0.5)")]
    InvalidProbability(f64),
    #[error("model covers {model} qubits but counts have {counts}")]
    QubitMismatch { model: usize, counts: usize },
    #[error("post-selection rejected every shot")]
    AllShotsRejected,
    #[error("calibrated attenuation {0:.4} below 0.1, mitigation unreliable")]
    UnreliableMitigation(f64),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Independent per-qubit readout bit-flip channel: p01 is the probability
/// of reading 1 given a true 0, p10 of reading 0 given a true 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    pub p01: Vec<f64>,
    pub p10: Vec<f64>,
    pub seed: u64,
}

impl ReadoutModel {
    pub fn uniform(n_qubits: usize, p: f64, seed: u64) -> Result<Self, NoiseError> {
        Self::new(vec![p; n_qubits], vec![p; n_qubits], seed)
    }

    pub fn new(p01: Vec<f64>, p10: Vec<f64>, seed: u64) -> Result<Self, NoiseError> {
        assert_eq!(p01.len(), p10.len());
        for &p in p01.iter().chain(p10.iter()) {
            if !(0.0..0.5).contains(&p) {
                return Err(NoiseError::InvalidProbability(p));
            }
        }
        Ok(ReadoutModel { p01, p10, seed })
    }

    pub fn n_qubits(&self) -> usize {
        self.p01.len()
    }

    pub fn is_noiseless(&self) -> bool {
        self.p01.iter().chain(self.p10.iter()).all(|&p| p == 0.0)
    }
}

/// Flip each recorded bit independently with the model's probabilities.
/// Total shots are preserved. Seeded from the model.
pub fn corrupt_counts(counts: &Counts, model: &ReadoutModel) -> Result<Counts, NoiseError> {
    let mut rng = seeding::rng_for(model.seed, &[]);
    corrupt_counts_with_rng(counts, model, &mut rng)
}

/// Channel action realized by exact per-bit binomial splits, which is
/// distribution-identical to flipping each shot's bits independently.
pub fn corrupt_counts_with_rng(
    counts: &Counts,
    model: &ReadoutModel,
    rng: &mut impl Rng,
) -> Result<Counts, NoiseError> {
    if model.n_qubits() != counts.n_qubits {
        return Err(NoiseError::QubitMismatch {
            model: model.n_qubits(),
            counts: counts.n_qubits,
        });
    }
    let mut current = counts.clone();
    for q in 0..counts.n_qubits {
        let bit = 1u64 << q;
        let mut next = Counts::empty(counts.n_qubits);
        for (&b, &n) in &current.map {
            let p = if b & bit != 0 {
                model.p10[q]
            } else {
                model.p01[q]
            };
            let flipped = if p == 0.0 {
                0
            } else {
                Binomial::new(n, p).expect("validated probability").sample(rng)
            };
            next.add(b ^ bit, flipped);
            next.add(b, n - flipped);
        }
        current = next;
    }
    Ok(current)
}

/// Discard outcomes whose Hamming weight differs from the conserved
/// electron number; returns the filtered histogram and the acceptance rate.
pub fn post_select(counts: &Counts, expected_weight: u32) -> Result<(Counts, f64), NoiseError> {
    let total = counts.total();
    let mut kept = Counts::empty(counts.n_qubits);
    for (&b, &n) in &counts.map {
        if b.count_ones() == expected_weight {
            kept.add(b, n);
        }
    }
    let kept_total = kept.total();
    if total > 0 && kept_total == 0 {
        return Err(NoiseError::AllShotsRejected);
    }
    let rate = if total == 0 {
        0.0
    } else {
        kept_total as f64 / total as f64
    };
    Ok((kept, rate))
}

/// Number of random X-twirl layers the shot budget is split across.
pub const DEFAULT_TWIRLS: usize = 16;

/// Run a counts provider through the X-twirl protocol: for each sampled
/// mask the pre-measurement X layer is applied, the readout channel acts,
/// and the mask is undone in classical post-processing. The returned
/// histogram sees a symmetrized readout channel.
pub fn twirled_counts<F>(
    n_qubits: usize,
    mut ideal_counts: F,
    model: &ReadoutModel,
    shots: u64,
    seed: u64,
    n_twirls: usize,
) -> Result<Counts, NoiseError>
where
    F: FnMut(u64, u64, u64) -> Result<Counts, NoiseError>,
{
    let qubit_mask = (1u64 << n_qubits) - 1;
    let mut mask_rng = seeding::rng_for(seed, &[0x7731]);
    let n_twirls = n_twirls.max(1) as u64;
    let base = shots / n_twirls;
    let extra = shots % n_twirls;
    let mut merged = Counts::empty(n_qubits);
    for k in 0..n_twirls {
        let mask = mask_rng.random::<u64>() & qubit_mask;
        let k_shots = base + u64::from(k < extra);
        if k_shots == 0 {
            continue;
        }
        let ideal = ideal_counts(mask, k_shots, k)?;
        let mut corrupt_rng = seeding::rng_for(seed, &[0xC0, k]);
        let corrupted = corrupt_counts_with_rng(&ideal, model, &mut corrupt_rng)?;
        for (&b, &n) in &corrupted.map {
            merged.add(b ^ mask, n);
        }
    }
    Ok(merged)
}

/// Per-qubit attenuation factors 1 - 2 p_bar estimated from twirled
/// all-zeros and all-ones calibration circuits at the same shot budget.
pub fn calibrate_attenuations(
    model: &ReadoutModel,
    shots: u64,
    seed: u64,
    n_twirls: usize,
) -> Result<Vec<f64>, NoiseError> {
    let n = model.n_qubits();
    let qubit_mask = (1u64 << n) - 1;
    let run = |prepared: u64, tag: u64| -> Result<Counts, NoiseError> {
        twirled_counts(
            n,
            |mask, k_shots, _| {
                let mut c = Counts::empty(n);
                c.add(prepared ^ mask, k_shots);
                Ok(c)
            },
            model,
            shots,
            seed.wrapping_add(tag),
            n_twirls,
        )
    };
    let zeros = run(0, 0xCA10)?;
    let ones = run(qubit_mask, 0xCA11)?;
    let mut attenuations = Vec::with_capacity(n);
    for q in 0..n {
        let (z0, _) = zeros.parity_expectation(1 << q);
        let (z1, _) = ones.parity_expectation(1 << q);
        attenuations.push(0.5 * (z0 - z1));
    }
    Ok(attenuations)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MitigatedExpectation {
    pub raw: f64,
    pub raw_sigma: f64,
    pub mitigated: f64,
    pub sigma: f64,
    pub attenuation: f64,
}

/// Twirled readout error mitigation for a Z-type observable supported on
/// the `support` qubits. `ideal_counts(mask, shots, twirl_index)` must
/// yield the noiseless histogram of the circuit with a pre-measurement X
/// layer on `mask`; the readout channel and the classical undo are
/// handled here. Estimates are rescaled by the calibrated attenuation and
/// the uncertainty inflated by the same factor.
pub fn twirled_readout_mitigation<F>(
    n_qubits: usize,
    ideal_counts: F,
    support: u64,
    model: &ReadoutModel,
    shots: u64,
    seed: u64,
) -> Result<MitigatedExpectation, NoiseError>
where
    F: FnMut(u64, u64, u64) -> Result<Counts, NoiseError>,
{
    let counts = twirled_counts(n_qubits, ideal_counts, model, shots, seed, DEFAULT_TWIRLS)?;
    let (raw, raw_sigma) = counts.parity_expectation(support);
    let attenuations = calibrate_attenuations(model, shots, seed, DEFAULT_TWIRLS)?;
    let mut attenuation = 1.0;
    for q in 0..n_qubits {
        if support >> q & 1 == 1 {
            attenuation *= attenuations[q];
        }
    }
    if attenuation < 0.1 {
        return Err(NoiseError::UnreliableMitigation(attenuation));
    }
    Ok(MitigatedExpectation {
        raw,
        raw_sigma,
        mitigated: raw / attenuation,
        sigma: raw_sigma / attenuation,
        attenuation,
    })
}
