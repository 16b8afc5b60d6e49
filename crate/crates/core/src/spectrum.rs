//! Labeled electronic spectra: states tagged by total spin, irrep, and
//! ordinal within their (spin, irrep) class, with energies in Hartree and
//! excitation energies in eV.

use serde::{Deserialize, Serialize};

use crate::chemio::HARTREE_TO_EV;
use crate::symmetry::Irrep;

/// (spin, irrep, ordinal) identity of a state, e.g. the first triplet of
/// B2 symmetry is `1^3B2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateLabel {
    /// Total spin quantum number S (integer for even electron counts).
    pub spin: u32,
    pub irrep: Irrep,
    /// 1-based rank by energy within the (spin, irrep) class.
    pub ordinal: u32,
}

impl StateLabel {
    pub fn multiplicity(&self) -> u32 {
        2 * self.spin + 1
    }
}

impl std::fmt::Display for StateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}^{}{}", self.ordinal, self.multiplicity(), self.irrep)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledState {
    pub label: String,
    pub spin: u32,
    pub irrep: Irrep,
    pub ordinal: u32,
    pub energy_hartree: f64,
    pub sigma_hartree: f64,
    pub excitation_ev: f64,
    pub sigma_ev: f64,
    /// Measured <S^2> before rounding to S(S+1).
    pub s_squared: f64,
    /// Set when bootstrap resamples failed to match this state reliably.
    pub unstable: bool,
}

impl LabeledState {
    pub fn state_label(&self) -> StateLabel {
        StateLabel {
            spin: self.spin,
            irrep: self.irrep,
            ordinal: self.ordinal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSpectrum {
    pub method: String,
    pub mode: Option<String>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub hartree_to_ev: f64,
    pub states: Vec<LabeledState>,
}

/// A raw eigenstate before labeling.
#[derive(Debug, Clone, Copy)]
pub struct RawState {
    pub energy: f64,
    pub sigma: f64,
    pub spin: u32,
    pub irrep: Irrep,
    pub s_squared: f64,
}

/// Nearest total-spin quantum number for a measured <S^2>.
pub fn spin_from_s_squared(s_squared: f64) -> u32 {
    let s = 0.5 * ((1.0 + 4.0 * s_squared.max(0.0)).sqrt() - 1.0);
    s.round().max(0.0) as u32
}

impl LabeledSpectrum {
    /// Sort ascending in energy, assign per-(spin, irrep) ordinals, and
    /// reference excitation energies to the global minimum.
    pub fn from_raw(method: &str, mut raw: Vec<RawState>) -> LabeledSpectrum {
        raw.sort_by(|a, b| {
            a.energy
                .partial_cmp(&b.energy)
                .unwrap()
                .then(a.spin.cmp(&b.spin))
                .then(a.irrep.cmp(&b.irrep))
        });
        let e0 = raw.first().map(|s| s.energy).unwrap_or(0.0);
        let mut counters: std::collections::BTreeMap<(u32, Irrep), u32> =
            std::collections::BTreeMap::new();
        let states = raw
            .into_iter()
            .map(|s| {
                let ordinal = counters
                    .entry((s.spin, s.irrep))
                    .and_modify(|c| *c += 1)
                    .or_insert(1);
                let label = StateLabel {
                    spin: s.spin,
                    irrep: s.irrep,
                    ordinal: *ordinal,
                };
                LabeledState {
                    label: label.to_string(),
                    spin: s.spin,
                    irrep: s.irrep,
                    ordinal: *ordinal,
                    energy_hartree: s.energy,
                    sigma_hartree: s.sigma,
                    excitation_ev: (s.energy - e0) * HARTREE_TO_EV,
                    sigma_ev: s.sigma * HARTREE_TO_EV,
                    s_squared: s.s_squared,
                    unstable: false,
                }
            })
            .collect();
        LabeledSpectrum {
            method: method.to_string(),
            mode: None,
            shots: None,
            seed: None,
            hartree_to_ev: HARTREE_TO_EV,
            states,
        }
    }

    pub fn ground(&self) -> Option<&LabeledState> {
        self.states.iter().min_by(|a, b| {
            a.energy_hartree.partial_cmp(&b.energy_hartree).unwrap()
        })
    }

    pub fn find(&self, label: &StateLabel) -> Option<&LabeledState> {
        self.states.iter().find(|s| s.state_label() == *label)
    }

    pub fn labels(&self) -> Vec<StateLabel> {
        self.states.iter().map(|s| s.state_label()).collect()
    }
}
