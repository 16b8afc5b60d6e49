//! Cross-mode comparison reports: the per-state excitation table and the
//! deviation summary (min/max/mean differences, mean uncertainty, and
//! the chi-squared of the deviations).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use efqse_core::qse::chi_squared;
use efqse_core::spectrum::{LabeledSpectrum, StateLabel};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("spectra do not share state labels; orphans: {0}")]
    LabelMismatch(String),
    #[error("fewer than one matched excited state between {0} and {1}")]
    NothingToCompare(String, String),
}

/// Deviation statistics for one ordered pair of spectra, computed over
/// the matched excited states (the shared ground state pins the zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDeviation {
    pub pair: String,
    pub n_states: usize,
    /// Statistics of |dd E| in eV.
    pub dd_min: f64,
    pub dd_max: f64,
    pub dd_mean: f64,
    /// Signed mean deviation in eV.
    pub dd_mean_signed: f64,
    /// Mean uncertainty of the second spectrum's excitation energies.
    pub sigma_mean: Option<f64>,
    /// chi^2 of the deviations against the second spectrum's sigmas.
    pub chi_squared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub pairs: Vec<PairDeviation>,
    /// Labels present in some spectra but dropped from the comparison.
    pub dropped_labels: Vec<String>,
}

fn excited_labels(spectrum: &LabeledSpectrum) -> BTreeSet<StateLabel> {
    spectrum
        .states
        .iter()
        .filter(|s| s.excitation_ev > 0.0)
        .map(|s| s.state_label())
        .collect()
}

/// Strict pairwise deviation statistics. The two spectra must expose the
/// same excited-state labels; anything unmatched is an error naming the
/// orphans. Alignment is by (spin, irrep, ordinal), never by energy.
pub fn deviation_pair(
    name_a: &str,
    a: &LabeledSpectrum,
    name_b: &str,
    b: &LabeledSpectrum,
) -> Result<PairDeviation, ReportError> {
    let labels_a = excited_labels(a);
    let labels_b = excited_labels(b);
    if labels_a != labels_b {
        let orphans: Vec<String> = labels_a
            .symmetric_difference(&labels_b)
            .map(|l| l.to_string())
            .collect();
        return Err(ReportError::LabelMismatch(orphans.join(", ")));
    }
    if labels_a.is_empty() {
        return Err(ReportError::NothingToCompare(
            name_a.to_string(),
            name_b.to_string(),
        ));
    }
    let mut deviations = Vec::new();
    let mut sigmas = Vec::new();
    for label in &labels_a {
        let sa = a.find(label).expect("label set checked");
        let sb = b.find(label).expect("label set checked");
        deviations.push(sb.excitation_ev - sa.excitation_ev);
        sigmas.push(sb.sigma_ev);
    }
    let n = deviations.len() as f64;
    let abs: Vec<f64> = deviations.iter().map(|d| d.abs()).collect();
    let sigma_mean = if sigmas.iter().all(|&s| s > 0.0) {
        Some(sigmas.iter().sum::<f64>() / n)
    } else {
        None
    };
    let chi = if sigmas.iter().all(|&s| s > 0.0) {
        chi_squared(&deviations, &sigmas).ok()
    } else {
        None
    };
    Ok(PairDeviation {
        pair: format!("{name_a}_vs_{name_b}"),
        n_states: deviations.len(),
        dd_min: abs.iter().cloned().fold(f64::INFINITY, f64::min),
        dd_max: abs.iter().cloned().fold(0.0, f64::max),
        dd_mean: abs.iter().sum::<f64>() / n,
        dd_mean_signed: deviations.iter().sum::<f64>() / n,
        sigma_mean,
        chi_squared: chi,
    })
}

/// A spectrum truncated to a chosen label set, preserving everything
/// else. The ground state is always kept so excitation energies stay
/// referenced to the same origin.
fn restrict(spectrum: &LabeledSpectrum, keep: &BTreeSet<StateLabel>) -> LabeledSpectrum {
    let mut out = spectrum.clone();
    out.states.retain(|s| {
        s.excitation_ev == 0.0 && s.ordinal == 1 || keep.contains(&s.state_label())
    });
    out
}

/// Deviation summary over consecutive pairs of the given spectra,
/// comparing each spectrum with the next (for example CASCI vs exact,
/// exact vs sampled, sampled vs noisy). Spectra are first restricted to
/// their common excited labels; dropped labels are recorded.
pub fn deviation_report(
    spectra: &[(&str, &LabeledSpectrum)],
) -> Result<DeviationReport, ReportError> {
    assert!(spectra.len() >= 2, "need at least two spectra to compare");
    let mut common = excited_labels(spectra[0].1);
    for (_, s) in spectra.iter().skip(1) {
        common = common.intersection(&excited_labels(s)).copied().collect();
    }
    let mut dropped: BTreeSet<String> = BTreeSet::new();
    for (_, s) in spectra {
        for label in excited_labels(s).difference(&common) {
            dropped.insert(label.to_string());
        }
    }
    let restricted: Vec<(&str, LabeledSpectrum)> = spectra
        .iter()
        .map(|(name, s)| (*name, restrict(s, &common)))
        .collect();
    let mut pairs = Vec::new();
    for window in restricted.windows(2) {
        let (name_a, a) = &window[0];
        let (name_b, b) = &window[1];
        pairs.push(deviation_pair(name_a, a, name_b, b)?);
    }
    Ok(DeviationReport {
        pairs,
        dropped_labels: dropped.into_iter().collect(),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => String::new(),
    }
}

/// Aligned-column CSV with one row per state label and one excitation
/// column (plus sigma where sampled) per spectrum.
pub fn comparison_csv(spectra: &[(&str, &LabeledSpectrum)]) -> String {
    // union of labels, ordered by their smallest excitation energy
    let mut order: Vec<(f64, StateLabel)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (_, s) in spectra {
        for state in &s.states {
            let label = state.state_label();
            if seen.insert(label) {
                let min_ev = spectra
                    .iter()
                    .filter_map(|(_, sp)| sp.find(&label).map(|st| st.excitation_ev))
                    .fold(f64::INFINITY, f64::min);
                order.push((min_ev, label));
            }
        }
    }
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let mut header = vec![
        format!("{:<10}", "label"),
        format!("{:>4}", "spin"),
        format!("{:>5}", "irrep"),
        format!("{:>7}", "ordinal"),
    ];
    for (name, _) in spectra {
        header.push(format!("{:>14}", format!("{name}_ev")));
        header.push(format!("{:>16}", format!("{name}_sigma_ev")));
    }
    let mut out = header.join(", ");
    out.push('\n');
    for (_, label) in &order {
        let mut row = vec![
            format!("{:<10}", label.to_string()),
            format!("{:>4}", label.spin),
            format!("{:>5}", label.irrep.to_string()),
            format!("{:>7}", label.ordinal),
        ];
        for (_, s) in spectra {
            match s.find(label) {
                Some(state) => {
                    row.push(format!("{:>14.6}", state.excitation_ev));
                    row.push(format!("{:>16.6}", state.sigma_ev));
                }
                None => {
                    row.push(format!("{:>14}", ""));
                    row.push(format!("{:>16}", ""));
                }
            }
        }
        out.push_str(&row.join(", "));
        out.push('\n');
    }
    out
}

/// Human-readable run report: per-state table plus the deviation summary.
pub fn text_report(
    spectra: &[(&str, &LabeledSpectrum)],
    deviations: Option<&DeviationReport>,
) -> String {
    let mut out = String::new();
    out.push_str("excitation energies (eV)\n");
    out.push_str(&comparison_csv(spectra));
    if let Some(report) = deviations {
        out.push('\n');
        out.push_str("deviation summary (eV)\n");
        out.push_str(&format!(
            "{:<22}, {:>8}, {:>10}, {:>10}, {:>10}, {:>12}, {:>10}, {:>10}\n",
            "pair", "n_states", "dd_min", "dd_max", "dd_mean", "dd_signed", "sigma_mean", "chi2"
        ));
        for p in &report.pairs {
            out.push_str(&format!(
                "{:<22}, {:>8}, {:>10.6}, {:>10.6}, {:>10.6}, {:>12.6}, {:>10}, {:>10}\n",
                p.pair,
                p.n_states,
                p.dd_min,
                p.dd_max,
                p.dd_mean,
                p.dd_mean_signed,
                fmt_opt(p.sigma_mean),
                fmt_opt(p.chi_squared),
            ));
        }
        if !report.dropped_labels.is_empty() {
            out.push_str(&format!(
                "\nstates outside the common label set: {}\n",
                report.dropped_labels.join(", ")
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use efqse_core::spectrum::{LabeledSpectrum, RawState};
    use efqse_core::symmetry::Irrep;

    fn spectrum(energies: &[(f64, u32, Irrep)], sigma: f64) -> LabeledSpectrum {
        let raw: Vec<RawState> = energies
            .iter()
            .map(|&(e, spin, irrep)| RawState {
                energy: e,
                sigma,
                spin,
                irrep,
                s_squared: (spin * (spin + 1)) as f64,
            })
            .collect();
        LabeledSpectrum::from_raw("test", raw)
    }

    #[test]
    fn identical_spectra_have_zero_deviations() {
        let a = spectrum(
            &[(-1.0, 0, Irrep::A1), (-0.8, 1, Irrep::B2), (-0.6, 0, Irrep::A1)],
            0.01,
        );
        let report = deviation_report(&[("x", &a), ("y", &a)]).unwrap();
        assert_eq!(report.pairs.len(), 1);
        let p = &report.pairs[0];
        assert_eq!(p.n_states, 2);
        assert_eq!(p.dd_max, 0.0);
        assert_eq!(p.chi_squared, Some(0.0));
    }

    #[test]
    fn injected_offsets_are_recovered() {
        let a = spectrum(
            &[(-1.0, 0, Irrep::A1), (-0.8, 1, Irrep::B2), (-0.5, 0, Irrep::B1)],
            0.0,
        );
        let mut b = spectrum(
            &[(-1.0, 0, Irrep::A1), (-0.8, 1, Irrep::B2), (-0.5, 0, Irrep::B1)],
            0.02,
        );
        // shift both excited states up by exactly 0.1 eV
        for s in b.states.iter_mut().skip(1) {
            s.excitation_ev += 0.1;
        }
        let sigma_ev = b.states[1].sigma_ev;
        let report = deviation_report(&[("a", &a), ("b", &b)]).unwrap();
        let p = &report.pairs[0];
        assert!((p.dd_mean - 0.1).abs() < 1e-12);
        assert!((p.dd_mean_signed - 0.1).abs() < 1e-12);
        assert!((p.dd_min - 0.1).abs() < 1e-12);
        // chi2 = sum over 2 states of 0.1^2 / (2 sigma_ev^2)
        let expected = 2.0 * (0.01 / (2.0 * sigma_ev * sigma_ev));
        assert!((p.chi_squared.unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn orphan_states_are_named() {
        let a = spectrum(&[(-1.0, 0, Irrep::A1), (-0.8, 1, Irrep::B2)], 0.0);
        let b = spectrum(&[(-1.0, 0, Irrep::A1), (-0.7, 0, Irrep::B1)], 0.0);
        let err = deviation_pair("a", &a, "b", &b).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("1^3B2"), "{message}");
        assert!(message.contains("1^1B1"), "{message}");
    }

    #[test]
    fn csv_is_aligned_and_complete() {
        let a = spectrum(&[(-1.0, 0, Irrep::A1), (-0.8, 1, Irrep::B2)], 0.0);
        let csv = comparison_csv(&[("casci", &a)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("casci_ev"));
        assert!(lines[1].starts_with("1^1A1"));
    }
}
