//! Acceptance suite: one test per release criterion, each printing a
//! single PASS (or SKIP) line. Run with
//!
//!   cargo test -p efqse-cli --test acceptance -- --nocapture

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use efqse_cli::config::{Mode, Overrides, RunConfig};
use efqse_core::bipartite::bipartition;
use efqse_core::casci::{casci_spectrum, CasciOptions};
use efqse_core::chemio::{parse_fcidump, MolecularIntegrals};
use efqse_core::fermion::build_hamiltonian;
use efqse_core::fock::{self, ModeLayout};
use efqse_core::forging::{
    build_forged_circuit, direct_statevector, forged_expectation, off_diagonal_element,
    resource_count, CircuitMode, ExecutionMode, ForgedAnsatz, NoisePlan, ReconstructionConvention,
    ShotPlan,
};
use efqse_core::noise::ReadoutModel;
use efqse_core::pauli::{PauliString, PauliSum, PauliTerm};
use efqse_core::qse::{
    adaptive_epsilon_m, bootstrap_uncertainty, build_excitation_basis,
    chi_squared, ClassifyOptions, SubspaceOperators,
};
use efqse_core::seeding;
use efqse_core::spectrum::spin_from_s_squared;
use efqse_core::statevector::QubitState;
use efqse_core::symmetry::Irrep;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn load_fixture(name: &str) -> MolecularIntegrals {
    parse_fcidump(&fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn random_integrals(n: usize, seed: u64) -> MolecularIntegrals {
    let mut rng = seeding::rng_for(seed, &[]);
    let mut ints = MolecularIntegrals::empty(n, n / 2, n / 2);
    ints.core_energy = rng.random_range(-1.0..1.0);
    for p in 0..n {
        for q in 0..=p {
            ints.set_h(p, q, rng.random_range(-1.0..1.0));
        }
    }
    for p in 0..n {
        for q in 0..=p {
            for r in 0..=p {
                let s_max = if r == p { q } else { r };
                for s in 0..=s_max {
                    ints.set_g(p, q, r, s, rng.random_range(-0.5..0.5));
                }
            }
        }
    }
    ints
}

fn random_ansatz(n_orbitals: usize, electrons: usize, seed: u64) -> ForgedAnsatz {
    let mut rng = seeding::rng_for(seed, &[1]);
    let mut ansatz =
        ForgedAnsatz::default_for(electrons, n_orbitals, &vec![Irrep::A1; n_orbitals]).unwrap();
    for t in &mut ansatz.thetas {
        *t = rng.random_range(-1.5..1.5);
    }
    let phi: f64 = rng.random_range(-1.2..1.2);
    ansatz.schmidt = vec![phi.cos(), phi.sin()];
    ansatz
}

fn run_exact(fixture_name: &str, out: &Path) -> efqse_cli::RunArtifacts {
    let body = format!(
        "fcidump = \"{}\"\nmode = \"exact\"\noutput_dir = \"{}\"\n",
        fixture(fixture_name).display(),
        out.display(),
    );
    let config_path = out.with_extension("toml");
    fs::write(&config_path, body).unwrap();
    let config = RunConfig::load(&config_path, &Overrides::default()).unwrap();
    efqse_cli::run_pipeline(config).unwrap()
}

/// Criterion 1: forged expectation values in exact mode match the direct
/// 2N-qubit reference state to 1e-10 Hartree over >= 50 random draws.
#[test]
fn criterion_1_forging_oracle_equivalence() {
    let mut draws = 0;
    let mut worst: f64 = 0.0;
    for n in 2..=6usize {
        let electrons = (2 * (n / 2)).clamp(2, 2 * (n - 1));
        for trial in 0..10u64 {
            let ints = random_integrals(n, 1000 + 17 * n as u64 + trial);
            let h = build_hamiltonian(&ints);
            let bip = bipartition(&h, n).unwrap();
            let ansatz = random_ansatz(n, electrons, 2000 + 31 * n as u64 + trial);
            let protocol = forged_expectation(&ansatz, &bip, &ExecutionMode::Exact)
                .unwrap()
                .value;
            let state = direct_statevector(&ansatz).unwrap();
            let oracle =
                fock::expectation(&h, state.amplitudes(), ModeLayout::Spinful { n_orbitals: n });
            let deviation = (protocol - oracle.re).abs();
            worst = worst.max(deviation);
            assert!(
                deviation < 1e-10,
                "N={n} trial {trial}: protocol {protocol} vs oracle {} ({deviation:e})",
                oracle.re
            );
            draws += 1;
        }
    }
    assert!(draws >= 50);
    println!("criterion 1 PASS: {draws} forged/oracle draws agree (worst {worst:.2e} Ha)");
}

/// Criterion 2: the normalized reconstruction coefficient reproduces
/// dense off-diagonal elements on 100 random Hermitian two-qubit
/// operators; the as-printed coefficient yields exactly half.
#[test]
fn criterion_2_reconstruction_coefficient() {
    let mut rng = seeding::rng_for(40, &[]);
    let letters = [
        "IX", "IY", "IZ", "XI", "YI", "ZI", "XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ",
    ];
    let mut worst: f64 = 0.0;
    for trial in 0..100u64 {
        let mut ansatz = random_ansatz(2, 2, 300 + trial);
        ansatz.schmidt = vec![1.0, 0.0];
        let terms: Vec<PauliTerm> = letters
            .iter()
            .map(|l| {
                PauliTerm::new(
                    Complex64::new(rng.random_range(-1.0..1.0), 0.0),
                    PauliString::from_letters(l).unwrap(),
                )
            })
            .collect();
        let op = PauliSum::from_terms(2, terms);

        let reconstructed = off_diagonal_element(
            &ansatz,
            0,
            1,
            std::slice::from_ref(&op),
            &ExecutionMode::Exact,
            ReconstructionConvention::Normalized,
        )
        .unwrap()[0]
            .value;
        let halved = off_diagonal_element(
            &ansatz,
            0,
            1,
            std::slice::from_ref(&op),
            &ExecutionMode::Exact,
            ReconstructionConvention::AsPrinted,
        )
        .unwrap()[0]
            .value;

        // dense <x_0| U+ A U |x_1>
        let u0 = QubitState::run(&build_forged_circuit(&ansatz, CircuitMode::Diagonal(0)).unwrap())
            .unwrap();
        let u1 = QubitState::run(&build_forged_circuit(&ansatz, CircuitMode::Diagonal(1)).unwrap())
            .unwrap();
        let dense = op.dense();
        let mut expected = Complex64::new(0.0, 0.0);
        for (row, arow) in u0.amplitudes().iter().enumerate() {
            for (col, acol) in u1.amplitudes().iter().enumerate() {
                expected += arow.conj() * dense[(row, col)] * acol;
            }
        }
        let deviation = (reconstructed - expected).norm();
        worst = worst.max(deviation);
        assert!(
            deviation < 1e-10,
            "trial {trial}: reconstructed {reconstructed} vs dense {expected}"
        );
        assert!(
            (halved * 2.0 - reconstructed).norm() < 1e-12,
            "trial {trial}: as-printed variant is not exactly half"
        );
    }
    println!("criterion 2 PASS: 100 reconstructions match dense bra-kets (worst {worst:.2e}); as-printed variant gives half");
}

/// Criterion 3: on the three two-electron fixtures the exact-mode
/// expansion reproduces exact diagonalization to 1e-8 Hartree with
/// identical (spin, irrep) labels.
#[test]
fn criterion_3_cisd_equals_fci() {
    let dir = tempfile::tempdir().unwrap();
    for (i, name) in ["h2like.fcidump", "pair_a1.fcidump", "pair_a1a2.fcidump"]
        .iter()
        .enumerate()
    {
        let artifacts = run_exact(name, &dir.path().join(format!("c3_{i}")));
        let qse = &artifacts.qse[&Mode::Exact];
        assert_eq!(qse.states.len(), artifacts.casci.states.len(), "{name}");
        for (a, b) in qse.states.iter().zip(artifacts.casci.states.iter()) {
            assert_eq!(a.label, b.label, "{name}");
            assert!(
                (a.energy_hartree - b.energy_hartree).abs() < 1e-8,
                "{name} {}: {} vs {}",
                a.label,
                a.energy_hartree,
                b.energy_hartree
            );
        }
    }
    println!("criterion 3 PASS: exact-mode expansion equals exact diagonalization on all three two-electron fixtures");
}

/// Criterion 4: E_casci <= E_qse <= E_forged on every fixture, each gap
/// no more negative than -1e-9.
#[test]
fn criterion_4_variational_ordering() {
    let dir = tempfile::tempdir().unwrap();
    for (i, name) in [
        "h2like.fcidump",
        "pair_a1.fcidump",
        "pair_a1a2.fcidump",
        "mixed44.fcidump",
    ]
    .iter()
    .enumerate()
    {
        let artifacts = run_exact(name, &dir.path().join(format!("c4_{i}")));
        let e_casci = artifacts.casci.states[0].energy_hartree;
        let e_qse = artifacts.qse[&Mode::Exact].states[0].energy_hartree;
        let e_forged = artifacts.ansatz.energy_hartree;
        assert!(e_qse - e_casci >= -1e-9, "{name}: QSE below CASCI");
        assert!(e_forged - e_qse >= -1e-9, "{name}: forged below QSE");
    }
    println!("criterion 4 PASS: CASCI <= QSE <= forged on every fixture (gaps >= -1e-9 Ha)");
}

/// Criterion 5: with the forged state confined to the totally symmetric
/// sector, cross-irrep H/M entries and cross-spin blocks vanish below
/// 1e-10 on the mixed-irrep four-orbital fixture.
#[test]
fn criterion_5_symmetry_superselection() {
    let ints = load_fixture("mixed44.fcidump");
    let mut ansatz = ForgedAnsatz::default_for(4, 4, &ints.orbital_irreps).unwrap();
    let phi = 0.37f64;
    ansatz.schmidt = vec![phi.cos(), phi.sin()];

    let h = build_hamiltonian(&ints);
    let basis = build_excitation_basis(&ansatz.bitstrings[0], &ints.orbital_irreps);
    let operators = SubspaceOperators::build(&basis, &h).unwrap();
    let matrices = operators.assemble(&ansatz, &ExecutionMode::Exact).unwrap();

    let dim = basis.elements.len();
    let mut worst_irrep: f64 = 0.0;
    for mu in 0..dim {
        for nu in 0..dim {
            if basis.elements[mu].irrep != basis.elements[nu].irrep {
                worst_irrep = worst_irrep
                    .max(matrices.h[(mu, nu)].abs())
                    .max(matrices.m[(mu, nu)].abs());
            }
        }
    }
    assert!(worst_irrep < 1e-10, "cross-irrep entry {worst_irrep:e}");

    // cross-spin blocks of the orthogonalized Hamiltonian
    let mut worst_spin: f64 = 0.0;
    let irreps: BTreeSet<Irrep> = basis.elements.iter().map(|e| e.irrep).collect();
    for irrep in irreps {
        let indices: Vec<usize> = (0..dim)
            .filter(|&i| basis.elements[i].irrep == irrep)
            .collect();
        let take = |m: &DMatrix<f64>| {
            DMatrix::from_fn(indices.len(), indices.len(), |i, j| {
                m[(indices[i], indices[j])]
            })
        };
        let (hb, mb, sb) = (take(&matrices.h), take(&matrices.m), take(&matrices.s));
        let m_eig = SymmetricEigen::new(mb);
        let retained: Vec<usize> = (0..indices.len())
            .filter(|&i| m_eig.eigenvalues[i] > 1e-8)
            .collect();
        if retained.is_empty() {
            continue;
        }
        let mut x = DMatrix::<f64>::zeros(indices.len(), retained.len());
        for (col, &i) in retained.iter().enumerate() {
            x.set_column(col, &(m_eig.eigenvectors.column(i) / m_eig.eigenvalues[i].sqrt()));
        }
        let s_tilde = x.transpose() * &sb * &x;
        let s_eig = SymmetricEigen::new((&s_tilde + s_tilde.transpose()) * 0.5);
        let h_tilde = x.transpose() * &hb * &x;
        let h_rot = s_eig.eigenvectors.transpose() * &h_tilde * &s_eig.eigenvectors;
        for i in 0..retained.len() {
            for j in 0..retained.len() {
                let si = spin_from_s_squared(s_eig.eigenvalues[i]);
                let sj = spin_from_s_squared(s_eig.eigenvalues[j]);
                if si != sj {
                    worst_spin = worst_spin.max(h_rot[(i, j)].abs());
                }
            }
        }
    }
    assert!(worst_spin < 1e-10, "cross-spin entry {worst_spin:e}");
    println!(
        "criterion 5 PASS: cross-irrep entries <= {worst_irrep:.2e}, cross-spin blocks <= {worst_spin:.2e}"
    );
}

/// Criterion 6: the resource model reproduces the published rows for the
/// four consistent templates and the qubit count of the fifth.
#[test]
fn criterion_6_resource_counts() {
    let rows = [
        ((6usize, 5usize), (5usize, 6usize, 32usize, 13usize, 26usize)),
        ((8, 6), (6, 7, 39, 16, 26)),
        ((6, 6), (6, 8, 42, 19, 26)),
        ((8, 7), (7, 9, 49, 22, 26)),
    ];
    for ((e, o), expected) in rows {
        let ansatz = ForgedAnsatz::default_for(e, o, &vec![Irrep::A1; o]).unwrap();
        let r = resource_count(&ansatz).unwrap();
        let got = (
            r.qubits,
            r.parameters,
            r.single_qubit_gates,
            r.two_qubit_gates,
            r.depth,
        );
        assert_eq!(got, expected, "({e}e,{o}o)");
    }
    // the (10e,8o) template's parameter/gate accounting is
    // convention-dependent; only its width is asserted
    let wide = ForgedAnsatz::default_for(10, 8, &vec![Irrep::A1; 8]).unwrap();
    assert_eq!(resource_count(&wide).unwrap().qubits, 8);
    println!("criterion 6 PASS: resource rows (6e,5o) (8e,6o) (6e,6o) (8e,7o) exact; (10e,8o) width 8 flagged convention-dependent");
}

/// Criterion 7: over 20 seeds at 100k shots on the four-orbital fixture,
/// sampled excitation energies sit within 5 sigma of exact mode and the
/// pooled chi-squared stays below 3.
#[test]
fn criterion_7_shot_noise_statistics() {
    let ints = load_fixture("mixed44.fcidump");
    let dir = tempfile::tempdir().unwrap();
    let artifacts = run_exact("mixed44.fcidump", &dir.path().join("c7"));
    let ansatz = artifacts.ansatz.ansatz.clone();
    let exact = &artifacts.qse[&Mode::Exact];

    let h = build_hamiltonian(&ints);
    let basis = build_excitation_basis(&ansatz.bitstrings[0], &ints.orbital_irreps);
    let operators = SubspaceOperators::build(&basis, &h).unwrap();

    let mut deviations = Vec::new();
    let mut sigmas = Vec::new();
    for seed in 0..20u64 {
        let mode = ExecutionMode::Sampled(ShotPlan {
            shots: 100_000,
            seed: seeding::derive(seed, &[7]),
        });
        let matrices = operators.assemble(&ansatz, &mode).unwrap();
        let options = ClassifyOptions {
            epsilon_m: adaptive_epsilon_m(&matrices),
            ..ClassifyOptions::default()
        };
        let spectrum = bootstrap_uncertainty(&matrices, &basis, &options, 200, seed).unwrap();
        for state in spectrum.states.iter().filter(|s| s.excitation_ev > 0.0) {
            let reference = match exact.find(&state.state_label()) {
                Some(r) => r,
                None => continue,
            };
            if state.unstable || state.sigma_ev == 0.0 {
                continue;
            }
            let deviation = state.excitation_ev - reference.excitation_ev;
            assert!(
                deviation.abs() < 5.0 * state.sigma_ev,
                "seed {seed} {}: dev {deviation} sigma {}",
                state.label,
                state.sigma_ev
            );
            deviations.push(deviation);
            sigmas.push(state.sigma_ev);
        }
    }
    assert!(deviations.len() >= 100, "only {} comparisons", deviations.len());
    let chi2 = chi_squared(&deviations, &sigmas).unwrap();
    assert!(chi2 < 3.0, "suite chi-squared {chi2}");
    println!(
        "criterion 7 PASS: {} sampled states within 5 sigma over 20 seeds, suite chi2 = {chi2:.3}",
        deviations.len()
    );
}

/// Criterion 8: at p = 0.02 and 100k shots, twirled mitigation plus
/// post-selection beats the unmitigated energy in at least 90 of 100
/// trials, and the zero-noise channel leaves expectations bit-identical.
#[test]
fn criterion_8_mitigation_efficacy() {
    let ints = load_fixture("h2like.fcidump");
    let dir = tempfile::tempdir().unwrap();
    let artifacts = run_exact("h2like.fcidump", &dir.path().join("c8"));
    let ansatz = artifacts.ansatz.ansatz.clone();
    let e_exact = artifacts.ansatz.energy_hartree;

    let h = build_hamiltonian(&ints);
    let bip = bipartition(&h, 2).unwrap();

    let mut wins = 0;
    let trials = 100u64;
    for seed in 0..trials {
        let plan = ShotPlan {
            shots: 100_000,
            seed: seeding::derive(seed, &[8]),
        };
        let model = ReadoutModel::uniform(2, 0.02, seeding::derive(seed, &[9])).unwrap();
        let mitigated = forged_expectation(
            &ansatz,
            &bip,
            &ExecutionMode::Noisy(plan, NoisePlan::mitigated(model.clone())),
        )
        .unwrap()
        .value;
        let unmitigated = forged_expectation(
            &ansatz,
            &bip,
            &ExecutionMode::Noisy(plan, NoisePlan::unmitigated(model)),
        )
        .unwrap()
        .value;
        if (mitigated - e_exact).abs() < (unmitigated - e_exact).abs() {
            wins += 1;
        }
    }
    assert!(wins >= 90, "mitigation won only {wins}/{trials}");

    // noiseless channel: the mitigation transforms are exact identities
    let plan = ShotPlan {
        shots: 50_000,
        seed: 123,
    };
    let clean = ReadoutModel::uniform(2, 0.0, 0).unwrap();
    let with_transforms = forged_expectation(
        &ansatz,
        &bip,
        &ExecutionMode::Noisy(plan, NoisePlan::mitigated(clean.clone())),
    )
    .unwrap();
    let without_transforms = forged_expectation(
        &ansatz,
        &bip,
        &ExecutionMode::Noisy(
            plan,
            NoisePlan {
                post_select: false,
                rescale: false,
                ..NoisePlan::mitigated(clean)
            },
        ),
    )
    .unwrap();
    assert_eq!(with_transforms, without_transforms);
    println!("criterion 8 PASS: mitigation beat the raw estimate in {wins}/{trials} trials; zero-noise transforms bit-identical");
}

/// Criterion 9 (conditional): with externally generated integrals
/// matching the published active spaces, the exact-diagonalization
/// excitation energies reproduce the reference values to 0.02 eV.
/// Skipped unless EFQSE_PAPER_FCIDUMP_DIR is set.
#[test]
fn criterion_9_reference_excitations() {
    let dir = match std::env::var("EFQSE_PAPER_FCIDUMP_DIR") {
        Ok(d) => PathBuf::from(d),
        Err(_) => {
            println!(
                "criterion 9 SKIP: EFQSE_PAPER_FCIDUMP_DIR not set (external integrals required)"
            );
            return;
        }
    };
    // (spin, irrep, excitation eV) reference rows per molecule
    let tables: [(&str, &[(u32, Irrep, f64)]); 4] = [
        (
            "furan",
            &[
                (1, Irrep::B2, 6.37),
                (1, Irrep::A1, 8.11),
                (1, Irrep::A1, 8.75),
                (1, Irrep::B2, 10.48),
                (0, Irrep::B2, 6.95),
                (0, Irrep::A1, 8.45),
                (0, Irrep::A1, 9.29),
                (0, Irrep::B2, 10.54),
            ],
        ),
        (
            "pyrrole",
            &[
                (1, Irrep::B2, 6.39),
                (1, Irrep::A1, 7.52),
                (1, Irrep::A1, 8.05),
                (1, Irrep::B2, 9.23),
                (0, Irrep::B2, 6.63),
                (0, Irrep::A1, 7.95),
                (0, Irrep::B2, 9.40),
                (0, Irrep::A1, 8.18),
            ],
        ),
        (
            "pyridine",
            &[
                (1, Irrep::A1, 5.63),
                (1, Irrep::B2, 6.00),
                (1, Irrep::A1, 6.34),
                (1, Irrep::B2, 7.32),
                (1, Irrep::B1, 7.21),
                (1, Irrep::A2, 7.96),
                (0, Irrep::B2, 6.39),
                (0, Irrep::A1, 7.48),
                (0, Irrep::B2, 8.81),
                (0, Irrep::A1, 9.03),
                (0, Irrep::B1, 7.49),
                (0, Irrep::A2, 8.03),
            ],
        ),
        (
            "pyrimidine",
            &[
                (1, Irrep::A1, 6.05),
                (1, Irrep::B2, 6.44),
                (1, Irrep::A1, 6.69),
                (1, Irrep::B2, 9.44),
                (1, Irrep::B1, 5.93),
                (1, Irrep::A2, 7.92),
                (0, Irrep::B2, 6.69),
                (0, Irrep::A1, 8.06),
                (0, Irrep::A1, 9.41),
                (0, Irrep::B2, 9.56),
                (0, Irrep::B1, 6.70),
                (0, Irrep::A2, 8.01),
                (0, Irrep::A2, 8.39),
                (0, Irrep::B1, 9.56),
            ],
        ),
    ];
    let mut checked = 0;
    for (molecule, rows) in tables {
        let path = dir.join(format!("{molecule}.fcidump"));
        if !path.exists() {
            continue;
        }
        let ints = parse_fcidump(&fs::read_to_string(&path).unwrap()).unwrap();
        let options = CasciOptions {
            n_states: 40,
            ..CasciOptions::default()
        };
        let spectrum = casci_spectrum(&ints, ints.n_alpha, ints.n_beta, &options).unwrap();
        for &(spin, irrep, expected_ev) in rows {
            let best = spectrum
                .states
                .iter()
                .filter(|s| s.spin == spin && s.irrep == irrep)
                .map(|s| (s.excitation_ev - expected_ev).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(
                best <= 0.02,
                "{molecule} {spin}/{irrep}: nearest state is {best:.3} eV from {expected_ev}"
            );
            checked += 1;
        }
    }
    assert!(checked > 0, "directory set but no <molecule>.fcidump found");
    println!("criterion 9 PASS: {checked} reference excitation energies reproduced to 0.02 eV");
}

/// Criterion 10: repeated runs of the same config produce byte-identical
/// bundles, via the installed binary.
#[test]
fn criterion_10_determinism() {
    let binary = env!("CARGO_BIN_EXE_efqse");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bundle");
    let config_body = format!(
        "fcidump = \"{}\"\nmode = \"sampled\"\nshots = 20000\nseed = 3\noutput_dir = \"{}\"\n",
        fixture("pair_a1a2.fcidump").display(),
        out.display(),
    );
    let config_path = dir.path().join("run.toml");
    fs::write(&config_path, &config_body).unwrap();

    let snapshot = |label: &str| -> Vec<(String, Vec<u8>)> {
        let status = Command::new(binary)
            .args(["report", "--config"])
            .arg(&config_path)
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{label}: {}",
            String::from_utf8_lossy(&status.stderr)
        );
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().to_string(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };

    let first = snapshot("first run");
    // wipe the bundle so the second pass recomputes everything
    fs::remove_dir_all(&out).unwrap();
    let second = snapshot("second run");
    assert_eq!(first.len(), second.len());
    for ((name_a, a), (name_b, b)) in first.iter().zip(second.iter()) {
        assert_eq!(name_a, name_b);
        assert_eq!(a, b, "{name_a} differs between identical runs");
    }
    println!(
        "criterion 10 PASS: {} bundle files byte-identical across repeated runs",
        first.len()
    );
}
