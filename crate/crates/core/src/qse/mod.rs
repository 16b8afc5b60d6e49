//! Subspace expansion on top of the forged ground state: the
//! singles/doubles excitation basis, assembly of the Hamiltonian,
//! overlap, and total-spin matrices, irrep blocking with canonical
//! orthogonalization, spin classification, and the generalized
//! eigenproblem that yields labeled excitation energies.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use thiserror::Error;

use crate::bipartite::{bipartition, BipartiteOperator};
use crate::fermion::{total_spin_operator, FermionOperator, LadderOp, Spin};
use crate::fock::{self, ModeLayout};
use crate::forging::{ExecutionMode, ForgedAnsatz, ForgedError, ForgedEvaluator};
use crate::pauli::PauliString;
use crate::seeding;
use crate::spectrum::{spin_from_s_squared, LabeledSpectrum, RawState};
use crate::statevector::{BitString, QubitState};
use crate::symmetry::Irrep;

#[derive(Debug, Error)]
pub enum QseError {
    #[error("basis of {basis} elements does not match matrix dimension {matrix}")]
    SizeMismatch { basis: usize, matrix: usize },
    #[error("chi-squared requires equal-length nonempty lists, got {deviations} and {sigmas}")]
    ChiSquaredShape { deviations: usize, sigmas: usize },
    #[error("chi-squared received a non-positive sigma {0}")]
    ChiSquaredSigma(f64),
    #[error("no states survived classification")]
    EmptySpectrum,
    #[error("reference state register {state} does not match basis register {basis}")]
    RegisterMismatch { state: usize, basis: usize },
    #[error(transparent)]
    Forged(#[from] ForgedError),
}

/// One basis vector E_mu |Psi> of the expansion subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Excitation {
    Identity,
    /// a+_{a sigma} a_{i sigma}
    Single {
        a: usize,
        i: usize,
        spin: Spin,
    },
    /// a+_{a sigma} a+_{b tau} a_{j tau} a_{i sigma}
    Double {
        a: usize,
        i: usize,
        spin1: Spin,
        b: usize,
        j: usize,
        spin2: Spin,
    },
}

impl Excitation {
    pub fn operator(&self) -> FermionOperator {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Excitation::Identity => FermionOperator::identity(one),
            Excitation::Single { a, i, spin } => FermionOperator::from_factors(
                one,
                vec![LadderOp::create(a, spin), LadderOp::destroy(i, spin)],
            ),
            Excitation::Double {
                a,
                i,
                spin1,
                b,
                j,
                spin2,
            } => FermionOperator::from_factors(
                one,
                vec![
                    LadderOp::create(a, spin1),
                    LadderOp::create(b, spin2),
                    LadderOp::destroy(j, spin2),
                    LadderOp::destroy(i, spin1),
                ],
            ),
        }
    }

    fn orbitals(&self) -> Vec<usize> {
        match *self {
            Excitation::Identity => vec![],
            Excitation::Single { a, i, .. } => vec![i, a],
            Excitation::Double { a, i, b, j, .. } => vec![i, j, a, b],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisElement {
    pub excitation: Excitation,
    /// Product of the involved orbital irreps.
    pub irrep: Irrep,
}

/// The identity plus all spin-resolved singles and canonical doubles out
/// of the reference determinant.
#[derive(Debug, Clone)]
pub struct ExcitationBasis {
    pub n_qubits: usize,
    pub reference: BitString,
    pub elements: Vec<BasisElement>,
}

/// Identity + 2 N_o N_v singles + same-spin and opposite-spin doubles,
/// each tagged with its orbital-product irrep.
pub fn build_excitation_basis(reference: &BitString, orbital_irreps: &[Irrep]) -> ExcitationBasis {
    let n = reference.len;
    let occupied: Vec<usize> = reference.set_bits().collect();
    let virtuals: Vec<usize> = (0..n).filter(|&p| !reference.bit(p)).collect();
    let irrep_of = |orbitals: &[usize]| -> Irrep {
        orbitals
            .iter()
            .fold(Irrep::A1, |acc, &p| acc * orbital_irreps.get(p).copied().unwrap_or(Irrep::A1))
    };

    let mut elements = vec![BasisElement {
        excitation: Excitation::Identity,
        irrep: Irrep::A1,
    }];
    for spin in Spin::BOTH {
        for &i in &occupied {
            for &a in &virtuals {
                let excitation = Excitation::Single { a, i, spin };
                elements.push(BasisElement {
                    irrep: irrep_of(&excitation.orbitals()),
                    excitation,
                });
            }
        }
    }
    // same-spin doubles, i < j and a < b
    for spin in Spin::BOTH {
        for (oi, &i) in occupied.iter().enumerate() {
            for &j in occupied.iter().skip(oi + 1) {
                for (va, &a) in virtuals.iter().enumerate() {
                    for &b in virtuals.iter().skip(va + 1) {
                        let excitation = Excitation::Double {
                            a,
                            i,
                            spin1: spin,
                            b,
                            j,
                            spin2: spin,
                        };
                        elements.push(BasisElement {
                            irrep: irrep_of(&excitation.orbitals()),
                            excitation,
                        });
                    }
                }
            }
        }
    }
    // opposite-spin doubles: every alpha excitation with every beta one
    for &i in &occupied {
        for &a in &virtuals {
            for &j in &occupied {
                for &b in &virtuals {
                    let excitation = Excitation::Double {
                        a,
                        i,
                        spin1: Spin::Alpha,
                        b,
                        j,
                        spin2: Spin::Beta,
                    };
                    elements.push(BasisElement {
                        irrep: irrep_of(&excitation.orbitals()),
                        excitation,
                    });
                }
            }
        }
    }
    ExcitationBasis {
        n_qubits: n,
        reference: *reference,
        elements,
    }
}

/// H, M, and S^2 matrices over the excitation basis with per-entry
/// standard errors (zero in exact mode).
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceMatrices {
    pub h: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub sigma_h: DMatrix<f64>,
    pub sigma_m: DMatrix<f64>,
    pub sigma_s: DMatrix<f64>,
}

impl SubspaceMatrices {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OperatorKind {
    Hamiltonian,
    Overlap,
    SpinSquared,
}

/// Mode-independent structure of the subspace matrices: for every pair
/// (mu, nu) and operator O in {H, 1, S^2}, the bipartite form of the
/// normal-ordered product E_mu^+ O E_nu, with Pauli strings interned.
/// Build once, then assemble under any execution mode.
pub struct SubspaceOperators {
    n_qubits: usize,
    dim: usize,
    strings: BTreeSet<PauliString>,
    entries: Vec<(OperatorKind, usize, usize, Vec<(PauliString, PauliString, Complex64)>)>,
}

impl SubspaceOperators {
    pub fn build(
        basis: &ExcitationBasis,
        hamiltonian: &FermionOperator,
    ) -> Result<SubspaceOperators, QseError> {
        let n = basis.n_qubits;
        let dim = basis.elements.len();
        let identity = FermionOperator::identity(Complex64::new(1.0, 0.0));
        let spin_sq = total_spin_operator(n);

        let pairs: Vec<(usize, usize)> = (0..dim)
            .flat_map(|mu| (mu..dim).map(move |nu| (mu, nu)))
            .collect();

        let kinds = [
            (OperatorKind::Hamiltonian, hamiltonian),
            (OperatorKind::Overlap, &identity),
            (OperatorKind::SpinSquared, &spin_sq),
        ];

        let mut entries = Vec::with_capacity(pairs.len() * 3);
        for (kind, op) in kinds {
            let computed: Vec<_> = pairs
                .par_iter()
                .map(|&(mu, nu)| -> Result<_, QseError> {
                    let e_mu = basis.elements[mu].excitation.operator();
                    let e_nu = basis.elements[nu].excitation.operator();
                    let product = &(&e_mu.adjoint() * op) * &e_nu;
                    let bip = bipartition(&product, n).map_err(ForgedError::from)?;
                    let terms: Vec<(PauliString, PauliString, Complex64)> = bip
                        .terms()
                        .iter()
                        .map(|t| (t.alpha, t.beta, t.coeff))
                        .collect();
                    Ok((kind, mu, nu, terms))
                })
                .collect::<Result<_, _>>()?;
            entries.extend(computed);
        }

        let mut strings = BTreeSet::new();
        for (_, _, _, terms) in &entries {
            for &(a, b, _) in terms {
                if !a.is_identity() {
                    strings.insert(a);
                }
                if !b.is_identity() {
                    strings.insert(b);
                }
            }
        }
        Ok(SubspaceOperators {
            n_qubits: n,
            dim,
            strings,
            entries,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Evaluate every entry under the forged protocol and symmetrize.
    pub fn assemble(
        &self,
        ansatz: &ForgedAnsatz,
        mode: &ExecutionMode,
    ) -> Result<SubspaceMatrices, QseError> {
        if ansatz.n_qubits != self.n_qubits {
            return Err(QseError::RegisterMismatch {
                state: ansatz.n_qubits,
                basis: self.n_qubits,
            });
        }
        let evaluator = ForgedEvaluator::build(ansatz, mode, &self.strings)?;
        let dim = self.dim;
        let results: Vec<(OperatorKind, usize, usize, f64, f64)> = self
            .entries
            .par_iter()
            .map(|(kind, mu, nu, terms)| -> Result<_, QseError> {
                let op = BipartiteOperator::from_raw_terms(self.n_qubits, terms.clone());
                let m = evaluator.evaluate(&op)?;
                Ok((*kind, *mu, *nu, m.value.re, m.sigma))
            })
            .collect::<Result<_, _>>()?;

        let zeros = || DMatrix::<f64>::zeros(dim, dim);
        let mut matrices = SubspaceMatrices {
            h: zeros(),
            m: zeros(),
            s: zeros(),
            sigma_h: zeros(),
            sigma_m: zeros(),
            sigma_s: zeros(),
        };
        for (kind, mu, nu, value, sigma) in results {
            let (target, target_sigma) = match kind {
                OperatorKind::Hamiltonian => (&mut matrices.h, &mut matrices.sigma_h),
                OperatorKind::Overlap => (&mut matrices.m, &mut matrices.sigma_m),
                OperatorKind::SpinSquared => (&mut matrices.s, &mut matrices.sigma_s),
            };
            target[(mu, nu)] = value;
            target[(nu, mu)] = value;
            target_sigma[(mu, nu)] = sigma;
            target_sigma[(nu, mu)] = sigma;
        }
        Ok(matrices)
    }
}

/// Forged-protocol assembly of the QSE matrices.
pub fn assemble_matrices(
    ansatz: &ForgedAnsatz,
    basis: &ExcitationBasis,
    hamiltonian: &FermionOperator,
    mode: &ExecutionMode,
) -> Result<SubspaceMatrices, QseError> {
    SubspaceOperators::build(basis, hamiltonian)?.assemble(ansatz, mode)
}

/// Reference assembly by direct ladder-operator action on a dense
/// 2N-qubit state: entries <Psi| E_mu^+ O E_nu |Psi> with no qubit
/// mapping involved.
pub fn assemble_matrices_oracle(
    state: &QubitState,
    basis: &ExcitationBasis,
    hamiltonian: &FermionOperator,
) -> Result<SubspaceMatrices, QseError> {
    let n = basis.n_qubits;
    if state.n_qubits != 2 * n {
        return Err(QseError::RegisterMismatch {
            state: state.n_qubits,
            basis: n,
        });
    }
    let layout = ModeLayout::Spinful { n_orbitals: n };
    let dim = basis.elements.len();
    let spin_sq = total_spin_operator(n);

    // E_nu |Psi| once per element, then one operator application per kind
    let excited: Vec<Vec<Complex64>> = basis
        .elements
        .par_iter()
        .map(|e| fock::apply(&e.excitation.operator(), state.amplitudes(), layout))
        .collect();
    let h_applied: Vec<Vec<Complex64>> = excited
        .par_iter()
        .map(|v| fock::apply(hamiltonian, v, layout))
        .collect();
    let s_applied: Vec<Vec<Complex64>> = excited
        .par_iter()
        .map(|v| fock::apply(&spin_sq, v, layout))
        .collect();

    let dot = |a: &[Complex64], b: &[Complex64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
    };

    let zeros = || DMatrix::<f64>::zeros(dim, dim);
    let mut matrices = SubspaceMatrices {
        h: zeros(),
        m: zeros(),
        s: zeros(),
        sigma_h: zeros(),
        sigma_m: zeros(),
        sigma_s: zeros(),
    };
    for mu in 0..dim {
        for nu in mu..dim {
            let h = dot(&excited[mu], &h_applied[nu]);
            let m = dot(&excited[mu], &excited[nu]);
            let s = dot(&excited[mu], &s_applied[nu]);
            matrices.h[(mu, nu)] = h;
            matrices.h[(nu, mu)] = h;
            matrices.m[(mu, nu)] = m;
            matrices.m[(nu, mu)] = m;
            matrices.s[(mu, nu)] = s;
            matrices.s[(nu, mu)] = s;
        }
    }
    Ok(matrices)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Canonical-orthogonalization threshold on overlap eigenvalues.
    pub epsilon_m: f64,
    /// Clustering tolerance on S^2 eigenvalues around S(S+1).
    pub epsilon_s: f64,
    /// Irrep of the reference wavefunction (totally symmetric ground
    /// states of the supported molecules).
    pub reference_irrep: Irrep,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            epsilon_m: 1e-8,
            epsilon_s: 0.1,
            reference_irrep: Irrep::A1,
        }
    }
}

/// Sampled-mode orthogonalization threshold: max(1e-8, 3 median sigma_M).
pub fn adaptive_epsilon_m(matrices: &SubspaceMatrices) -> f64 {
    let mut sigmas: Vec<f64> = matrices.sigma_m.iter().copied().collect();
    sigmas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if sigmas.is_empty() {
        0.0
    } else {
        sigmas[sigmas.len() / 2]
    };
    (3.0 * median).max(1e-8)
}

/// Irrep blocking, canonical orthogonalization of M, spin classification
/// through the S^2 eigenproblem, and the per-spin-space Hamiltonian
/// eigenproblem. Returns the labeled states and any skipped-block
/// warnings.
pub fn block_and_classify(
    matrices: &SubspaceMatrices,
    basis: &ExcitationBasis,
    options: &ClassifyOptions,
) -> Result<(LabeledSpectrum, Vec<String>), QseError> {
    let dim = basis.elements.len();
    if matrices.dim() != dim {
        return Err(QseError::SizeMismatch {
            basis: dim,
            matrix: matrices.dim(),
        });
    }
    let mut blocks: BTreeMap<Irrep, Vec<usize>> = BTreeMap::new();
    for (idx, e) in basis.elements.iter().enumerate() {
        blocks.entry(e.irrep).or_default().push(idx);
    }

    let mut raw_states: Vec<RawState> = Vec::new();
    let mut warnings = Vec::new();
    for (block_irrep, indices) in &blocks {
        let take = |m: &DMatrix<f64>| -> DMatrix<f64> {
            DMatrix::from_fn(indices.len(), indices.len(), |i, j| {
                m[(indices[i], indices[j])]
            })
        };
        let hb = take(&matrices.h);
        let mb = take(&matrices.m);
        let sb = take(&matrices.s);

        // canonical orthogonalization of the overlap
        let m_eig = SymmetricEigen::new(mb.clone());
        let retained: Vec<usize> = (0..indices.len())
            .filter(|&i| m_eig.eigenvalues[i] > options.epsilon_m)
            .collect();
        if retained.is_empty() {
            warnings.push(format!(
                "irrep {block_irrep}: no overlap directions above {:.1e}, block skipped",
                options.epsilon_m
            ));
            continue;
        }
        let mut x = DMatrix::<f64>::zeros(indices.len(), retained.len());
        for (col, &i) in retained.iter().enumerate() {
            let scale = 1.0 / m_eig.eigenvalues[i].sqrt();
            x.set_column(col, &(m_eig.eigenvectors.column(i) * scale));
        }

        // spin eigenspaces in the orthogonalized block
        let s_tilde = symmetrized(&(x.transpose() * &sb * &x));
        let s_eig = SymmetricEigen::new(s_tilde.clone());
        let mut spin_groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for i in 0..retained.len() {
            let s_val = s_eig.eigenvalues[i];
            let spin = spin_from_s_squared(s_val);
            let target = (spin * (spin + 1)) as f64;
            if (s_val - target).abs() > options.epsilon_s {
                warnings.push(format!(
                    "irrep {block_irrep}: S^2 eigenvalue {s_val:.4} beyond {:.2} of {target}",
                    options.epsilon_s
                ));
            }
            spin_groups.entry(spin).or_default().push(i);
        }

        let state_irrep = options.reference_irrep * *block_irrep;
        for (&spin, cols) in &spin_groups {
            let mut w = DMatrix::<f64>::zeros(retained.len(), cols.len());
            for (c, &i) in cols.iter().enumerate() {
                w.set_column(c, &s_eig.eigenvectors.column(i));
            }
            let y = &x * &w;
            let h_tilde = symmetrized(&(y.transpose() * &hb * &y));
            let s_in_space = symmetrized(&(y.transpose() * &sb * &y));
            let h_eig = SymmetricEigen::new(h_tilde);
            let mut order: Vec<usize> = (0..cols.len()).collect();
            order.sort_by(|&i, &j| h_eig.eigenvalues[i].partial_cmp(&h_eig.eigenvalues[j]).unwrap());
            for &i in &order {
                let wvec: DVector<f64> = h_eig.eigenvectors.column(i).clone_owned();
                let s_measured = (wvec.transpose() * &s_in_space * &wvec)[(0, 0)];
                raw_states.push(RawState {
                    energy: h_eig.eigenvalues[i],
                    sigma: 0.0,
                    spin,
                    irrep: state_irrep,
                    s_squared: s_measured,
                });
            }
        }
    }
    if raw_states.is_empty() {
        return Err(QseError::EmptySpectrum);
    }
    Ok((LabeledSpectrum::from_raw("ef+qse", raw_states), warnings))
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Resample every matrix entry from a normal with its standard error,
/// re-classify, match states by (spin, irrep, ordinal), and report the
/// spread. The returned spectrum is the nominal one with sigma fields
/// filled; states matched in fewer than 90% of resamples are flagged
/// unstable.
pub fn bootstrap_uncertainty(
    matrices: &SubspaceMatrices,
    basis: &ExcitationBasis,
    options: &ClassifyOptions,
    n_resamples: usize,
    seed: u64,
) -> Result<LabeledSpectrum, QseError> {
    let (mut nominal, _) = block_and_classify(matrices, basis, options)?;
    let noiseless = matrices
        .sigma_h
        .iter()
        .chain(matrices.sigma_m.iter())
        .chain(matrices.sigma_s.iter())
        .all(|&s| s == 0.0);
    if noiseless {
        return Ok(nominal);
    }
    let labels = nominal.labels();
    let samples: Vec<Vec<Option<(f64, f64)>>> = (0..n_resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeding::rng_for(seed, &[r as u64, 0xB007]);
            let normal = Normal::new(0.0, 1.0).unwrap();
            let dim = matrices.dim();
            let mut perturbed = matrices.clone();
            for mu in 0..dim {
                for nu in mu..dim {
                    let dh = matrices.sigma_h[(mu, nu)] * normal.sample(&mut rng);
                    let dm = matrices.sigma_m[(mu, nu)] * normal.sample(&mut rng);
                    let ds = matrices.sigma_s[(mu, nu)] * normal.sample(&mut rng);
                    perturbed.h[(mu, nu)] += dh;
                    perturbed.h[(nu, mu)] = perturbed.h[(mu, nu)];
                    perturbed.m[(mu, nu)] += dm;
                    perturbed.m[(nu, mu)] = perturbed.m[(mu, nu)];
                    perturbed.s[(mu, nu)] += ds;
                    perturbed.s[(nu, mu)] = perturbed.s[(mu, nu)];
                }
            }
            match block_and_classify(&perturbed, basis, options) {
                Ok((spectrum, _)) => labels
                    .iter()
                    .map(|label| {
                        spectrum
                            .find(label)
                            .map(|s| (s.energy_hartree, s.excitation_ev))
                    })
                    .collect(),
                Err(_) => vec![None; labels.len()],
            }
        })
        .collect();

    for (li, label) in labels.iter().enumerate() {
        let matched: Vec<(f64, f64)> = samples.iter().filter_map(|row| row[li]).collect();
        let state = nominal
            .states
            .iter_mut()
            .find(|s| s.state_label() == *label)
            .expect("label from nominal");
        if matched.len() * 10 < n_resamples * 9 {
            state.unstable = true;
        }
        if matched.len() > 1 {
            let nm = matched.len() as f64;
            let mean_h: f64 = matched.iter().map(|(e, _)| e).sum::<f64>() / nm;
            let mean_ev: f64 = matched.iter().map(|(_, x)| x).sum::<f64>() / nm;
            let var_h: f64 =
                matched.iter().map(|(e, _)| (e - mean_h).powi(2)).sum::<f64>() / (nm - 1.0);
            let var_ev: f64 =
                matched.iter().map(|(_, x)| (x - mean_ev).powi(2)).sum::<f64>() / (nm - 1.0);
            state.sigma_hartree = var_h.max(0.0).sqrt();
            state.sigma_ev = var_ev.max(0.0).sqrt();
        }
    }
    Ok(nominal)
}

/// chi^2 = sum_i (dd_i)^2 / (n sigma_i^2)
pub fn chi_squared(deviations: &[f64], sigmas: &[f64]) -> Result<f64, QseError> {
    if deviations.is_empty() || deviations.len() != sigmas.len() {
        return Err(QseError::ChiSquaredShape {
            deviations: deviations.len(),
            sigmas: sigmas.len(),
        });
    }
    for &s in sigmas {
        if s <= 0.0 {
            return Err(QseError::ChiSquaredSigma(s));
        }
    }
    let n = deviations.len() as f64;
    Ok(deviations
        .iter()
        .zip(sigmas)
        .map(|(d, s)| d * d / (n * s * s))
        .sum())
}

/// Aligned-column CSV of excitation energies per labeled state.
pub fn excitation_report(spectrum: &LabeledSpectrum) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<10}, {:>4}, {:>5}, {:>7}, {:>18}, {:>12}, {:>10}, {:>8}\n",
        "label", "spin", "irrep", "ordinal", "energy_hartree", "dE_ev", "sigma_ev", "unstable"
    ));
    for s in &spectrum.states {
        out.push_str(&format!(
            "{:<10}, {:>4}, {:>5}, {:>7}, {:>18.10}, {:>12.6}, {:>10.6}, {:>8}\n",
            s.label, s.spin, s.irrep.to_string(), s.ordinal, s.energy_hartree, s.excitation_ev,
            s.sigma_ev, s.unstable
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_for(weight: usize, n: usize) -> ExcitationBasis {
        let reference = BitString::new((1u64 << weight) - 1, n);
        build_excitation_basis(&reference, &vec![Irrep::A1; n])
    }

    #[test]
    fn smallest_basis_has_four_elements() {
        let basis = basis_for(1, 2);
        assert_eq!(basis.elements.len(), 4);
        let n_singles = basis
            .elements
            .iter()
            .filter(|e| matches!(e.excitation, Excitation::Single { .. }))
            .count();
        assert_eq!(n_singles, 2);
        let n_doubles = basis
            .elements
            .iter()
            .filter(|e| matches!(e.excitation, Excitation::Double { .. }))
            .count();
        assert_eq!(n_doubles, 1);
    }

    #[test]
    fn singles_count_matches_formula() {
        // N_o = 3, N_v = 2 gives 12 spin-resolved singles
        let basis = basis_for(3, 5);
        let n_singles = basis
            .elements
            .iter()
            .filter(|e| matches!(e.excitation, Excitation::Single { .. }))
            .count();
        assert_eq!(n_singles, 12);
    }

    #[test]
    fn element_count_formula_and_growth() {
        let count = |no: usize, nv: usize| -> usize {
            let pairs = |k: usize| k * (k - 1) / 2;
            1 + 2 * no * nv + 2 * pairs(no) * pairs(nv) + (no * nv) * (no * nv)
        };
        let mut previous = 0;
        for (no, nv) in [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3)] {
            let basis = basis_for(no, no + nv);
            assert_eq!(basis.elements.len(), count(no, nv), "({no},{nv})");
            assert!(basis.elements.len() > previous);
            previous = basis.elements.len();
        }
    }

    #[test]
    fn irreps_multiply_over_orbitals() {
        use Irrep::*;
        let reference = BitString::parse("1100").unwrap();
        let basis = build_excitation_basis(&reference, &[A1, B1, A2, B1]);
        for e in &basis.elements {
            let expected = e
                .excitation
                .orbitals()
                .iter()
                .fold(A1, |acc, &p| acc * [A1, B1, A2, B1][p]);
            assert_eq!(e.irrep, expected);
        }
    }

    #[test]
    fn chi_squared_basics() {
        assert!((chi_squared(&[0.5], &[0.5]).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(chi_squared(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(chi_squared(&[], &[]).is_err());
        assert!(chi_squared(&[1.0], &[0.0]).is_err());
        assert!(chi_squared(&[1.0, 2.0], &[1.0]).is_err());
    }
}
