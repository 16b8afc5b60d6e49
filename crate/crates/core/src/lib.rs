//! Numerical engine for active-space electronic spectra via forged
//! variational ground states and subspace-expanded excited states, with
//! exact, finite-shot, and noisy-with-mitigation execution modes, checked
//! against built-in exact diagonalization.

pub mod bipartite;
pub mod casci;
pub mod chemio;
pub mod fermion;
pub mod fock;
pub mod forging;
pub mod noise;
pub mod pauli;
pub mod qse;
pub mod seeding;
pub mod spectrum;
pub mod statevector;
pub mod symmetry;

pub use bipartite::{bipartition, jordan_wigner, BipartiteOperator, BipartiteTerm};
pub use casci::{
    casci_ground_energy, casci_spectrum, slater_condon_element, CasciError, CasciOptions,
    DeterminantBasis,
};
pub use chemio::{
    freeze_core, orbital_metadata, parse_fcidump, write_fcidump, ActiveSpaceSpec, ChemError,
    MolecularIntegrals, OrbitalRecord, HARTREE_TO_EV,
};
pub use fermion::{
    build_hamiltonian, total_spin_operator, FermionError, FermionOperator, LadderKind, LadderOp,
    Spin,
};
pub use forging::{
    build_forged_circuit, direct_statevector, forged_expectation, off_diagonal_element,
    optimize_ground_state, resource_count, CircuitMode, ExecutionMode, ForgedAnsatz, ForgedError,
    ForgedEvaluator, Measured, MeasuredComplex, NoisePlan, OptimizationResult, OptimizerConfig,
    ReconstructionConvention, ResourceCount, ShotPlan,
};
pub use noise::{corrupt_counts, post_select, twirled_readout_mitigation, NoiseError, ReadoutModel};
pub use pauli::{PauliString, PauliSum, PauliTerm};
pub use qse::{
    assemble_matrices, assemble_matrices_oracle, block_and_classify, bootstrap_uncertainty,
    build_excitation_basis, chi_squared, excitation_report, BasisElement, ClassifyOptions,
    Excitation, ExcitationBasis, QseError, SubspaceMatrices, SubspaceOperators,
};
pub use spectrum::{LabeledSpectrum, LabeledState, RawState, StateLabel};
pub use statevector::{
    apply_hop_gate, apply_vprep, expectation, BitString, Circuit, Counts, Gate, MeasurementBasis,
    QubitState, StateError, VprepVariant,
};
pub use symmetry::Irrep;
