//! Benchmark helpers: deterministic problem generators shared by the
//! criterion targets.

use efqse_core::chemio::MolecularIntegrals;
use efqse_core::forging::ForgedAnsatz;
use efqse_core::seeding;
use efqse_core::symmetry::Irrep;
use rand::Rng;

pub fn random_integrals(n: usize, seed: u64) -> MolecularIntegrals {
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

pub fn correlated_ansatz(n_orbitals: usize, electrons: usize, seed: u64) -> ForgedAnsatz {
    let mut rng = seeding::rng_for(seed, &[11]);
    let mut ansatz =
        ForgedAnsatz::default_for(electrons, n_orbitals, &vec![Irrep::A1; n_orbitals]).unwrap();
    for t in &mut ansatz.thetas {
        *t = rng.random_range(-1.0..1.0);
    }
    let phi: f64 = rng.random_range(-0.8..0.8);
    ansatz.schmidt = vec![phi.cos(), phi.sin()];
    ansatz
}
