//! Direct application of fermionic operators to dense occupation-number
//! vectors. This is the reference route for expectation values: no qubit
//! mapping is involved, only ladder-operator action with explicit parity
//! signs.
//!
//! In the spinful layout, mode m < N is the alpha spin-orbital of spatial
//! orbital m and mode N + m the beta one, so basis index bit i coincides
//! with qubit i of the 2N-qubit register used elsewhere.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fermion::{FermionOperator, LadderKind, LadderOp, Spin};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeLayout {
    /// 2N modes: alpha orbitals 0..N, then beta orbitals.
    Spinful { n_orbitals: usize },
    /// N modes for an operator confined to one spin sector.
    SingleSector { n_orbitals: usize },
}

impl ModeLayout {
    pub fn n_modes(&self) -> usize {
        match *self {
            ModeLayout::Spinful { n_orbitals } => 2 * n_orbitals,
            ModeLayout::SingleSector { n_orbitals } => n_orbitals,
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_modes()
    }

    fn mode(&self, op: &LadderOp) -> usize {
        match *self {
            ModeLayout::Spinful { n_orbitals } => match op.spin {
                Spin::Alpha => op.orbital,
                Spin::Beta => n_orbitals + op.orbital,
            },
            ModeLayout::SingleSector { .. } => op.orbital,
        }
    }
}

/// `op` applied to a dense Fock vector.
pub fn apply(op: &FermionOperator, amps: &[Complex64], layout: ModeLayout) -> Vec<Complex64> {
    let dim = layout.dim();
    assert_eq!(amps.len(), dim, "amplitude vector does not match layout");
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (factors, coeff) in op.terms() {
        for b in 0..dim as u64 {
            if amps[b as usize].norm_sqr() == 0.0 {
                continue;
            }
            if let Some((b2, sign)) = apply_factors(factors, b, layout) {
                out[b2 as usize] += coeff * sign * amps[b as usize];
            }
        }
    }
    out
}

fn apply_factors(factors: &[LadderOp], b: u64, layout: ModeLayout) -> Option<(u64, f64)> {
    let mut state = b;
    let mut sign = 1.0;
    for f in factors.iter().rev() {
        let m = layout.mode(f);
        let bit = 1u64 << m;
        let below = state & (bit - 1);
        match f.kind {
            LadderKind::Destroy => {
                if state & bit == 0 {
                    return None;
                }
                if below.count_ones() % 2 == 1 {
                    sign = -sign;
                }
                state &= !bit;
            }
            LadderKind::Create => {
                if state & bit != 0 {
                    return None;
                }
                if below.count_ones() % 2 == 1 {
                    sign = -sign;
                }
                state |= bit;
            }
        }
    }
    Some((state, sign))
}

/// <psi| op |psi> evaluated by direct ladder-operator action.
pub fn expectation(op: &FermionOperator, amps: &[Complex64], layout: ModeLayout) -> Complex64 {
    let applied = apply(op, amps, layout);
    amps.iter()
        .zip(applied.iter())
        .map(|(a, b)| a.conj() * b)
        .sum()
}

/// Dense matrix of `op` over the full Fock space of the layout.
pub fn dense_matrix(op: &FermionOperator, layout: ModeLayout) -> DMatrix<Complex64> {
    let dim = layout.dim();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (factors, coeff) in op.terms() {
        for b in 0..dim as u64 {
            if let Some((b2, sign)) = apply_factors(factors, b, layout) {
                m[(b2 as usize, b as usize)] += coeff * sign;
            }
        }
    }
    m
}
