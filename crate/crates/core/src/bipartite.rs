//! Jordan-Wigner mapping per spin register and the tensor-product
//! splitting of fermionic operators into alpha and beta factors.
//!
//! With alpha modes 0..N-1 ahead of beta modes, the 2N-mode mapping of a
//! beta-sector ladder operator carries a Z string across the whole alpha
//! register. Keeping that string as the alpha tensor factor makes every
//! fermionic term an exact A (x) B product with the inter-sector sign
//! absorbed into the coefficients.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fermion::{FermionError, FermionOperator, LadderKind, LadderOp, Spin, DROP_TOLERANCE};
use crate::pauli::{PauliString, PauliSum, PauliTerm};

/// Two-term Pauli expansion of one ladder operator on an N-qubit register:
/// a_p   -> Z_{<p} (X_p + iY_p)/2
/// a+_p  -> Z_{<p} (X_p - iY_p)/2
fn ladder_expansion(orbital: usize, kind: LadderKind) -> [(PauliString, Complex64); 2] {
    let bit = 1u64 << orbital;
    let below = bit - 1;
    let x_part = PauliString { x: bit, z: below };
    let y_part = PauliString {
        x: bit,
        z: below | bit,
    };
    let half = Complex64::new(0.5, 0.0);
    let y_coeff = match kind {
        LadderKind::Destroy => Complex64::new(0.0, 0.5),
        LadderKind::Create => Complex64::new(0.0, -0.5),
    };
    [(x_part, half), (y_part, y_coeff)]
}

/// Jordan-Wigner map of an operator confined to one spin sector onto an
/// N-qubit register (qubit i <-> spatial orbital i).
pub fn jordan_wigner(op: &FermionOperator, n_qubits: usize) -> Result<PauliSum, FermionError> {
    op.uniform_spin()?;
    if let Some(max) = op.max_orbital() {
        if max >= n_qubits {
            return Err(FermionError::OrbitalOutOfRange {
                index: max,
                n: n_qubits,
            });
        }
    }
    let mut terms = Vec::new();
    for (factors, coeff) in op.terms() {
        let mut acc: Vec<(PauliString, Complex64)> = vec![(PauliString::identity(), coeff)];
        for f in factors {
            let expansion = ladder_expansion(f.orbital, f.kind);
            let mut next = Vec::with_capacity(acc.len() * 2);
            for (s, c) in &acc {
                for (fs, fc) in &expansion {
                    let (prod, phase) = s.mul(*fs);
                    next.push((prod, c * fc * phase));
                }
            }
            acc = next;
        }
        for (s, c) in acc {
            terms.push(PauliTerm::new(c, s));
        }
    }
    Ok(PauliSum::from_terms(n_qubits, terms))
}

/// One term of a bipartite operator sum(c_mu A_mu (x) B_mu).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteTerm {
    pub coeff: Complex64,
    pub alpha: PauliString,
    pub beta: PauliString,
}

/// A fermionic operator split into tensor products of Pauli strings on
/// the alpha and beta registers, each of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteOperator {
    pub n_qubits: usize,
    terms: Vec<BipartiteTerm>,
}

impl BipartiteOperator {
    /// Assemble from pre-merged (alpha, beta, coefficient) triples.
    pub fn from_raw_terms(
        n_qubits: usize,
        terms: Vec<(PauliString, PauliString, Complex64)>,
    ) -> BipartiteOperator {
        BipartiteOperator {
            n_qubits,
            terms: terms
                .into_iter()
                .map(|(alpha, beta, coeff)| BipartiteTerm { coeff, alpha, beta })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[BipartiteTerm] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Dense matrix on the joint 2N-qubit space: alpha bits low, beta
    /// bits high. For small-register checks.
    pub fn dense_2n(&self) -> DMatrix<Complex64> {
        let n = self.n_qubits;
        let dim = 1usize << (2 * n);
        let alpha_mask = (1u64 << n) - 1;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for t in &self.terms {
            for b in 0..dim as u64 {
                let ba = b & alpha_mask;
                let bb = b >> n;
                let (ba2, pa) = t.alpha.apply_to_basis(ba);
                let (bb2, pb) = t.beta.apply_to_basis(bb);
                let b2 = ba2 | (bb2 << n);
                m[(b2 as usize, b as usize)] += t.coeff * pa * pb;
            }
        }
        m
    }
}

/// Map each ladder operator to its (alpha-part, beta-part) tensor pair on
/// two N-qubit registers; see the module docs for the sign handling.
fn factor_tensor_pair(
    f: &LadderOp,
    n_qubits: usize,
) -> [(PauliString, PauliString, Complex64); 2] {
    let expansion = ladder_expansion(f.orbital, f.kind);
    let full_z = PauliString {
        x: 0,
        z: (1u64 << n_qubits) - 1,
    };
    match f.spin {
        Spin::Alpha => expansion.map(|(s, c)| (s, PauliString::identity(), c)),
        Spin::Beta => expansion.map(|(s, c)| (full_z, s, c)),
    }
}

/// Split `op` into sum(c_mu A_mu (x) B_mu) over two `n_qubits` registers.
pub fn bipartition(op: &FermionOperator, n_qubits: usize) -> Result<BipartiteOperator, FermionError> {
    if let Some(max) = op.max_orbital() {
        if max >= n_qubits {
            return Err(FermionError::OrbitalOutOfRange {
                index: max,
                n: n_qubits,
            });
        }
    }
    let mut map: BTreeMap<(PauliString, PauliString), Complex64> = BTreeMap::new();
    for (factors, coeff) in op.terms() {
        for (a, b, c) in bipartition_factors(factors, n_qubits) {
            *map.entry((a, b)).or_insert(Complex64::new(0.0, 0.0)) += coeff * c;
        }
    }
    let terms = map
        .into_iter()
        .filter(|(_, c)| c.norm() > DROP_TOLERANCE)
        .map(|((alpha, beta), coeff)| BipartiteTerm { coeff, alpha, beta })
        .collect();
    Ok(BipartiteOperator { n_qubits, terms })
}

/// Expand one normal-ordered factor product into bipartite Pauli terms.
pub(crate) fn bipartition_factors(
    factors: &[LadderOp],
    n_qubits: usize,
) -> Vec<(PauliString, PauliString, Complex64)> {
    let mut acc: Vec<(PauliString, PauliString, Complex64)> = vec![(
        PauliString::identity(),
        PauliString::identity(),
        Complex64::new(1.0, 0.0),
    )];
    for f in factors {
        let pair = factor_tensor_pair(f, n_qubits);
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (sa, sb, c) in &acc {
            for (fa, fb, fc) in &pair {
                let (pa, phase_a) = sa.mul(*fa);
                let (pb, phase_b) = sb.mul(*fb);
                next.push((pa, pb, c * fc * phase_a * phase_b));
            }
        }
        acc = next;
    }
    // merge within the term expansion
    let mut map: BTreeMap<(PauliString, PauliString), Complex64> = BTreeMap::new();
    for (a, b, c) in acc {
        *map.entry((a, b)).or_insert(Complex64::new(0.0, 0.0)) += c;
    }
    map.into_iter()
        .filter(|(_, c)| c.norm() > DROP_TOLERANCE)
        .map(|((a, b), c)| (a, b, c))
        .collect()
}
