//! Exact diagonalization of the active-space Hamiltonian over Slater
//! determinants, with total-spin and irrep labels. This is the ground
//! truth every other stage is checked against.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use thiserror::Error;

use crate::chemio::MolecularIntegrals;
use crate::spectrum::{spin_from_s_squared, LabeledSpectrum, RawState};
use crate::symmetry::Irrep;

#[derive(Debug, Error)]
pub enum CasciError {
    #[error("determinant basis of {size} exceeds the cap of {cap}")]
    SizeExceeded { size: usize, cap: usize },
    #[error("determinant basis is empty")]
    EmptyBasis,
    #[error("iterative eigensolver failed to converge in {0} iterations")]
    NoConvergence(usize),
    #[error("electron count ({n_alpha} alpha, {n_beta} beta) does not fit {n_orbitals} orbitals")]
    BadSector {
        n_alpha: usize,
        n_beta: usize,
        n_orbitals: usize,
    },
}

/// All (alpha-string, beta-string) determinant pairs of the prescribed
/// Hamming weights, in lexicographic order.
#[derive(Debug, Clone)]
pub struct DeterminantBasis {
    pub n_orbitals: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub determinants: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
}

/// Bitmasks of the given weight over `n` bits, ascending.
pub fn weight_masks(n: usize, weight: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if weight > n {
        return out;
    }
    if weight == 0 {
        out.push(0);
        return out;
    }
    let mut mask = (1u64 << weight) - 1;
    let limit = 1u64 << n;
    while mask < limit {
        out.push(mask);
        // Gosper's hack: next mask with the same popcount
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        if r >= limit || c == 0 {
            break;
        }
        mask = r | (((mask ^ r) / c) >> 2);
    }
    out
}

impl DeterminantBasis {
    pub fn build(
        n_orbitals: usize,
        n_alpha: usize,
        n_beta: usize,
    ) -> Result<DeterminantBasis, CasciError> {
        if n_alpha > n_orbitals || n_beta > n_orbitals {
            return Err(CasciError::BadSector {
                n_alpha,
                n_beta,
                n_orbitals,
            });
        }
        let alphas = weight_masks(n_orbitals, n_alpha);
        let betas = weight_masks(n_orbitals, n_beta);
        let mut determinants = Vec::with_capacity(alphas.len() * betas.len());
        for &a in &alphas {
            for &b in &betas {
                determinants.push((a, b));
            }
        }
        if determinants.is_empty() {
            return Err(CasciError::EmptyBasis);
        }
        let index = determinants
            .iter()
            .enumerate()
            .map(|(i, &d)| (d, i))
            .collect();
        Ok(DeterminantBasis {
            n_orbitals,
            n_alpha,
            n_beta,
            determinants,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.determinants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.determinants.is_empty()
    }

    pub fn position(&self, det: &(u64, u64)) -> Option<usize> {
        self.index.get(det).copied()
    }
}

fn occupied(mask: u64, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&p| mask >> p & 1 == 1)
}

/// Parity sign for moving an electron `from -> to` within one spin
/// string: (-1)^(occupied orbitals strictly between the two).
fn single_sign(occ: u64, from: usize, to: usize) -> f64 {
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    if hi - lo <= 1 {
        return 1.0;
    }
    let between = (occ >> (lo + 1)) & ((1u64 << (hi - lo - 1)) - 1);
    if between.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Standard zero/one/two-difference rules with fermionic sign. Both
/// determinants must come from the same (n_alpha, n_beta) sector.
pub fn slater_condon_element(
    det1: (u64, u64),
    det2: (u64, u64),
    ints: &MolecularIntegrals,
) -> f64 {
    let n = ints.n_orbitals;
    let (a1, b1) = det1;
    let (a2, b2) = det2;
    let da = a1 ^ a2;
    let db = b1 ^ b2;
    let n_diff = (da.count_ones() + db.count_ones()) / 2;

    match n_diff {
        0 => {
            let mut e = ints.core_energy;
            for p in occupied(a1, n) {
                e += ints.h(p, p);
            }
            for p in occupied(b1, n) {
                e += ints.h(p, p);
            }
            for p in occupied(a1, n) {
                for q in occupied(a1, n) {
                    e += 0.5 * (ints.g(p, p, q, q) - ints.g(p, q, q, p));
                }
            }
            for p in occupied(b1, n) {
                for q in occupied(b1, n) {
                    e += 0.5 * (ints.g(p, p, q, q) - ints.g(p, q, q, p));
                }
            }
            for p in occupied(a1, n) {
                for q in occupied(b1, n) {
                    e += ints.g(p, p, q, q);
                }
            }
            e
        }
        1 => {
            // one spin sector differs in exactly one orbital
            let (occ1, other_same, hole_mask, part_mask, alpha_moved) = if da != 0 {
                (a1, b1, a1 & !a2, a2 & !a1, true)
            } else {
                (b1, a1, b1 & !b2, b2 & !b1, false)
            };
            let m = hole_mask.trailing_zeros() as usize;
            let p = part_mask.trailing_zeros() as usize;
            let sign = single_sign(occ1, m, p);
            let mut e = ints.h(m, p);
            // Coulomb minus exchange with same-spin spectators, Coulomb
            // with opposite-spin spectators.
            let common_same = occ1 & !(1u64 << m);
            for q in occupied(common_same, n) {
                e += ints.g(m, p, q, q) - ints.g(m, q, q, p);
            }
            for q in occupied(other_same, n) {
                e += ints.g(m, p, q, q);
            }
            let _ = alpha_moved;
            sign * e
        }
        2 => {
            if da != 0 && db != 0 {
                // one alpha and one beta excitation
                let ma = (a1 & !a2).trailing_zeros() as usize;
                let pa = (a2 & !a1).trailing_zeros() as usize;
                let mb = (b1 & !b2).trailing_zeros() as usize;
                let pb = (b2 & !b1).trailing_zeros() as usize;
                let sign = single_sign(a1, ma, pa) * single_sign(b1, mb, pb);
                sign * ints.g(ma, pa, mb, pb)
            } else {
                // both excitations in the same spin sector
                let (occ1, holes, parts) = if da != 0 {
                    (a1, a1 & !a2, a2 & !a1)
                } else {
                    (b1, b1 & !b2, b2 & !b1)
                };
                let m1 = holes.trailing_zeros() as usize;
                let m2 = 63 - holes.leading_zeros() as usize;
                let p1 = parts.trailing_zeros() as usize;
                let p2 = 63 - parts.leading_zeros() as usize;
                // sequential singles: m1 -> p1 on occ1, then m2 -> p2
                let s1 = single_sign(occ1, m1, p1);
                let intermediate = occ1 & !(1u64 << m1) | (1u64 << p1);
                let s2 = single_sign(intermediate, m2, p2);
                s1 * s2 * (ints.g(m1, p1, m2, p2) - ints.g(m1, p2, m2, p1))
            }
        }
        _ => 0.0,
    }
}

/// Dense Hamiltonian over the determinant basis, rows in parallel.
pub fn hamiltonian_matrix(basis: &DeterminantBasis, ints: &MolecularIntegrals) -> DMatrix<f64> {
    let n = basis.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| slater_condon_element(basis.determinants[i], basis.determinants[j], ints))
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// S^2 applied to a coefficient vector over the determinant basis, via
/// S^2 = S_- S_+ + M_z (M_z + 1) with explicit ladder parity signs.
pub fn apply_s_squared(basis: &DeterminantBasis, v: &DVector<f64>) -> DVector<f64> {
    let n = basis.n_orbitals;
    let mz = 0.5 * (basis.n_alpha as f64 - basis.n_beta as f64);
    let mut out = v * (mz * (mz + 1.0));
    for (idx, &(a, b)) in basis.determinants.iter().enumerate() {
        let c = v[idx];
        if c == 0.0 {
            continue;
        }
        // S+ : move p from beta to alpha
        for p in 0..n {
            let bp = 1u64 << p;
            if b & bp == 0 || a & bp != 0 {
                continue;
            }
            let mut sign = 1.0;
            // destroy beta p: parity over all alpha bits plus beta bits below p
            if (a.count_ones() + (b & (bp - 1)).count_ones()) % 2 == 1 {
                sign = -sign;
            }
            // create alpha p: parity over alpha bits below p
            if (a & (bp - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            let a1 = a | bp;
            let b1 = b & !bp;
            // S- : move q from alpha back to beta
            for q in 0..n {
                let bq = 1u64 << q;
                if a1 & bq == 0 || b1 & bq != 0 {
                    continue;
                }
                let mut sign2 = sign;
                if ((a1 & (bq - 1)).count_ones()) % 2 == 1 {
                    sign2 = -sign2;
                }
                let a2 = a1 & !bq;
                if (a2.count_ones() + (b1 & (bq - 1)).count_ones()) % 2 == 1 {
                    sign2 = -sign2;
                }
                let b2 = b1 | bq;
                if let Some(j) = basis.position(&(a2, b2)) {
                    out[j] += sign2 * c;
                }
            }
        }
    }
    out
}

/// Irrep of a determinant: product over singly occupied orbitals.
fn determinant_irrep(det: (u64, u64), irreps: &[Irrep]) -> Irrep {
    let open = det.0 ^ det.1;
    let mut r = Irrep::A1;
    for p in 0..irreps.len() {
        if open >> p & 1 == 1 {
            r = r * irreps[p];
        }
    }
    r
}

/// Irrep assignment from the dominant determinants of an eigenvector.
/// The leading amplitude decides; near-degenerate leading amplitudes are
/// cross-checked over the top five determinants.
fn eigenvector_irrep(basis: &DeterminantBasis, v: &DVector<f64>, irreps: &[Irrep]) -> Irrep {
    let mut ranked: Vec<(usize, f64)> = v.iter().enumerate().map(|(i, &c)| (i, c.abs())).collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let max = ranked[0].1;
    let label = determinant_irrep(basis.determinants[ranked[0].0], irreps);
    for &(i, w) in ranked.iter().take(5).skip(1) {
        if w < 0.25 * max {
            break;
        }
        let other = determinant_irrep(basis.determinants[i], irreps);
        if other != label {
            // mixed leading determinants can only happen for degenerate
            // eigenvalues; keep the dominant assignment
            break;
        }
    }
    label
}

#[derive(Debug, Clone)]
pub struct CasciOptions {
    pub n_states: usize,
    /// Dense diagonalization below this basis size, Davidson above.
    pub dense_threshold: usize,
    pub max_determinants: usize,
    pub davidson_tolerance: f64,
    pub davidson_max_iterations: usize,
}

impl Default for CasciOptions {
    fn default() -> Self {
        CasciOptions {
            n_states: 16,
            dense_threshold: 2000,
            max_determinants: 1_000_000,
            davidson_tolerance: 1e-9,
            davidson_max_iterations: 200,
        }
    }
}

/// Lowest eigenpairs of the CASCI Hamiltonian with spin and irrep labels.
pub fn casci_spectrum(
    ints: &MolecularIntegrals,
    n_alpha: usize,
    n_beta: usize,
    options: &CasciOptions,
) -> Result<LabeledSpectrum, CasciError> {
    let basis = DeterminantBasis::build(ints.n_orbitals, n_alpha, n_beta)?;
    if basis.len() > options.max_determinants {
        return Err(CasciError::SizeExceeded {
            size: basis.len(),
            cap: options.max_determinants,
        });
    }
    let n_states = options.n_states.min(basis.len());
    let (values, vectors) = if basis.len() <= options.dense_threshold {
        dense_lowest(&basis, ints, n_states)
    } else {
        davidson_lowest(&basis, ints, n_states, options)?
    };

    let raw: Vec<RawState> = values
        .iter()
        .zip(vectors.iter())
        .map(|(&energy, v)| {
            let v = canonical_sign(v);
            let s2 = v.dot(&apply_s_squared(&basis, &v));
            RawState {
                energy,
                sigma: 0.0,
                spin: spin_from_s_squared(s2),
                irrep: eigenvector_irrep(&basis, &v, &ints.orbital_irreps),
                s_squared: s2,
            }
        })
        .collect();
    Ok(LabeledSpectrum::from_raw("casci", raw))
}

/// Ground-state energy only.
pub fn casci_ground_energy(
    ints: &MolecularIntegrals,
    n_alpha: usize,
    n_beta: usize,
) -> Result<f64, CasciError> {
    let options = CasciOptions {
        n_states: 1,
        ..CasciOptions::default()
    };
    let spec = casci_spectrum(ints, n_alpha, n_beta, &options)?;
    Ok(spec.states[0].energy_hartree)
}

/// First nonzero amplitude made positive, for reproducible labeling.
fn canonical_sign(v: &DVector<f64>) -> DVector<f64> {
    for &c in v.iter() {
        if c.abs() > 1e-12 {
            return if c < 0.0 { -v } else { v.clone() };
        }
    }
    v.clone()
}

fn dense_lowest(
    basis: &DeterminantBasis,
    ints: &MolecularIntegrals,
    n_states: usize,
) -> (Vec<f64>, Vec<DVector<f64>>) {
    let h = hamiltonian_matrix(basis, ints);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values = order
        .iter()
        .take(n_states)
        .map(|&i| eig.eigenvalues[i])
        .collect();
    let vectors = order
        .iter()
        .take(n_states)
        .map(|&i| DVector::from(eig.eigenvectors.column(i).clone_owned()))
        .collect();
    (values, vectors)
}

/// Sparse row representation built from Slater-Condon connectivity.
struct SparseHamiltonian {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseHamiltonian {
    fn build(basis: &DeterminantBasis, ints: &MolecularIntegrals) -> SparseHamiltonian {
        let n_orb = basis.n_orbitals;
        let rows: Vec<Vec<(usize, f64)>> = (0..basis.len())
            .into_par_iter()
            .map(|i| {
                let det = basis.determinants[i];
                let mut row: Vec<(usize, f64)> = Vec::new();
                for other in connected_determinants(det, n_orb) {
                    if let Some(j) = basis.position(&other) {
                        let v = slater_condon_element(det, other, ints);
                        if v != 0.0 {
                            row.push((j, v));
                        }
                    }
                }
                row.sort_by_key(|&(j, _)| j);
                row
            })
            .collect();
        SparseHamiltonian { rows }
    }

    fn matvec(&self, v: &DVector<f64>) -> DVector<f64> {
        let out: Vec<f64> = self
            .rows
            .par_iter()
            .map(|row| row.iter().map(|&(j, h)| h * v[j]).sum())
            .collect();
        DVector::from(out)
    }

    fn diagonal(&self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |i, _| {
            self.rows[i]
                .iter()
                .find(|&&(j, _)| j == i)
                .map(|&(_, h)| h)
                .unwrap_or(0.0)
        })
    }
}

/// All determinants reachable by single or double excitations, plus the
/// determinant itself.
fn connected_determinants(det: (u64, u64), n: usize) -> Vec<(u64, u64)> {
    let (a, b) = det;
    let mut out = vec![det];
    let singles_a = sector_singles(a, n);
    let singles_b = sector_singles(b, n);
    for &a2 in &singles_a {
        out.push((a2, b));
    }
    for &b2 in &singles_b {
        out.push((a, b2));
    }
    for &a2 in &singles_a {
        for &b2 in &singles_b {
            out.push((a2, b2));
        }
    }
    for a2 in sector_doubles(a, n) {
        out.push((a2, b));
    }
    for b2 in sector_doubles(b, n) {
        out.push((a, b2));
    }
    out
}

fn sector_singles(occ: u64, n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for i in occupied(occ, n) {
        for v in 0..n {
            if occ >> v & 1 == 0 {
                out.push(occ & !(1 << i) | (1 << v));
            }
        }
    }
    out
}

fn sector_doubles(occ: u64, n: usize) -> Vec<u64> {
    let singles = sector_singles(occ, n);
    let mut out: Vec<u64> = Vec::new();
    for &s in &singles {
        for s2 in sector_singles(s, n) {
            if (s2 ^ occ).count_ones() == 4 && !out.contains(&s2) {
                out.push(s2);
            }
        }
    }
    out
}

/// Blocked Davidson with diagonal preconditioning for the lowest
/// `n_states` eigenpairs.
fn davidson_lowest(
    basis: &DeterminantBasis,
    ints: &MolecularIntegrals,
    n_states: usize,
    options: &CasciOptions,
) -> Result<(Vec<f64>, Vec<DVector<f64>>), CasciError> {
    let n = basis.len();
    let sparse = SparseHamiltonian::build(basis, ints);
    let diag = sparse.diagonal(n);

    // seed with unit vectors at the lowest diagonal entries
    let block = (n_states + 4).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap().then(i.cmp(&j)));
    let mut space: Vec<DVector<f64>> = order
        .iter()
        .take(block)
        .map(|&i| {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            v
        })
        .collect();
    let max_space = (8 * block).min(n);

    for _ in 0..options.davidson_max_iterations {
        let m = space.len();
        let applied: Vec<DVector<f64>> = space.iter().map(|v| sparse.matvec(v)).collect();
        let mut small = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                small[(i, j)] = space[i].dot(&applied[j]);
            }
        }
        let small = (&small + small.transpose()) * 0.5;
        let eig = SymmetricEigen::new(small);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

        let mut ritz_vals = Vec::with_capacity(n_states);
        let mut ritz_vecs = Vec::with_capacity(n_states);
        let mut residuals = Vec::new();
        let mut converged = true;
        for &k in idx.iter().take(n_states) {
            let lambda = eig.eigenvalues[k];
            let y = eig.eigenvectors.column(k);
            let mut x = DVector::zeros(n);
            let mut hx = DVector::zeros(n);
            for (i, &yi) in y.iter().enumerate() {
                x += &space[i] * yi;
                hx += &applied[i] * yi;
            }
            let r = &hx - &x * lambda;
            if r.norm() > options.davidson_tolerance {
                converged = false;
                residuals.push((lambda, r));
            }
            ritz_vals.push(lambda);
            ritz_vecs.push(x);
        }
        if converged {
            return Ok((ritz_vals, ritz_vecs));
        }
        if space.len() >= max_space {
            // restart from Ritz vectors
            space = ritz_vecs
                .iter()
                .cloned()
                .map(|v| {
                    let n2 = v.norm();
                    v / n2
                })
                .collect();
            continue;
        }
        for (lambda, r) in residuals {
            let mut d = DVector::zeros(n);
            for i in 0..n {
                let denom = lambda - diag[i];
                d[i] = if denom.abs() > 1e-8 {
                    r[i] / denom
                } else {
                    r[i] / 1e-8_f64.copysign(if denom == 0.0 { 1.0 } else { denom })
                };
            }
            // orthogonalize twice against the search space
            for _ in 0..2 {
                for v in &space {
                    let overlap = v.dot(&d);
                    d -= v * overlap;
                }
            }
            let norm = d.norm();
            if norm > 1e-10 {
                space.push(d / norm);
            }
        }
    }
    Err(CasciError::NoConvergence(options.davidson_max_iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::build_hamiltonian;
    use crate::fock::{self, ModeLayout};
    use approx::assert_abs_diff_eq;

    fn single_orbital(eps: f64, u: f64, core: f64) -> MolecularIntegrals {
        let mut ints = MolecularIntegrals::empty(1, 1, 1);
        ints.set_h(0, 0, eps);
        ints.set_g(0, 0, 0, 0, u);
        ints.core_energy = core;
        ints
    }

    #[test]
    fn single_orbital_closed_form() {
        let ints = single_orbital(-0.8, 0.4, 0.25);
        let spec = casci_spectrum(&ints, 1, 1, &CasciOptions::default()).unwrap();
        assert_eq!(spec.states.len(), 1);
        assert_abs_diff_eq!(
            spec.states[0].energy_hartree,
            2.0 * -0.8 + 0.4 + 0.25,
            epsilon = 1e-12
        );
        assert_eq!(spec.states[0].spin, 0);
    }

    #[test]
    fn non_interacting_aufbau() {
        let mut ints = MolecularIntegrals::empty(4, 2, 2);
        let eps = [-1.5, -0.7, -0.2, 0.4];
        for (p, &e) in eps.iter().enumerate() {
            ints.set_h(p, p, e);
        }
        let e0 = casci_ground_energy(&ints, 2, 2).unwrap();
        assert_abs_diff_eq!(e0, 2.0 * (eps[0] + eps[1]), epsilon = 1e-10);
    }

    #[test]
    fn matrix_matches_dense_fock_route() {
        // random-ish 3-orbital integrals, full comparison of the CI matrix
        // against the second-quantized operator acting in Fock space
        let mut ints = MolecularIntegrals::empty(3, 1, 1);
        ints.core_energy = 0.17;
        let hvals = [(-1.1, 0, 0), (-0.6, 1, 1), (-0.3, 2, 2), (0.21, 0, 1), (-0.12, 1, 2)];
        for &(v, p, q) in &hvals {
            ints.set_h(p, q, v);
        }
        let gvals = [
            (0.62, 0, 0, 0, 0),
            (0.55, 1, 1, 1, 1),
            (0.48, 2, 2, 2, 2),
            (0.31, 0, 0, 1, 1),
            (0.27, 0, 0, 2, 2),
            (0.33, 1, 1, 2, 2),
            (0.09, 0, 1, 0, 1),
            (0.07, 0, 2, 0, 2),
            (0.11, 1, 2, 1, 2),
            (0.04, 0, 1, 2, 2),
            (0.03, 0, 1, 1, 2),
        ];
        for &(v, p, q, r, s) in &gvals {
            ints.set_g(p, q, r, s, v);
        }

        let h_op = build_hamiltonian(&ints);
        let dense = fock::dense_matrix(&h_op, ModeLayout::Spinful { n_orbitals: 3 });

        for (n_alpha, n_beta) in [(1usize, 1usize), (2, 1), (2, 2)] {
            let basis = DeterminantBasis::build(3, n_alpha, n_beta).unwrap();
            for (i, &d1) in basis.determinants.iter().enumerate() {
                for &d2 in basis.determinants.iter().skip(i) {
                    let sc = slater_condon_element(d1, d2, &ints);
                    // Fock index: alpha bits low, beta bits high
                    let col = (d2.0 | (d2.1 << 3)) as usize;
                    let row = (d1.0 | (d1.1 << 3)) as usize;
                    let reference = dense[(row, col)].re;
                    assert_abs_diff_eq!(sc, reference, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn distant_determinants_decouple() {
        let ints = MolecularIntegrals::empty(4, 2, 2);
        // 3 spin-orbital differences
        let d1 = (0b0011u64, 0b0011u64);
        let d2 = (0b1100u64, 0b0101u64);
        assert_eq!(slater_condon_element(d1, d2, &ints), 0.0);
    }

    fn s_squared_matrix(basis: &DeterminantBasis) -> DMatrix<f64> {
        let dim = basis.len();
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut e = DVector::zeros(dim);
            e[j] = 1.0;
            let col = apply_s_squared(basis, &e);
            for i in 0..dim {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    #[test]
    fn s_squared_eigenvalues_are_s_times_s_plus_one() {
        // even-electron sectors: S integer
        for (na, nb) in [(1usize, 1usize), (2, 2), (3, 1)] {
            let basis = DeterminantBasis::build(3, na, nb).unwrap();
            let eig = SymmetricEigen::new(s_squared_matrix(&basis));
            for &v in eig.eigenvalues.iter() {
                let s = spin_from_s_squared(v);
                let expected = (s * (s + 1)) as f64;
                assert_abs_diff_eq!(v, expected, epsilon = 1e-8);
            }
        }
        // odd-electron sector: S half-integer, eigenvalues 0.75 or 3.75
        let basis = DeterminantBasis::build(3, 2, 1).unwrap();
        let eig = SymmetricEigen::new(s_squared_matrix(&basis));
        for &v in eig.eigenvalues.iter() {
            let nearest = [0.75, 3.75]
                .iter()
                .cloned()
                .min_by(|a, b| (a - v).abs().partial_cmp(&(b - v).abs()).unwrap())
                .unwrap();
            assert_abs_diff_eq!(v, nearest, epsilon = 1e-8);
        }
    }

    #[test]
    fn davidson_agrees_with_dense() {
        let mut ints = MolecularIntegrals::empty(4, 2, 2);
        let eps = [-1.2, -0.8, -0.3, 0.1];
        for (p, &e) in eps.iter().enumerate() {
            ints.set_h(p, p, e);
        }
        ints.set_h(0, 1, 0.15);
        ints.set_h(2, 3, -0.1);
        for p in 0..4 {
            for q in 0..4 {
                ints.set_g(p, p, q, q, 0.3 / (1.0 + (p as f64 - q as f64).abs()));
            }
        }
        ints.set_g(0, 1, 0, 1, 0.05);
        ints.set_g(2, 3, 2, 3, 0.04);

        let dense_opts = CasciOptions {
            n_states: 4,
            ..CasciOptions::default()
        };
        let davidson_opts = CasciOptions {
            n_states: 4,
            dense_threshold: 1,
            ..CasciOptions::default()
        };
        let a = casci_spectrum(&ints, 2, 2, &dense_opts).unwrap();
        let b = casci_spectrum(&ints, 2, 2, &davidson_opts).unwrap();
        for (sa, sb) in a.states.iter().zip(b.states.iter()) {
            assert_abs_diff_eq!(sa.energy_hartree, sb.energy_hartree, epsilon = 1e-7);
            assert_eq!(sa.label, sb.label);
        }
    }

    #[test]
    fn size_cap_enforced() {
        let ints = MolecularIntegrals::empty(10, 5, 5);
        let options = CasciOptions {
            max_determinants: 100,
            ..CasciOptions::default()
        };
        assert!(matches!(
            casci_spectrum(&ints, 5, 5, &options),
            Err(CasciError::SizeExceeded { .. })
        ));
    }
}
