//! Second-quantized fermionic operators over spin-orbitals.
//!
//! Terms are stored normal-ordered: creation operators to the left of
//! destruction operators, creations ascending and destructions descending
//! in the (spin, orbital) mode order, with all reordering signs folded
//! into the coefficients. Alpha modes precede beta modes.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemio::MolecularIntegrals;

/// Terms with coefficient magnitude below this are dropped after merging.
pub const DROP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Spin {
    Alpha,
    Beta,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Alpha, Spin::Beta];

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Alpha => Spin::Beta,
            Spin::Beta => Spin::Alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LadderKind {
    Create,
    Destroy,
}

/// A single creation or destruction operator on a spin-orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderOp {
    pub kind: LadderKind,
    pub spin: Spin,
    pub orbital: usize,
}

impl LadderOp {
    pub fn create(orbital: usize, spin: Spin) -> Self {
        LadderOp {
            kind: LadderKind::Create,
            spin,
            orbital,
        }
    }

    pub fn destroy(orbital: usize, spin: Spin) -> Self {
        LadderOp {
            kind: LadderKind::Destroy,
            spin,
            orbital,
        }
    }

    /// Mode ordering key: all alpha orbitals before all beta orbitals.
    fn mode(&self) -> (Spin, usize) {
        (self.spin, self.orbital)
    }

    fn adjoint(&self) -> LadderOp {
        LadderOp {
            kind: match self.kind {
                LadderKind::Create => LadderKind::Destroy,
                LadderKind::Destroy => LadderKind::Create,
            },
            spin: self.spin,
            orbital: self.orbital,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FermionError {
    #[error("operator mixes spin sectors but a single-sector operator was required")]
    MixedSpins,
    #[error("orbital index {index} out of range for register size {n}")]
    OrbitalOutOfRange { index: usize, n: usize },
}

/// A normal-ordered sum of ladder-operator products.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FermionOperator {
    terms: BTreeMap<Vec<LadderOp>, Complex64>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        FermionOperator::default()
    }

    /// Constant multiple of the identity.
    pub fn identity(coeff: Complex64) -> Self {
        let mut op = FermionOperator::default();
        op.accumulate(Vec::new(), coeff);
        op.prune();
        op
    }

    /// Build from a single (not necessarily ordered) factor product.
    pub fn from_factors(coeff: Complex64, factors: Vec<LadderOp>) -> Self {
        let mut op = FermionOperator::default();
        op.add_product(coeff, factors);
        op.prune();
        op
    }

    /// Number operator for one spin-orbital.
    pub fn number(orbital: usize, spin: Spin) -> Self {
        FermionOperator::from_factors(
            Complex64::new(1.0, 0.0),
            vec![LadderOp::create(orbital, spin), LadderOp::destroy(orbital, spin)],
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[LadderOp], Complex64)> {
        self.terms.iter().map(|(f, c)| (f.as_slice(), *c))
    }

    /// Largest orbital index appearing in the operator, if any.
    pub fn max_orbital(&self) -> Option<usize> {
        self.terms
            .keys()
            .flat_map(|fs| fs.iter().map(|f| f.orbital))
            .max()
    }

    /// Adds `coeff * factors` (arbitrary order), normal-ordering on the fly.
    pub fn add_product(&mut self, coeff: Complex64, factors: Vec<LadderOp>) {
        if coeff.norm() == 0.0 {
            return;
        }
        let mut work = vec![(factors, coeff)];
        while let Some((mut fs, c)) = work.pop() {
            // Move creations left of destructions using {a_p, a+_q} = delta_pq.
            let swap_at = (0..fs.len().saturating_sub(1)).find(|&i| {
                fs[i].kind == LadderKind::Destroy && fs[i + 1].kind == LadderKind::Create
            });
            if let Some(i) = swap_at {
                if fs[i].mode() == fs[i + 1].mode() {
                    let mut contracted = fs.clone();
                    contracted.drain(i..i + 2);
                    work.push((contracted, c));
                }
                fs.swap(i, i + 1);
                work.push((fs, -c));
                continue;
            }
            if let Some((ordered, sign)) = canonicalize_ordered(fs) {
                self.accumulate(ordered, c * sign);
            }
        }
    }

    fn accumulate(&mut self, key: Vec<LadderOp>, coeff: Complex64) {
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += coeff;
    }

    /// Drop merged terms below the documented tolerance.
    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > DROP_TOLERANCE);
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = FermionOperator::default();
        for (factors, coeff) in self.terms() {
            let flipped: Vec<LadderOp> = factors.iter().rev().map(|f| f.adjoint()).collect();
            out.add_product(coeff.conj(), flipped);
        }
        out.prune();
        out
    }

    /// True when the operator equals its adjoint term-by-term.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = self.clone() + self.adjoint().scaled(Complex64::new(-1.0, 0.0));
        diff.terms.values().all(|c| c.norm() <= tol)
    }

    /// The spin sector shared by every factor, if the operator is
    /// confined to one sector. Constant terms return `None` spin.
    pub fn uniform_spin(&self) -> Result<Option<Spin>, FermionError> {
        let mut seen: Option<Spin> = None;
        for (factors, _) in self.terms() {
            for f in factors {
                match seen {
                    None => seen = Some(f.spin),
                    Some(s) if s == f.spin => {}
                    Some(_) => return Err(FermionError::MixedSpins),
                }
            }
        }
        Ok(seen)
    }
}

/// Sort a creations-then-destructions factor list into canonical order,
/// returning the parity sign. `None` when a repeated mode makes the term
/// vanish.
fn canonicalize_ordered(factors: Vec<LadderOp>) -> Option<(Vec<LadderOp>, Complex64)> {
    let split = factors
        .iter()
        .position(|f| f.kind == LadderKind::Destroy)
        .unwrap_or(factors.len());
    let (creates, destroys) = factors.split_at(split);
    debug_assert!(destroys.iter().all(|f| f.kind == LadderKind::Destroy));

    let mut sign = 1.0;
    let creates = sort_with_parity(creates.to_vec(), false, &mut sign)?;
    let destroys = sort_with_parity(destroys.to_vec(), true, &mut sign)?;
    let mut ordered = creates;
    ordered.extend(destroys);
    Some((ordered, Complex64::new(sign, 0.0)))
}

fn sort_with_parity(
    mut group: Vec<LadderOp>,
    descending: bool,
    sign: &mut f64,
) -> Option<Vec<LadderOp>> {
    // Bubble sort; each adjacent transposition of distinct fermionic
    // operators flips the sign, an equal pair annihilates the term.
    let n = group.len();
    for i in 0..n {
        for j in 0..n.saturating_sub(i + 1) {
            let a = group[j].mode();
            let b = group[j + 1].mode();
            if a == b {
                return None;
            }
            let out_of_order = if descending { a < b } else { a > b };
            if out_of_order {
                group.swap(j, j + 1);
                *sign = -*sign;
            }
        }
    }
    Some(group)
}

impl Add for FermionOperator {
    type Output = FermionOperator;
    fn add(self, rhs: FermionOperator) -> FermionOperator {
        let mut out = self;
        for (factors, coeff) in rhs.terms {
            out.accumulate(factors, coeff);
        }
        out.prune();
        out
    }
}

impl Mul for &FermionOperator {
    type Output = FermionOperator;
    fn mul(self, rhs: &FermionOperator) -> FermionOperator {
        let mut out = FermionOperator::default();
        for (fa, ca) in self.terms() {
            for (fb, cb) in rhs.terms() {
                let mut factors = Vec::with_capacity(fa.len() + fb.len());
                factors.extend_from_slice(fa);
                factors.extend_from_slice(fb);
                out.add_product(ca * cb, factors);
            }
        }
        out.prune();
        out
    }
}

/// Active-space Hamiltonian in second quantization:
/// core energy, one-body h_pq and two-body (pr|qs) terms in chemists'
/// notation, summed over both spins and normal-ordered.
pub fn build_hamiltonian(ints: &MolecularIntegrals) -> FermionOperator {
    let n = ints.n_orbitals;
    let mut op = FermionOperator::identity(Complex64::new(ints.core_energy, 0.0));
    for p in 0..n {
        for q in 0..n {
            let h = ints.h(p, q);
            if h == 0.0 {
                continue;
            }
            for spin in Spin::BOTH {
                op.add_product(
                    Complex64::new(h, 0.0),
                    vec![LadderOp::create(p, spin), LadderOp::destroy(q, spin)],
                );
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let g = ints.g(p, r, q, s);
                    if g == 0.0 {
                        continue;
                    }
                    let half = Complex64::new(0.5 * g, 0.0);
                    for sigma in Spin::BOTH {
                        for tau in Spin::BOTH {
                            op.add_product(
                                half,
                                vec![
                                    LadderOp::create(p, sigma),
                                    LadderOp::create(q, tau),
                                    LadderOp::destroy(s, tau),
                                    LadderOp::destroy(r, sigma),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    op.prune();
    op
}

/// Total-spin operator S^2 = S_- S_+ + S_z (S_z + 1) on `n_orbitals`
/// spatial orbitals.
pub fn total_spin_operator(n_orbitals: usize) -> FermionOperator {
    let one = Complex64::new(1.0, 0.0);
    let mut s_plus = FermionOperator::zero();
    for p in 0..n_orbitals {
        s_plus.add_product(
            one,
            vec![LadderOp::create(p, Spin::Alpha), LadderOp::destroy(p, Spin::Beta)],
        );
    }
    s_plus.prune();
    let s_minus = s_plus.adjoint();

    let mut s_z = FermionOperator::zero();
    for p in 0..n_orbitals {
        s_z = s_z + FermionOperator::number(p, Spin::Alpha).scaled(Complex64::new(0.5, 0.0));
        s_z = s_z + FermionOperator::number(p, Spin::Beta).scaled(Complex64::new(-0.5, 0.0));
    }

    let sz_sq = &s_z * &s_z;
    &s_minus * &s_plus + sz_sq + s_z
}
