//! Pauli strings and sums over an N-qubit register.
//!
//! A string is stored in the symplectic form (x, z): the represented
//! operator is the Hermitian product i^{|x&z|} X^x Z^z, so that qubits
//! with both bits set carry a Y. Qubit i maps to bit i of each mask.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Maximum register size representable by the u64 masks.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum PauliError {
    #[error("letter string has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid Pauli letter `{0}` (expected I, X, Y or Z)")]
    InvalidLetter(char),
    #[error("operator is not Hermitian: term {term} has imaginary coefficient {imag:e}")]
    NotHermitian { term: String, imag: f64 },
}

/// A single Hermitian Pauli string (no coefficient).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn identity() -> PauliString {
        Self::IDENTITY
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn single(n_qubits: usize, qubit: usize, letter: char) -> Result<PauliString, PauliError> {
        assert!(qubit < n_qubits && n_qubits <= MAX_QUBITS);
        let bit = 1u64 << qubit;
        match letter {
            'I' => Ok(PauliString { x: 0, z: 0 }),
            'X' => Ok(PauliString { x: bit, z: 0 }),
            'Y' => Ok(PauliString { x: bit, z: bit }),
            'Z' => Ok(PauliString { x: 0, z: bit }),
            c => Err(PauliError::InvalidLetter(c)),
        }
    }

    /// Parse a letter string; position i acts on qubit i.
    pub fn from_letters(letters: &str) -> Result<PauliString, PauliError> {
        let mut x = 0u64;
        let mut z = 0u64;
        for (i, c) in letters.chars().enumerate() {
            let bit = 1u64 << i;
            match c {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                'Z' => z |= bit,
                other => return Err(PauliError::InvalidLetter(other)),
            }
        }
        Ok(PauliString { x, z })
    }

    pub fn letters(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|i| {
                let bit = 1u64 << i;
                match ((self.x & bit) != 0, (self.z & bit) != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                }
            })
            .collect()
    }

    /// Qubits on which the string acts nontrivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Product of two strings: returns the resulting string and the
    /// accumulated phase (a power of i).
    pub fn mul(self, rhs: PauliString) -> (PauliString, Complex64) {
        let x3 = self.x ^ rhs.x;
        let z3 = self.z ^ rhs.z;
        // phase = i^(c1 + c2 - c3) * (-1)^|z1 & x2|, with c = |x & z|
        let c1 = (self.x & self.z).count_ones() as i64;
        let c2 = (rhs.x & rhs.z).count_ones() as i64;
        let c3 = (x3 & z3).count_ones() as i64;
        let mut power = (c1 + c2 - c3).rem_euclid(4);
        if (self.z & rhs.x).count_ones() % 2 == 1 {
            power = (power + 2) % 4;
        }
        (PauliString { x: x3, z: z3 }, i_power(power as u8))
    }

    /// Two strings qubit-wise commute if on every shared qubit they act
    /// with the same letter.
    pub fn qubit_wise_commutes(&self, rhs: &PauliString) -> bool {
        let shared = self.support() & rhs.support();
        (self.x ^ rhs.x) & shared == 0 && (self.z ^ rhs.z) & shared == 0
    }

    /// Phase picked up by the basis state |b>: X^x Z^z |b> = (-1)^|z&b| |b^x>,
    /// on top of the canonical i^|x&z| prefactor.
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex64) {
        let mut phase = i_power(((self.x & self.z).count_ones() % 4) as u8);
        if (self.z & b).count_ones() % 2 == 1 {
            phase = -phase;
        }
        (b ^ self.x, phase)
    }
}

pub(crate) fn i_power(p: u8) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// One term of a Pauli sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: Complex64, string: PauliString) -> Self {
        PauliTerm { coeff, string }
    }
}

/// A linear combination of Pauli strings on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS);
        PauliSum {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Self {
        let mut sum = PauliSum { n_qubits, terms };
        sum.merge();
        sum
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, coeff: Complex64, string: PauliString) {
        self.terms.push(PauliTerm { coeff, string });
    }

    /// Merge duplicate strings and drop terms below `crate::fermion::DROP_TOLERANCE`.
    pub fn merge(&mut self) {
        use std::collections::BTreeMap;
        let mut map: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for t in &self.terms {
            *map.entry(t.string).or_insert(Complex64::new(0.0, 0.0)) += t.coeff;
        }
        self.terms = map
            .into_iter()
            .filter(|(_, c)| c.norm() > crate::fermion::DROP_TOLERANCE)
            .map(|(string, coeff)| PauliTerm { coeff, string })
            .collect();
    }

    /// Error unless every merged coefficient is real to `tol`.
    pub fn check_hermitian(&self, tol: f64) -> Result<(), PauliError> {
        for t in &self.terms {
            if t.coeff.im.abs() > tol {
                return Err(PauliError::NotHermitian {
                    term: t.string.letters(self.n_qubits),
                    imag: t.coeff.im,
                });
            }
        }
        Ok(())
    }

    /// Dense matrix in the little-endian computational basis. Intended
    /// for small registers; dimension is 2^n.
    pub fn dense(&self) -> nalgebra::DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = nalgebra::DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for t in &self.terms {
            for b in 0..dim as u64 {
                let (b2, phase) = t.string.apply_to_basis(b);
                m[(b2 as usize, b as usize)] += t.coeff * phase;
            }
        }
        m
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i) {}", t.coeff.re, t.coeff.im, t.string.letters(self.n_qubits))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn letters_round_trip() {
        let s = PauliString::from_letters("IXYZ").unwrap();
        assert_eq!(s.letters(4), "IXYZ");
        assert_eq!(s.support().count_ones(), 3);
    }

    #[test]
    fn single_y_is_hermitian_product() {
        // Y = i X Z
        let y = PauliString::from_letters("Y").unwrap();
        let (b, phase) = y.apply_to_basis(0);
        assert_eq!(b, 1);
        assert_abs_diff_eq!(phase.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(phase.im, 1.0, epsilon = 1e-15);
        let (b, phase) = y.apply_to_basis(1);
        assert_eq!(b, 0);
        assert_abs_diff_eq!(phase.im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn products_follow_algebra() {
        let x = PauliString::from_letters("X").unwrap();
        let y = PauliString::from_letters("Y").unwrap();
        let z = PauliString::from_letters("Z").unwrap();
        // XY = iZ
        let (s, phase) = x.mul(y);
        assert_eq!(s, z);
        assert_abs_diff_eq!((phase - c(0.0, 1.0)).norm(), 0.0, epsilon = 1e-15);
        // YX = -iZ
        let (s, phase) = y.mul(x);
        assert_eq!(s, z);
        assert_abs_diff_eq!((phase - c(0.0, -1.0)).norm(), 0.0, epsilon = 1e-15);
        // ZZ = I
        let (s, phase) = z.mul(z);
        assert!(s.is_identity());
        assert_abs_diff_eq!((phase - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit_wise_commutation() {
        let a = PauliString::from_letters("XIZ").unwrap();
        let b = PauliString::from_letters("XYI").unwrap();
        let c = PauliString::from_letters("ZYI").unwrap();
        let d = PauliString::from_letters("XYZ").unwrap();
        assert!(a.qubit_wise_commutes(&b));
        assert!(!a.qubit_wise_commutes(&c));
        assert!(!b.qubit_wise_commutes(&c));
        assert!(b.qubit_wise_commutes(&d));
        assert!(a.qubit_wise_commutes(&d));
    }

    #[test]
    fn merge_collapses_duplicates() {
        let s = PauliString::from_letters("XZ").unwrap();
        let sum = PauliSum::from_terms(
            2,
            vec![
                PauliTerm::new(c(0.5, 0.0), s),
                PauliTerm::new(c(0.5, 0.0), s),
                PauliTerm::new(c(1.0, 0.0), PauliString::identity()),
                PauliTerm::new(c(-1.0, 0.0), PauliString::identity()),
            ],
        );
        assert_eq!(sum.terms().len(), 1);
        assert_abs_diff_eq!(sum.terms()[0].coeff.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn hermiticity_check() {
        let mut sum = PauliSum::new(1);
        sum.push(c(1.0, 0.0), PauliString::from_letters("Z").unwrap());
        sum.merge();
        assert!(sum.check_hermitian(1e-10).is_ok());
        let mut bad = PauliSum::new(1);
        bad.push(c(0.0, 1.0), PauliString::from_letters("X").unwrap());
        bad.merge();
        assert!(bad.check_hermitian(1e-10).is_err());
    }
}
