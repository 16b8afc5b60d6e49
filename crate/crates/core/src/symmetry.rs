//! C2v point-group labels and their multiplication table.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Irreducible representation of the C2v point group.
///
/// Encoded as two parity bits (characters under the C2 rotation and the
/// sigma_v reflection), so the group product is a bitwise XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Irrep {
    A1,
    A2,
    B1,
    B2,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown irrep label `{0}` (expected A1, A2, B1 or B2)")]
pub struct UnknownIrrep(pub String);

impl Irrep {
    pub const ALL: [Irrep; 4] = [Irrep::A1, Irrep::A2, Irrep::B1, Irrep::B2];

    fn bits(self) -> u8 {
        match self {
            Irrep::A1 => 0b00,
            Irrep::A2 => 0b01,
            Irrep::B1 => 0b10,
            Irrep::B2 => 0b11,
        }
    }

    fn from_bits(bits: u8) -> Irrep {
        match bits & 0b11 {
            0b00 => Irrep::A1,
            0b01 => Irrep::A2,
            0b10 => Irrep::B1,
            _ => Irrep::B2,
        }
    }

    /// Group product: A1 is the identity, A2*B1 = B2, B1*B2 = A2, X*X = A1.
    pub fn product(self, other: Irrep) -> Irrep {
        Irrep::from_bits(self.bits() ^ other.bits())
    }

    pub fn is_totally_symmetric(self) -> bool {
        self == Irrep::A1
    }

    pub fn parse(label: &str) -> Result<Irrep, UnknownIrrep> {
        match label.trim().to_ascii_uppercase().as_str() {
            "A1" => Ok(Irrep::A1),
            "A2" => Ok(Irrep::A2),
            "B1" => Ok(Irrep::B1),
            "B2" => Ok(Irrep::B2),
            other => Err(UnknownIrrep(other.to_string())),
        }
    }
}

impl std::ops::Mul for Irrep {
    type Output = Irrep;
    fn mul(self, rhs: Irrep) -> Irrep {
        self.product(rhs)
    }
}

impl fmt::Display for Irrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Irrep::A1 => "A1",
            Irrep::A2 => "A2",
            Irrep::B1 => "B1",
            Irrep::B2 => "B2",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Irrep {
    type Err = UnknownIrrep;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Irrep::parse(s)
    }
}

/// Product of the irreps of every orbital in `orbitals`.
pub fn irrep_of_orbital_set(orbitals: &[usize], orbital_irreps: &[Irrep]) -> Irrep {
    orbitals
        .iter()
        .fold(Irrep::A1, |acc, &p| acc * orbital_irreps[p])
}
