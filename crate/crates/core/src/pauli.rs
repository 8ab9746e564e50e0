//! Phase-free Pauli operators in binary symplectic form.
//!
//! An operator on `n` qubits is stored as two bit masks: bit `j` of `x` is set
//! when the factor on qubit `j` contains an X, bit `j` of `z` when it contains
//! a Z. Products are XORs and commutation is the symplectic inner product.
//! Measurement outcomes are bits as well: `1` is a `-1` result (the error
//! anticommutes with the measured operator), `0` is `+1`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest register the bit-mask representation supports.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("qubit count must be between 1 and {MAX_QUBITS}, got {0}")]
    BadSize(usize),
    #[error("invalid Pauli character {ch:?} at position {pos}")]
    BadChar { ch: char, pos: usize },
    #[error("generators {0} and {1} anticommute")]
    NonCommuting(usize, usize),
    #[error("empty generator list")]
    NoGenerators,
    #[error("too many independent generators ({0}) for explicit group storage")]
    GroupTooLarge(usize),
}

/// Single-qubit factor of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A Pauli string without phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOperator {
    n: usize,
    x: u64,
    z: u64,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_size(n: usize) -> Result<(), PauliError> {
    if n == 0 || n > MAX_QUBITS {
        Err(PauliError::BadSize(n))
    } else {
        Ok(())
    }
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        assert!(n > 0 && n <= MAX_QUBITS, "qubit count out of range");
        Self { n, x: 0, z: 0 }
    }

    /// Builds an operator from raw masks; bits above `n` are rejected.
    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self, PauliError> {
        check_size(n)?;
        if (x | z) & !mask(n) != 0 {
            return Err(PauliError::BadSize(n));
        }
        Ok(Self { n, x, z })
    }

    /// Single-qubit factor `p` on `qubit` (0-based).
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        assert!(qubit < n, "qubit index out of range");
        let (x, z) = p.bits();
        Self {
            n,
            x: (x as u64) << qubit,
            z: (z as u64) << qubit,
        }
    }

    /// All-X operator on the qubits in `support` (0-based bit mask).
    pub fn x_on(n: usize, support: u64) -> Self {
        Self::from_masks(n, support, 0).expect("support outside register")
    }

    /// All-Z operator on the qubits in `support` (0-based bit mask).
    pub fn z_on(n: usize, support: u64) -> Self {
        Self::from_masks(n, 0, support).expect("support outside register")
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|j| self.support() >> j & 1 == 1).collect()
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    /// True when every non-identity factor is X.
    pub fn is_x_type(&self) -> bool {
        self.z == 0
    }

    /// True when every non-identity factor is Z.
    pub fn is_z_type(&self) -> bool {
        self.x == 0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        self.same_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        self.same_size(other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    pub(crate) fn anticommutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1 == 1
    }

    /// Applies a qubit relabeling: factor on qubit `j` moves to `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut x = 0;
        let mut z = 0;
        for (j, &target) in perm.iter().enumerate() {
            x |= (self.x >> j & 1) << target;
            z |= (self.z >> j & 1) << target;
        }
        Self { n: self.n, x, z }
    }

    fn same_size(&self, other: &Self) -> Result<(), PauliError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(PauliError::SizeMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            write!(f, "{}", self.get(j).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Parses one character per qubit from `{I, X, Y, Z}`, qubit 0 first.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let n = s.chars().count();
        check_size(n)?;
        let mut x = 0u64;
        let mut z = 0u64;
        for (pos, ch) in s.chars().enumerate() {
            let p = match ch.to_ascii_uppercase() {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(PauliError::BadChar { ch, pos }),
            };
            let (bx, bz) = p.bits();
            x |= (bx as u64) << pos;
            z |= (bz as u64) << pos;
        }
        Ok(Self { n, x, z })
    }
}

/// Syndrome bits of `error` against `measured`: bit `i` is set iff the error
/// anticommutes with `measured[i]`.
pub fn syndrome(error: &PauliOperator, measured: &[PauliOperator]) -> Result<u64, PauliError> {
    assert!(measured.len() <= 64, "at most 64 measured operators");
    let mut bits = 0u64;
    for (i, m) in measured.iter().enumerate() {
        if !error.commutes(m)? {
            bits |= 1 << i;
        }
    }
    Ok(bits)
}

pub(crate) fn syndrome_unchecked(error: &PauliOperator, measured: &[PauliOperator]) -> u64 {
    measured
        .iter()
        .enumerate()
        .fold(0, |acc, (i, m)| acc | (error.anticommutes_unchecked(m) as u64) << i)
}

/// An abelian group of Pauli operators with every element stored explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliOperator>,
    elements: Vec<PauliOperator>,
}

/// Elements are capped at 2^16; the built-in codes need at most 2^6.
const MAX_RANK: usize = 16;

impl StabilizerGroup {
    /// Enumerates every product of generator subsets, identity first, ordered
    /// by subset bitmask. Dependent generators do not produce duplicates.
    pub fn generate(generators: &[PauliOperator]) -> Result<Self, PauliError> {
        let first = generators.first().ok_or(PauliError::NoGenerators)?;
        let n = first.n_qubits();
        for (i, a) in generators.iter().enumerate() {
            for (j, b) in generators.iter().enumerate().skip(i + 1) {
                if !a.commutes(b)? {
                    return Err(PauliError::NonCommuting(i, j));
                }
            }
        }
        // Keep only generators that extend the span so the subset walk stays duplicate-free.
        let mut independent: Vec<PauliOperator> = Vec::new();
        let mut span = vec![PauliOperator::identity(n)];
        for g in generators {
            if span.contains(g) {
                continue;
            }
            if independent.len() == MAX_RANK {
                return Err(PauliError::GroupTooLarge(MAX_RANK + 1));
            }
            let extra: Vec<_> = span.iter().map(|e| e.mul_unchecked(g)).collect();
            span.extend(extra);
            independent.push(*g);
        }
        let elements = (0u32..1 << independent.len())
            .map(|subset| {
                independent
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| subset >> k & 1 == 1)
                    .fold(PauliOperator::identity(n), |acc, (_, g)| acc.mul_unchecked(g))
            })
            .collect();
        Ok(Self {
            n,
            generators: generators.to_vec(),
            elements,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn elements(&self) -> &[PauliOperator] {
        &self.elements
    }

    /// Elements other than the identity, in enumeration order.
    pub fn nontrivial(&self) -> &[PauliOperator] {
        &self.elements[1..]
    }

    pub fn rank(&self) -> usize {
        self.elements.len().trailing_zeros() as usize
    }

    pub fn contains(&self, p: &PauliOperator) -> bool {
        self.elements.contains(p)
    }

    /// Canonical representative of the coset `p * group`: the smallest
    /// element by `(x, z)` masks.
    pub fn coset_representative(&self, p: &PauliOperator) -> PauliOperator {
        self.elements
            .iter()
            .map(|g| p.mul_unchecked(g))
            .min_by_key(|q| (q.x, q.z))
            .expect("group is nonempty")
    }
}

pub fn enumerate_group(generators: &[PauliOperator]) -> Result<StabilizerGroup, PauliError> {
    StabilizerGroup::generate(generators)
}

/// A correction leaves the code space untouched iff `correction * error` is a
/// stabilizer.
pub fn is_trivial_residual(residual: &PauliOperator, group: &StabilizerGroup) -> bool {
    residual.n_qubits() == group.n_qubits() && group.contains(residual)
}
