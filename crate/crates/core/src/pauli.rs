//! Binary symplectic Pauli algebra.
//!
//! A Pauli operator on `n` qubits is stored as two packed bit masks, `x` and
//! `z`. Qubit `q` carries `X` when only the x bit is set, `Z` when only the z
//! bit is set and `Y` when both are set. Global phases are never tracked:
//! syndromes and logical classes only depend on commutation.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("unknown Pauli letter {0:?}")]
    BadLetter(char),
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Index in the `I, X, Y, Z` ordering.
    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_index(i: usize) -> Self {
        [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][i & 3]
    }

    pub fn letter(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.index()]
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        !((ax & bz) ^ (az & bx))
    }
}

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Pauli operator in binary symplectic form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    num_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliOperator {
    pub fn identity(num_qubits: usize) -> Self {
        let w = words_for(num_qubits);
        Self {
            num_qubits,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    /// Operator acting as `pauli` on `qubit` and identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self, PauliError> {
        let mut p = Self::identity(num_qubits);
        p.set(qubit, pauli)?;
        Ok(p)
    }

    /// Builds an operator from `(qubit, pauli)` pairs. Repeated qubits multiply.
    pub fn from_sparse<I>(num_qubits: usize, terms: I) -> Result<Self, PauliError>
    where
        I: IntoIterator<Item = (usize, Pauli)>,
    {
        let mut p = Self::identity(num_qubits);
        for (q, s) in terms {
            let cur = p.get(q)?;
            let (ax, az) = cur.bits();
            let (bx, bz) = s.bits();
            p.set(q, Pauli::from_bits(ax ^ bx, az ^ bz))?;
        }
        Ok(p)
    }

    /// Same Pauli letter on every listed qubit.
    pub fn uniform<I>(num_qubits: usize, qubits: I, pauli: Pauli) -> Result<Self, PauliError>
    where
        I: IntoIterator<Item = usize>,
    {
        Self::from_sparse(num_qubits, qubits.into_iter().map(|q| (q, pauli)))
    }

    /// Parses a dense string such as `"XIZY"`.
    pub fn parse(s: &str) -> Result<Self, PauliError> {
        let letters: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Self::identity(letters.len());
        for (q, c) in letters.into_iter().enumerate() {
            let pauli = match c.to_ascii_uppercase() {
                'I' | '_' | '.' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(PauliError::BadLetter(other)),
            };
            p.set(q, pauli)?;
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    fn check(&self, q: usize) -> Result<(), PauliError> {
        if q >= self.num_qubits {
            Err(PauliError::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn check_len(&self, other: &Self) -> Result<(), PauliError> {
        if self.num_qubits != other.num_qubits {
            Err(PauliError::LengthMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    pub fn get(&self, q: usize) -> Result<Pauli, PauliError> {
        self.check(q)?;
        Ok(Pauli::from_bits(self.x_bit(q), self.z_bit(q)))
    }

    pub fn set(&mut self, q: usize, pauli: Pauli) -> Result<(), PauliError> {
        self.check(q)?;
        let (x, z) = pauli.bits();
        self.set_x_bit(q, x);
        self.set_z_bit(q, z);
        Ok(())
    }

    /// Unchecked bit accessors for hot loops; callers guarantee `q < num_qubits`.
    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q >> 6] >> (q & 63)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q >> 6] >> (q & 63)) & 1 == 1
    }

    #[inline]
    pub fn set_x_bit(&mut self, q: usize, v: bool) {
        let m = 1u64 << (q & 63);
        if v {
            self.x[q >> 6] |= m;
        } else {
            self.x[q >> 6] &= !m;
        }
    }

    #[inline]
    pub fn set_z_bit(&mut self, q: usize, v: bool) {
        let m = 1u64 << (q & 63);
        if v {
            self.z[q >> 6] |= m;
        } else {
            self.z[q >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip_x_bit(&mut self, q: usize) {
        self.x[q >> 6] ^= 1u64 << (q & 63);
    }

    #[inline]
    pub fn flip_z_bit(&mut self, q: usize) {
        self.z[q >> 6] ^= 1u64 << (q & 63);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Qubits where the operator is not the identity, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    /// Non-identity `(qubit, pauli)` terms, ascending by qubit.
    pub fn terms(&self) -> Vec<(usize, Pauli)> {
        (0..self.num_qubits)
            .filter_map(|q| {
                let p = Pauli::from_bits(self.x_bit(q), self.z_bit(q));
                (p != Pauli::I).then_some((q, p))
            })
            .collect()
    }

    /// Product up to phase.
    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        let mut out = self.clone();
        out.mul_assign(other)?;
        Ok(out)
    }

    pub fn mul_assign(&mut self, other: &Self) -> Result<(), PauliError> {
        self.check_len(other)?;
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        Ok(())
    }

    /// Symplectic product `<x, z'> + <z, x'>` mod 2 equals zero.
    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_len(other)?;
        Ok(self.symplectic_parity(other) == 0)
    }

    fn symplectic_parity(&self, other: &Self) -> u32 {
        let mut acc = 0u64;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i]);
        }
        acc.count_ones() & 1
    }

    /// Restriction of the operator to the x part (drops Z components).
    pub fn x_part(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            x: self.x.clone(),
            z: vec![0; self.z.len()],
        }
    }

    pub fn z_part(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            x: vec![0; self.x.len()],
            z: self.z.clone(),
        }
    }

    /// Swaps x and z on every qubit (transversal Hadamard).
    pub fn hadamard_all(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            x: self.z.clone(),
            z: self.x.clone(),
        }
    }

    /// Interleaved `[x | z]` row used by the symplectic elimination.
    pub(crate) fn row(&self) -> Vec<u64> {
        let mut r = self.x.clone();
        r.extend_from_slice(&self.z);
        r
    }

    pub(crate) fn from_row(num_qubits: usize, row: &[u64]) -> Self {
        let w = words_for(num_qubits);
        Self {
            num_qubits,
            x: row[..w].to_vec(),
            z: row[w..2 * w].to_vec(),
        }
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits {
            let p = Pauli::from_bits(self.x_bit(q), self.z_bit(q));
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PauliOperator::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn x_times_z_is_y() {
        let x = PauliOperator::parse("X").unwrap();
        let z = PauliOperator::parse("Z").unwrap();
        let y = x.multiply(&z).unwrap();
        assert_eq!(y.get(0).unwrap(), Pauli::Y);
        assert!(y.x_bit(0) && y.z_bit(0));
    }

    #[test]
    fn identity_cases() {
        let p = PauliOperator::parse("XYZI").unwrap();
        assert!(p.multiply(&p).unwrap().is_identity());
        let id = PauliOperator::identity(4);
        assert_eq!(id.multiply(&p).unwrap(), p);
    }

    #[test]
    fn commutation_examples() {
        let x0 = PauliOperator::parse("XI").unwrap();
        let z0 = PauliOperator::parse("ZI").unwrap();
        let xx = PauliOperator::parse("XX").unwrap();
        assert!(!x0.commutes(&z0).unwrap());
        assert!(x0.commutes(&xx).unwrap());
        let z = PauliOperator::parse("ZIII").unwrap();
        let xxxx = PauliOperator::parse("XXXX").unwrap();
        assert!(!z.commutes(&xxxx).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = PauliOperator::identity(3);
        let b = PauliOperator::identity(4);
        assert!(matches!(
            a.multiply(&b),
            Err(PauliError::LengthMismatch { left: 3, right: 4 })
        ));
        assert!(a.commutes(&b).is_err());
        assert!(a.get(3).is_err());
    }

    #[test]
    fn wide_operators_cross_word_boundaries() {
        let a = PauliOperator::uniform(130, [0, 64, 129], Pauli::X).unwrap();
        let b = PauliOperator::single(130, 129, Pauli::Z).unwrap();
        assert!(!a.commutes(&b).unwrap());
        assert_eq!(a.weight(), 3);
        assert_eq!(a.support(), vec![0, 64, 129]);
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        proptest::collection::vec(0usize..4, n).prop_map(move |v| {
            PauliOperator::from_sparse(n, v.into_iter().enumerate().map(|(q, i)| (q, Pauli::from_index(i)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn multiply_is_associative_and_commutative(a in arb_pauli(70), b in arb_pauli(70), c in arb_pauli(70)) {
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
        }

        #[test]
        fn commutation_is_symmetric(a in arb_pauli(9), b in arb_pauli(9)) {
            prop_assert_eq!(a.commutes(&b).unwrap(), b.commutes(&a).unwrap());
        }

        #[test]
        fn commutation_matches_letterwise_count(a in arb_pauli(9), b in arb_pauli(9)) {
            let anti = (0..9)
                .filter(|&q| !a.get(q).unwrap().commutes_with(b.get(q).unwrap()))
                .count();
            prop_assert_eq!(a.commutes(&b).unwrap(), anti % 2 == 0);
        }
    }
}
