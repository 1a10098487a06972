use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dense::Operator;
use crate::error::{Error, Result};

/// Tensor product of single-qubit Paulis on up to 64 qubits, stored as `x`
/// and `z` bit masks. Position `j` of the word uses bit `n - 1 - j`, so the
/// first letter acts on the most significant index bit.
///
/// Letters: `I = (0,0)`, `X = (1,0)`, `Y = (1,1)`, `Z = (0,1)`, with
/// `P = i^{#Y} X^x Z^z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        Self { n: n as u8, x: 0, z: 0 }
    }

    /// From packed masks (bit `n - 1 - j` for position `j`).
    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::InvalidArgument(format!("{n} qubits exceed the 64-qubit word")));
        }
        let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if x & !limit != 0 || z & !limit != 0 {
            return Err(Error::InvalidArgument("mask has bits beyond the word length".into()));
        }
        Ok(Self { n: n as u8, x, z })
    }

    /// Single non-identity letter at position `j`.
    pub fn single(n: usize, j: usize, letter: char) -> Result<Self> {
        let mut p = Self::identity(n);
        p.set(j, letter)?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    fn bit(&self, j: usize) -> u64 {
        1u64 << (self.n() - 1 - j)
    }

    pub fn letter(&self, j: usize) -> char {
        let b = self.bit(j);
        match (self.x & b != 0, self.z & b != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn set(&mut self, j: usize, letter: char) -> Result<()> {
        if j >= self.n() {
            return Err(Error::QubitOutOfRange { qubit: j, n: self.n() });
        }
        let b = self.bit(j);
        let (x, z) = match letter.to_ascii_uppercase() {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            other => return Err(Error::InvalidArgument(format!("not a Pauli letter: {other:?}"))),
        };
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Positions carrying a non-identity letter.
    pub fn positions(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| (self.x | self.z) & self.bit(j) != 0).collect()
    }

    /// `<c ^ x| P |c>`, i.e. `P|c> = phase(c) |c ^ x>`.
    pub fn phase(&self, c: u64) -> Complex64 {
        let sign = if (c & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        i_pow((self.x & self.z).count_ones()) * sign
    }

    /// Dense matrix of `P` on the given ascending qubit list (one per letter).
    pub fn to_operator(&self, qubits: Vec<usize>) -> Result<Operator> {
        if qubits.len() != self.n() {
            return Err(Error::DimensionMismatch(qubits.len(), self.n()));
        }
        let dim = 1usize << self.n();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for c in 0..dim {
            let r = c ^ self.x as usize;
            data[r * dim + c] = self.phase(c as u64);
        }
        Operator::new(qubits, data)
    }

    /// Lexicographic key with `I < X < Y < Z`, first letter most significant.
    fn letters(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.n()).map(|j| match self.letter(j) {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            _ => 3,
        })
    }
}

pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.letters().cmp(other.letters()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n() {
            write!(f, "{}", self.letter(j))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.trim().chars().collect();
        if letters.len() > 64 {
            return Err(Error::InvalidArgument("Pauli word longer than 64".into()));
        }
        let mut p = Self::identity(letters.len());
        for (j, &ch) in letters.iter().enumerate() {
            p.set(j, ch)?;
        }
        Ok(p)
    }
}

/// Every Pauli string on `n` qubits, in lexicographic order.
pub fn all_pauli_strings(n: usize) -> Vec<PauliString> {
    let mut out: Vec<PauliString> = (0..1u64 << n)
        .flat_map(|x| (0..1u64 << n).map(move |z| PauliString { n: n as u8, x, z }))
        .collect();
    out.sort();
    out
}
