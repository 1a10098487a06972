//! Pauli-basis decomposition and the inclusion-exclusion machinery over a
//! block grid.
//!
//! `rho = sum_P c_P / 2^n P` with `c_P = Tr(rho P)`. A Pauli string's block
//! support is the set of blocks on which it acts non-trivially; the map
//! `M_A (x) D_{J\A}` keeps exactly the strings whose support equals `A`.

mod inclusion;
mod string;

pub use inclusion::{
    apply_inclusion_exclusion, complete_depolarize_blocks, inclusion_exclusion_map, inclusion_exclusion_reconstruct,
    inclusion_exclusion_term, percolated_via_inclusion_exclusion, sparse_via_inclusion_exclusion, MAX_IE_BLOCKS,
};
pub use string::{all_pauli_strings, PauliString};

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::Serialize;

use crate::dense::Operator;
use crate::error::{Error, Result};
use crate::lattice::SublatticeGrid;
use crate::Guards;

/// Coefficients with magnitude at or below this are not stored.
pub const COEFF_EPS: f64 = 1e-14;

/// Sparse map `P -> Tr(rho P)` for an operator on an ascending qubit list;
/// letter `j` of every key acts on `qubits[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliDecomposition {
    qubits: Vec<usize>,
    coeffs: BTreeMap<PauliString, f64>,
}

impl PauliDecomposition {
    pub fn new(qubits: Vec<usize>, coeffs: BTreeMap<PauliString, f64>) -> Result<Self> {
        if let Some(p) = coeffs.keys().find(|p| p.n() != qubits.len()) {
            return Err(Error::DimensionMismatch(p.n(), qubits.len()));
        }
        Ok(Self { qubits, coeffs })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn coeffs(&self) -> &BTreeMap<PauliString, f64> {
        &self.coeffs
    }

    /// `c_P`, zero when absent.
    pub fn coeff(&self, p: &PauliString) -> f64 {
        self.coeffs.get(p).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Blocks of `grid` on which `p` acts non-trivially.
    pub fn support_of(&self, p: &PauliString, grid: &SublatticeGrid) -> BTreeSet<usize> {
        p.positions().into_iter().map(|j| grid.block_of(self.qubits[j])).collect()
    }

    /// Keep only coefficients satisfying `keep(support)`.
    pub fn retain_supports(&self, grid: &SublatticeGrid, mut keep: impl FnMut(&BTreeSet<usize>) -> bool) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(p, _)| keep(&self.support_of(p, grid)))
            .map(|(p, &c)| (*p, c))
            .collect();
        Self { qubits: self.qubits.clone(), coeffs }
    }

    /// Text dump: one `word coefficient` line per stored entry, sorted.
    pub fn to_dump(&self) -> String {
        self.coeffs.iter().map(|(p, c)| format!("{p} {c:.12e}\n")).collect()
    }

    /// Parse a dump produced by [`to_dump`](Self::to_dump).
    pub fn from_dump(qubits: Vec<usize>, text: &str) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let syntax = |msg: String| Error::Syntax { line: i + 1, column: 1, msg };
            let mut parts = line.split_whitespace();
            let (Some(word), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(syntax("expected `word coefficient`".into()));
            };
            let p: PauliString = word.parse()?;
            let c: f64 = value.parse().map_err(|e| syntax(format!("{e}")))?;
            coeffs.insert(p, c);
        }
        Self::new(qubits, coeffs)
    }
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

pub fn pauli_decompose(op: &Operator) -> Result<PauliDecomposition> {
    pauli_decompose_with(op, &Guards::default())
}

/// `c_P = Tr(op P)` for every `P`, via one Walsh-Hadamard transform per
/// `x` mask.
pub fn pauli_decompose_with(op: &Operator, guards: &Guards) -> Result<PauliDecomposition> {
    let n = op.n_qubits();
    crate::dense::check_dense_guard("Pauli decomposition", n, guards)?;
    let dim = op.dim();
    let mut coeffs = BTreeMap::new();
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for x in 0..dim {
        for (r, slot) in v.iter_mut().enumerate() {
            *slot = op.get(r, r ^ x);
        }
        walsh_hadamard(&mut v);
        for (z, &w) in v.iter().enumerate() {
            let c = (string::i_pow((x & z).count_ones()) * w).re;
            if c.abs() > COEFF_EPS {
                coeffs.insert(PauliString::from_masks(n, x as u64, z as u64)?, c);
            }
        }
    }
    Ok(PauliDecomposition { qubits: op.qubits().to_vec(), coeffs })
}

/// `sum_P c_P / 2^n P`.
pub fn pauli_reconstruct(dec: &PauliDecomposition) -> Result<Operator> {
    let n = dec.n();
    crate::dense::check_dense_guard("Pauli reconstruction", n, &Guards::default())?;
    let dim = 1usize << n;
    let mut by_x: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
    for (p, &c) in &dec.coeffs {
        let u = by_x.entry(p.x_mask()).or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim]);
        u[p.z_mask() as usize] += string::i_pow((p.x_mask() & p.z_mask()).count_ones()) * c;
    }
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    let scale = 1.0 / dim as f64;
    for (x, mut u) in by_x {
        walsh_hadamard(&mut u);
        for (r, &w) in u.iter().enumerate() {
            data[(r ^ x as usize) * dim + r] += w * scale;
        }
    }
    Operator::new(dec.qubits.clone(), data)
}

/// `Tr(op P)`, with letter `j` of `p` acting on `op.qubits()[j]`.
pub fn pauli_expectation(op: &Operator, p: &PauliString) -> Result<f64> {
    if p.n() != op.n_qubits() {
        return Err(Error::DimensionMismatch(p.n(), op.n_qubits()));
    }
    let x = p.x_mask() as usize;
    let total: Complex64 = (0..op.dim()).map(|r| op.get(r, r ^ x) * p.phase(r as u64)).sum();
    Ok(total.re)
}

/// The letters of `p` (a string over lattice qubits `0..n`) on an ascending
/// sub-list of qubits that contains its support.
pub fn restrict(p: &PauliString, qubits: &[usize]) -> Result<PauliString> {
    let mut out = PauliString::identity(qubits.len());
    for j in p.positions() {
        let pos = qubits.binary_search(&j).map_err(|_| Error::UnknownQubit(j))?;
        out.set(pos, p.letter(j))?;
    }
    Ok(out)
}

/// Block support of a string over lattice qubits `0..n`.
pub fn support(p: &PauliString, grid: &SublatticeGrid) -> BTreeSet<usize> {
    p.positions().into_iter().map(|j| grid.block_of(j)).collect()
}

/// Drop every coefficient supported on more than `k` blocks.
pub fn truncate_sparse(dec: &PauliDecomposition, grid: &SublatticeGrid, k: usize) -> PauliDecomposition {
    dec.retain_supports(grid, |s| s.len() <= k)
}

/// Drop every coefficient whose support has a connected component larger
/// than `ell` blocks.
pub fn truncate_percolated(dec: &PauliDecomposition, grid: &SublatticeGrid, ell: usize) -> PauliDecomposition {
    dec.retain_supports(grid, |s| grid.largest_component(s) <= ell)
}

/// Coefficient mass grouped by an integer key of the support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassRow {
    pub size: usize,
    pub count: usize,
    /// `sum |c_P|`.
    pub l1: f64,
    /// `sum c_P^2 / 2^n`, the Hilbert-Schmidt weight.
    pub hs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportStats {
    pub by_support_size: Vec<MassRow>,
    pub by_largest_component: Vec<MassRow>,
}

pub fn support_statistics(dec: &PauliDecomposition, grid: &SublatticeGrid) -> SupportStats {
    let mut by_size: BTreeMap<usize, MassRow> = BTreeMap::new();
    let mut by_comp: BTreeMap<usize, MassRow> = BTreeMap::new();
    let norm = (1u64 << dec.n()) as f64;
    for (p, &c) in &dec.coeffs {
        let s = dec.support_of(p, grid);
        for (key, table) in [(s.len(), &mut by_size), (grid.largest_component(&s), &mut by_comp)] {
            let row = table.entry(key).or_insert(MassRow { size: key, count: 0, l1: 0.0, hs: 0.0 });
            row.count += 1;
            row.l1 += c.abs();
            row.hs += c * c / norm;
        }
    }
    SupportStats {
        by_support_size: by_size.into_values().collect(),
        by_largest_component: by_comp.into_values().collect(),
    }
}
