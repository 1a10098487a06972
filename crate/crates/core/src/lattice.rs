//! Qubit geometry: hypercubic lattices, coarse-graining into blocks,
//! reverse lightcones, block connectivity and the critical-depth scan.
//!
//! Qubits are indexed row-major (the last coordinate varies fastest). Blocks
//! of a [`SublatticeGrid`] are likewise ordered row-major over their block
//! coordinates, and every block keeps its qubits in ascending index order.

use std::collections::{BTreeSet, VecDeque};

use crate::circuit::Circuit;
use crate::error::{Error, Result};

/// A `D`-dimensional hypercubic lattice of qubits with open boundaries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dims: Vec<usize>,
    strides: Vec<usize>,
    n: usize,
}

impl Lattice {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidLattice("empty dimension list".into()));
        }
        if let Some(&bad) = dims.iter().find(|&&s| s == 0) {
            return Err(Error::InvalidLattice(format!("side length {bad} must be at least 1")));
        }
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let n = dims.iter().product();
        Ok(Self { dims: dims.to_vec(), strides, n })
    }

    /// One-dimensional chain of `n` qubits.
    pub fn chain(n: usize) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Spatial dimension `D`.
    pub fn dimension(&self) -> usize {
        self.dims.len()
    }

    /// Total number of qubits.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(coords.len(), self.dims.len()));
        }
        let mut idx = 0;
        for (k, (&c, &s)) in coords.iter().zip(&self.dims).enumerate() {
            if c >= s {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {c} out of range on axis {k} of size {s}"
                )));
            }
            idx += c * self.strides[k];
        }
        Ok(idx)
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        self.dims
            .iter()
            .zip(&self.strides)
            .map(|(&s, &st)| (index / st) % s)
            .collect()
    }

    /// Whether two qubits share a lattice edge.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        if a >= self.n || b >= self.n || a == b {
            return false;
        }
        let (ca, cb) = (self.coords(a), self.coords(b));
        let diff: usize = ca.iter().zip(&cb).map(|(x, y)| x.abs_diff(*y)).sum();
        diff == 1
    }

    pub fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { qubit: q, n: self.n })
        }
    }
}

/// A coarse-graining of a [`Lattice`] into axis-aligned blocks of side `width`.
///
/// When `width` does not divide a side length the last block along that axis
/// is smaller. Block adjacency is the Moore neighborhood: two blocks are
/// adjacent when their block coordinates differ by at most one on every axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SublatticeGrid {
    lattice: Lattice,
    width: usize,
    block_dims: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    qubit_block: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

impl SublatticeGrid {
    pub fn new(lattice: &Lattice, width: usize) -> Result<Self> {
        if width < 1 {
            return Err(Error::InvalidArgument("block width must be at least 1".into()));
        }
        let block_dims: Vec<usize> = lattice.dims().iter().map(|&s| s.div_ceil(width)).collect();
        let block_lattice = Lattice::new(&block_dims)?;
        let m = block_lattice.n();
        let mut blocks = vec![Vec::new(); m];
        let mut qubit_block = vec![0; lattice.n()];
        for q in 0..lattice.n() {
            let bc: Vec<usize> = lattice.coords(q).iter().map(|&c| c / width).collect();
            let b = block_lattice.index(&bc)?;
            blocks[b].push(q);
            qubit_block[q] = b;
        }
        let adjacency = (0..m)
            .map(|b| {
                let cb = block_lattice.coords(b);
                (0..m)
                    .filter(|&o| {
                        o != b
                            && block_lattice
                                .coords(o)
                                .iter()
                                .zip(&cb)
                                .all(|(x, y)| x.abs_diff(*y) <= 1)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { lattice: lattice.clone(), width, block_dims, blocks, qubit_block, adjacency })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of blocks along each axis.
    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Number of blocks `m`.
    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, qubit: usize) -> usize {
        self.qubit_block[qubit]
    }

    pub fn neighbors(&self, b: usize) -> &[usize] {
        &self.adjacency[b]
    }

    pub fn check_blocks<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> Result<()> {
        for &b in set {
            if b >= self.m() {
                return Err(Error::BlockOutOfRange { block: b, m: self.m() });
            }
        }
        Ok(())
    }

    /// Ascending qubit indices covered by a set of blocks.
    pub fn qubits_of<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> Vec<usize> {
        let mut qs: Vec<usize> = set.into_iter().flat_map(|&b| self.blocks[b].iter().copied()).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    /// Blocks within graph distance `ell` of `set`, excluding `set` itself.
    pub fn boundary(&self, set: &BTreeSet<usize>, ell: usize) -> BTreeSet<usize> {
        let mut dist = vec![usize::MAX; self.m()];
        let mut queue = VecDeque::new();
        for &b in set {
            dist[b] = 0;
            queue.push_back(b);
        }
        while let Some(b) = queue.pop_front() {
            if dist[b] == ell {
                continue;
            }
            for &o in &self.adjacency[b] {
                if dist[o] == usize::MAX {
                    dist[o] = dist[b] + 1;
                    queue.push_back(o);
                }
            }
        }
        (0..self.m()).filter(|&b| dist[b] != usize::MAX && dist[b] > 0).collect()
    }

    /// Blocks of `set` grouped into maximal adjacency-connected components,
    /// each component ordered by its smallest block.
    pub fn connected_components(&self, set: &BTreeSet<usize>) -> Result<Vec<BTreeSet<usize>>> {
        self.check_blocks(set)?;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in set {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(b) = stack.pop() {
                for &o in &self.adjacency[b] {
                    if set.contains(&o) && seen.insert(o) {
                        comp.insert(o);
                        stack.push(o);
                    }
                }
            }
            out.push(comp);
        }
        Ok(out)
    }

    /// Size of the largest connected component of `set` (0 for the empty set).
    pub fn largest_component(&self, set: &BTreeSet<usize>) -> usize {
        self.connected_components(set)
            .map(|cs| cs.iter().map(BTreeSet::len).max().unwrap_or(0))
            .unwrap_or(0)
    }

    /// Upper bound on the reverse-lightcone size of one block after `depth`
    /// nearest-neighbor layers: every axis grows by at most `depth` per side.
    pub fn block_lightcone_cap(&self, depth: usize) -> usize {
        self.lattice
            .dims()
            .iter()
            .map(|&s| (self.width.min(s) + 2 * depth).min(s))
            .product()
    }
}

/// Per-layer reverse lightcone: `sets[i]` is `L_i(A)` for `i = 0..=d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LightconeTrace {
    sets: Vec<BTreeSet<usize>>,
}

impl LightconeTrace {
    /// `L_i(A)`.
    pub fn at(&self, i: usize) -> &BTreeSet<usize> {
        &self.sets[i]
    }

    /// The full lightcone `L(A) = L_0(A)`.
    pub fn lightcone(&self) -> &BTreeSet<usize> {
        &self.sets[0]
    }

    pub fn depth(&self) -> usize {
        self.sets.len() - 1
    }
}

/// Trace the reverse lightcone of `region` backwards through the circuit.
pub fn reverse_lightcone(circuit: &Circuit, region: &BTreeSet<usize>) -> Result<LightconeTrace> {
    let n = circuit.n();
    for &q in region {
        circuit.lattice().check_qubit(q)?;
    }
    let d = circuit.depth();
    let mut sets = vec![BTreeSet::new(); d + 1];
    sets[d] = region.clone();
    let mut partner = vec![usize::MAX; n];
    for i in (1..=d).rev() {
        let mut cur = sets[i].clone();
        for gate in &circuit.layers()[i - 1] {
            if let [a, b] = gate.targets() {
                partner[*a] = *b;
                partner[*b] = *a;
            }
        }
        let extra: Vec<usize> = cur
            .iter()
            .filter_map(|&q| (partner[q] != usize::MAX).then_some(partner[q]))
            .collect();
        cur.extend(extra);
        for gate in &circuit.layers()[i - 1] {
            for &t in gate.targets() {
                partner[t] = usize::MAX;
            }
        }
        sets[i - 1] = cur;
    }
    Ok(LightconeTrace { sets })
}

/// Smallest depth `d ≥ 1` with `(1-p)^d (4d)^D < 1/c`, found by direct scan.
pub fn critical_depth(p: f64, dimension: usize, c: f64) -> Result<usize> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("noise strength {p} must lie in (0, 1)")));
    }
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("threshold constant {c} must be finite and >= 1")));
    }
    if dimension == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let target = 1.0 / c;
    let mut d: usize = 1;
    loop {
        if decay_factor(p, d, dimension) < target {
            return Ok(d);
        }
        d += 1;
        if d > 100_000_000 {
            return Err(Error::InvalidArgument("critical depth scan did not terminate".into()));
        }
    }
}

/// `(1-p)^d (4d)^D`, the per-block relative-entropy bound.
pub fn decay_factor(p: f64, depth: usize, dimension: usize) -> f64 {
    (1.0 - p).powi(depth as i32) * ((4 * depth) as f64).powi(dimension as i32)
}
