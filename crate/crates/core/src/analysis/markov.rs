use std::collections::BTreeSet;

use crate::circuit::Circuit;
use crate::dense::{simulate_with, state_distribution, Distribution, State};
use crate::error::{Error, Result};
use crate::lattice::SublatticeGrid;
use crate::samplers::{patching_law, patching_plan};
use crate::Guards;

use super::{BoundReport, Params};

/// Sub-index of `idx` (over `len` qubits, big-endian) picking `positions`.
fn project(idx: usize, len: usize, positions: &[usize]) -> usize {
    positions.iter().fold(0, |acc, &j| acc << 1 | (idx >> (len - 1 - j) & 1))
}

/// `||P_ABC - P_AB P_{C|B}||_1` for disjoint qubit sets.
pub fn conditional_gap(dist: &Distribution, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    let mut all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("A, B and C must be disjoint".into()));
    }
    let joint = dist.marginal(&all)?;
    let positions = |set: &[usize]| -> Vec<usize> {
        let mut pos: Vec<usize> = all.iter().enumerate().filter(|(_, q)| set.contains(q)).map(|(j, _)| j).collect();
        pos.sort_unstable();
        pos
    };
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let bc: Vec<usize> = b.iter().chain(c).copied().collect();
    let (pos_ab, pos_bc, pos_b) = (positions(&ab), positions(&bc), positions(b));
    let qubits_at = |pos: &[usize]| -> Vec<usize> { pos.iter().map(|&j| all[j]).collect() };
    let p_ab = joint.marginal(&qubits_at(&pos_ab))?;
    let p_bc = joint.marginal(&qubits_at(&pos_bc))?;
    let p_b = joint.marginal(&qubits_at(&pos_b))?;
    let len = all.len();
    let mut gap = 0.0;
    for (idx, &pabc) in joint.probs().iter().enumerate() {
        let pb = p_b.prob(project(idx, len, &pos_b));
        let product = if pb > 0.0 {
            p_ab.prob(project(idx, len, &pos_ab)) * p_bc.prob(project(idx, len, &pos_bc)) / pb
        } else {
            0.0
        };
        gap += (pabc - product).abs();
    }
    Ok(gap)
}

/// Markov gap of block `a` with `B = ∂^ℓ{a}` and `C` the remaining blocks.
pub fn markov_gap(dist: &Distribution, grid: &SublatticeGrid, a: usize, ell: usize) -> Result<f64> {
    grid.check_blocks(&[a])?;
    let a_set = BTreeSet::from([a]);
    let b_set = grid.boundary(&a_set, ell);
    let c_set: BTreeSet<usize> = (0..grid.m()).filter(|x| *x != a && !b_set.contains(x)).collect();
    conditional_gap(dist, grid.block(a), &grid.qubits_of(&b_set), &grid.qubits_of(&c_set))
}

/// [`markov_gap`] on the dephased state: the diagonal is taken first and the
/// marginals are read off it.
pub fn markov_gap_state(state: &State, grid: &SublatticeGrid, a: usize, ell: usize) -> Result<f64> {
    markov_gap(&state_distribution(state), grid, a, ell)
}

pub fn markov_gap_circuit(circuit: &Circuit, grid: &SublatticeGrid, a: usize, ell: usize, guards: &Guards) -> Result<f64> {
    markov_gap_state(&simulate_with(circuit, guards)?, grid, a, ell)
}

pub(crate) fn accumulation_report(
    circuit: &Circuit,
    dist: &Distribution,
    grid: &SublatticeGrid,
    ell: usize,
    guards: &Guards,
) -> Result<BoundReport> {
    let (law, diag) = patching_law(circuit, grid, ell, guards)?;
    let mut earlier: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for step in patching_plan(grid, ell) {
        let a: Vec<usize> = earlier.iter().copied().filter(|q| !step.boundary_qubits.contains(q)).collect();
        total += conditional_gap(dist, &a, &step.boundary_qubits, &step.block_qubits)?;
        earlier.extend_from_slice(&step.block_qubits);
    }
    let params = Params { ell: Some(ell), width: Some(grid.width()), ..Params::of_circuit(circuit) };
    Ok(BoundReport::new("markov_chain_accumulation", law.l1_distance(dist)?, total, params)
        .extra("fallback_kernels", diag.fallback_events as f64))
}

/// `||Q - P||_1 <= sum_i gap_i`, with `Q` the exactly enumerated patching
/// law and `gap_i` the Markov gap of step `i`
/// (`A' = J_{<i} \ B'`, `B' = ∂^ℓ J_i ∩ J_{<i}`, `C' = J_i`).
pub fn check_markov_chain_accumulation(
    circuit: &Circuit,
    grid: &SublatticeGrid,
    ell: usize,
    guards: &Guards,
) -> Result<BoundReport> {
    let dist = state_distribution(&simulate_with(circuit, guards)?);
    accumulation_report(circuit, &dist, grid, ell, guards)
}
