use std::collections::BTreeSet;

use crate::dense::Operator;
use crate::error::{Error, Result};
use crate::lattice::SublatticeGrid;

use super::{support, PauliString};

/// Largest block count for which all `2^m` subsets are enumerated.
pub const MAX_IE_BLOCKS: usize = 16;

/// `M_A (x) D_{J\A}` on a Pauli string: the string itself when its support
/// is exactly `A`, otherwise zero (`None`).
pub fn apply_inclusion_exclusion(p: &PauliString, a: &BTreeSet<usize>, grid: &SublatticeGrid) -> Option<PauliString> {
    (support(p, grid) == *a).then_some(*p)
}

/// Completely depolarize the qubits of `blocks` that `op` carries.
pub fn complete_depolarize_blocks(op: &mut Operator, grid: &SublatticeGrid, blocks: &BTreeSet<usize>) -> Result<()> {
    let qs: Vec<usize> =
        grid.qubits_of(blocks).into_iter().filter(|q| op.qubits().contains(q)).collect();
    op.depolarize_completely(&qs)
}

/// `M_A(rho) = prod_{j in A} (id - D_j) rho`, leaving the other blocks alone.
pub fn inclusion_exclusion_map(op: &Operator, grid: &SublatticeGrid, a: &BTreeSet<usize>) -> Result<Operator> {
    grid.check_blocks(a)?;
    let mut x = op.clone();
    for &j in a {
        let mut dj = x.clone();
        complete_depolarize_blocks(&mut dj, grid, &BTreeSet::from([j]))?;
        x = x.sub(&dj)?;
    }
    Ok(x)
}

/// `M_A(rho_A) (x) sigma_{J\A} = sum_{B ⊆ A} (-1)^{|B|} D_{B ∪ (J\A)}(rho)`,
/// evaluated in the factored form `prod_{j in A} (id - D_j) ∘ D_{J\A}`.
pub fn inclusion_exclusion_term(op: &Operator, grid: &SublatticeGrid, a: &BTreeSet<usize>) -> Result<Operator> {
    grid.check_blocks(a)?;
    let rest: BTreeSet<usize> = (0..grid.m()).filter(|b| !a.contains(b)).collect();
    let mut x = op.clone();
    complete_depolarize_blocks(&mut x, grid, &rest)?;
    inclusion_exclusion_map(&x, grid, a)
}

fn check_block_count(grid: &SublatticeGrid) -> Result<()> {
    if grid.m() > MAX_IE_BLOCKS {
        return Err(Error::GuardExceeded { what: "inclusion-exclusion subsets", needed: grid.m(), limit: MAX_IE_BLOCKS });
    }
    Ok(())
}

fn sum_terms(op: &Operator, grid: &SublatticeGrid, mut keep: impl FnMut(&BTreeSet<usize>) -> bool) -> Result<Operator> {
    check_block_count(grid)?;
    let mut total = Operator::zeros(op.qubits().to_vec());
    for mask in 0u32..1 << grid.m() {
        let a: BTreeSet<usize> = (0..grid.m()).filter(|b| mask >> b & 1 == 1).collect();
        if keep(&a) {
            total.add_scaled(1.0, &inclusion_exclusion_term(op, grid, &a)?)?;
        }
    }
    Ok(total)
}

/// `sum_{A ⊆ J} M_A(rho_A) (x) sigma_{J\A}`, which equals `rho`.
pub fn inclusion_exclusion_reconstruct(op: &Operator, grid: &SublatticeGrid) -> Result<Operator> {
    sum_terms(op, grid, |_| true)
}

/// `rho_{sparse,k}`: the terms with `|A| <= k`.
pub fn sparse_via_inclusion_exclusion(op: &Operator, grid: &SublatticeGrid, k: usize) -> Result<Operator> {
    sum_terms(op, grid, |a| a.len() <= k)
}

/// `rho_{perc,ell}`: the terms whose components all have at most `ell` blocks.
pub fn percolated_via_inclusion_exclusion(op: &Operator, grid: &SublatticeGrid, ell: usize) -> Result<Operator> {
    sum_terms(op, grid, |a| grid.largest_component(a) <= ell)
}
