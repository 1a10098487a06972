//! Marginals of the sparse truncation `rho_{sparse,k}`.
//!
//! `rho_{sparse,k} = sum_{|A| <= k} sum_{B ⊆ A} (-1)^{|B|} sigma_{B ∪ (J\A)} (x) rho_{A\B}`.
//! Writing `C = A \ B` and collecting terms, the block set `C` carries weight
//! `w(|C|) = sum_{j=0}^{k-|C|} (-1)^j binom(m-|C|, j)`, and the marginal of
//! `sigma (x) rho_C` on a qubit set `S` at `x` is
//! `2^{-|S \ C|} P_{S ∩ C}(x|_{S ∩ C})`, where `P_{S ∩ C}` comes from a
//! lightcone simulation of the (usually small) region `S ∩ C`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::circuit::Circuit;
use crate::dense::{simulate_lightcone_with, state_distribution, Distribution};
use crate::error::{Error, Result};
use crate::lattice::SublatticeGrid;
use crate::Guards;

use super::bitwise::{enumerate_law, sample_one, PrefixOracle};
use super::{rng_from_seed, Diagnostics, SampleBatch};

const MAX_TERMS: usize = 1 << 20;

/// Quasi-marginal oracle for `rho_{sparse,k}` with cached regional marginals.
pub struct SparseMarginals<'a> {
    circuit: &'a Circuit,
    guards: Guards,
    /// Qubits of each retained block set `C` with its weight.
    terms: Vec<(Vec<usize>, f64)>,
    regions: HashMap<Vec<usize>, Distribution>,
    /// Per subset `S`: `region -> accumulated weight`.
    plans: HashMap<Vec<usize>, BTreeMap<Vec<usize>, f64>>,
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn subsets_up_to(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(cur.clone());
    if cur.len() == k {
        return;
    }
    for b in start..m {
        cur.push(b);
        subsets_up_to(m, k, b + 1, cur, out);
        cur.pop();
    }
}

impl<'a> SparseMarginals<'a> {
    pub fn new(circuit: &'a Circuit, grid: &SublatticeGrid, k: usize, guards: &Guards) -> Result<Self> {
        if grid.lattice() != circuit.lattice() {
            return Err(Error::InvalidArgument("grid and circuit use different lattices".into()));
        }
        let m = grid.m();
        let k = k.min(m);
        let count: f64 = (0..=k).map(|c| binomial(m, c)).sum();
        if count > MAX_TERMS as f64 {
            return Err(Error::GuardExceeded { what: "sparse term count", needed: count as usize, limit: MAX_TERMS });
        }
        let weights: Vec<f64> =
            (0..=k).map(|c| (0..=k - c).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * binomial(m - c, j)).sum()).collect();
        let mut sets = Vec::new();
        subsets_up_to(m, k, 0, &mut Vec::new(), &mut sets);
        let terms = sets
            .into_iter()
            .filter(|c| weights[c.len()] != 0.0)
            .map(|c| (grid.qubits_of(&c), weights[c.len()]))
            .collect();
        Ok(Self { circuit, guards: *guards, terms, regions: HashMap::new(), plans: HashMap::new() })
    }

    fn region_distribution(&mut self, region: &[usize]) -> Result<&Distribution> {
        if !self.regions.contains_key(region) {
            let set: BTreeSet<usize> = region.iter().copied().collect();
            let state = simulate_lightcone_with(self.circuit, &set, &self.guards)?;
            self.regions.insert(region.to_vec(), state_distribution(&state));
        }
        Ok(&self.regions[region])
    }

    /// Quasi-probability that the ascending qubit list `subset` reads `bits`.
    pub fn marginal(&mut self, subset: &[usize], bits: &[u8]) -> Result<f64> {
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("subset must be strictly ascending".into()));
        }
        if bits.len() != subset.len() {
            return Err(Error::DimensionMismatch(bits.len(), subset.len()));
        }
        for &q in subset {
            self.circuit.lattice().check_qubit(q)?;
        }
        if !self.plans.contains_key(subset) {
            let mut plan: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (qubits, w) in &self.terms {
                let region: Vec<usize> = subset.iter().copied().filter(|q| qubits.binary_search(q).is_ok()).collect();
                *plan.entry(region).or_insert(0.0) += w;
            }
            self.plans.insert(subset.to_vec(), plan);
        }
        let plan: Vec<(Vec<usize>, f64)> =
            self.plans[subset].iter().filter(|(_, &w)| w != 0.0).map(|(r, &w)| (r.clone(), w)).collect();
        let mut total = 0.0;
        for (region, w) in plan {
            let idx = region.iter().fold(0usize, |acc, q| {
                let pos = subset.binary_search(q).unwrap();
                acc << 1 | bits[pos] as usize
            });
            let uniform = 0.5f64.powi((subset.len() - region.len()) as i32);
            let p = if region.is_empty() { 1.0 } else { self.region_distribution(&region)?.prob(idx) };
            total += w * uniform * p;
        }
        Ok(total)
    }
}

impl PrefixOracle for SparseMarginals<'_> {
    fn n(&self) -> usize {
        self.circuit.n()
    }

    fn prefix_mass(&mut self, prefix: &[u8]) -> Result<f64> {
        let subset: Vec<usize> = (0..prefix.len()).collect();
        self.marginal(&subset, prefix)
    }
}

/// Marginal of `rho_{sparse,k}` on `subset` at `bits`; may be negative.
pub fn sparse_marginal(circuit: &Circuit, grid: &SublatticeGrid, k: usize, subset: &[usize], bits: &[u8]) -> Result<f64> {
    sparse_marginal_with(circuit, grid, k, subset, bits, &Guards::default())
}

pub fn sparse_marginal_with(
    circuit: &Circuit,
    grid: &SublatticeGrid,
    k: usize,
    subset: &[usize],
    bits: &[u8],
    guards: &Guards,
) -> Result<f64> {
    SparseMarginals::new(circuit, grid, k, guards)?.marginal(subset, bits)
}

/// Bit-by-bit sampling from sanitized `rho_{sparse,k}` conditionals.
pub fn sample_sparse(circuit: &Circuit, grid: &SublatticeGrid, k: usize, seed: u64, count: usize) -> Result<SampleBatch> {
    sample_sparse_with(circuit, grid, k, seed, count, &Guards::default())
}

pub fn sample_sparse_with(
    circuit: &Circuit,
    grid: &SublatticeGrid,
    k: usize,
    seed: u64,
    count: usize,
    guards: &Guards,
) -> Result<SampleBatch> {
    let mut batch = SampleBatch::new(circuit.n(), &format!("sparse(k={k})"), seed);
    let mut oracle = SparseMarginals::new(circuit, grid, k, guards)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..count {
        let bits = sample_one(&mut oracle, &mut rng, &mut batch.diagnostics)?;
        batch.bitstrings.push(bits);
    }
    Ok(batch)
}

/// Enumerated law of [`sample_sparse`] and the clamping accumulated over all
/// reachable prefixes.
pub fn sparse_law(circuit: &Circuit, grid: &SublatticeGrid, k: usize, guards: &Guards) -> Result<(Distribution, Diagnostics)> {
    let mut oracle = SparseMarginals::new(circuit, grid, k, guards)?;
    let mut diag = Diagnostics::default();
    let law = enumerate_law(&mut oracle, &mut diag)?;
    Ok((law, diag))
}
