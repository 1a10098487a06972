//! Block-by-block patching sampler: block `J_i` is drawn from
//! `P_{J_i | B_i = b}` with `B_i = ∂^ℓ J_i ∩ J_{<i}`, the previously sampled
//! blocks within distance `ℓ`.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::dense::{simulate_lightcone_with, state_distribution, Distribution, MIN_CONDITIONING_PROB};
use crate::error::{Error, Result};
use crate::lattice::SublatticeGrid;
use crate::Guards;

use super::bitwise::MAX_LAW_QUBITS;
use super::{rng_from_seed, Diagnostics, SampleBatch};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatchingStep {
    pub block: usize,
    /// Conditioning blocks `∂^ℓ J_i ∩ J_{<i}`.
    pub boundary: Vec<usize>,
    pub block_qubits: Vec<usize>,
    pub boundary_qubits: Vec<usize>,
}

impl PatchingStep {
    /// Ascending union of block and boundary qubits.
    pub fn region(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.block_qubits.iter().chain(&self.boundary_qubits).copied().collect();
        r.sort_unstable();
        r
    }
}

pub fn patching_plan(grid: &SublatticeGrid, ell: usize) -> Vec<PatchingStep> {
    (0..grid.m())
        .map(|i| {
            let boundary: Vec<usize> =
                grid.boundary(&BTreeSet::from([i]), ell).into_iter().filter(|&b| b < i).collect();
            PatchingStep {
                block: i,
                block_qubits: grid.block(i).to_vec(),
                boundary_qubits: grid.qubits_of(&boundary),
                boundary,
            }
        })
        .collect()
}

struct Patcher {
    n: usize,
    steps: Vec<PatchingStep>,
    joints: Vec<Distribution>,
    kernels: HashMap<(usize, usize), (Distribution, bool)>,
}

impl Patcher {
    fn new(circuit: &Circuit, grid: &SublatticeGrid, ell: usize, guards: &Guards) -> Result<Self> {
        if grid.lattice() != circuit.lattice() {
            return Err(Error::InvalidArgument("grid and circuit use different lattices".into()));
        }
        let steps = patching_plan(grid, ell);
        let joints = steps
            .iter()
            .map(|s| {
                let region: BTreeSet<usize> = s.region().into_iter().collect();
                Ok(state_distribution(&simulate_lightcone_with(circuit, &region, guards)?))
            })
            .collect::<Result<_>>()?;
        Ok(Self { n: circuit.n(), steps, joints, kernels: HashMap::new() })
    }

    /// `P_{J_i | B_i = bits}` and whether the fallback was taken.
    fn kernel(&mut self, i: usize, boundary_bits: &[u8]) -> Result<&(Distribution, bool)> {
        let key = (i, boundary_bits.iter().fold(0usize, |acc, &b| acc << 1 | b as usize));
        if !self.kernels.contains_key(&key) {
            let s = &self.steps[i];
            let joint = &self.joints[i];
            let entry = match joint.conditional(&s.block_qubits, &s.boundary_qubits, boundary_bits) {
                Ok(d) => (d, false),
                Err(Error::ZeroProbability(p)) if p <= MIN_CONDITIONING_PROB => {
                    (joint.marginal(&s.block_qubits)?, true)
                }
                Err(e) => return Err(e),
            };
            self.kernels.insert(key, entry);
        }
        Ok(&self.kernels[&key])
    }

    fn boundary_bits(&self, i: usize, x: &[u8]) -> Vec<u8> {
        self.steps[i].boundary_qubits.iter().map(|&q| x[q]).collect()
    }

    fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R, diag: &mut Diagnostics) -> Result<Vec<u8>> {
        let mut x = vec![0u8; self.n];
        for i in 0..self.steps.len() {
            let b = self.boundary_bits(i, &x);
            let (kernel, fell_back) = self.kernel(i, &b)?;
            let kernel = kernel.clone();
            if *fell_back {
                diag.fallback_events += 1;
            }
            // bit-by-bit over the block's qubits in ascending order
            let k = kernel.qubits().len();
            let probs = kernel.probs();
            let mut prefix = 0usize;
            for j in 0..k {
                let span = 1usize << (k - j - 1);
                let base = prefix << (k - j);
                let m0: f64 = probs[base..base + span].iter().sum();
                let m1: f64 = probs[base + span..base + 2 * span].iter().sum();
                let u: f64 = rng.random();
                let bit = if u * (m0 + m1) < m0 { 0 } else { 1 };
                prefix = prefix << 1 | bit;
                x[kernel.qubits()[j]] = bit as u8;
            }
        }
        Ok(x)
    }
}

pub fn sample_patching(circuit: &Circuit, grid: &SublatticeGrid, ell: usize, seed: u64, count: usize) -> Result<SampleBatch> {
    sample_patching_with(circuit, grid, ell, seed, count, &Guards::default())
}

pub fn sample_patching_with(
    circuit: &Circuit,
    grid: &SublatticeGrid,
    ell: usize,
    seed: u64,
    count: usize,
    guards: &Guards,
) -> Result<SampleBatch> {
    let mut batch = SampleBatch::new(circuit.n(), &format!("patching(l={ell})"), seed);
    let mut patcher = Patcher::new(circuit, grid, ell, guards)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..count {
        let x = patcher.sample(&mut rng, &mut batch.diagnostics)?;
        batch.bitstrings.push(x);
    }
    Ok(batch)
}

/// Enumerated law `Q(x) = prod_i P(x_{J_i} | x_{B_i})`; the diagnostics
/// count distinct fallback kernels.
pub fn patching_law(circuit: &Circuit, grid: &SublatticeGrid, ell: usize, guards: &Guards) -> Result<(Distribution, Diagnostics)> {
    let n = circuit.n();
    if n > MAX_LAW_QUBITS {
        return Err(Error::GuardExceeded { what: "law enumeration", needed: n, limit: MAX_LAW_QUBITS });
    }
    let mut patcher = Patcher::new(circuit, grid, ell, guards)?;
    let mut probs = vec![0.0; 1 << n];
    let mut x = vec![0u8; n];
    for (idx, slot) in probs.iter_mut().enumerate() {
        for (q, bit) in x.iter_mut().enumerate() {
            *bit = (idx >> (n - 1 - q) & 1) as u8;
        }
        let mut w = 1.0;
        for i in 0..patcher.steps.len() {
            let b = patcher.boundary_bits(i, &x);
            let block: Vec<u8> = patcher.steps[i].block_qubits.iter().map(|&q| x[q]).collect();
            let (kernel, _) = patcher.kernel(i, &b)?;
            w *= kernel.prob_of_bits(&block)?;
            if w == 0.0 {
                break;
            }
        }
        *slot = w;
    }
    let diag = Diagnostics { fallback_events: patcher.kernels.values().filter(|(_, f)| *f).count(), ..Default::default() };
    Ok((Distribution::new((0..n).collect(), probs)?, diag))
}
