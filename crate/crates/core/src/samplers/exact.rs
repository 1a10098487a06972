use crate::circuit::Circuit;
use crate::dense::{simulate_with, state_distribution, Distribution};
use crate::error::Result;
use crate::Guards;

use super::bitwise::{enumerate_law, sample_one, PrefixOracle};
use super::{rng_from_seed, Diagnostics, SampleBatch};

/// Exact prefix marginals of the dephased output state: the full diagonal is
/// computed once and summed into a prefix tree. The last prefix covers every
/// qubit, so this needs the dense guard.
pub struct ExactMarginals {
    n: usize,
    /// `tree[i][prefix]` for prefixes of length `i`.
    tree: Vec<Vec<f64>>,
}

impl ExactMarginals {
    pub fn new(circuit: &Circuit, guards: &Guards) -> Result<Self> {
        let n = circuit.n();
        let diag = state_distribution(&simulate_with(circuit, guards)?).probs().to_vec();
        Ok(Self { n, tree: prefix_tree(diag, n) })
    }

    pub fn mass(&self, prefix: &[u8]) -> f64 {
        let idx = prefix.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        self.tree[prefix.len()][idx]
    }
}

fn prefix_tree(diag: Vec<f64>, n: usize) -> Vec<Vec<f64>> {
    let mut levels = vec![diag];
    for _ in 0..n {
        let prev = levels.last().unwrap();
        let next: Vec<f64> = prev.chunks(2).map(|c| c[0] + c[1]).collect();
        levels.push(next);
    }
    levels.reverse();
    levels
}

impl PrefixOracle for ExactMarginals {
    fn n(&self) -> usize {
        self.n
    }

    fn prefix_mass(&mut self, prefix: &[u8]) -> Result<f64> {
        Ok(self.mass(prefix))
    }
}

/// Bit-by-bit sampling from exactly computed conditional marginals.
pub fn sample_exact(circuit: &Circuit, seed: u64, count: usize) -> Result<SampleBatch> {
    sample_exact_with(circuit, seed, count, &Guards::default())
}

pub fn sample_exact_with(circuit: &Circuit, seed: u64, count: usize, guards: &Guards) -> Result<SampleBatch> {
    let mut batch = SampleBatch::new(circuit.n(), "exact", seed);
    if count == 0 {
        return Ok(batch);
    }
    let mut oracle = ExactMarginals::new(circuit, guards)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..count {
        let bits = sample_one(&mut oracle, &mut rng, &mut batch.diagnostics)?;
        batch.bitstrings.push(bits);
    }
    Ok(batch)
}

/// Enumerated law of [`sample_exact`].
pub fn exact_law(circuit: &Circuit, guards: &Guards) -> Result<Distribution> {
    let mut oracle = ExactMarginals::new(circuit, guards)?;
    enumerate_law(&mut oracle, &mut Diagnostics::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{random_local_circuit, Gate, GateSet, NamedGate};
    use crate::dense::simulate;
    use crate::lattice::Lattice;

    #[test]
    fn zero_circuit_gives_zeros() {
        let c = Circuit::new(Lattice::chain(2).unwrap(), vec![], 0.0).unwrap();
        let b = sample_exact(&c, 3, 50).unwrap();
        assert!(b.lines().all(|l| l == "00"));
        assert!(sample_exact(&c, 3, 0).unwrap().is_empty());
    }

    #[test]
    fn bell_samples() {
        let c = Circuit::new(
            Lattice::chain(2).unwrap(),
            vec![vec![Gate::named(NamedGate::H, &[0])], vec![Gate::named(NamedGate::Cnot, &[0, 1])]],
            0.0,
        )
        .unwrap();
        let b = sample_exact(&c, 1, 4000).unwrap();
        assert!(b.lines().all(|l| l == "00" || l == "11"));
        let zeros = b.lines().filter(|l| l == "00").count() as f64 / 4000.0;
        assert!((zeros - 0.5).abs() < 5.0 * (0.25f64 / 4000.0).sqrt());
    }

    #[test]
    fn law_is_dense_diagonal() {
        let c = random_local_circuit(&Lattice::chain(5).unwrap(), 3, 4, GateSet::Haar, 0.2).unwrap();
        let law = exact_law(&c, &Guards::default()).unwrap();
        let p = state_distribution(&simulate(&c).unwrap());
        assert!(law.l1_distance(&p).unwrap() < 1e-12);
        let small = Guards { max_dense_qubits: 4, ..Guards::default() };
        assert!(exact_law(&c, &small).is_err());
    }
}
