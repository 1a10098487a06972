//! Exact density-matrix backend.
//!
//! Operators are dense `2^q x 2^q` matrices on an ascending list of qubits.
//! Basis indices are big-endian in that list. Entropies are in bits and
//! trace norms are unhalved.

mod distribution;
mod entropy;
mod operator;
mod statevector;

pub use distribution::{
    bits_to_index, bits_to_string, conditional_distribution, diagonal_quasi, index_to_bits, marginal_distribution,
    state_distribution, Distribution, QuasiDistribution, MIN_CONDITIONING_PROB,
};
pub use entropy::{
    conditional_entropy, pinsker_bound, relative_entropy_to_depolarized, trace_distance, trace_norm,
    von_neumann_entropy,
};
pub use operator::{Operator, State};
pub use statevector::{simulate_pure, Pauli1, StateVector};

pub(crate) use statevector::check_statevector_guard;

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::lattice::reverse_lightcone;
use crate::Guards;

pub(crate) fn check_dense_guard(what: &'static str, n: usize, guards: &Guards) -> Result<()> {
    if n > guards.max_dense_qubits {
        return Err(Error::GuardExceeded { what, needed: n, limit: guards.max_dense_qubits });
    }
    Ok(())
}

/// Output state `Phi(|0><0|^n)` with the default guards.
pub fn simulate(circuit: &Circuit) -> Result<State> {
    simulate_with(circuit, &Guards::default())
}

pub fn simulate_with(circuit: &Circuit, guards: &Guards) -> Result<State> {
    check_dense_guard("dense simulation", circuit.n(), guards)?;
    let mut rho = Operator::zero_state((0..circuit.n()).collect());
    for layer in circuit.layers() {
        for gate in layer {
            rho.apply_unitary(gate.targets(), gate.matrix())?;
        }
        if circuit.p() > 0.0 {
            for q in 0..circuit.n() {
                rho.depolarize(q, circuit.p())?;
            }
        }
    }
    Ok(State::from_channel_output(rho))
}

/// Reduced output state on `region`, simulated on its reverse lightcone only.
pub fn simulate_lightcone(circuit: &Circuit, region: &BTreeSet<usize>) -> Result<State> {
    simulate_lightcone_with(circuit, region, &Guards::default())
}

pub fn simulate_lightcone_with(circuit: &Circuit, region: &BTreeSet<usize>, guards: &Guards) -> Result<State> {
    let trace = reverse_lightcone(circuit, region)?;
    let cone = trace.lightcone();
    check_dense_guard("lightcone simulation", cone.len(), guards)?;
    let mut rho = Operator::zero_state(cone.iter().copied().collect());
    for (i, layer) in circuit.layers().iter().enumerate() {
        let live = trace.at(i);
        for gate in layer {
            if gate.targets().iter().all(|q| live.contains(q)) {
                rho.apply_unitary(gate.targets(), gate.matrix())?;
            }
        }
        if circuit.p() > 0.0 {
            for &q in live {
                rho.depolarize(q, circuit.p())?;
            }
        }
        let next: Vec<usize> = trace.at(i + 1).iter().copied().collect();
        if next.len() < rho.n_qubits() {
            rho = rho.partial_trace(&next)?;
        }
    }
    let keep: Vec<usize> = region.iter().copied().collect();
    Ok(State::from_channel_output(rho.partial_trace(&keep)?))
}

/// Random mixed state `G G^dagger / Tr` with `G` a complex Gaussian
/// `2^q x rank` matrix.
pub fn random_state<R: Rng + ?Sized>(qubits: Vec<usize>, rank: usize, rng: &mut R) -> Result<State> {
    let dim = 1usize << qubits.len();
    let rank = rank.max(1);
    let g: Vec<Complex64> = (0..dim * rank)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut tr = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            let v: Complex64 = (0..rank).map(|k| g[r * rank + k] * g[c * rank + k].conj()).sum();
            data[r * dim + c] = v;
        }
        tr += data[r * dim + r].re;
    }
    for z in data.iter_mut() {
        *z /= tr;
    }
    Ok(State::from_channel_output(Operator::new(qubits, data)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{random_local_circuit, Gate, GateSet, NamedGate};
    use crate::lattice::Lattice;

    fn identity_layer(n: usize, p: f64) -> Circuit {
        let layer = (0..n).map(|q| Gate::named(NamedGate::Rz(0.0), &[q])).collect();
        Circuit::new(Lattice::chain(n).unwrap(), vec![layer], p).unwrap()
    }

    #[test]
    fn single_identity_layer() {
        let rho = simulate(&identity_layer(1, 0.3)).unwrap();
        let z = rho.get(0, 0).re - rho.get(1, 1).re;
        assert!((z - 0.7).abs() < 1e-15);
    }

    #[test]
    fn hadamard_noiseless() {
        let c = Circuit::new(Lattice::chain(1).unwrap(), vec![vec![Gate::named(NamedGate::H, &[0])]], 0.0).unwrap();
        let rho = simulate(&c).unwrap();
        for k in 0..4 {
            assert!((rho.data()[k].re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_zz() {
        let c = Circuit::new(
            Lattice::chain(2).unwrap(),
            vec![vec![Gate::named(NamedGate::H, &[0])], vec![Gate::named(NamedGate::Cnot, &[0, 1])]],
            0.0,
        )
        .unwrap();
        let d = simulate(&c).unwrap().diagonal();
        let zz = d[0] - d[1] - d[2] + d[3];
        assert!((zz - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lightcone_matches_full() {
        let lat = Lattice::new(&[2, 3]).unwrap();
        let c = random_local_circuit(&lat, 3, 11, GateSet::Haar, 0.15).unwrap();
        let full = simulate(&c).unwrap();
        for region in [vec![0], vec![2, 5], vec![1, 3, 4]] {
            let set: BTreeSet<usize> = region.iter().copied().collect();
            let lc = simulate_lightcone(&c, &set).unwrap();
            assert!(lc.max_abs_diff(&full.partial_trace(&region).unwrap()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn lightcone_depth_zero_and_large_chain() {
        let c = Circuit::new(Lattice::chain(5).unwrap(), vec![], 0.2).unwrap();
        let s = simulate_lightcone(&c, &BTreeSet::from([3])).unwrap();
        assert_eq!(s.qubits(), &[3]);
        assert_eq!(s.get(0, 0).re, 1.0);
        let big = random_local_circuit(&Lattice::chain(20).unwrap(), 2, 5, GateSet::Haar, 0.1).unwrap();
        assert!(simulate(&big).is_err());
        let end = simulate_lightcone(&big, &BTreeSet::from([19])).unwrap();
        assert!((end.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_matches_statevector() {
        let lat = Lattice::chain(5).unwrap();
        let c = random_local_circuit(&lat, 4, 2, GateSet::Haar, 0.0).unwrap();
        let rho = simulate(&c).unwrap();
        let psi = simulate_pure(&c, &Guards::default()).unwrap();
        let pure = State::from_pure((0..5).collect(), psi.amplitudes()).unwrap();
        assert!(rho.max_abs_diff(&pure).unwrap() < 1e-12);
    }
}
