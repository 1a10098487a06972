//! Monte-Carlo trajectories: depolarizing noise of strength `p` is unravelled
//! as `I, X, Y, Z` with probabilities `1 - 3p/4, p/4, p/4, p/4`.

use rand::Rng;

use crate::circuit::Circuit;
use crate::dense::{check_statevector_guard, Distribution, Pauli1, StateVector};
use crate::error::{Error, Result};
use crate::Guards;

use super::{rng_from_seed, SampleBatch};

/// Largest `n * d` for which the trajectory law is enumerated exactly.
pub const MAX_ENUMERATED_NOISE_SITES: usize = 10;

const PAULIS: [Pauli1; 4] = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];

fn pauli_weights(p: f64) -> [f64; 4] {
    [1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p]
}

fn draw_pauli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> Pauli1 {
    let u: f64 = rng.random();
    let w = pauli_weights(p);
    if u < w[0] {
        Pauli1::I
    } else if u < w[0] + w[1] {
        Pauli1::X
    } else if u < w[0] + w[1] + w[2] {
        Pauli1::Y
    } else {
        Pauli1::Z
    }
}

/// One noisy trajectory, ending in its final pure state.
pub(crate) fn run_trajectory<R: Rng + ?Sized>(circuit: &Circuit, rng: &mut R) -> StateVector {
    let mut psi = StateVector::zero(circuit.n());
    for layer in circuit.layers() {
        for gate in layer {
            psi.apply(gate.targets(), gate.matrix());
        }
        if circuit.p() > 0.0 {
            for q in 0..circuit.n() {
                psi.apply_pauli(q, draw_pauli(rng, circuit.p()));
            }
        }
    }
    psi
}

pub fn sample_trajectory(circuit: &Circuit, seed: u64, count: usize) -> Result<SampleBatch> {
    sample_trajectory_with(circuit, seed, count, &Guards::default())
}

pub fn sample_trajectory_with(circuit: &Circuit, seed: u64, count: usize, guards: &Guards) -> Result<SampleBatch> {
    check_statevector_guard(circuit.n(), guards)?;
    let n = circuit.n();
    let mut batch = SampleBatch::new(n, "trajectory", seed);
    let mut rng = rng_from_seed(seed);
    for _ in 0..count {
        let psi = run_trajectory(circuit, &mut rng);
        let k = psi.measure(&mut rng);
        batch.bitstrings.push((0..n).map(|q| (k >> (n - 1 - q) & 1) as u8).collect());
    }
    Ok(batch)
}

/// Exact trajectory law: average of the outcome distributions of every
/// Pauli-error pattern, weighted by its probability.
pub fn trajectory_law(circuit: &Circuit) -> Result<Distribution> {
    let sites = if circuit.p() > 0.0 { circuit.n() * circuit.depth() } else { 0 };
    if sites > MAX_ENUMERATED_NOISE_SITES {
        return Err(Error::GuardExceeded {
            what: "trajectory enumeration (noise sites)",
            needed: sites,
            limit: MAX_ENUMERATED_NOISE_SITES,
        });
    }
    let mut probs = vec![0.0; 1 << circuit.n()];
    branch(circuit, 0, 0, StateVector::zero(circuit.n()), 1.0, &mut probs, true);
    Distribution::new((0..circuit.n()).collect(), probs)
}

/// Depth-first over layers and noise sites; `gates_pending` marks that the
/// gates of `layer` still have to be applied.
fn branch(circuit: &Circuit, layer: usize, site: usize, mut psi: StateVector, w: f64, probs: &mut [f64], gates_pending: bool) {
    if layer == circuit.depth() {
        for (slot, x) in probs.iter_mut().zip(psi.probabilities()) {
            *slot += w * x;
        }
        return;
    }
    if gates_pending {
        for gate in &circuit.layers()[layer] {
            psi.apply(gate.targets(), gate.matrix());
        }
    }
    if circuit.p() == 0.0 || site == circuit.n() {
        branch(circuit, layer + 1, 0, psi, w, probs, true);
        return;
    }
    for (pauli, pw) in PAULIS.iter().zip(pauli_weights(circuit.p())) {
        let mut next = psi.clone();
        next.apply_pauli(site, *pauli);
        branch(circuit, layer, site + 1, next, w * pw, probs, false);
    }
}
