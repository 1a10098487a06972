use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::dense::{bits_to_string, check_statevector_guard, simulate_lightcone_with, simulate_with, State, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{all_pauli_strings, pauli_expectation, restrict, PauliString};
use crate::samplers::{rng_from_seed, run_trajectory};
use crate::Guards;

use super::{BoundReport, Params};

/// An observable on lattice qubits `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observable {
    Pauli(PauliString),
    /// `|bits><bits|` on `qubits` (ascending).
    Projector { qubits: Vec<usize>, bits: Vec<u8> },
}

impl Observable {
    pub fn projector(qubits: Vec<usize>, bits: Vec<u8>) -> Result<Self> {
        if qubits.len() != bits.len() {
            return Err(Error::DimensionMismatch(qubits.len(), bits.len()));
        }
        if qubits.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("projector qubits must be strictly ascending".into()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("projector bits must be 0 or 1".into()));
        }
        Ok(Self::Projector { qubits, bits })
    }

    pub fn support(&self) -> Vec<usize> {
        match self {
            Self::Pauli(p) => p.positions(),
            Self::Projector { qubits, .. } => qubits.clone(),
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        match self {
            Self::Pauli(p) if p.n() != n => Err(Error::DimensionMismatch(p.n(), n)),
            Self::Projector { qubits, .. } => match qubits.iter().find(|&&q| q >= n) {
                Some(&qubit) => Err(Error::QubitOutOfRange { qubit, n }),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pauli(p) => write!(f, "{p}"),
            Self::Projector { qubits, bits } => write!(f, "|{}><{}| on {qubits:?}", bits_to_string(bits), bits_to_string(bits)),
        }
    }
}

/// `Tr(rho O)` for a state carrying the observable's support.
pub fn observable_value(state: &State, obs: &Observable) -> Result<f64> {
    match obs {
        Observable::Pauli(p) => {
            let support = p.positions();
            let reduced = state.partial_trace(&support)?;
            pauli_expectation(&reduced, &restrict(p, reduced.qubits())?)
        }
        Observable::Projector { qubits, bits } => {
            crate::dense::marginal_distribution(state, qubits)?.prob_of_bits(bits)
        }
    }
}

/// `<psi| O |psi>` on a full-register statevector.
pub fn statevector_expectation(psi: &StateVector, obs: &Observable) -> Result<f64> {
    let n = psi.n();
    obs.check_n(n)?;
    let amps = psi.amplitudes();
    match obs {
        Observable::Pauli(p) => {
            let x = p.x_mask() as usize;
            let total: Complex64 =
                amps.iter().enumerate().map(|(c, a)| amps[c ^ x].conj() * p.phase(c as u64) * a).sum();
            Ok(total.re)
        }
        Observable::Projector { qubits, bits } => {
            let (mask, want) = qubits.iter().zip(bits).fold((0usize, 0usize), |(m, w), (&q, &b)| {
                let bit = 1usize << (n - 1 - q);
                (m | bit, if b == 1 { w | bit } else { w })
            });
            Ok(amps.iter().enumerate().filter(|(c, _)| c & mask == want).map(|(_, a)| a.norm_sqr()).sum())
        }
    }
}

fn decay_report(circuit: &Circuit, obs: &Observable, value: f64) -> BoundReport {
    let (p, d) = (circuit.p(), circuit.depth());
    let size = obs.support().len() as i32;
    let literal = (1.0 - p).powi(size);
    let params = Params { a: Some(obs.support()), observable: Some(obs.to_string()), ..Params::of_circuit(circuit) };
    let report = match obs {
        Observable::Pauli(_) => BoundReport::new("observable_decay_pauli", value.abs(), literal, params),
        // a final depolarizing layer maps |b><b| to operator norm (1 - p/2) per qubit
        Observable::Projector { .. } => {
            let corrected = (1.0 - 0.5 * p).powi(size);
            BoundReport::new("observable_decay_projector", value.abs(), corrected, params)
                .flag("projector-bound-corrected")
                .extra("literal_bound", literal)
                .extra("literal_slack", literal - value.abs())
        }
    };
    // without a final noise layer nothing is claimed
    if d == 0 {
        report.observation()
    } else {
        report
    }
}

/// `|Tr(rho O)| <= (1-p)^{|A|}` for a Pauli string on `A`. Bitstring
/// projectors are checked against `(1-p/2)^{|A|}`; the `(1-p)^{|A|}` form is
/// kept in the extras as `literal_bound`.
pub fn check_observable_decay(circuit: &Circuit, obs: &Observable, guards: &Guards) -> Result<BoundReport> {
    obs.check_n(circuit.n())?;
    let support: BTreeSet<usize> = obs.support().into_iter().collect();
    let value = if support.is_empty() {
        1.0
    } else {
        observable_value(&simulate_lightcone_with(circuit, &support, guards)?, obs)?
    };
    Ok(decay_report(circuit, obs, value))
}

/// All Pauli strings of weight `<= max_weight` and all bitstring projectors
/// on `<= max_weight` qubits, evaluated on the dense output state.
pub fn observable_decay_sweep(circuit: &Circuit, max_weight: usize, guards: &Guards) -> Result<Vec<BoundReport>> {
    let n = circuit.n();
    let rho = simulate_with(circuit, guards)?;
    let mut out = Vec::new();
    for support in subsets_up_to(n, max_weight) {
        let reduced = rho.partial_trace(&support)?;
        let k = support.len();
        for local in all_pauli_strings(k).into_iter().filter(|p| p.weight() == k) {
            let mut p = PauliString::identity(n);
            for (j, &q) in support.iter().enumerate() {
                p.set(q, local.letter(j))?;
            }
            let value = pauli_expectation(&reduced, &local)?;
            out.push(decay_report(circuit, &Observable::Pauli(p), value));
        }
        let diag = reduced.diagonal();
        for (idx, &value) in diag.iter().enumerate() {
            let bits = (0..k).map(|j| (idx >> (k - 1 - j) & 1) as u8).collect();
            let obs = Observable::Projector { qubits: support.clone(), bits };
            out.push(decay_report(circuit, &obs, value));
        }
    }
    Ok(out)
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k.min(n) {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for q in start..n {
                let mut t = s.clone();
                t.push(q);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    /// Exact: dense simulation of the observable's reverse lightcone.
    Lightcone,
    /// Average of `<psi|O|psi>` over `shots` noise trajectories.
    Trajectory { shots: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

pub fn estimate_observable(circuit: &Circuit, obs: &Observable, method: EstimateMethod, guards: &Guards) -> Result<Estimate> {
    obs.check_n(circuit.n())?;
    match method {
        EstimateMethod::Lightcone => {
            let support: BTreeSet<usize> = obs.support().into_iter().collect();
            let mean = if support.is_empty() {
                1.0
            } else {
                observable_value(&simulate_lightcone_with(circuit, &support, guards)?, obs)?
            };
            Ok(Estimate { mean, stderr: 0.0, samples: 0 })
        }
        EstimateMethod::Trajectory { shots, seed } => {
            check_statevector_guard(circuit.n(), guards)?;
            if shots == 0 {
                return Err(Error::InvalidArgument("trajectory estimate needs at least one shot".into()));
            }
            let mut rng = rng_from_seed(seed);
            let values = (0..shots)
                .map(|_| statevector_expectation(&run_trajectory(circuit, &mut rng), obs))
                .collect::<Result<Vec<f64>>>()?;
            let mean = values.iter().sum::<f64>() / shots as f64;
            let stderr = if shots > 1 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (shots - 1) as f64;
                (var / shots as f64).sqrt()
            } else {
                0.0
            };
            Ok(Estimate { mean, stderr, samples: shots })
        }
    }
}
