use num_complex::Complex64;
use rand::Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::Guards;

use super::operator::local_offsets;

/// Pure state on qubits `0..n`; qubit 0 is the most significant index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

/// Single-qubit Pauli letters used for error insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn shift(&self, q: usize) -> usize {
        self.n - 1 - q
    }

    pub fn apply(&mut self, targets: &[usize], u: &[Complex64]) {
        let shifts: Vec<usize> = targets.iter().map(|&q| self.shift(q)).collect();
        let (offsets, bases) = local_offsets(self.amps.len(), &shifts);
        let g = offsets.len();
        let mut v = [Complex64::new(0.0, 0.0); 4];
        for base in bases {
            for a in 0..g {
                v[a] = self.amps[base + offsets[a]];
            }
            for b in 0..g {
                self.amps[base + offsets[b]] = (0..g).map(|a| u[b * g + a] * v[a]).sum();
            }
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli1) {
        let mask = 1usize << self.shift(q);
        let i = Complex64::new(0.0, 1.0);
        match p {
            Pauli1::I => {}
            Pauli1::X => {
                for k in (0..self.amps.len()).filter(|k| k & mask == 0) {
                    self.amps.swap(k, k | mask);
                }
            }
            Pauli1::Z => {
                for (k, a) in self.amps.iter_mut().enumerate() {
                    if k & mask != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli1::Y => {
                // Y|0> = i|1>, Y|1> = -i|0>
                for k in (0..self.amps.len()).filter(|k| k & mask == 0) {
                    let (a0, a1) = (self.amps[k], self.amps[k | mask]);
                    self.amps[k] = -i * a1;
                    self.amps[k | mask] = i * a0;
                }
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<psi| Z_q |psi>`.
    pub fn z_expectation(&self, q: usize) -> f64 {
        let mask = 1usize << self.shift(q);
        self.amps
            .iter()
            .enumerate()
            .map(|(k, a)| if k & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }

    /// Draw one computational-basis outcome (index).
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                return k;
            }
        }
        // rounding: fall back to the last outcome with nonzero weight
        self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
    }
}

pub(crate) fn check_statevector_guard(n: usize, guards: &Guards) -> Result<()> {
    if n > guards.max_statevector_qubits {
        return Err(Error::GuardExceeded { what: "statevector", needed: n, limit: guards.max_statevector_qubits });
    }
    Ok(())
}

/// Noiseless evolution of `|0...0>` through the circuit's gates.
pub fn simulate_pure(circuit: &Circuit, guards: &Guards) -> Result<StateVector> {
    check_statevector_guard(circuit.n(), guards)?;
    let mut psi = StateVector::zero(circuit.n());
    for layer in circuit.layers() {
        for gate in layer {
            psi.apply(gate.targets(), gate.matrix());
        }
    }
    Ok(psi)
}
