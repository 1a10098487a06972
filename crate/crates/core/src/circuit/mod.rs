//! Layered circuits of nearest-neighbor gates with uniform depolarizing noise.
//!
//! A [`Circuit`] holds `d` layers; after every layer each qubit passes through
//! a depolarizing channel of strength `p`. The input state is always
//! `|0...0>`. Construction validates arity, unitarity, disjointness of targets
//! within a layer and geometric locality, so every `Circuit` value is well formed.

mod format;
mod gate;
mod random;

pub use format::{circuit_hash, parse_circuit, serialize_circuit, CIRCUIT_FORMAT_VERSION};
pub use gate::{unitarity_deviation, Gate, GateKind, NamedGate};
pub use random::{haar_unitary, random_local_circuit, GateSet, RNG_NAME};

use crate::error::{Error, Result};
use crate::lattice::Lattice;

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    lattice: Lattice,
    layers: Vec<Vec<Gate>>,
    p: f64,
}

impl Circuit {
    pub fn new(lattice: Lattice, layers: Vec<Vec<Gate>>, p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidCircuit(format!("noise strength {p} outside [0, 1)")));
        }
        let n = lattice.n();
        for (li, layer) in layers.iter().enumerate() {
            let mut used = vec![false; n];
            for gate in layer {
                let t = gate.targets();
                if t.is_empty() || t.len() > 2 {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {gate} in layer {li} must act on one or two qubits"
                    )));
                }
                if gate.matrix().len() != 1 << (2 * t.len()) {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {gate} in layer {li} has a matrix of the wrong size"
                    )));
                }
                for &q in t {
                    lattice.check_qubit(q)?;
                    if used[q] {
                        return Err(Error::OverlappingTargets { layer: li, qubit: q });
                    }
                    used[q] = true;
                }
                if !gate.is_unitary() {
                    return Err(Error::NonUnitary { layer: li, deviation: gate.unitarity_deviation() });
                }
            }
        }
        if let Some(v) = validate_geometric_locality(&layers, &lattice).violations.first() {
            return Err(Error::NonLocalGate { layer: v.layer, a: v.targets[0], b: v.targets[1] });
        }
        Ok(Self { lattice, layers, p })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    /// Number of layers `d`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    /// Depolarizing strength applied after each layer.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Same gates with a different noise strength.
    pub fn with_noise(&self, p: f64) -> Result<Self> {
        Self::new(self.lattice.clone(), self.layers.clone(), p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalityViolation {
    pub layer: usize,
    pub gate_index: usize,
    pub targets: Vec<usize>,
}

/// Two-qubit gates whose targets are not lattice neighbors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalityReport {
    pub violations: Vec<LocalityViolation>,
}

impl LocalityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_geometric_locality(layers: &[Vec<Gate>], lattice: &Lattice) -> LocalityReport {
    let mut report = LocalityReport::default();
    for (li, layer) in layers.iter().enumerate() {
        for (gi, gate) in layer.iter().enumerate() {
            if let [a, b] = gate.targets() {
                if !lattice.adjacent(*a, *b) {
                    report.violations.push(LocalityViolation {
                        layer: li,
                        gate_index: gi,
                        targets: vec![*a, *b],
                    });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locality_report() {
        let lat = Lattice::chain(4).unwrap();
        let good = vec![vec![Gate::named(NamedGate::Cz, &[0, 1]), Gate::named(NamedGate::Cz, &[2, 3])]];
        assert!(validate_geometric_locality(&good, &lat).is_ok());
        let bad = vec![vec![Gate::named(NamedGate::Cz, &[0, 2])]];
        let r = validate_geometric_locality(&bad, &lat);
        assert_eq!(r.violations, vec![LocalityViolation { layer: 0, gate_index: 0, targets: vec![0, 2] }]);
        let single = vec![vec![Gate::named(NamedGate::H, &[0]), Gate::named(NamedGate::X, &[3])]];
        assert!(validate_geometric_locality(&single, &lat).is_ok());
        assert!(matches!(Circuit::new(lat, bad, 0.1), Err(Error::NonLocalGate { .. })));
    }

    #[test]
    fn overlapping_targets_rejected() {
        let lat = Lattice::chain(3).unwrap();
        let layers = vec![vec![Gate::named(NamedGate::Cz, &[0, 1]), Gate::named(NamedGate::H, &[1])]];
        assert!(matches!(
            Circuit::new(lat, layers, 0.0),
            Err(Error::OverlappingTargets { layer: 0, qubit: 1 })
        ));
    }

    #[test]
    fn noise_range() {
        let lat = Lattice::chain(2).unwrap();
        assert!(Circuit::new(lat.clone(), vec![], 1.0).is_err());
        assert!(Circuit::new(lat.clone(), vec![], -0.1).is_err());
        assert_eq!(Circuit::new(lat, vec![], 0.0).unwrap().depth(), 0);
    }
}
