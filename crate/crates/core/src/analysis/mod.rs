//! Numerical checks of the decay inequalities and the Markov-gap measurement.
//!
//! Every check returns a [`BoundReport`]. Reports with `asserted == false`
//! are observations: the inequality is not claimed for those parameters, so
//! a negative slack there is recorded but is not a failure.

mod bounds;
mod markov;
mod observables;
mod suite;

pub use bounds::{
    check_decay_bound, check_decay_bound_with, check_entropy_production, check_ie_norm_bound, check_pinsker,
    check_sublattice_decay, check_subset_monotonicity, ie_norm_decay_bound, percolated_threshold_constant,
    sparse_threshold_constant, truncation_error, truncation_error_on, Scheme,
};
pub use markov::{
    check_markov_chain_accumulation, conditional_gap, markov_gap, markov_gap_circuit, markov_gap_state,
};
pub use observables::{
    check_observable_decay, estimate_observable, observable_decay_sweep, observable_value, statevector_expectation,
    Estimate, EstimateMethod, Observable,
};
pub use suite::{run_suite, Family, SuiteConfig, SuiteResult};

use std::collections::BTreeMap;

use serde::Serialize;

/// Slack at or above this counts as a pass.
pub const SLACK_TOLERANCE: f64 = -1e-9;

/// Parameters a report was produced under; unset fields are omitted when
/// serialized.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<usize>>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "ell", skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
}

impl Params {
    pub(crate) fn of_circuit(circuit: &crate::circuit::Circuit) -> Self {
        Self {
            n: Some(circuit.n()),
            d: Some(circuit.depth()),
            p: Some(circuit.p()),
            dim: Some(circuit.lattice().dimension()),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    /// `bound - measured`.
    pub slack: f64,
    pub pass: bool,
    /// Whether the inequality is claimed for these parameters.
    pub asserted: bool,
    pub flags: Vec<String>,
    pub params: Params,
    pub extras: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, measured: f64, bound: f64, params: Params) -> Self {
        let slack = bound - measured;
        Self {
            name: name.into(),
            measured,
            bound,
            slack,
            pass: slack >= SLACK_TOLERANCE,
            asserted: true,
            flags: Vec::new(),
            params,
            extras: BTreeMap::new(),
        }
    }

    pub fn observation(mut self) -> Self {
        self.asserted = false;
        self
    }

    pub fn flag(mut self, flag: &str) -> Self {
        self.flags.push(flag.to_string());
        self
    }

    pub fn extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    /// An asserted inequality that does not hold.
    pub fn is_failure(&self) -> bool {
        self.asserted && !self.pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_threshold() {
        let r = BoundReport::new("x", 1.0 + 5e-10, 1.0, Params::default());
        assert!(r.pass && !r.is_failure());
        let r = BoundReport::new("x", 1.0 + 2e-9, 1.0, Params::default());
        assert!(!r.pass && r.is_failure());
        assert!(!r.observation().is_failure());
    }

    #[test]
    fn serializes_only_set_params() {
        let params = Params { n: Some(3), a: Some(vec![0]), ..Params::default() };
        let json = serde_json::to_string(&BoundReport::new("x", 0.0, 1.0, params)).unwrap();
        assert!(json.contains("\"A\":[0]") && !json.contains("\"k\""));
    }
}
