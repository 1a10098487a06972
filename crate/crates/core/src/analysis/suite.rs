use std::collections::BTreeSet;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{circuit_hash, random_local_circuit, Circuit, GateSet};
use crate::dense::{simulate_with, state_distribution};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SublatticeGrid};
use crate::pauli::MAX_IE_BLOCKS;
use crate::Guards;

use super::bounds::{decay_report, ie_norm_report, sublattice_reports, truncation_report};
use super::markov::accumulation_report;
use super::{check_entropy_production, check_subset_monotonicity, observable_decay_sweep, BoundReport, Scheme};

/// Random circuit families the suite can draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    #[serde(rename = "1d-haar")]
    Haar1d,
    #[serde(rename = "1d-named")]
    Named1d,
    /// `r x (n/r)` grid with `r` the largest divisor of `n` not above `sqrt(n)`.
    #[serde(rename = "2d-haar")]
    Haar2d,
}

impl Family {
    pub fn lattice(&self, n: usize) -> Result<Lattice> {
        match self {
            Self::Haar1d | Self::Named1d => Lattice::chain(n),
            Self::Haar2d => {
                let r = (1..=n).take_while(|r| r * r <= n).filter(|r| n.is_multiple_of(*r)).last().unwrap_or(1);
                Lattice::new(&[r, n / r])
            }
        }
    }

    pub fn gate_set(&self) -> GateSet {
        match self {
            Self::Named1d => GateSet::Named,
            _ => GateSet::Haar,
        }
    }

    pub fn circuit(&self, n: usize, depth: usize, p: f64, seed: u64) -> Result<Circuit> {
        random_local_circuit(&self.lattice(n)?, depth, seed, self.gate_set(), p)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1d-haar" => Ok(Self::Haar1d),
            "1d-named" => Ok(Self::Named1d),
            "2d-haar" => Ok(Self::Haar2d),
            _ => Err(Error::InvalidArgument(format!("unknown circuit family `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub family: Family,
    pub n: usize,
    pub depths: Vec<usize>,
    pub ps: Vec<f64>,
    /// Circuit seeds `0..seeds`.
    pub seeds: u64,
    /// Patching ranges for the accumulation check.
    pub ells: Vec<usize>,
    /// Block width of the accumulation check.
    pub markov_width: usize,
    /// Largest block subset for the inclusion-exclusion norm check.
    pub max_ie_subset: usize,
    /// Largest observable support for the decay sweep.
    pub max_observable_weight: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            family: Family::Haar1d,
            n: 8,
            depths: vec![1, 2, 3, 4],
            ps: vec![0.1, 0.3, 0.5],
            seeds: 10,
            ells: vec![1, 2],
            markov_width: 2,
            max_ie_subset: 3,
            max_observable_weight: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    pub circuit_hash: String,
    pub reports: Vec<BoundReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub config: SuiteConfig,
    pub instances: Vec<Instance>,
}

impl SuiteResult {
    pub fn reports(&self) -> impl Iterator<Item = &BoundReport> {
        self.instances.iter().flat_map(|i| &i.reports)
    }

    pub fn failures(&self) -> usize {
        self.reports().filter(|r| r.is_failure()).count()
    }

    pub fn observations(&self) -> usize {
        self.reports().filter(|r| !r.asserted).count()
    }
}

fn block_subsets(m: usize, max: usize) -> Vec<BTreeSet<usize>> {
    (0u32..1 << m)
        .filter(|mask| mask.count_ones() as usize <= max)
        .map(|mask| (0..m).filter(|b| mask >> b & 1 == 1).collect())
        .collect()
}

/// Keep the smallest-slack report of each name, counting how many it stands for.
fn worst_of(reports: Vec<BoundReport>) -> Vec<BoundReport> {
    let mut out: Vec<(BoundReport, usize)> = Vec::new();
    for r in reports {
        match out.iter_mut().find(|(w, _)| w.name == r.name) {
            Some((w, count)) => {
                *count += 1;
                if r.slack < w.slack {
                    *w = r;
                }
            }
            None => out.push((r, 1)),
        }
    }
    out.into_iter().map(|(r, count)| r.extra("instances", count as f64)).collect()
}

fn run_instance(config: &SuiteConfig, d: usize, p: f64, seed: u64, guards: &Guards) -> Result<Instance> {
    let circuit = config.family.circuit(config.n, d, p, seed)?;
    let lattice = circuit.lattice();
    let rho = simulate_with(&circuit, guards)?;
    let mut reports = Vec::new();
    let natural = SublatticeGrid::new(lattice, (2 * d).max(1))?;

    for block in natural.blocks() {
        reports.push(check_entropy_production(&rho, block, p)?);
        reports.push(check_subset_monotonicity(&rho, &block[..1], block)?);
    }
    for q in 0..circuit.n() {
        reports.push(decay_report(&circuit, &rho, &BTreeSet::from([q]))?);
    }
    reports.extend(sublattice_reports(&circuit, &rho, &natural)?);
    if natural.m() <= MAX_IE_BLOCKS {
        for a in block_subsets(natural.m(), config.max_ie_subset) {
            reports.push(ie_norm_report(&circuit, &rho, &natural, &a)?);
        }
    }
    for x in 0..=natural.m() {
        reports.push(truncation_report(&circuit, &rho, &natural, Scheme::Sparse(x), guards)?);
        reports.push(truncation_report(&circuit, &rho, &natural, Scheme::Percolated(x), guards)?);
    }
    let markov = SublatticeGrid::new(lattice, config.markov_width)?;
    let dist = state_distribution(&rho);
    for &ell in &config.ells {
        reports.push(accumulation_report(&circuit, &dist, &markov, ell, guards)?);
    }
    reports.extend(worst_of(observable_decay_sweep(&circuit, config.max_observable_weight, guards)?));

    for r in reports.iter_mut() {
        r.params.seed = Some(seed);
    }
    Ok(Instance { d, p, seed, circuit_hash: circuit_hash(&circuit), reports })
}

/// Run every check over the configured grid of `(d, p, seed)`. Instances run
/// in parallel; the result keeps the grid order.
pub fn run_suite(config: &SuiteConfig, guards: &Guards) -> Result<SuiteResult> {
    let grid: Vec<(usize, f64, u64)> = config
        .depths
        .iter()
        .flat_map(|&d| config.ps.iter().flat_map(move |&p| (0..config.seeds).map(move |s| (d, p, s))))
        .collect();
    let instances = grid
        .par_iter()
        .map(|&(d, p, seed)| run_instance(config, d, p, seed, guards))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteResult { config: config.clone(), instances })
}
