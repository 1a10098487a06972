//! `nlc`: generate or load circuits, simulate, sample, run the bound checks
//! and write line-delimited JSON records.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use noisy_local::analysis::{markov_gap_state, run_suite, Family, SuiteConfig};
use noisy_local::circuit::{circuit_hash, parse_circuit, Circuit};
use noisy_local::dense::{bits_to_string, index_to_bits, simulate_with, state_distribution, von_neumann_entropy};
use noisy_local::lattice::{critical_depth, decay_factor, SublatticeGrid};
use noisy_local::pauli::{pauli_decompose_with, support_statistics};
use noisy_local::samplers::{
    sample_exact_with, sample_patching_with, sample_sparse_with, sample_trajectory_with, sample_uniform, SampleBatch,
};
use noisy_local::Guards;

use output::Sink;

#[derive(Parser)]
#[command(name = "nlc", version, about = "Noisy geometrically local circuits: simulation, sampling and bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (records or bitstrings); stdout when absent. A
    /// `<out>.meta.json` sidecar with run metadata is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, env = "NLC_MAX_DENSE_QUBITS")]
    max_dense_qubits: Option<usize>,

    #[arg(long, global = true, env = "NLC_MAX_STATEVECTOR_QUBITS")]
    max_statevector_qubits: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dense output-state summary.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Number of most likely bitstrings to report.
        #[arg(long, default_value_t = 8)]
        top: usize,
    },
    /// Draw bitstrings, one per line.
    Sample {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Block width for the sparse and patching samplers.
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
    },
    /// Run every bound check over a seeded circuit family.
    Verify {
        #[arg(long, default_value = "1d-haar")]
        family: Family,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "1..4")]
        depths: String,
        #[arg(long, default_value = "0.1,0.3,0.5")]
        ps: String,
        /// Circuit seeds `0..seeds`.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Patching ranges for the accumulation check.
        #[arg(long, default_value = "1,2")]
        ells: String,
        #[arg(long, default_value_t = 2)]
        markov_width: usize,
        #[arg(long, default_value_t = 3)]
        max_ie_subset: usize,
        #[arg(long, default_value_t = 2)]
        max_observable_weight: usize,
    },
    /// Pauli coefficient mass by block-support size and largest component.
    Decompose {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 2)]
        width: usize,
    },
    /// Markov gap of every block for a sweep of boundary ranges.
    MarkovGap {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 2)]
        width: usize,
        /// Ranges to sweep; defaults to `0..m`.
        #[arg(long)]
        ells: Option<String>,
    },
    /// Smallest d with `(1-p)^d (4d)^D < 1/c`.
    CriticalDepth {
        /// One value or a comma list.
        #[arg(long)]
        p: String,
        #[arg(long = "D", default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value = "1")]
        c: String,
    },
}

/// Either `--circuit FILE` or a random circuit described by `--n` and
/// friends.
#[derive(Args)]
struct Source {
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, default_value = "1d-haar")]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    circuit_seed: u64,
}

impl Source {
    fn load(&self) -> Result<Circuit> {
        match (&self.circuit, self.n) {
            (Some(path), None) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(parse_circuit(&text).with_context(|| format!("parsing {}", path.display()))?)
            }
            (None, Some(n)) => Ok(self.family.circuit(n, self.depth, self.p, self.circuit_seed)?),
            _ => bail!("give exactly one circuit source: --circuit FILE or --n N"),
        }
    }

    fn describe(&self) -> serde_json::Value {
        match &self.circuit {
            Some(path) => json!({ "circuit": path }),
            None => json!({
                "family": self.family,
                "n": self.n,
                "depth": self.depth,
                "p": self.p,
                "circuit_seed": self.circuit_seed,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Uniform,
    Exact,
    Trajectory,
    Sparse,
    Patching,
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| anyhow::anyhow!("bad list entry `{x}`: {e}")))
        .collect()
}

/// `a..b` (inclusive) or `a,b,c`.
fn parse_range(s: &str) -> Result<Vec<usize>> {
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty range `{s}`");
            }
            Ok((a..=b).collect())
        }
        None => parse_list(s),
    }
}

fn guards(cli: &Cli) -> Guards {
    let d = Guards::default();
    Guards {
        max_dense_qubits: cli.max_dense_qubits.unwrap_or(d.max_dense_qubits),
        max_statevector_qubits: cli.max_statevector_qubits.unwrap_or(d.max_statevector_qubits),
    }
}

#[derive(Serialize)]
struct Outcome {
    bits: String,
    prob: f64,
}

fn simulate(cli: &Cli, source: &Source, top: usize) -> Result<bool> {
    let g = guards(cli);
    let circuit = source.load()?;
    let hash = circuit_hash(&circuit);
    let rho = simulate_with(&circuit, &g)?;
    let dist = state_distribution(&rho);
    let n = circuit.n();
    let mut order: Vec<usize> = (0..dist.probs().len()).collect();
    order.sort_by(|&a, &b| dist.prob(b).total_cmp(&dist.prob(a)).then(a.cmp(&b)));
    let top: Vec<Outcome> = order
        .iter()
        .take(top)
        .map(|&i| Outcome { bits: bits_to_string(&index_to_bits(i, n)), prob: dist.prob(i) })
        .collect();
    let z: Vec<f64> = (0..n)
        .map(|q| dist.marginal(&[q]).map(|m| m.prob(0) - m.prob(1)))
        .collect::<noisy_local::Result<_>>()?;
    let body = json!({
        "n": n,
        "d": circuit.depth(),
        "p": circuit.p(),
        "entropy_bits": von_neumann_entropy(&rho)?,
        "purity": rho.data().iter().map(|z| z.norm_sqr()).sum::<f64>(),
        "z_expectations": z,
        "output_entropy_bits": dist.entropy(),
        "top": top,
    });
    let mut sink = Sink::open(cli.out.as_deref())?;
    sink.record("simulate", source.circuit_seed, Some(&hash), body)?;
    sink.finish(json!({ "command": "simulate", "source": source.describe(), "circuit_hash": hash }))?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn sample(
    cli: &Cli,
    source: &Source,
    method: Method,
    count: usize,
    seed: u64,
    width: usize,
    k: usize,
    ell: usize,
) -> Result<bool> {
    let g = guards(cli);
    let circuit = source.load()?;
    let hash = circuit_hash(&circuit);
    let grid = || SublatticeGrid::new(circuit.lattice(), width);
    let batch: SampleBatch = match method {
        Method::Uniform => sample_uniform(circuit.n(), seed, count),
        Method::Exact => sample_exact_with(&circuit, seed, count, &g)?,
        Method::Trajectory => sample_trajectory_with(&circuit, seed, count, &g)?,
        Method::Sparse => sample_sparse_with(&circuit, &grid()?, k, seed, count, &g)?,
        Method::Patching => sample_patching_with(&circuit, &grid()?, ell, seed, count, &g)?,
    };
    let mut sink = Sink::open(cli.out.as_deref())?;
    for line in batch.lines() {
        sink.line(&line)?;
    }
    sink.finish(json!({
        "command": "sample",
        "source": source.describe(),
        "circuit_hash": hash,
        "method": batch.method,
        "seed": batch.seed,
        "count": batch.len(),
        "n": batch.n,
        "diagnostics": batch.diagnostics,
    }))?;
    Ok(true)
}

#[derive(Serialize)]
struct Summary {
    instances: usize,
    reports: usize,
    failures: usize,
    observations: usize,
}

fn verify(cli: &Cli, config: SuiteConfig) -> Result<bool> {
    let result = run_suite(&config, &guards(cli))?;
    let mut sink = Sink::open(cli.out.as_deref())?;
    for inst in &result.instances {
        for r in &inst.reports {
            sink.record("check", inst.seed, Some(&inst.circuit_hash), r)?;
        }
    }
    let summary = Summary {
        instances: result.instances.len(),
        reports: result.reports().count(),
        failures: result.failures(),
        observations: result.observations(),
    };
    eprintln!(
        "verify: {} instances, {} reports, {} failures, {} observations",
        summary.instances, summary.reports, summary.failures, summary.observations
    );
    let ok = summary.failures == 0;
    sink.record("summary", 0, None, &summary)?;
    sink.finish(json!({ "command": "verify", "config": config, "summary": summary }))?;
    Ok(ok)
}

fn decompose(cli: &Cli, source: &Source, width: usize) -> Result<bool> {
    let g = guards(cli);
    let circuit = source.load()?;
    let hash = circuit_hash(&circuit);
    let grid = SublatticeGrid::new(circuit.lattice(), width)?;
    let rho = simulate_with(&circuit, &g)?;
    let dec = pauli_decompose_with(&rho, &g)?;
    let stats = support_statistics(&dec, &grid);
    let mut sink = Sink::open(cli.out.as_deref())?;
    let seed = source.circuit_seed;
    for (kind, rows) in [("mass_by_support_size", &stats.by_support_size), ("mass_by_largest_component", &stats.by_largest_component)] {
        for row in rows {
            let body = json!({ "width": width, "m": grid.m(), "size": row.size, "count": row.count, "l1": row.l1, "hs": row.hs });
            sink.record(kind, seed, Some(&hash), body)?;
        }
    }
    sink.finish(json!({ "command": "decompose", "source": source.describe(), "circuit_hash": hash, "terms": dec.len() }))?;
    Ok(true)
}

fn markov_gap(cli: &Cli, source: &Source, width: usize, ells: Option<&str>) -> Result<bool> {
    let g = guards(cli);
    let circuit = source.load()?;
    let hash = circuit_hash(&circuit);
    let grid = SublatticeGrid::new(circuit.lattice(), width)?;
    let ells = match ells {
        Some(s) => parse_range(s)?,
        None => (0..grid.m()).collect(),
    };
    let rho = simulate_with(&circuit, &g)?;
    let mut sink = Sink::open(cli.out.as_deref())?;
    for &ell in &ells {
        for a in 0..grid.m() {
            let gap = markov_gap_state(&rho, &grid, a, ell)?;
            let body = json!({ "width": width, "m": grid.m(), "block": a, "ell": ell, "gap": gap });
            sink.record("markov_gap", source.circuit_seed, Some(&hash), body)?;
        }
    }
    sink.finish(json!({ "command": "markov-gap", "source": source.describe(), "circuit_hash": hash }))?;
    Ok(true)
}

fn critical(cli: &Cli, ps: &str, dim: usize, cs: &str) -> Result<bool> {
    let ps: Vec<f64> = parse_list(ps)?;
    let cs: Vec<f64> = parse_list(cs)?;
    let mut sink = Sink::open(cli.out.as_deref())?;
    for &p in &ps {
        for &c in &cs {
            let d = critical_depth(p, dim, c)?;
            let body = json!({ "p": p, "D": dim, "c": c, "d_star": d, "decay_at_d_star": decay_factor(p, d, dim) });
            sink.record("critical_depth", 0, None, body)?;
        }
    }
    sink.finish(json!({ "command": "critical-depth" }))?;
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Simulate { source, top } => simulate(cli, source, *top),
        Command::Sample { source, method, count, seed, width, k, ell } => {
            sample(cli, source, *method, *count, *seed, *width, *k, *ell)
        }
        Command::Verify { family, n, depths, ps, seeds, ells, markov_width, max_ie_subset, max_observable_weight } => {
            let config = SuiteConfig {
                family: *family,
                n: *n,
                depths: parse_range(depths)?,
                ps: parse_list(ps)?,
                seeds: *seeds,
                ells: parse_range(ells)?,
                markov_width: *markov_width,
                max_ie_subset: *max_ie_subset,
                max_observable_weight: *max_observable_weight,
            };
            verify(cli, config)
        }
        Command::Decompose { source, width } => decompose(cli, source, *width),
        Command::MarkovGap { source, width, ells } => markov_gap(cli, source, *width, ells.as_deref()),
        Command::CriticalDepth { p, dim, c } => critical(cli, p, *dim, c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
