//! Acceptance criteria AC1-AC12, one PASS/FAIL line each. Runs without the
//! test harness so the lines are never captured.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use noisy_local::analysis::{
    check_entropy_production, observable_decay_sweep, percolated_threshold_constant, run_suite,
    sparse_threshold_constant, truncation_error, Scheme, SuiteConfig,
};
use noisy_local::circuit::{random_local_circuit, Circuit, Gate, GateSet, NamedGate};
use noisy_local::dense::{random_state, simulate, state_distribution, Operator};
use noisy_local::lattice::{critical_depth, Lattice, SublatticeGrid};
use noisy_local::pauli::{
    all_pauli_strings, apply_inclusion_exclusion, inclusion_exclusion_reconstruct, inclusion_exclusion_term,
    pauli_decompose, pauli_reconstruct, percolated_via_inclusion_exclusion, sparse_via_inclusion_exclusion,
    truncate_percolated, truncate_sparse, PauliString,
};
use noisy_local::samplers::{exact_law, patching_law, sample_trajectory, sparse_law};
use noisy_local::Guards;

/// Criteria that cannot hold as literally stated; they still print FAIL.
const KNOWN_UNATTAINABLE: &[&str] = &["AC8"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn report(out: &mut Vec<Outcome>, id: &'static str, title: &str, pass: bool, detail: String) {
    out.push(Outcome { id, pass, detail: format!("{title}: {detail}") });
}

fn chain_circuit(n: usize, d: usize, p: f64, seed: u64) -> Circuit {
    random_local_circuit(&Lattice::chain(n).unwrap(), d, seed, GateSet::Haar, p).unwrap()
}

/// The n = 6 suite: 1D Haar brickwork, width 2, d = 3, p = 0.3, 10 seeds.
fn n6_suite() -> Vec<Circuit> {
    (0..10).map(|s| chain_circuit(6, 3, 0.3, s)).collect()
}

fn ac1(out: &mut Vec<Outcome>) {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for c in n6_suite() {
        let grid = SublatticeGrid::new(c.lattice(), 2).unwrap();
        let rho = simulate(&c).unwrap();
        let rebuilt = inclusion_exclusion_reconstruct(&rho, &grid).unwrap();
        worst = worst.max(rebuilt.max_abs_diff(&rho).unwrap());
    }
    let secs = t.elapsed().as_secs_f64();
    let detail = format!("max |dev| = {worst:.2e} (tol 1e-9), {secs:.2} s (limit 30 s)");
    report(out, "AC1", "inclusion-exclusion completeness", worst <= 1e-9 && secs < 30.0, detail);
}

/// Blocks on which `p` has a non-identity letter, read off the letters.
fn letter_support(p: &PauliString, grid: &SublatticeGrid) -> BTreeSet<usize> {
    (0..p.n()).filter(|&j| p.letter(j) != 'I').map(|j| grid.block_of(j)).collect()
}

fn ac2(out: &mut Vec<Outcome>) {
    let n = 4;
    let grid = SublatticeGrid::new(&Lattice::chain(n).unwrap(), 1).unwrap();
    let qubits: Vec<usize> = (0..n).collect();
    let (mut mismatches, mut worst, mut cases) = (0usize, 0f64, 0usize);
    for p in all_pauli_strings(n) {
        let op = p.to_operator(qubits.clone()).unwrap();
        let supp = letter_support(&p, &grid);
        for mask in 0u32..1 << grid.m() {
            let a: BTreeSet<usize> = (0..grid.m()).filter(|b| mask >> b & 1 == 1).collect();
            cases += 1;
            let expected = (supp == a).then_some(p);
            if apply_inclusion_exclusion(&p, &a, &grid) != expected {
                mismatches += 1;
            }
            let term = inclusion_exclusion_term(&op, &grid, &a).unwrap();
            let target = if supp == a { op.clone() } else { Operator::zeros(qubits.clone()) };
            worst = worst.max(term.max_abs_diff(&target).unwrap());
        }
    }
    let detail = format!("{cases} cases, {mismatches} symbolic mismatches, max |dense dev| = {worst:.2e} (tol 1e-10)");
    report(out, "AC2", "Pauli projection", mismatches == 0 && worst <= 1e-10, detail);
}

fn ac3(out: &mut Vec<Outcome>) {
    let (mut checks, mut violations, mut min_slack) = (0usize, 0usize, f64::INFINITY);
    for seed in 0..100u64 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = 1 + (seed as usize % 5);
        let rank = rng.random_range(1..=1usize << n);
        let state = random_state((0..n).collect(), rank, &mut rng).unwrap();
        for mask in 1u32..1 << n {
            let a: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
            for p in [0.1, 0.5, 0.9] {
                let r = check_entropy_production(&state, &a, p).unwrap();
                checks += 1;
                min_slack = min_slack.min(r.slack);
                if !r.pass {
                    violations += 1;
                }
            }
        }
    }
    let detail = format!("{checks} checks, {violations} violations, min slack {min_slack:.3e}");
    report(out, "AC3", "entropy production", violations == 0, detail);
}

fn suite_counts(result: &noisy_local::analysis::SuiteResult, names: &[&str]) -> (usize, usize, usize) {
    let selected: Vec<_> = result.reports().filter(|r| names.contains(&r.name.as_str())).collect();
    let asserted = selected.iter().filter(|r| r.asserted).count();
    let failures = selected.iter().filter(|r| r.is_failure()).count();
    (selected.len(), asserted, failures)
}

fn ac4_5_10_11_12(out: &mut Vec<Outcome>) {
    let config = SuiteConfig::default();
    let t = Instant::now();
    let result = run_suite(&config, &Guards::default()).unwrap();
    let secs = t.elapsed().as_secs_f64();

    let (total, asserted, failures) = suite_counts(&result, &["decay_bound", "sublattice_decay"]);
    let ok = failures == 0 && asserted == total && total > 0;
    let detail = format!("{total} reports over {} circuits, {failures} violations", result.instances.len());
    report(out, "AC4", "circuit and sublattice decay", ok, detail);

    let (total, asserted, failures) = suite_counts(&result, &["ie_norm_bound"]);
    let ok = failures == 0 && asserted == total && total > 0;
    report(out, "AC5", "inclusion-exclusion norm bound", ok, format!("{total} reports, {failures} violations"));

    let (total, asserted, failures) = suite_counts(&result, &["markov_chain_accumulation"]);
    let ok = failures == 0 && asserted == total && total > 0;
    report(out, "AC10", "Markov-chain accumulation", ok, format!("{total} reports, {failures} violations"));

    // suite part of AC11: nothing in the desk-scale grid is in the applicable regime
    let names = ["truncation_sparse", "truncation_percolated"];
    let (total, asserted, failures) = suite_counts(&result, &names);
    let below: usize = result
        .reports()
        .filter(|r| names.contains(&r.name.as_str()) && !r.asserted && r.slack < 0.0)
        .count();
    let (ok_applicable, detail_applicable) = ac11_applicable();
    let ok = failures == 0 && ok_applicable;
    let detail = format!(
        "suite: {total} reports, {asserted} asserted, {} observations ({below} with measured > bound); {detail_applicable}",
        total - asserted
    );
    report(out, "AC11", "truncation error bounds", ok, detail);

    let all_failures = result.failures();
    let detail = format!("{secs:.1} s for {} reports, {all_failures} failures (limit 600 s)", result.reports().count());
    report(out, "AC12", "full verify suite", secs < 600.0 && all_failures == 0, detail);
}

/// Instances at or above the critical depth with width-2d blocks, where the
/// truncation bounds are asserted.
fn ac11_applicable() -> (bool, String) {
    let lat = Lattice::chain(8).unwrap();
    let p = 0.5;
    let mut parts = Vec::new();
    let mut ok = true;
    let d_perc = critical_depth(p, 1, percolated_threshold_constant(1)).unwrap();
    // a single block of width 2d covers the chain, so m = 1
    let d_sparse = critical_depth(p, 1, sparse_threshold_constant(1, 8, 1)).unwrap();
    for (label, d, scheme) in [("perc l=1", d_perc, Scheme::Percolated(1)), ("sparse k=1", d_sparse, Scheme::Sparse(1))] {
        let c = chain_circuit(8, d, p, 0);
        let grid = SublatticeGrid::new(&lat, 2 * d).unwrap();
        let r = truncation_error(&c, &grid, scheme, &Guards::default()).unwrap();
        ok &= r.asserted && r.pass;
        parts.push(format!("{label} at d*={d}: measured {:.2e} <= bound {:.2e} asserted={}", r.measured, r.bound, r.asserted));
    }
    (ok, parts.join("; "))
}

fn ac6(out: &mut Vec<Outcome>) {
    let mut worst: f64 = 0.0;
    for c in n6_suite() {
        let grid = SublatticeGrid::new(c.lattice(), 2).unwrap();
        let rho = simulate(&c).unwrap();
        let dec = pauli_decompose(&rho).unwrap();
        for x in 0..=grid.m() {
            let via_ie = sparse_via_inclusion_exclusion(&rho, &grid, x).unwrap();
            let via_pauli = pauli_reconstruct(&truncate_sparse(&dec, &grid, x)).unwrap();
            worst = worst.max(via_ie.max_abs_diff(&via_pauli).unwrap());
            let via_ie = percolated_via_inclusion_exclusion(&rho, &grid, x).unwrap();
            let via_pauli = pauli_reconstruct(&truncate_percolated(&dec, &grid, x)).unwrap();
            worst = worst.max(via_ie.max_abs_diff(&via_pauli).unwrap());
        }
    }
    report(out, "AC6", "truncation-vs-Pauli equivalence", worst <= 1e-9, format!("max |dev| = {worst:.2e} (tol 1e-9)"));
}

fn ac7(out: &mut Vec<Outcome>) {
    let g = Guards::default();
    let (mut exact_dev, mut patch_dev, mut sparse_dev) = (0f64, 0f64, 0f64);
    for c in n6_suite() {
        let grid = SublatticeGrid::new(c.lattice(), 2).unwrap();
        let p = state_distribution(&simulate(&c).unwrap());
        exact_dev = exact_dev.max(exact_law(&c, &g).unwrap().l1_distance(&p).unwrap());
        patch_dev = patch_dev.max(patching_law(&c, &grid, grid.m(), &g).unwrap().0.total_variation(&p).unwrap());
        sparse_dev = sparse_dev.max(sparse_law(&c, &grid, grid.m(), &g).unwrap().0.total_variation(&p).unwrap());
    }
    let c = chain_circuit(4, 3, 0.3, 0);
    let p = state_distribution(&simulate(&c).unwrap());
    let batch = sample_trajectory(&c, 0, 100_000).unwrap();
    let tv_traj = batch.empirical().unwrap().total_variation(&p).unwrap();
    let ok = exact_dev <= 1e-12 && patch_dev <= 1e-12 && sparse_dev <= 1e-12 && tv_traj <= 0.02;
    let detail = format!(
        "(a) exact l1 {exact_dev:.2e}, (b) patching l=m TV {patch_dev:.2e}, (c) sparse k=m TV {sparse_dev:.2e} (tol 1e-12), \
         (d) trajectory TV {tv_traj:.4} (tol 0.02)"
    );
    report(out, "AC7", "sampler exactness identities", ok, detail);
}

fn ac8(out: &mut Vec<Outcome>) {
    let g = Guards::default();
    let (mut pauli_total, mut pauli_viol) = (0usize, 0usize);
    let (mut proj_total, mut proj_literal_viol, mut proj_corrected_viol) = (0usize, 0usize, 0usize);
    let mut worst_literal: f64 = 0.0;
    for d in 1..=3 {
        for p in [0.1, 0.3, 0.5] {
            for seed in 0..10 {
                let c = chain_circuit(6, d, p, seed);
                for r in observable_decay_sweep(&c, 3, &g).unwrap() {
                    if r.name == "observable_decay_pauli" {
                        pauli_total += 1;
                        pauli_viol += usize::from(!r.pass);
                    } else {
                        proj_total += 1;
                        proj_corrected_viol += usize::from(!r.pass);
                        let literal_slack = r.extras["literal_slack"];
                        if literal_slack < -1e-9 {
                            proj_literal_viol += 1;
                            worst_literal = worst_literal.min(literal_slack);
                        }
                    }
                }
            }
        }
    }
    let p = 0.3;
    let id_layer = vec![Gate::named(NamedGate::Rz(0.0), &[0])];
    let single = Circuit::new(Lattice::chain(1).unwrap(), vec![id_layer], p).unwrap();
    let rho = simulate(&single).unwrap();
    let z = rho.get(0, 0).re - rho.get(1, 1).re;
    let saturation = (z - (1.0 - p)).abs();
    let ok = pauli_viol == 0 && proj_literal_viol == 0 && saturation <= 1e-12;
    let detail = format!(
        "Pauli: {pauli_viol}/{pauli_total} violations; projectors vs (1-p)^|A|: {proj_literal_viol}/{proj_total} violations \
         (worst slack {worst_literal:.3}); projectors vs (1-p/2)^|A|: {proj_corrected_viol} violations; \
         Tr(rho Z) - (1-p) = {saturation:.1e}"
    );
    report(out, "AC8", "observable decay", ok, detail);
}

/// Independent scan in log space: d ln(1-p) + D ln(4d) < -ln c.
fn scan_critical_depth(p: f64, dim: usize, c: f64) -> usize {
    (1..).find(|&d: &usize| (d as f64) * (1.0 - p).ln() + dim as f64 * (4.0 * d as f64).ln() < -c.ln()).unwrap()
}

fn ac9(out: &mut Vec<Outcome>) {
    let a = critical_depth(0.5, 1, 1.0).unwrap();
    let b = critical_depth(0.1, 1, 1.0).unwrap();
    let (sa, sb) = (scan_critical_depth(0.5, 1, 1.0), scan_critical_depth(0.1, 1, 1.0));
    let ok = a == 5 && b == 51 && a == sa && b == sb;
    report(out, "AC9", "critical depth solver", ok, format!("d*(0.5)={a} (scan {sa}), d*(0.1)={b} (scan {sb})"));
}

fn main() {
    let mut out = Vec::new();
    ac1(&mut out);
    ac2(&mut out);
    ac3(&mut out);
    ac6(&mut out);
    ac7(&mut out);
    ac8(&mut out);
    ac9(&mut out);
    ac4_5_10_11_12(&mut out);
    out.sort_by_key(|o| o.id[2..].parse::<u32>().unwrap());
    for o in &out {
        println!("{} {} {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.detail);
    }
    let unexpected: Vec<&Outcome> = out.iter().filter(|o| !o.pass && !KNOWN_UNATTAINABLE.contains(&o.id)).collect();
    for o in &out {
        if !o.pass && KNOWN_UNATTAINABLE.contains(&o.id) {
            println!("note: {} fails as stated; see \"Known deviations\" in the README", o.id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failed: {:?}", unexpected.iter().map(|o| o.id).collect::<Vec<_>>());
        std::process::exit(1);
    }
}
