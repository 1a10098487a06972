use std::collections::BTreeSet;
use std::f64::consts::E;

use crate::circuit::Circuit;
use crate::dense::{
    check_dense_guard, pinsker_bound, relative_entropy_to_depolarized, simulate_with, trace_distance, State,
};
use crate::error::{Error, Result};
use crate::lattice::{critical_depth, decay_factor, reverse_lightcone, SublatticeGrid};
use crate::pauli::{inclusion_exclusion_map, pauli_decompose_with, pauli_reconstruct};
use crate::Guards;

use super::{BoundReport, Params};

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("noise strength {p} outside [0, 1]")));
    }
    Ok(())
}

fn state_params(state: &State, a: &[usize]) -> Params {
    Params { n: Some(state.n_qubits()), a: Some(a.to_vec()), ..Params::default() }
}

/// `D(N_A(rho) || sigma_A (x) rho_Ā) <= (1-p) D(rho || sigma_A (x) rho_Ā)`,
/// which is the same statement as
/// `S(A|Ā)_{N_A(rho)} >= (1-p) S(A|Ā)_rho + p|A|`.
pub fn check_entropy_production(state: &State, a: &[usize], p: f64) -> Result<BoundReport> {
    check_p(p)?;
    check_dense_guard("entropy production", state.n_qubits(), &Guards::default())?;
    let before = relative_entropy_to_depolarized(state, a)?;
    let after = relative_entropy_to_depolarized(&state.depolarized(a, p)?, a)?;
    let size = a.len() as f64;
    let params = Params { p: Some(p), ..state_params(state, a) };
    Ok(BoundReport::new("entropy_production", after, (1.0 - p) * before, params)
        .extra("conditional_entropy_after", size - after)
        .extra("conditional_entropy_rhs", (1.0 - p) * (size - before) + p * size))
}

/// `D(rho || sigma_A (x) rho_Ā) <= D(rho || sigma_B (x) rho_B̄)` for `A ⊆ B`.
pub fn check_subset_monotonicity(state: &State, a: &[usize], b: &[usize]) -> Result<BoundReport> {
    if let Some(q) = a.iter().find(|q| !b.contains(q)) {
        return Err(Error::InvalidArgument(format!("qubit {q} of A is not in B")));
    }
    let da = relative_entropy_to_depolarized(state, a)?;
    let db = relative_entropy_to_depolarized(state, b)?;
    let params = Params { b: Some(b.to_vec()), ..state_params(state, a) };
    Ok(BoundReport::new("subset_monotonicity", da, db, params))
}

/// `||rho - sigma_A (x) rho_Ā||_1 <= sqrt(2 ln2 D)`.
pub fn check_pinsker(state: &State, a: &[usize]) -> Result<BoundReport> {
    let d = relative_entropy_to_depolarized(state, a)?;
    let mut mixed = state.operator().clone();
    mixed.depolarize_completely(a)?;
    let dist = trace_distance(state, &mixed)?;
    Ok(BoundReport::new("pinsker", dist, pinsker_bound(d), state_params(state, a)).extra("relative_entropy", d))
}

pub(crate) fn decay_report(circuit: &Circuit, rho: &State, a: &BTreeSet<usize>) -> Result<BoundReport> {
    let list: Vec<usize> = a.iter().copied().collect();
    let cone = reverse_lightcone(circuit, a)?.lightcone().len();
    let measured = relative_entropy_to_depolarized(rho, &list)?;
    let bound = (1.0 - circuit.p()).powi(circuit.depth() as i32) * cone as f64;
    let params = Params { a: Some(list), ..Params::of_circuit(circuit) };
    Ok(BoundReport::new("decay_bound", measured, bound, params).extra("lightcone_size", cone as f64))
}

pub fn check_decay_bound(circuit: &Circuit, a: &BTreeSet<usize>) -> Result<BoundReport> {
    check_decay_bound_with(circuit, a, &Guards::default())
}

/// `D(rho || sigma_A (x) rho_Ā) <= (1-p)^d |L(A)|` on the dense output state.
pub fn check_decay_bound_with(circuit: &Circuit, a: &BTreeSet<usize>, guards: &Guards) -> Result<BoundReport> {
    decay_report(circuit, &simulate_with(circuit, guards)?, a)
}

fn check_grid(circuit: &Circuit, grid: &SublatticeGrid) -> Result<()> {
    if grid.lattice() != circuit.lattice() {
        return Err(Error::InvalidArgument("grid and circuit use different lattices".into()));
    }
    Ok(())
}

pub(crate) fn sublattice_reports(circuit: &Circuit, rho: &State, grid: &SublatticeGrid) -> Result<Vec<BoundReport>> {
    check_grid(circuit, grid)?;
    let (p, d, dim) = (circuit.p(), circuit.depth(), circuit.lattice().dimension());
    let bound = decay_factor(p, d, dim);
    let w = grid.width();
    (0..grid.m())
        .map(|i| {
            let qubits = grid.block(i).to_vec();
            let measured = relative_entropy_to_depolarized(rho, &qubits)?;
            let params = Params { a: Some(vec![i]), width: Some(w), ..Params::of_circuit(circuit) };
            let mut r = BoundReport::new("sublattice_decay", measured, bound, params);
            if w != 2 * d {
                r = r.flag("extrapolated-width");
            }
            // the lightcone of a block of width w spans at most w + 2d <= 4d per axis
            if d == 0 || w > 2 * d {
                r = r.observation();
            }
            Ok(r)
        })
        .collect()
}

/// `D(rho || sigma_{J_i} (x) rho_{J\J_i}) <= (1-p)^d (4d)^D`, one report per
/// block.
pub fn check_sublattice_decay(circuit: &Circuit, grid: &SublatticeGrid, guards: &Guards) -> Result<Vec<BoundReport>> {
    sublattice_reports(circuit, &simulate_with(circuit, guards)?, grid)
}

/// `(2 x^{1/(2 3^D)})^{|A|}` with `x = (1-p)^d (4d)^D`, or `None` when
/// `x >= 1`.
pub fn ie_norm_decay_bound(p: f64, depth: usize, dimension: usize, size: usize) -> Option<f64> {
    let x = decay_factor(p, depth, dimension);
    (x < 1.0).then(|| (2.0 * x.powf(1.0 / (2.0 * 3f64.powi(dimension as i32)))).powi(size as i32))
}

/// The decay bound with `(4d)^D` replaced by the qubit count of a
/// block's lightcone, `prod_i min(w + 2d, L_i)`.
fn extrapolated_ie_bound(circuit: &Circuit, grid: &SublatticeGrid, size: usize) -> Option<f64> {
    let (p, d, dim) = (circuit.p(), circuit.depth(), circuit.lattice().dimension());
    let cap: f64 = circuit.lattice().dims().iter().map(|&l| (grid.width() + 2 * d).min(l) as f64).product();
    let x = (1.0 - p).powi(d as i32) * cap;
    (x < 1.0).then(|| (2.0 * x.powf(1.0 / (2.0 * 3f64.powi(dim as i32)))).powi(size as i32))
}

pub(crate) fn ie_norm_report(
    circuit: &Circuit,
    rho: &State,
    grid: &SublatticeGrid,
    a: &BTreeSet<usize>,
) -> Result<BoundReport> {
    check_grid(circuit, grid)?;
    let (p, d, dim) = (circuit.p(), circuit.depth(), circuit.lattice().dimension());
    let measured = inclusion_exclusion_map(rho, grid, a)?.trace_norm();
    let trivial = 2f64.powi(a.len() as i32);
    let params = Params { a: Some(a.iter().copied().collect()), width: Some(grid.width()), ..Params::of_circuit(circuit) };
    let decay = ie_norm_decay_bound(p, d, dim, a.len());
    let in_regime = d >= 1 && grid.width() == 2 * d;
    let report = match decay {
        Some(b) if in_regime => BoundReport::new("ie_norm_bound", measured, trivial.min(b), params).extra("ie_bound", b),
        Some(b) => BoundReport::new("ie_norm_bound", measured, trivial, params).extra("ie_bound", b),
        None => BoundReport::new("ie_norm_bound", measured, trivial, params),
    };
    let report = match (in_regime || d == 0, extrapolated_ie_bound(circuit, grid, a.len())) {
        (true, _) => report,
        (false, Some(b)) => report.flag("extrapolated-width").extra("extrapolated_bound", b),
        (false, None) => report.flag("extrapolated-width"),
    };
    Ok(report.extra("trivial_bound", trivial))
}

/// `||M_A(rho)||_1 <= min(2^{|A|}, (2 x^{1/(2 3^D)})^{|A|})`; the second
/// branch only enters when `x < 1` and the blocks have width `2d`.
pub fn check_ie_norm_bound(
    circuit: &Circuit,
    grid: &SublatticeGrid,
    a: &BTreeSet<usize>,
    guards: &Guards,
) -> Result<BoundReport> {
    ie_norm_report(circuit, &simulate_with(circuit, guards)?, grid, a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Keep Pauli terms supported on at most `k` blocks.
    Sparse(usize),
    /// Keep Pauli terms whose support components have at most `ell` blocks.
    Percolated(usize),
}

/// `c` with `(1-p)^d (4d)^D < 1/c` sufficient for the sparse error bound
/// `n^{-k}`: `(2 e m n)^{2 3^D}`.
pub fn sparse_threshold_constant(m: usize, n: usize, dimension: usize) -> f64 {
    (2.0 * E * m as f64 * n as f64).powf(2.0 * 3f64.powi(dimension as i32))
}

/// `c` sufficient for the percolated error bound `n e^{-ell}`:
/// `(2 e 3^D)^{2 3^D}`.
pub fn percolated_threshold_constant(dimension: usize) -> f64 {
    let t = 3f64.powi(dimension as i32);
    (2.0 * E * t).powf(2.0 * t)
}

pub(crate) fn truncation_report(
    circuit: &Circuit,
    rho: &State,
    grid: &SublatticeGrid,
    scheme: Scheme,
    guards: &Guards,
) -> Result<BoundReport> {
    check_grid(circuit, grid)?;
    let (n, p, d, dim) = (circuit.n(), circuit.p(), circuit.depth(), circuit.lattice().dimension());
    let dec = pauli_decompose_with(rho, guards)?;
    let mut params = Params { width: Some(grid.width()), ..Params::of_circuit(circuit) };
    let (name, dropped, bound, c) = match scheme {
        Scheme::Sparse(k) => {
            params.k = Some(k);
            let dropped = dec.retain_supports(grid, |s| s.len() > k);
            let bound = (-(k as f64) * (n as f64).ln()).exp();
            ("truncation_sparse", dropped, bound, sparse_threshold_constant(grid.m(), n, dim))
        }
        Scheme::Percolated(ell) => {
            params.ell = Some(ell);
            let dropped = dec.retain_supports(grid, |s| grid.largest_component(s) > ell);
            ("truncation_percolated", dropped, n as f64 * (-(ell as f64)).exp(), percolated_threshold_constant(dim))
        }
    };
    let measured = if dropped.is_empty() { 0.0 } else { pauli_reconstruct(&dropped)?.trace_norm() };
    let d_star = critical_depth(p, dim, c).ok();
    let applicable = d_star.is_some_and(|ds| d >= ds) && grid.width() == 2 * d;
    let mut r = BoundReport::new(name, measured, bound, params)
        .flag("base-e")
        .extra("threshold_constant", c)
        .extra("critical_depth", d_star.map_or(f64::NAN, |x| x as f64));
    if !applicable {
        r = r.flag("conditional").observation();
    }
    Ok(r)
}

/// `||rho - rho_trunc||_1` against `n^{-k}` (sparse) or `n e^{-ell}`
/// (percolated), asserted only at or above the critical depth with width-`2d`
/// blocks.
pub fn truncation_error(circuit: &Circuit, grid: &SublatticeGrid, scheme: Scheme, guards: &Guards) -> Result<BoundReport> {
    truncation_report(circuit, &simulate_with(circuit, guards)?, grid, scheme, guards)
}

/// Same as [`truncation_error`] on an already simulated output state.
pub fn truncation_error_on(
    circuit: &Circuit,
    rho: &State,
    grid: &SublatticeGrid,
    scheme: Scheme,
    guards: &Guards,
) -> Result<BoundReport> {
    truncation_report(circuit, rho, grid, scheme, guards)
}
