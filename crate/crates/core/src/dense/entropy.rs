use crate::error::{Error, Result};

use super::{Operator, State};

const EIGEN_TOL: f64 = 1e-9;

fn clipped_spectrum(op: &Operator) -> Result<Vec<f64>> {
    let ev = op.eigenvalues();
    if let Some(&min) = ev.first() {
        if min < -EIGEN_TOL {
            return Err(Error::NotPsd(min));
        }
    }
    if let Some(&max) = ev.last() {
        if max > 1.0 + EIGEN_TOL {
            return Err(Error::InvalidArgument(format!("eigenvalue {max} exceeds one")));
        }
    }
    Ok(ev.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
}

/// `S(rho) = -Tr rho log2 rho`.
pub fn von_neumann_entropy(op: &Operator) -> Result<f64> {
    Ok(clipped_spectrum(op)?.into_iter().filter(|&x| x > 0.0).map(|x| -x * x.log2()).sum())
}

fn complement(state: &State, a: &[usize]) -> Result<Vec<usize>> {
    for &q in a {
        state.shift_of(q)?;
    }
    Ok(state.qubits().iter().copied().filter(|q| !a.contains(q)).collect())
}

/// `S(A|Ā) = S(rho) - S(rho_Ā)`.
pub fn conditional_entropy(state: &State, a: &[usize]) -> Result<f64> {
    let rest = complement(state, a)?;
    let s_rest = if rest.is_empty() { 0.0 } else { von_neumann_entropy(state.partial_trace(&rest)?.operator())? };
    Ok(von_neumann_entropy(state)? - s_rest)
}

/// `D(rho || sigma_A (x) rho_Ā) = |A| - S(A|Ā)`.
pub fn relative_entropy_to_depolarized(state: &State, a: &[usize]) -> Result<f64> {
    let size = state.qubits().iter().filter(|q| a.contains(q)).count();
    Ok(size as f64 - conditional_entropy(state, a)?)
}

pub fn trace_norm(op: &Operator) -> f64 {
    op.trace_norm()
}

/// Unhalved: `||a - b||_1`.
pub fn trace_distance(a: &Operator, b: &Operator) -> Result<f64> {
    Ok(a.sub(b)?.trace_norm())
}

/// Pinsker bound with `D` in bits: `sqrt(2 ln2 D)`.
pub fn pinsker_bound(relative_entropy_bits: f64) -> f64 {
    (2.0 * std::f64::consts::LN_2 * relative_entropy_bits.max(0.0)).sqrt()
}
