//! Shared bit-by-bit machinery: sample qubit `i` from the (sanitized) ratio
//! of the two child prefix masses.

use rand::Rng;

use crate::dense::Distribution;
use crate::error::{Error, Result};

use super::{sanitize_values, Diagnostics};

/// Largest `n` for which sampling laws are enumerated.
pub(crate) const MAX_LAW_QUBITS: usize = 20;

pub(crate) trait PrefixOracle {
    fn n(&self) -> usize;

    /// (Quasi-)probability that qubits `0..prefix.len()` read `prefix`.
    fn prefix_mass(&mut self, prefix: &[u8]) -> Result<f64>;

    /// Sanitized conditional `(P(0 | prefix), P(1 | prefix))` and the
    /// clamped mass of this step.
    fn step(&mut self, prefix: &mut Vec<u8>) -> Result<([f64; 2], f64)> {
        prefix.push(0);
        let m0 = self.prefix_mass(prefix)?;
        *prefix.last_mut().unwrap() = 1;
        let m1 = self.prefix_mass(prefix)?;
        prefix.pop();
        let s = sanitize_values(&[m0, m1])?;
        Ok(([s.probs[0], s.probs[1]], s.clamped_mass))
    }
}

pub(crate) fn sample_one<O: PrefixOracle, R: Rng + ?Sized>(
    oracle: &mut O,
    rng: &mut R,
    diag: &mut Diagnostics,
) -> Result<Vec<u8>> {
    let mut prefix = Vec::with_capacity(oracle.n());
    for _ in 0..oracle.n() {
        let ([p0, _], clamped) = oracle.step(&mut prefix)?;
        diag.record_clamp(clamped);
        let u: f64 = rng.random();
        prefix.push(if u < p0 { 0 } else { 1 });
    }
    Ok(prefix)
}

/// Exact sampling law `Q(x) = prod_i Q(x_i | x_<i)`; unreachable prefixes are
/// not expanded. Clamping is accumulated over every reachable node.
pub(crate) fn enumerate_law<O: PrefixOracle>(oracle: &mut O, diag: &mut Diagnostics) -> Result<Distribution> {
    let n = oracle.n();
    if n > MAX_LAW_QUBITS {
        return Err(Error::GuardExceeded { what: "law enumeration", needed: n, limit: MAX_LAW_QUBITS });
    }
    let mut probs = vec![0.0; 1 << n];
    let mut prefix = Vec::with_capacity(n);
    walk(oracle, &mut prefix, 1.0, &mut probs, diag)?;
    Distribution::new((0..n).collect(), probs)
}

fn walk<O: PrefixOracle>(
    oracle: &mut O,
    prefix: &mut Vec<u8>,
    weight: f64,
    probs: &mut [f64],
    diag: &mut Diagnostics,
) -> Result<()> {
    if prefix.len() == oracle.n() {
        probs[prefix.iter().fold(0usize, |acc, &b| acc << 1 | b as usize)] = weight;
        return Ok(());
    }
    let (cond, clamped) = oracle.step(prefix)?;
    diag.record_clamp(clamped);
    for bit in 0..2u8 {
        let w = weight * cond[bit as usize];
        if w > 0.0 {
            prefix.push(bit);
            walk(oracle, prefix, w, probs, diag)?;
            prefix.pop();
        }
    }
    Ok(())
}
