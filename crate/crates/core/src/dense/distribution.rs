use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Operator, State};

/// Conditioning events below this probability are rejected.
pub const MIN_CONDITIONING_PROB: f64 = 1e-12;

/// Probability vector over bitstrings of an ascending qubit list, indexed
/// big-endian (`qubits[0]` is the most significant bit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    qubits: Vec<usize>,
    probs: Vec<f64>,
}

/// Like [`Distribution`] but entries may be negative and need not sum to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiDistribution {
    qubits: Vec<usize>,
    values: Vec<f64>,
}

impl Distribution {
    pub fn new(qubits: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        check_layout(&qubits, probs.len())?;
        if let Some(&bad) = probs.iter().find(|&&x| !(x >= -1e-12)) {
            return Err(Error::InvalidArgument(format!("negative probability {bad}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(Self { qubits, probs })
    }

    pub(crate) fn from_raw(qubits: Vec<usize>, probs: Vec<f64>) -> Self {
        Self { qubits, probs }
    }

    pub fn point_mass(qubits: Vec<usize>, index: usize) -> Self {
        let mut probs = vec![0.0; 1 << qubits.len()];
        probs[index] = 1.0;
        Self { qubits, probs }
    }

    pub fn uniform(qubits: Vec<usize>) -> Self {
        let dim = 1usize << qubits.len();
        Self { qubits, probs: vec![1.0 / dim as f64; dim] }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Probability of the bitstring given as one bit per qubit.
    pub fn prob_of_bits(&self, bits: &[u8]) -> Result<f64> {
        Ok(self.probs[bits_to_index(bits, self.qubits.len())?])
    }

    pub fn marginal(&self, subset: &[usize]) -> Result<Distribution> {
        Ok(Distribution::from_raw(sorted(subset), marginalize(&self.qubits, &self.probs, subset)?))
    }

    /// `P_{target | given = bits}`; `bits` follows the ascending order of `given`.
    pub fn conditional(&self, target: &[usize], given: &[usize], bits: &[u8]) -> Result<Distribution> {
        conditional(&self.qubits, &self.probs, target, given, bits)
    }

    /// `sum |p - q|` over a common qubit list.
    pub fn l1_distance(&self, other: &Distribution) -> Result<f64> {
        l1(&self.qubits, &self.probs, &other.qubits, &other.probs)
    }

    pub fn total_variation(&self, other: &Distribution) -> Result<f64> {
        Ok(0.5 * self.l1_distance(other)?)
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        -self.probs.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
    }

    pub fn into_quasi(self) -> QuasiDistribution {
        QuasiDistribution { qubits: self.qubits, values: self.probs }
    }
}

impl QuasiDistribution {
    pub fn new(qubits: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        check_layout(&qubits, values.len())?;
        Ok(Self { qubits, values })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum of the negative entries' magnitudes.
    pub fn negative_mass(&self) -> f64 {
        self.values.iter().filter(|&&x| x < 0.0).map(|x| -x).sum()
    }

    pub fn marginal(&self, subset: &[usize]) -> Result<QuasiDistribution> {
        Ok(QuasiDistribution { qubits: sorted(subset), values: marginalize(&self.qubits, &self.values, subset)? })
    }

    pub fn l1_distance(&self, other: &Distribution) -> Result<f64> {
        l1(&self.qubits, &self.values, &other.qubits, &other.probs)
    }
}

/// Diagonal of `op` as a quasi-distribution.
pub fn diagonal_quasi(op: &Operator) -> QuasiDistribution {
    QuasiDistribution { qubits: op.qubits().to_vec(), values: op.diagonal() }
}

/// Computational-basis distribution of a state, i.e. of its dephased version.
pub fn state_distribution(state: &State) -> Distribution {
    let probs = state.diagonal().into_iter().map(|x| x.max(0.0)).collect();
    Distribution::from_raw(state.qubits().to_vec(), probs)
}

pub fn marginal_distribution(state: &State, subset: &[usize]) -> Result<Distribution> {
    state_distribution(state).marginal(subset)
}

pub fn conditional_distribution(state: &State, target: &[usize], given: &[usize], bits: &[u8]) -> Result<Distribution> {
    state_distribution(state).conditional(target, given, bits)
}

/// Bits (MSB first) to an index.
pub fn bits_to_index(bits: &[u8], len: usize) -> Result<usize> {
    if bits.len() != len {
        return Err(Error::DimensionMismatch(bits.len(), len));
    }
    bits.iter().try_fold(0usize, |acc, &b| match b {
        0 | 1 => Ok(acc << 1 | b as usize),
        _ => Err(Error::InvalidArgument(format!("bit value {b}"))),
    })
}

pub fn index_to_bits(index: usize, len: usize) -> Vec<u8> {
    (0..len).map(|j| (index >> (len - 1 - j) & 1) as u8).collect()
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

fn sorted(subset: &[usize]) -> Vec<usize> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

fn check_layout(qubits: &[usize], len: usize) -> Result<()> {
    if qubits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("qubit list must be strictly ascending".into()));
    }
    if len != 1 << qubits.len() {
        return Err(Error::DimensionMismatch(len, 1 << qubits.len()));
    }
    Ok(())
}

/// Bit shifts of `subset` inside indices over `qubits`.
fn shifts_in(qubits: &[usize], subset: &[usize]) -> Result<Vec<usize>> {
    subset
        .iter()
        .map(|q| {
            qubits.iter().position(|x| x == q).map(|pos| qubits.len() - 1 - pos).ok_or(Error::UnknownQubit(*q))
        })
        .collect()
}

/// Compress the bits at `shifts` (first = most significant) of `index`.
fn gather(index: usize, shifts: &[usize]) -> usize {
    shifts.iter().fold(0, |acc, &s| acc << 1 | (index >> s & 1))
}

fn marginalize(qubits: &[usize], values: &[f64], subset: &[usize]) -> Result<Vec<f64>> {
    let sub = sorted(subset);
    let shifts = shifts_in(qubits, &sub)?;
    let mut out = vec![0.0; 1 << sub.len()];
    for (i, &v) in values.iter().enumerate() {
        out[gather(i, &shifts)] += v;
    }
    Ok(out)
}

fn conditional(qubits: &[usize], probs: &[f64], target: &[usize], given: &[usize], bits: &[u8]) -> Result<Distribution> {
    let target = sorted(target);
    let given = sorted(given);
    if let Some(q) = target.iter().find(|q| given.contains(q)) {
        return Err(Error::InvalidArgument(format!("qubit {q} is both target and condition")));
    }
    let want = bits_to_index(bits, given.len())?;
    let t_shifts = shifts_in(qubits, &target)?;
    let g_shifts = shifts_in(qubits, &given)?;
    let mut out = vec![0.0; 1 << target.len()];
    for (i, &v) in probs.iter().enumerate() {
        if gather(i, &g_shifts) == want {
            out[gather(i, &t_shifts)] += v;
        }
    }
    let norm: f64 = out.iter().sum();
    if !(norm > MIN_CONDITIONING_PROB) {
        return Err(Error::ZeroProbability(norm));
    }
    for x in out.iter_mut() {
        *x /= norm;
    }
    Ok(Distribution::from_raw(target, out))
}

fn l1(qa: &[usize], a: &[f64], qb: &[usize], b: &[f64]) -> Result<f64> {
    if qa != qb {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn bell() -> State {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        State::from_pure(vec![0, 1], &[h, z, z, h]).unwrap()
    }

    #[test]
    fn bell_conditional_is_point_mass() {
        let d = conditional_distribution(&bell().dephase(&[0, 1]).unwrap(), &[1], &[0], &[0]).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0]);
        assert!(matches!(
            Distribution::point_mass(vec![0, 1], 0).conditional(&[1], &[0], &[1]),
            Err(Error::ZeroProbability(_))
        ));
    }

    #[test]
    fn product_conditional_equals_marginal() {
        let s = State::maximally_mixed(vec![0, 1, 2]);
        let c = conditional_distribution(&s, &[0, 2], &[1], &[1]).unwrap();
        let m = marginal_distribution(&s, &[0, 2]).unwrap();
        assert!(c.l1_distance(&m).unwrap() < 1e-15);
    }

    #[test]
    fn noisy_single_qubit() {
        let s = State::zero(vec![0]).depolarized(&[0], 0.2).unwrap();
        assert!((marginal_distribution(&s, &[0]).unwrap().prob(0) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn marginal_big_endian() {
        // P(q0 q1 q2 = 011) = 1
        let d = Distribution::point_mass(vec![0, 1, 2], 0b011);
        assert_eq!(d.marginal(&[0, 2]).unwrap().probs(), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(d.prob_of_bits(&[0, 1, 1]).unwrap(), 1.0);
        assert_eq!(index_to_bits(3, 3), vec![0, 1, 1]);
        assert_eq!(bits_to_string(&index_to_bits(6, 3)), "110");
    }

    #[test]
    fn validation() {
        assert!(Distribution::new(vec![0], vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![0], vec![1.1, -0.1]).is_err());
        assert!(Distribution::new(vec![0], vec![0.5, 0.5]).is_ok());
        assert!(QuasiDistribution::new(vec![0], vec![1.1, -0.3]).is_ok());
    }
}
