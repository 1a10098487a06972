use std::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-9;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Hermitian operator on an ordered (ascending) list of qubits.
///
/// Row-major `2^q x 2^q` storage. Basis index bits are big-endian in qubit
/// order: `qubits[0]` is the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    qubits: Vec<usize>,
    data: Vec<Complex64>,
}

impl Operator {
    /// Build from row-major data; the matrix is symmetrized, and rejected if
    /// it is further than 1e-9 from Hermitian.
    pub fn new(qubits: Vec<usize>, mut data: Vec<Complex64>) -> Result<Self> {
        check_qubit_list(&qubits)?;
        let dim = 1usize << qubits.len();
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        for r in 0..dim {
            for c in r..dim {
                let (a, b) = (data[r * dim + c], data[c * dim + r].conj());
                if (a - b).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not Hermitian at ({r}, {c}): deviation {:.3e}",
                        (a - b).norm()
                    )));
                }
                let avg = (a + b) * 0.5;
                data[r * dim + c] = avg;
                data[c * dim + r] = avg.conj();
            }
        }
        Ok(Self { qubits, data })
    }

    pub fn zeros(qubits: Vec<usize>) -> Self {
        let dim = 1usize << qubits.len();
        Self { qubits, data: vec![ZERO; dim * dim] }
    }

    /// `|0...0><0...0|`.
    pub fn zero_state(qubits: Vec<usize>) -> Self {
        let mut op = Self::zeros(qubits);
        op.data[0] = Complex64::new(1.0, 0.0);
        op
    }

    /// `I / 2^q`.
    pub fn maximally_mixed(qubits: Vec<usize>) -> Self {
        let mut op = Self::zeros(qubits);
        let dim = op.dim();
        for i in 0..dim {
            op.data[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        op
    }

    /// Projector onto a normalized pure state.
    pub fn from_pure(qubits: Vec<usize>, psi: &[Complex64]) -> Result<Self> {
        let dim = 1usize << qubits.len();
        if psi.len() != dim {
            return Err(Error::DimensionMismatch(psi.len(), dim));
        }
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = psi[r] * psi[c].conj();
            }
        }
        check_qubit_list(&qubits)?;
        Ok(Self { qubits, data })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits.len()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).collect()
    }

    /// Bit shift of `qubit` inside a basis index.
    pub fn shift_of(&self, qubit: usize) -> Result<usize> {
        self.qubits
            .iter()
            .position(|&q| q == qubit)
            .map(|pos| self.qubits.len() - 1 - pos)
            .ok_or(Error::UnknownQubit(qubit))
    }

    fn same_support(&self, other: &Self) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_support(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { qubits: self.qubits.clone(), data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_support(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { qubits: self.qubits.clone(), data })
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: f64, other: &Self) -> Result<()> {
        self.same_support(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for z in self.data.iter_mut() {
            *z *= factor;
        }
    }

    /// Largest entry-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_support(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `rho -> U rho U^dagger` for a one- or two-qubit unitary.
    pub fn apply_unitary(&mut self, targets: &[usize], u: &[Complex64]) -> Result<()> {
        let shifts: Vec<usize> = targets.iter().map(|&t| self.shift_of(t)).collect::<Result<_>>()?;
        let dim = self.dim();
        let (offsets, bases) = local_offsets(dim, &shifts);
        let g = offsets.len();
        let mut v = [ZERO; 4];
        let mut w = [ZERO; 4];
        // left multiplication: columns
        for c in 0..dim {
            for &base in &bases {
                for a in 0..g {
                    v[a] = self.data[(base + offsets[a]) * dim + c];
                }
                for b in 0..g {
                    w[b] = (0..g).map(|a| u[b * g + a] * v[a]).sum();
                }
                for b in 0..g {
                    self.data[(base + offsets[b]) * dim + c] = w[b];
                }
            }
        }
        // right multiplication by U^dagger: rows
        for r in 0..dim {
            let row = &mut self.data[r * dim..(r + 1) * dim];
            for &base in &bases {
                for a in 0..g {
                    v[a] = row[base + offsets[a]];
                }
                for b in 0..g {
                    w[b] = (0..g).map(|a| v[a] * u[b * g + a].conj()).sum();
                }
                for b in 0..g {
                    row[base + offsets[b]] = w[b];
                }
            }
        }
        Ok(())
    }

    /// Single-qubit depolarizing channel `(1-p) rho + p sigma_q (x) Tr_q rho`.
    pub fn depolarize(&mut self, qubit: usize, p: f64) -> Result<()> {
        let mask = 1usize << self.shift_of(qubit)?;
        let dim = self.dim();
        let keep = 1.0 - p;
        for r in 0..dim {
            for c in 0..dim {
                if (r ^ c) & mask != 0 {
                    self.data[r * dim + c] *= keep;
                } else if r & mask == 0 {
                    let (i0, i1) = (r * dim + c, (r | mask) * dim + (c | mask));
                    let (a, b) = (self.data[i0], self.data[i1]);
                    let avg = (a + b) * 0.5;
                    self.data[i0] = a * keep + avg * p;
                    self.data[i1] = b * keep + avg * p;
                }
            }
        }
        Ok(())
    }

    /// Completely depolarize every listed qubit: `sigma_S (x) Tr_S rho`.
    pub fn depolarize_completely(&mut self, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            self.depolarize(q, 1.0)?;
        }
        Ok(())
    }

    /// Reduced operator on `keep` (qubit order follows `self`).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        for &q in keep {
            self.shift_of(q)?;
        }
        let kept: Vec<usize> = self.qubits.iter().copied().filter(|q| keep.contains(q)).collect();
        if kept.len() == self.qubits.len() {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = self.qubits.iter().copied().filter(|q| !keep.contains(q)).collect();
        let kept_shifts: Vec<usize> = kept.iter().map(|&q| self.shift_of(q).unwrap()).collect();
        let traced_shifts: Vec<usize> = traced.iter().map(|&q| self.shift_of(q).unwrap()).collect();
        let out_dim = 1usize << kept.len();
        let kept_idx = spread_table(&kept_shifts);
        let traced_idx = spread_table(&traced_shifts);
        let dim = self.dim();
        let mut out = vec![ZERO; out_dim * out_dim];
        for &t in &traced_idx {
            for (r, &kr) in kept_idx.iter().enumerate() {
                let row = (kr | t) * dim;
                for (c, &kc) in kept_idx.iter().enumerate() {
                    out[r * out_dim + c] += self.data[row + (kc | t)];
                }
            }
        }
        Ok(Self { qubits: kept, data: out })
    }

    /// Zero every element whose row and column differ on a listed qubit.
    pub fn dephase(&self, qubits: &[usize]) -> Result<Self> {
        let mut mask = 0usize;
        for &q in qubits {
            mask |= 1 << self.shift_of(q)?;
        }
        let dim = self.dim();
        let mut out = self.clone();
        for r in 0..dim {
            for c in 0..dim {
                if (r ^ c) & mask != 0 {
                    out.data[r * dim + c] = ZERO;
                }
            }
        }
        Ok(out)
    }

    /// Tensor product of operators on disjoint qubit sets.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if let Some(&q) = self.qubits.iter().find(|q| other.qubits.contains(q)) {
            return Err(Error::InvalidArgument(format!("qubit {q} appears in both factors")));
        }
        let mut qubits: Vec<usize> = self.qubits.iter().chain(&other.qubits).copied().collect();
        qubits.sort_unstable();
        let n = qubits.len();
        let shift = |q: usize| n - 1 - qubits.iter().position(|&x| x == q).unwrap();
        let a_idx = spread_table(&self.qubits.iter().map(|&q| shift(q)).collect::<Vec<_>>());
        let b_idx = spread_table(&other.qubits.iter().map(|&q| shift(q)).collect::<Vec<_>>());
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        let (da, db) = (self.dim(), other.dim());
        for ra in 0..da {
            for ca in 0..da {
                let x = self.data[ra * da + ca];
                if x == ZERO {
                    continue;
                }
                for rb in 0..db {
                    let row = (a_idx[ra] | b_idx[rb]) * dim;
                    for cb in 0..db {
                        data[row + (a_idx[ca] | b_idx[cb])] = x * other.data[rb * db + cb];
                    }
                }
            }
        }
        Ok(Self { qubits, data })
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim(), self.dim(), &self.data)
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 1 {
            return vec![self.data[0].re];
        }
        let mut ev: Vec<f64> = self.to_matrix().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|x| x.abs()).sum()
    }
}

/// A density operator: Hermitian, trace one and positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct State(Operator);

impl State {
    /// Validate trace and spectrum (eigenvalues ≥ -1e-9, trace 1 ± 1e-9).
    pub fn new(op: Operator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("state has trace {tr}")));
        }
        let min = op.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -1e-9 {
            return Err(Error::NotPsd(min));
        }
        Ok(Self(op))
    }

    /// For operators that are states by construction (channel outputs).
    pub(crate) fn from_channel_output(op: Operator) -> Self {
        Self(op)
    }

    pub fn zero(qubits: Vec<usize>) -> Self {
        Self(Operator::zero_state(qubits))
    }

    pub fn maximally_mixed(qubits: Vec<usize>) -> Self {
        Self(Operator::maximally_mixed(qubits))
    }

    pub fn from_pure(qubits: Vec<usize>, psi: &[Complex64]) -> Result<Self> {
        let op = Operator::from_pure(qubits, psi)?;
        if (op.trace() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("state vector is not normalized".into()));
        }
        Ok(Self(op))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<State> {
        Ok(State(self.0.partial_trace(keep)?))
    }

    pub fn dephase(&self, qubits: &[usize]) -> Result<State> {
        Ok(State(self.0.dephase(qubits)?))
    }

    pub fn kron(&self, other: &State) -> Result<State> {
        Ok(State(self.0.kron(&other.0)?))
    }

    /// Apply `N_S`: depolarizing of strength `p` on each listed qubit.
    pub fn depolarized(&self, qubits: &[usize], p: f64) -> Result<State> {
        let mut op = self.0.clone();
        for &q in qubits {
            op.depolarize(q, p)?;
        }
        Ok(State(op))
    }
}

impl Deref for State {
    type Target = Operator;

    fn deref(&self) -> &Operator {
        &self.0
    }
}

fn check_qubit_list(qubits: &[usize]) -> Result<()> {
    if qubits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("qubit list must be strictly ascending".into()));
    }
    if qubits.len() > 30 {
        return Err(Error::InvalidArgument("operator too large".into()));
    }
    Ok(())
}

/// For targets at the given bit shifts (first = most significant local bit),
/// the index offset of every local basis state and all base indices whose
/// target bits are zero.
pub(crate) fn local_offsets(dim: usize, shifts: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let k = shifts.len();
    let offsets = (0..1usize << k)
        .map(|a| {
            (0..k)
                .filter(|&j| a >> (k - 1 - j) & 1 == 1)
                .map(|j| 1usize << shifts[j])
                .sum()
        })
        .collect();
    let mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let bases = (0..dim).filter(|i| i & mask == 0).collect();
    (offsets, bases)
}

/// Table mapping a compact index over `shifts` (first = most significant)
/// to the corresponding scattered full index.
pub(crate) fn spread_table(shifts: &[usize]) -> Vec<usize> {
    local_offsets(1 << shifts.iter().map(|&s| s + 1).max().unwrap_or(0), shifts).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::NamedGate;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> State {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        State::from_pure(vec![0, 1], &[c(h), c(0.0), c(0.0), c(h)]).unwrap()
    }

    #[test]
    fn bell_partial_trace_is_mixed() {
        let r = bell().partial_trace(&[0]).unwrap();
        assert!(r.max_abs_diff(&Operator::maximally_mixed(vec![0])).unwrap() < 1e-15);
        assert_eq!(bell().partial_trace(&[0, 1]).unwrap(), bell());
        assert!(bell().partial_trace(&[2]).is_err());
    }

    #[test]
    fn product_partial_trace() {
        let a = State::from_pure(vec![0], &[c(0.6), c(0.8)]).unwrap();
        let b = State::maximally_mixed(vec![1, 2]);
        let ab = a.kron(&b).unwrap();
        assert!(ab.partial_trace(&[0]).unwrap().max_abs_diff(&a).unwrap() < 1e-15);
        assert!(ab.partial_trace(&[1, 2]).unwrap().max_abs_diff(&b).unwrap() < 1e-15);
    }

    #[test]
    fn kron_interleaves_qubits() {
        let one = State::from_pure(vec![1], &[c(0.0), c(1.0)]).unwrap();
        let zeros = State::zero(vec![0, 2]);
        let s = zeros.kron(&one).unwrap();
        assert_eq!(s.qubits(), &[0, 1, 2]);
        // |010> has index 2
        assert_eq!(s.get(2, 2), c(1.0));
    }

    #[test]
    fn dephase_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = State::from_pure(vec![0], &[c(h), c(h)]).unwrap();
        let d = plus.dephase(&[0]).unwrap();
        assert!(d.max_abs_diff(&Operator::maximally_mixed(vec![0])).unwrap() < 1e-15);
        let z = State::zero(vec![0, 1]);
        assert_eq!(z.dephase(&[0, 1]).unwrap(), z);
        let b = bell();
        let once = b.dephase(&[1]).unwrap();
        assert_eq!(once.dephase(&[1]).unwrap(), once);
        assert!(b.dephase(&[5]).is_err());
    }

    #[test]
    fn unitary_then_inverse() {
        let mut s = bell().into_operator();
        let orig = s.clone();
        let ry = NamedGate::Ry(0.7);
        s.apply_unitary(&[1], &ry.matrix()).unwrap();
        s.apply_unitary(&[1], &NamedGate::Ry(-0.7).matrix()).unwrap();
        assert!(s.max_abs_diff(&orig).unwrap() < 1e-14);
    }

    #[test]
    fn depolarize_single_qubit() {
        let mut z = Operator::zero_state(vec![0]);
        z.depolarize(0, 0.2).unwrap();
        assert!((z.get(0, 0).re - 0.9).abs() < 1e-15);
        assert!((z.get(1, 1).re - 0.1).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let data = vec![c(1.0), c(1.0), c(0.0), c(0.0)];
        assert!(Operator::new(vec![0], data).is_err());
        assert!(Operator::new(vec![1, 0], vec![c(0.0); 16]).is_err());
    }

    #[test]
    fn state_validation() {
        let bad = Operator::new(vec![0], vec![c(1.5), c(0.0), c(0.0), c(-0.5)]).unwrap();
        assert!(matches!(State::new(bad), Err(Error::NotPsd(_))));
        assert!(State::new(Operator::maximally_mixed(vec![0, 1])).is_ok());
    }
}
