use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{Circuit, Gate, NamedGate};
use crate::error::Result;
use crate::lattice::Lattice;

/// Name of the generator used everywhere a seed is consumed.
pub const RNG_NAME: &str = "ChaCha20Rng";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateSet {
    /// Haar-random two-qubit unitaries on every brickwork pair.
    Haar,
    /// Named gates: CNOT/CZ/SWAP on pairs, RY/RZ/H/S/T on idle qubits.
    Named,
}

/// Haar-random unitary of dimension `dim`, via Gram-Schmidt on the columns of
/// a complex Gaussian matrix (row-major output).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..dim {
                let sub = proj * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            m[i * dim + j] = z;
        }
    }
    m
}

/// Nearest-neighbor pairs of brickwork layer `t`: the layer acts along axis
/// `(t / 2) mod D` and pairs sites whose coordinate there has parity `t mod 2`.
pub(crate) fn brickwork_pairs(lattice: &Lattice, t: usize) -> Vec<(usize, usize)> {
    let axis = (t / 2) % lattice.dimension();
    let parity = t % 2;
    let side = lattice.dims()[axis];
    let mut pairs = Vec::new();
    for q in 0..lattice.n() {
        let mut c = lattice.coords(q);
        if c[axis] % 2 == parity && c[axis] + 1 < side {
            c[axis] += 1;
            pairs.push((q, lattice.index(&c).expect("neighbor in range")));
        }
    }
    pairs
}

/// Seeded brickwork circuit of the given depth on `lattice`.
pub fn random_local_circuit(lattice: &Lattice, depth: usize, seed: u64, gateset: GateSet, p: f64) -> Result<Circuit> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(depth);
    for t in 0..depth {
        let pairs = brickwork_pairs(lattice, t);
        let mut layer = Vec::new();
        match gateset {
            GateSet::Haar => {
                for (a, b) in pairs {
                    layer.push(Gate::unitary("haar", &[a, b], haar_unitary(4, &mut rng)));
                }
            }
            GateSet::Named => {
                let mut busy = vec![false; lattice.n()];
                for (a, b) in pairs {
                    busy[a] = true;
                    busy[b] = true;
                    let g = match rng.random_range(0..4) {
                        0 => Gate::named(NamedGate::Cnot, &[a, b]),
                        1 => Gate::named(NamedGate::Cnot, &[b, a]),
                        2 => Gate::named(NamedGate::Cz, &[a, b]),
                        _ => Gate::named(NamedGate::Swap, &[a, b]),
                    };
                    layer.push(g);
                }
                for q in (0..lattice.n()).filter(|&q| !busy[q]) {
                    let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                    let g = match rng.random_range(0..5) {
                        0 => NamedGate::Ry(theta),
                        1 => NamedGate::Rz(theta),
                        2 => NamedGate::H,
                        3 => NamedGate::S,
                        _ => NamedGate::T,
                    };
                    layer.push(Gate::named(g, &[q]));
                }
            }
        }
        layers.push(layer);
    }
    Circuit::new(lattice.clone(), layers, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitarity_deviation;

    #[test]
    fn deterministic_in_seed() {
        let lat = Lattice::chain(4).unwrap();
        let a = random_local_circuit(&lat, 2, 7, GateSet::Haar, 0.1).unwrap();
        let b = random_local_circuit(&lat, 2, 7, GateSet::Haar, 0.1).unwrap();
        assert_eq!(a, b);
        let c = random_local_circuit(&lat, 2, 8, GateSet::Haar, 0.1).unwrap();
        assert_ne!(a, c);
        assert_eq!(random_local_circuit(&lat, 0, 7, GateSet::Haar, 0.1).unwrap().depth(), 0);
    }

    #[test]
    fn haar_gates_unitary() {
        let lat = Lattice::new(&[3, 4]).unwrap();
        let c = random_local_circuit(&lat, 6, 3, GateSet::Haar, 0.2).unwrap();
        for g in c.layers().iter().flatten() {
            assert_eq!(g.targets().len(), 2);
            assert!(unitarity_deviation(g.matrix()) <= 1e-9);
        }
    }

    #[test]
    fn brickwork_alternates() {
        let lat = Lattice::chain(5).unwrap();
        assert_eq!(brickwork_pairs(&lat, 0), vec![(0, 1), (2, 3)]);
        assert_eq!(brickwork_pairs(&lat, 1), vec![(1, 2), (3, 4)]);
        let lat2 = Lattice::new(&[2, 3]).unwrap();
        assert_eq!(brickwork_pairs(&lat2, 2), vec![(0, 1), (3, 4)]);
        assert_eq!(brickwork_pairs(&lat2, 3), vec![(1, 2), (4, 5)]);
    }

    #[test]
    fn named_gateset_builds() {
        let lat = Lattice::chain(5).unwrap();
        let c = random_local_circuit(&lat, 4, 1, GateSet::Named, 0.0).unwrap();
        assert_eq!(c.depth(), 4);
    }
}
