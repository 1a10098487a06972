//! Randomized invariants across modules.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use noisy_local::analysis::{
    check_ie_norm_bound, check_markov_chain_accumulation, check_pinsker, conditional_gap, ie_norm_decay_bound,
};
use noisy_local::circuit::{haar_unitary, parse_circuit, random_local_circuit, serialize_circuit, Circuit, GateSet};
use noisy_local::dense::{
    random_state, simulate, simulate_lightcone, simulate_pure, state_distribution, trace_norm, von_neumann_entropy,
    Distribution, State,
};
use noisy_local::lattice::{critical_depth, decay_factor, reverse_lightcone, Lattice, SublatticeGrid};
use noisy_local::pauli::{
    pauli_decompose, pauli_reconstruct, percolated_via_inclusion_exclusion, sparse_via_inclusion_exclusion,
    truncate_percolated, truncate_sparse, PauliString,
};
use noisy_local::samplers::{exact_law, patching_law, sparse_law, trajectory_law};
use noisy_local::Guards;

fn chain(n: usize, d: usize, p: f64, seed: u64) -> Circuit {
    random_local_circuit(&Lattice::chain(n).unwrap(), d, seed, GateSet::Haar, p).unwrap()
}

fn is_distribution(d: &Distribution) -> bool {
    d.probs().iter().all(|&x| x >= 0.0) && (d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lightcone_growth_in_1d(n in 2usize..12, d in 0usize..5, seed in any::<u64>(), q in 0usize..12) {
        let c = chain(n, d, 0.1, seed);
        let region = BTreeSet::from([q % n]);
        let cone = reverse_lightcone(&c, &region).unwrap();
        prop_assert!(cone.lightcone().len() <= 1 + 2 * d);
        prop_assert!(cone.lightcone().is_superset(&region));
    }

    #[test]
    fn boundary_monotone_and_covering(cols in 1usize..5, rows in 1usize..4, w in 1usize..3, seed in any::<u64>()) {
        let lat = Lattice::new(&[rows, cols * 2]).unwrap();
        let g = SublatticeGrid::new(&lat, w).unwrap();
        let a = BTreeSet::from([(seed as usize) % g.m()]);
        let mut prev = BTreeSet::new();
        for ell in 0..=g.m() {
            let b = g.boundary(&a, ell);
            prop_assert!(b.is_superset(&prev));
            prop_assert!(b.is_disjoint(&a));
            prev = b;
        }
        let all: BTreeSet<usize> = prev.union(&a).copied().collect();
        prop_assert_eq!(all.len(), g.m());
    }

    #[test]
    fn components_partition(n in 1usize..16, mask in any::<u16>()) {
        let g = SublatticeGrid::new(&Lattice::new(&[4, 4]).unwrap(), 1).unwrap();
        let set: BTreeSet<usize> = (0..n.min(16)).filter(|b| mask >> b & 1 == 1).collect();
        let comps = g.connected_components(&set).unwrap();
        let mut seen = BTreeSet::new();
        for c in &comps {
            prop_assert!(!c.is_empty());
            for b in c {
                prop_assert!(seen.insert(*b));
            }
        }
        prop_assert_eq!(seen, set.clone());
        prop_assert_eq!(g.largest_component(&set), comps.iter().map(|c| c.len()).max().unwrap_or(0));
    }

    #[test]
    fn critical_depth_is_first_crossing(p in 0.05f64..0.95, dim in 1usize..3, c in 1.0f64..1e6) {
        let d = critical_depth(p, dim, c).unwrap();
        prop_assert!(decay_factor(p, d, dim) < 1.0 / c);
        if d > 1 {
            prop_assert!(decay_factor(p, d - 1, dim) >= 1.0 / c);
        }
    }

    #[test]
    fn circuit_round_trip(n in 2usize..7, d in 0usize..4, seed in any::<u64>(), named in any::<bool>(), p in 0.0f64..0.9) {
        let set = if named { GateSet::Named } else { GateSet::Haar };
        let c = random_local_circuit(&Lattice::chain(n).unwrap(), d, seed, set, p).unwrap();
        let again = parse_circuit(&serialize_circuit(&c)).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(random_local_circuit(&Lattice::chain(n).unwrap(), d, seed, set, p).unwrap(), c);
    }

    #[test]
    fn pinsker_on_random_states(seed in any::<u64>(), n in 1usize..5, mask in 1u32..16) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let s = random_state((0..n).collect(), 1 + (seed as usize % 4), &mut rng).unwrap();
        let a: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        prop_assert!(check_pinsker(&s, &a).unwrap().pass);
    }

    #[test]
    fn lightcone_equals_partial_trace(seed in any::<u64>(), d in 0usize..4, q in 0usize..7, span in 1usize..3) {
        let c = chain(7, d, 0.2, seed);
        let region: BTreeSet<usize> = (q..(q + span).min(7)).collect();
        let keep: Vec<usize> = region.iter().copied().collect();
        let full = simulate(&c).unwrap().partial_trace(&keep).unwrap();
        prop_assert!(simulate_lightcone(&c, &region).unwrap().max_abs_diff(&full).unwrap() < 1e-10);
    }

    #[test]
    fn noiseless_density_matches_statevector(seed in any::<u64>(), d in 0usize..5) {
        let c = chain(5, d, 0.0, seed);
        let psi = simulate_pure(&c, &Guards::default()).unwrap();
        let pure = State::from_pure((0..5).collect(), psi.amplitudes()).unwrap();
        prop_assert!(simulate(&c).unwrap().max_abs_diff(&pure).unwrap() < 1e-12);
    }

    #[test]
    fn entropy_unitary_invariant_and_additive(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = random_state(vec![0, 1], 2, &mut rng).unwrap();
        let b = random_state(vec![2], 1 + (seed as usize % 2), &mut rng).unwrap();
        let ab = a.kron(&b).unwrap();
        let (sa, sb, sab) = (von_neumann_entropy(&a).unwrap(), von_neumann_entropy(&b).unwrap(), von_neumann_entropy(&ab).unwrap());
        prop_assert!((sab - sa - sb).abs() < 1e-9);
        let mut rotated = ab.operator().clone();
        rotated.apply_unitary(&[0, 2], &haar_unitary(4, &mut rng)).unwrap();
        prop_assert!((von_neumann_entropy(&rotated).unwrap() - sab).abs() < 1e-9);
    }

    #[test]
    fn truncation_routes_agree(seed in any::<u64>(), d in 1usize..4, x in 0usize..4) {
        let c = chain(6, d, 0.25, seed);
        let g = SublatticeGrid::new(c.lattice(), 2).unwrap();
        let rho = simulate(&c).unwrap();
        let dec = pauli_decompose(&rho).unwrap();
        let sparse = pauli_reconstruct(&truncate_sparse(&dec, &g, x)).unwrap();
        prop_assert!(sparse_via_inclusion_exclusion(&rho, &g, x).unwrap().max_abs_diff(&sparse).unwrap() < 1e-9);
        let perc = pauli_reconstruct(&truncate_percolated(&dec, &g, x)).unwrap();
        prop_assert!(percolated_via_inclusion_exclusion(&rho, &g, x).unwrap().max_abs_diff(&perc).unwrap() < 1e-9);
    }

    #[test]
    fn truncation_structure(seed in any::<u64>(), k in 0usize..4, extra in 0usize..3) {
        let c = chain(6, 2, 0.2, seed);
        let g = SublatticeGrid::new(c.lattice(), 2).unwrap();
        let rho = simulate(&c).unwrap();
        let dec = pauli_decompose(&rho).unwrap();
        let sparse = truncate_sparse(&dec, &g, k);
        let perc = truncate_percolated(&dec, &g, k + extra);
        prop_assert!(sparse.coeffs().keys().all(|p| perc.coeffs().contains_key(p)));
        let id = PauliString::identity(6);
        prop_assert_eq!(sparse.coeff(&id), dec.coeff(&id));
        prop_assert_eq!(perc.coeff(&id), dec.coeff(&id));
        // dephasing keeps exactly the Z-type strings, on either side of the truncation
        let all: Vec<usize> = (0..6).collect();
        let trunc_then = pauli_reconstruct(&sparse).unwrap().dephase(&all).unwrap();
        let then_trunc = pauli_reconstruct(&truncate_sparse(&pauli_decompose(&rho.dephase(&all).unwrap()).unwrap(), &g, k)).unwrap();
        prop_assert!(trunc_then.max_abs_diff(&then_trunc).unwrap() < 1e-12);
    }

    #[test]
    fn ie_norm_trivial_bound(seed in any::<u64>(), d in 1usize..4, mask in 0u32..8, p in 0.05f64..0.9) {
        let c = chain(6, d, p, seed);
        let g = SublatticeGrid::new(c.lattice(), 2).unwrap();
        let a: BTreeSet<usize> = (0..g.m()).filter(|b| mask >> b & 1 == 1).collect();
        let r = check_ie_norm_bound(&c, &g, &a, &Guards::default()).unwrap();
        prop_assert!(r.pass);
        prop_assert!(r.measured <= 2f64.powi(a.len() as i32) + 1e-9);
        if let Some(b) = ie_norm_decay_bound(p, d, 1, a.len()) {
            prop_assert!(r.bound <= b + 1e-15 || g.width() != 2 * d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sampler_laws_are_distributions(seed in any::<u64>(), d in 1usize..3, k in 0usize..3, ell in 0usize..3) {
        let c = chain(5, d, 0.2, seed);
        let g = SublatticeGrid::new(c.lattice(), 2).unwrap();
        let gd = Guards::default();
        prop_assert!(is_distribution(&exact_law(&c, &gd).unwrap()));
        prop_assert!(is_distribution(&sparse_law(&c, &g, k, &gd).unwrap().0));
        prop_assert!(is_distribution(&patching_law(&c, &g, ell, &gd).unwrap().0));
    }

    #[test]
    fn trajectory_law_is_exact(seed in any::<u64>(), p in 0.0f64..0.6) {
        let c = chain(2, 4, p, seed);
        let p_dense = state_distribution(&simulate(&c).unwrap());
        prop_assert!(trajectory_law(&c).unwrap().l1_distance(&p_dense).unwrap() < 1e-12);
    }

    #[test]
    fn sparse_law_within_truncation_error(seed in any::<u64>(), d in 1usize..4, k in 0usize..3) {
        let c = chain(6, d, 0.3, seed);
        let g = SublatticeGrid::new(c.lattice(), 2).unwrap();
        let rho = simulate(&c).unwrap();
        let truncated = sparse_via_inclusion_exclusion(&rho, &g, k).unwrap();
        let err = trace_norm(&rho.sub(&truncated).unwrap());
        let (law, diag) = sparse_law(&c, &g, k, &Guards::default()).unwrap();
        let tv = law.total_variation(&state_distribution(&rho)).unwrap();
        prop_assert!(tv <= err + diag.clamped_mass + 1e-9, "tv {} err {} clamped {}", tv, err, diag.clamped_mass);
    }

    #[test]
    fn markov_gap_relabeling(seed in any::<u64>(), perm in Just(()).prop_perturb(|_, mut rng| {
        let mut v: Vec<usize> = (0..3).collect();
        for i in (1..3).rev() { v.swap(i, rng.random_range(0..=i)); }
        v
    })) {
        let c = chain(6, 2, 0.2, seed);
        let dist = state_distribution(&simulate(&c).unwrap());
        let cset = [3usize, 4, 5];
        let shuffled: Vec<usize> = perm.iter().map(|&i| cset[i]).collect();
        let g1 = conditional_gap(&dist, &[0], &[1, 2], &cset).unwrap();
        let g2 = conditional_gap(&dist, &[0], &[2, 1], &shuffled).unwrap();
        prop_assert!((g1 - g2).abs() < 1e-14);
        // flipping one bit label everywhere permutes outcomes consistently
        let n = 6;
        let flipped: Vec<f64> = (0..1usize << n).map(|i| dist.prob(i ^ 0b000100)).collect();
        let flipped = Distribution::new((0..n).collect(), flipped).unwrap();
        let g3 = conditional_gap(&flipped, &[0], &[1, 2], &cset).unwrap();
        prop_assert!((g1 - g3).abs() < 1e-12);
    }
}

#[test]
fn accumulation_on_product_state_is_zero() {
    let lat = Lattice::chain(6).unwrap();
    let layer: Vec<_> = (0..6)
        .map(|q| noisy_local::circuit::Gate::named(noisy_local::circuit::NamedGate::Ry(0.2 + q as f64), &[q]))
        .collect();
    let c = Circuit::new(lat.clone(), vec![layer], 0.2).unwrap();
    let g = SublatticeGrid::new(&lat, 2).unwrap();
    let r = check_markov_chain_accumulation(&c, &g, 1, &Guards::default()).unwrap();
    assert!(r.bound < 1e-14 && r.measured < 1e-14);
}
