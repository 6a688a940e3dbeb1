use std::sync::Arc;

use proptest::prelude::*;
use srrw_core::evolving::*;
use srrw_core::forest::{assign_and_assemble, grow};
use srrw_core::groups::{DiscreteLaw, GroupElement, GroupSpec, StepDistribution};
use srrw_core::sampler::{SrrwConfig, TransformSpec};
use srrw_core::StreamRng;

fn lazy(spec: &GroupSpec) -> DiscreteLaw {
    StepDistribution::lazy(spec, 0.5).unwrap().as_discrete().unwrap().clone()
}

fn random_law(spec: &GroupSpec, atoms: Vec<GroupElement>, raw: &[f64]) -> DiscreteLaw {
    let mut atoms = atoms;
    atoms.sort();
    atoms.dedup();
    let total: f64 = raw.iter().take(atoms.len()).sum();
    let mut pairs: Vec<_> = atoms.into_iter().zip(raw).map(|(x, w)| (x, w / total)).collect();
    let drift: f64 = 1.0 - pairs.iter().map(|p| p.1).sum::<f64>();
    pairs[0].1 += drift;
    DiscreteLaw::new(spec, pairs).unwrap()
}

fn arb_instance() -> impl Strategy<Value = (GroupSpec, ElementSet, DiscreteLaw)> {
    (
        prop::collection::btree_set((-6i64..6, -6i64..6), 1..12),
        prop::collection::btree_set((-2i64..3, -2i64..3), 1..6),
        prop::collection::vec(0.05f64..1.0, 6),
    )
        .prop_map(|(w, support, raw)| {
            let spec = GroupSpec::Lattice(2);
            let w = w.into_iter().map(|(a, b)| GroupElement::Lattice(vec![a, b])).collect();
            let atoms = support.into_iter().map(|(a, b)| GroupElement::Lattice(vec![a, b])).collect();
            let law = random_law(&spec, atoms, &raw);
            (spec, w, law)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn martingale_identity((spec, w, law) in arb_instance()) {
        let pieces = threshold_pieces(&spec, &w, &Kernel::Mu(Arc::new(law.clone())));
        prop_assert!((expected_size(&pieces) - w.len() as f64).abs() < 1e-12);
        let lengths: f64 = pieces.iter().map(|p| p.length).sum();
        prop_assert!((lengths - 1.0).abs() < 1e-12);
        let doob: f64 = doob_weights(&spec, &w, &Kernel::Mu(Arc::new(law))).iter().map(|p| p.0).sum();
        prop_assert!((doob - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edge_boundary_bounds_bottleneck((spec, w, law) in arb_instance()) {
        prop_assert!(bottleneck(&spec, &w, &law).unwrap() >= edge_boundary_bound(&spec, &w, &law) - 1e-12);
    }
}

#[test]
fn psi_phi_inequality_on_cycles() {
    for l in [8u32, 12] {
        let spec = GroupSpec::cycle(l).unwrap();
        let mu = lazy(&spec);
        let mu0 = mu.mass_of(&spec.identity());
        for row in iso_profile_table(&spec, &mu, 6, SearchScope::Exhaustive).unwrap() {
            assert_eq!(row.status, ProfileStatus::Complete);
            let rhs = mu0 * mu0 * row.phi * row.phi / (2.0 * (1.0 - mu0).powi(2));
            assert!(row.psi >= rhs, "L={l} r={}: psi {} < {rhs}", row.r, row.psi);
        }
    }
}

fn forest_sequence(l: u32, n: usize, alpha: f64, seed: u64) -> KernelSeq {
    let spec = GroupSpec::cycle(l).unwrap();
    let mu = lazy(&spec);
    let config = SrrwConfig::new(spec.clone(), alpha, StepDistribution::Discrete(mu.clone()), TransformSpec::Identity).unwrap();
    let forest = grow(n, alpha, seed).unwrap();
    let trace = assign_and_assemble(&forest, &config, seed ^ 1).unwrap();
    kernel_seq_from_forest(&forest, &trace.steps, &spec, &mu).unwrap()
}

#[test]
fn reversal_transposes_compositions() {
    let spec = GroupSpec::cycle(5).unwrap();
    let skew = DiscreteLaw::new(
        &spec,
        vec![(GroupElement::Cycle(0), 0.2), (GroupElement::Cycle(1), 0.5), (GroupElement::Cycle(3), 0.3)],
    )
    .unwrap();
    let mut rng = StreamRng::from_seed(11);
    for _ in 0..20 {
        let kernels = (0..5)
            .map(|_| {
                if rng.bernoulli(0.5) {
                    Kernel::Mu(Arc::new(skew.clone()))
                } else {
                    Kernel::Deterministic(GroupElement::Cycle(rng.below(5) as u32))
                }
            })
            .collect();
        let seq = KernelSeq { spec: spec.clone(), kernels };
        let rev = reverse_kernels(&seq);
        let n = seq.len();
        for k in 0..=n {
            for l in k..=n {
                let fwd = dense_composition(&seq, k, l).unwrap();
                let bwd = dense_composition(&rev, n - l, n - k).unwrap();
                for x in 0..5 {
                    for y in 0..5 {
                        assert!((fwd[x][y] - bwd[y][x]).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn symmetric_reversal_is_plain_reversal() {
    let spec = GroupSpec::cycle(5).unwrap();
    let mu = Arc::new(lazy(&spec));
    let seq = KernelSeq { spec: spec.clone(), kernels: vec![Kernel::Mu(mu.clone()), Kernel::Mu(mu)] };
    let rev = reverse_kernels(&seq);
    assert_eq!(rev.kernels, seq.kernels);
}

#[test]
fn membership_probability_matches_composition() {
    let seq = forest_sequence(5, 6, 0.5, 21);
    let x = GroupElement::Cycle(0);
    let exact = dense_composition(&seq, 0, 4).unwrap();
    for y in 0..5u32 {
        let est = transition_via_evolving_sets(&seq, &x, &GroupElement::Cycle(y), 0, 4, 20_000, 5).unwrap();
        let p = exact[0][y as usize];
        assert!((est.mean - p).abs() <= 3.0 * est.stderr.max(1e-9), "y={y}: {} vs {p}", est.mean);
    }
    let same = transition_via_evolving_sets(&seq, &x, &x, 2, 2, 10, 5).unwrap();
    assert_eq!(same.mean, 1.0);
}

#[test]
fn exact_lemma_inequality() {
    for seed in 0..10 {
        let seq = forest_sequence(5, 4, 0.4, seed);
        for l in 0..=3 {
            let p = dense_composition(&seq, 0, l).unwrap();
            let norm = p[0].iter().map(|v| v * v).sum::<f64>().sqrt();
            let start = ElementSet::from([GroupElement::Cycle(0)]);
            let law = evolving_set_law(&seq, &start, 0, l).unwrap();
            // The membership identity holds exactly on the enumerated law.
            for y in 0..5 {
                let member: f64 = law.iter().filter(|(w, _)| w.contains(&GroupElement::Cycle(y))).map(|(_, q)| q).sum();
                assert!((member - p[0][y as usize]).abs() < 1e-12);
            }
            assert!(norm <= expected_sqrt_size(&seq, &start, 0, l).unwrap() + 1e-12);
        }
    }
}

#[test]
fn doob_chain_never_empties() {
    let seq = forest_sequence(12, 40, 0.3, 8);
    let mut rng = StreamRng::from_seed(2);
    for _ in 0..2_000 {
        let trace = evolving_trace(&seq, &ElementSet::from([GroupElement::Cycle(0)]), 0, 40, true, &mut rng).unwrap();
        assert!(trace.iter().all(|(_, size)| *size > 0));
    }
}
