use std::collections::BTreeMap;

use srrw_core::elephant::{cycle_distribution, lambda_table};
use srrw_core::forest::PercolatedForest;
use srrw_core::groups::{GroupElement, GroupSpec, StepDistribution};
use srrw_core::oracle::{exact_distribution, exact_distribution_with, exact_isolated_distribution, Enumeration, OracleOptions};
use srrw_core::sampler::{SrrwConfig, TransformSpec};

fn tree_opts() -> OracleOptions {
    OracleOptions { cap: 8, enumeration: Enumeration::Tree }
}

/// n-fold convolution of `mu`, written against the group API only.
fn convolution(spec: &GroupSpec, mu: &StepDistribution, n: usize) -> BTreeMap<GroupElement, f64> {
    let law = mu.as_discrete().unwrap();
    let mut cur = BTreeMap::from([(spec.identity(), 1.0)]);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (x, p) in &cur {
            for (g, w) in law.iter() {
                *next.entry(spec.multiply(x, g).unwrap()).or_insert(0.0) += p * w;
            }
        }
        cur = next;
    }
    cur
}

#[test]
fn iid_case_is_a_convolution() {
    let cases = vec![
        (GroupSpec::cycle(5).unwrap(), StepDistribution::lazy(&GroupSpec::cycle(5).unwrap(), 0.5).unwrap()),
        (GroupSpec::regular_tree(3).unwrap(), StepDistribution::uniform(&GroupSpec::regular_tree(3).unwrap()).unwrap()),
        (GroupSpec::S3xZ, StepDistribution::uniform(&GroupSpec::S3xZ).unwrap()),
        (GroupSpec::Lattice(2), StepDistribution::lazy(&GroupSpec::Lattice(2), 0.2).unwrap()),
        (GroupSpec::Lamplighter, StepDistribution::uniform(&GroupSpec::Lamplighter).unwrap()),
    ];
    for (spec, mu) in cases {
        let config = SrrwConfig::new(spec.clone(), 0.0, mu.clone(), TransformSpec::Negation).unwrap();
        for n in 1..=5 {
            let want = convolution(&spec, &mu, n);
            let got = exact_distribution_with(&config, n, &tree_opts()).unwrap();
            assert_eq!(got.mass.len(), want.len(), "{spec} n={n}");
            for (x, p) in &want {
                assert!((got.mass_at(x) - p).abs() < 1e-12, "{spec} n={n}");
            }
        }
    }
}

/// Walks every (ξ_j, u_j, fresh draw, sign coin) path from the definition.
fn brute_force_signed(spec: &GroupSpec, alpha: f64, mu: &StepDistribution, q: f64, n: usize) -> BTreeMap<GroupElement, f64> {
    let law = mu.as_discrete().unwrap();
    let mut out = BTreeMap::new();
    let mut stack: Vec<(Vec<GroupElement>, f64)> = vec![(Vec::new(), 1.0)];
    while let Some((steps, p)) = stack.pop() {
        let j = steps.len() + 1;
        if j > n {
            let mut s = spec.identity();
            for x in &steps {
                s = spec.multiply(&s, x).unwrap();
            }
            *out.entry(s).or_insert(0.0) += p;
            continue;
        }
        let fresh_p = if j == 1 { 1.0 } else { 1.0 - alpha };
        for (g, w) in law.iter() {
            let mut next = steps.clone();
            next.push(g.clone());
            stack.push((next, p * fresh_p * w));
        }
        if j > 1 {
            for u in 0..j - 1 {
                for (keep, coin) in [(true, q), (false, 1.0 - q)] {
                    if coin == 0.0 {
                        continue;
                    }
                    let x = &steps[u];
                    let y = if keep { x.clone() } else { spec.inverse(x).unwrap() };
                    let mut next = steps.clone();
                    next.push(y);
                    stack.push((next, p * alpha / (j - 1) as f64 * coin));
                }
            }
        }
    }
    out
}

#[test]
fn oracle_matches_definition() {
    let spec = GroupSpec::free_group(2).unwrap();
    let mu = StepDistribution::uniform(&spec).unwrap();
    for (transform, q) in [(TransformSpec::Identity, 1.0), (TransformSpec::Negation, 0.0), (TransformSpec::IidSign(0.3), 0.3)] {
        let config = SrrwConfig::new(spec.clone(), 0.6, mu.clone(), transform).unwrap();
        let want = brute_force_signed(&spec, 0.6, &mu, q, 4);
        for route in [Enumeration::Tree, Enumeration::Counts] {
            let got = exact_distribution_with(&config, 4, &OracleOptions { cap: 8, enumeration: route }).unwrap();
            assert_eq!(got.mass.len(), want.len());
            for (x, p) in &want {
                assert!((got.mass_at(x) - p).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn z2_return_identity() {
    for &alpha in &[0.1, 0.5, 0.9] {
        let config = SrrwConfig::new(GroupSpec::Z2, alpha, StepDistribution::uniform(&GroupSpec::Z2).unwrap(), TransformSpec::Identity)
            .unwrap();
        let table = lambda_table(alpha, 8).unwrap();
        for n in 1..=8 {
            let d = exact_distribution(&config, n).unwrap();
            let gap = 2.0 * d.mass_at(&GroupElement::Z2(0)) - 1.0;
            let want = if n % 2 == 0 { table.get(n, n / 2).unwrap() } else { 0.0 };
            assert!((gap - want).abs() < 1e-12, "alpha={alpha} n={n}");
        }
    }
}

#[test]
fn cycle_fourier_matches_oracle() {
    for l in 3..=5u32 {
        let spec = GroupSpec::cycle(l).unwrap();
        let mu = StepDistribution::uniform(&spec).unwrap();
        for &alpha in &[0.0, 0.3, 0.7] {
            let config = SrrwConfig::new(spec.clone(), alpha, mu.clone(), TransformSpec::Identity).unwrap();
            for n in 1..=7 {
                let fourier = cycle_distribution(alpha, l, n).unwrap();
                let exact = exact_distribution(&config, n).unwrap();
                for (m, p) in fourier.iter().enumerate() {
                    assert!((exact.mass_at(&GroupElement::Cycle(m as u32)) - p).abs() < 1e-10, "L={l} n={n} m={m}");
                }
            }
        }
    }
}

#[test]
fn isolated_law_matches_forest_enumeration() {
    let alpha: f64 = 0.35;
    for n in 1..=7usize {
        let mut brute: BTreeMap<usize, f64> = BTreeMap::new();
        // Parents u_j ∈ 1..j-1 in mixed radix, flags as a bitmask.
        let choices: usize = (2..=n).map(|j| j - 1).product();
        for code in 0..choices {
            let mut c = code;
            let parents: Vec<usize> = (2..=n)
                .map(|j| {
                    let u = c % (j - 1) + 1;
                    c /= j - 1;
                    u
                })
                .collect();
            for mask in 0..1u32 << (n - 1) {
                let flags: Vec<bool> = (0..n - 1).map(|b| mask >> b & 1 == 1).collect();
                let kept = flags.iter().filter(|f| **f).count() as i32;
                let p = alpha.powi(kept) * (1.0 - alpha).powi(n as i32 - 1 - kept) / choices as f64;
                let forest = PercolatedForest::from_parts(&parents, &flags).unwrap();
                *brute.entry(forest.isolated_count()).or_insert(0.0) += p;
            }
        }
        let dp = exact_isolated_distribution(alpha, n).unwrap();
        let brute: BTreeMap<usize, f64> = brute.into_iter().filter(|(_, p)| *p > 0.0).collect();
        assert_eq!(dp.len(), brute.len(), "n={n}");
        for (i, p) in &brute {
            assert!((dp[i] - p).abs() < 1e-12, "n={n} i={i}");
        }
    }
}
