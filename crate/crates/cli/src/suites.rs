//! Acceptance suites. Each suite returns one [`Check`] per verified claim;
//! suites with a time budget also report their runtime.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Value};
use srrw_core::elephant::{cycle_distribution, decay_grid, lambda_bounds_check, lambda_table};
use srrw_core::estimators::{
    class_function_decay, isolated_histogram, isolated_tail_check, mc_escape_rate, mc_histogram, mc_point_mass_curve,
    positive_points, rate_fit, Estimate, FitModel, Histogram, Route,
};
use srrw_core::evolving::{
    dense_composition, doob_weights, evolving_set_law, expected_size, expected_sqrt_size, iso_profile_table, kernel_seq_from_forest,
    threshold_pieces, transition_via_evolving_sets, ElementSet, Kernel, KernelSeq, ProfileStatus, SearchScope,
};
use srrw_core::forest::{assign_and_assemble, cluster_size_walk_with, grow, SignLaw};
use srrw_core::groups::{DiscreteLaw, GroupElement, GroupSpec, StepDistribution};
use srrw_core::mc;
use srrw_core::oracle::{exact_distribution, exact_isolated_distribution, tv_distance};
use srrw_core::rng::derive_key;
use srrw_core::sampler::{erw_config, SrrwConfig, TransformSpec};
use srrw_core::StreamRng;

use crate::args::{ExactArgs, PolyArgs, SimulateArgs, TraceArgs, WalkArgs};
use crate::commands::{self, with_threads};
use crate::config::FileConfig;

pub const DEFAULT_SEED: u64 = 1729;

/// One verified claim.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub criterion: String,
    pub expected: Value,
    pub observed: Value,
    pub tolerance: Value,
    pub pass: bool,
}

fn check(criterion: impl Into<String>, expected: impl Into<Value>, observed: impl Into<Value>, tolerance: impl Into<Value>, pass: bool) -> Check {
    Check { criterion: criterion.into(), expected: expected.into(), observed: observed.into(), tolerance: tolerance.into(), pass }
}

pub struct Suite {
    pub name: &'static str,
    pub label: &'static str,
    /// Wall-clock budget in seconds, checked as its own criterion.
    pub budget: Option<f64>,
    run: fn(u64) -> Result<Vec<Check>>,
}

pub const SUITES: &[Suite] = &[
    Suite { name: "z2-sandwich", label: "C1", budget: Some(1.0), run: z2_sandwich },
    Suite { name: "oracle", label: "C2", budget: Some(30.0), run: oracle },
    Suite { name: "triangle", label: "C3", budget: Some(120.0), run: triangle },
    Suite { name: "lambda-bounds", label: "C4", budget: None, run: lambda_bounds },
    Suite { name: "decay", label: "C5", budget: None, run: decay },
    Suite { name: "isolated", label: "C6", budget: None, run: isolated },
    Suite { name: "lattice", label: "C7", budget: Some(1200.0), run: lattice },
    Suite { name: "tree", label: "C8", budget: None, run: tree },
    Suite { name: "evoset", label: "C9", budget: None, run: evoset },
    Suite { name: "psi-phi", label: "C10", budget: None, run: psi_phi },
    Suite { name: "class-function", label: "C11", budget: None, run: class_function },
    Suite { name: "determinism", label: "C12", budget: None, run: determinism },
    Suite { name: "lamplighter", label: "L", budget: None, run: lamplighter },
];

pub struct SuiteReport {
    pub name: &'static str,
    pub label: &'static str,
    pub rows: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

pub fn run_suite(suite: &Suite, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rows = (suite.run)(seed)?;
    let seconds = start.elapsed().as_secs_f64();
    if let Some(budget) = suite.budget {
        rows.push(check(format!("{} runtime (s)", suite.label), format!("< {budget}"), seconds, 0.0, seconds < budget));
    }
    Ok(SuiteReport { name: suite.name, label: suite.label, rows, seconds })
}

/// Runs the suite called `name`, or every suite for `all`.
pub fn run_named(name: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        return SUITES.iter().map(|s| run_suite(s, seed)).collect();
    }
    let suite = SUITES.iter().find(|s| s.name == name).ok_or_else(|| commands::unknown_suite(name))?;
    Ok(vec![run_suite(suite, seed)?])
}

fn grid(lo: u32, hi: u32) -> impl Iterator<Item = f64> {
    (lo..=hi).map(|i| i as f64 / 10.0)
}

fn uniform_config(spec: GroupSpec, alpha: f64) -> Result<SrrwConfig> {
    let mu = StepDistribution::uniform(&spec)?;
    Ok(SrrwConfig::new(spec, alpha, mu, TransformSpec::Identity)?)
}

fn lazy_law(spec: &GroupSpec) -> Result<DiscreteLaw> {
    Ok(StepDistribution::lazy(spec, 0.5)?.as_discrete().expect("lattice laws are discrete").clone())
}

fn fit_json(slope_ci: (f64, f64)) -> Value {
    json!({ "slope_ci95": [slope_ci.0, slope_ci.1] })
}

fn z2_sandwich(_seed: u64) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for alpha in grid(1, 9) {
        let table = lambda_table(alpha, 200)?;
        let (mut worst, mut violations) = (f64::INFINITY, 0);
        for n in 1..=100usize {
            let log_lambda = table.log_get(2 * n, n).expect("within table");
            let upper = n as f64 * alpha.ln();
            let lower = upper - 2.0 * (1.0 - alpha) * n as f64 / (3.0 + alpha);
            let slack = (upper - log_lambda).min(log_lambda - lower);
            worst = worst.min(slack);
            violations += (slack < -1e-12) as usize;
        }
        rows.push(check(
            format!("C1 alpha={alpha}: log-domain sandwich of lambda_(2n,n), n<=100"),
            "min slack >= 0",
            worst,
            1e-12,
            violations == 0,
        ));
    }
    Ok(rows)
}

fn oracle(_seed: u64) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for alpha in grid(1, 9) {
        let config = uniform_config(GroupSpec::Z2, alpha)?;
        let table = lambda_table(alpha, 8)?;
        for n in 1..=8 {
            let d = exact_distribution(&config, n)?;
            let gap = 2.0 * d.mass_at(&GroupElement::Z2(0)) - 1.0;
            let want = if n % 2 == 0 { table.get(n, n / 2).expect("within table") } else { 0.0 };
            worst = worst.max((gap - want).abs());
        }
    }
    rows.push(check("C2 Z2: 2P(S_n=0)-1 vs lambda_(n,n/2), n<=8", 0.0, worst, 1e-12, worst <= 1e-12));
    for l in 3..=5u32 {
        let mut worst = 0.0f64;
        for alpha in grid(0, 9) {
            let config = uniform_config(GroupSpec::cycle(l)?, alpha)?;
            for n in 1..=7 {
                let fourier = cycle_distribution(alpha, l, n)?;
                let exact = exact_distribution(&config, n)?;
                for (m, p) in fourier.iter().enumerate() {
                    worst = worst.max((exact.mass_at(&GroupElement::Cycle(m as u32)) - p).abs());
                }
            }
        }
        rows.push(check(format!("C2 Z_{l}: Fourier inversion vs oracle, n<=7"), 0.0, worst, 1e-10, worst <= 1e-10));
    }
    Ok(rows)
}

fn cluster_histogram(l: u32, alpha: f64, n: usize, trials: u64, seed: u64) -> Histogram {
    let law = if l == 2 { SignLaw::ZeroOne } else { SignLaw::PlusMinus };
    mc::run_trials(
        trials,
        seed,
        Histogram::default,
        || (),
        |h, _, rng| {
            let s = cluster_size_walk_with(alpha, n, rng, law).rem_euclid(l as i64) as u32;
            let x = if l == 2 { GroupElement::Z2(s as u8) } else { GroupElement::Cycle(s) };
            h.record(x.canonical_key());
            Ok::<_, std::convert::Infallible>(())
        },
        Histogram::merge,
    )
    .expect("infallible")
}

fn triangle(seed: u64) -> Result<Vec<Check>> {
    const TRIALS: u64 = 1_000_000;
    let (alpha, n) = (0.5, 6);
    let mut rows = Vec::new();
    for l in [2u32, 3] {
        let spec = if l == 2 { GroupSpec::Z2 } else { GroupSpec::cycle(l)? };
        let config = uniform_config(spec, alpha)?;
        let exact = exact_distribution(&config, n)?;
        let tag = l as u64 * 10;
        for (name, hist) in [
            ("direct sampler", mc_histogram(&config, n, TRIALS, derive_key(seed, tag), Route::Direct, 1.0)?),
            ("forest sampler", mc_histogram(&config, n, TRIALS, derive_key(seed, tag + 1), Route::Forest, 1.0)?),
            ("cluster-size walk", cluster_histogram(l, alpha, n, TRIALS, derive_key(seed, tag + 2))),
        ] {
            let tv = tv_distance(&hist, &exact);
            rows.push(check(format!("C3 Z_{l} n={n}: TV({name}, oracle), 1e6 trials"), "<= 0.005", tv, 0.005, tv <= 0.005));
        }
    }
    Ok(rows)
}

fn lambda_bounds(_seed: u64) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for alpha in grid(0, 10) {
        let table = lambda_table(alpha, 200)?;
        let (mut worst, mut violations, mut count) = (f64::INFINITY, 0usize, 0usize);
        for n in 1..=200 {
            for k in 0..=n / 2 {
                let rep = lambda_bounds_check(&table, n, k)?;
                worst = worst.min(rep.lower_slack.min(rep.upper_slack));
                violations += !rep.pass as usize;
                count += 1;
            }
        }
        rows.push(check(
            format!("C4 alpha={alpha}: lambda_(n,k) bounds, n<=200, all k ({count} entries)"),
            "0 violations",
            json!({ "violations": violations, "min_log_slack": worst }),
            "1e-12 relative, log domain",
            violations == 0,
        ));
    }
    Ok(rows)
}

fn decay(_seed: u64) -> Result<Vec<Check>> {
    let xs = commands::default_decay_points();
    let mut rows = Vec::new();
    for alpha in grid(1, 9) {
        let reports = decay_grid(alpha, 500, &xs)?;
        let violations = reports.iter().filter(|r| !r.pass).count();
        let worst = reports.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
        rows.push(check(
            format!("C5 alpha={alpha}: |R_n(x)| decay bound, x in +-0.1..0.9, n<=500"),
            "0 violations",
            json!({ "violations": violations, "min_slack": worst, "points": reports.len() }),
            0.0,
            violations == 0,
        ));
    }
    Ok(rows)
}

fn isolated(seed: u64) -> Result<Vec<Check>> {
    const TRIALS: u64 = 100_000;
    let mut rows = Vec::new();
    for (i, alpha) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        for rep in isolated_tail_check(alpha, &[50, 100, 200], TRIALS, derive_key(seed, i as u64)) {
            rows.push(check(
                format!("C6 alpha={alpha} n={}: P(I(n) <= {:.3}) vs tail bound", rep.n, rep.threshold),
                format!("<= {}", rep.bound),
                rep.empirical.mean,
                json!({ "sigmas": 3, "stderr": rep.empirical.stderr }),
                rep.pass,
            ));
        }
        let mut worst_z = 0.0f64;
        for n in 2..=10usize {
            let exact = exact_isolated_distribution(alpha, n)?;
            let mean: f64 = exact.iter().map(|(k, p)| *k as f64 * p).sum();
            let hist = isolated_histogram(alpha, n, TRIALS, derive_key(seed, 100 + n as u64 + 20 * i as u64));
            let (mut sum, mut sum_sq) = (0u128, 0u128);
            for (&k, &c) in &hist {
                sum += k as u128 * c as u128;
                sum_sq += (k * k) as u128 * c as u128;
            }
            let est = Estimate::from_integer_moments(sum, sum_sq, TRIALS, 1.0);
            let z = if est.stderr > 0.0 { (est.mean - mean).abs() / est.stderr } else { (est.mean - mean).abs() * f64::INFINITY };
            worst_z = worst_z.max(if z.is_nan() { 0.0 } else { z });
        }
        rows.push(check(
            format!("C6 alpha={alpha}: exact E I(n) vs Monte Carlo, 2<=n<=10"),
            "max |z| <= 3",
            worst_z,
            3.0,
            worst_z <= 3.0,
        ));
    }
    Ok(rows)
}

fn horizons_pow2() -> Vec<usize> {
    (6..=10).map(|k| 1usize << k).collect()
}

fn decay_points(ns: &[usize], curve: &[Estimate]) -> Vec<(f64, Estimate)> {
    ns.iter().map(|&n| n as f64).zip(curve.iter().copied()).collect()
}

fn lattice(seed: u64) -> Result<Vec<Check>> {
    let ns = horizons_pow2();
    let bands = [(-0.7, -0.3), (-1.3, -0.7), (-1.9, -1.1)];
    let mut rows = Vec::new();
    for (d, band) in (1..=3usize).zip(bands) {
        let spec = GroupSpec::Lattice(d);
        let mu = StepDistribution::lazy(&spec, 0.5)?;
        let config = SrrwConfig::new(spec.clone(), 0.5, mu, TransformSpec::Identity)?;
        let curve = mc_point_mass_curve(&config, &ns, &spec.identity(), 1_000_000, derive_key(seed, d as u64))?;
        let fit = rate_fit(&positive_points(&decay_points(&ns, &curve)), FitModel::PowerLaw)?;
        rows.push(check(
            format!("C7 Z^{d}: power-law slope of P(S_n=e), n=2^6..2^10, 1e6 trials"),
            json!([band.0, band.1]),
            fit.slope,
            fit_json(fit.slope_ci),
            fit.slope >= band.0 && fit.slope <= band.1,
        ));
    }
    Ok(rows)
}

fn tree(seed: u64) -> Result<Vec<Check>> {
    const TRIALS: u64 = 10_000_000;
    let ns: Vec<usize> = (1..=6).map(|k| 10 * k).collect();
    let mut rows = Vec::new();
    for (i, p) in [0.0, 0.3, 0.6].into_iter().enumerate() {
        let config = erw_config(3, p)?;
        let curve = mc_point_mass_curve(&config, &ns, &config.group.identity(), TRIALS, derive_key(seed, i as u64))?;
        let points = decay_points(&ns, &curve);
        let kept = positive_points(&points);
        for (n, e) in points.iter().filter(|(_, e)| e.hits == Some(0)) {
            rows.push(check(
                format!("C8 p={p} n={n}: no return in {TRIALS} trials"),
                "bound 3/trials",
                e.zero_hit_bound().unwrap_or(0.0),
                0.0,
                true,
            ));
        }
        let fit = rate_fit(&kept, FitModel::Exponential)?;
        rows.push(check(
            format!("C8 p={p}: exponential slope of P(S_n=e) on T_3, n=10..60"),
            "< 0, 95% CI excludes 0",
            fit.slope,
            fit_json(fit.slope_ci),
            fit.slope < 0.0 && fit.slope_ci.1 < 0.0,
        ));
        let escape = mc_escape_rate(&config, 1000, 20_000, derive_key(seed, 10 + i as u64))?;
        rows.push(check(
            format!("C8 p={p}: escape rate E d(e,S_n)/n at n=1000"),
            "> 0.05, 95% CI excludes 0",
            escape.mean,
            json!({ "ci95": [escape.ci95.0, escape.ci95.1] }),
            escape.mean > 0.05 && escape.excludes_zero(),
        ));
    }
    Ok(rows)
}

/// A uniformly random word of length `<= 4` in the standard generators.
fn random_element(spec: &GroupSpec, gens: &[GroupElement], rng: &mut StreamRng) -> Result<GroupElement> {
    let mut x = spec.identity();
    for _ in 0..rng.below(5) {
        x = spec.multiply(&x, &gens[rng.below(gens.len() as u64) as usize])?;
    }
    Ok(x)
}

fn random_instance(spec: &GroupSpec, rng: &mut StreamRng) -> Result<(ElementSet, Kernel)> {
    let gens = spec.generating_set()?;
    let mut w = ElementSet::new();
    for _ in 0..1 + rng.below(12) {
        w.insert(random_element(spec, &gens, rng)?);
    }
    let mut atoms: BTreeMap<GroupElement, f64> = BTreeMap::new();
    for _ in 0..1 + rng.below(6) {
        *atoms.entry(random_element(spec, &gens, rng)?).or_insert(0.0) += 0.05 + rng.next_f64();
    }
    let total: f64 = atoms.values().sum();
    let mut pairs: Vec<(GroupElement, f64)> = atoms.into_iter().map(|(x, v)| (x, v / total)).collect();
    let drift = 1.0 - pairs.iter().map(|p| p.1).sum::<f64>();
    pairs[0].1 += drift;
    Ok((w, Kernel::Mu(Arc::new(DiscreteLaw::new(spec, pairs)?))))
}

fn forest_sequence(l: u32, n: usize, alpha: f64, seed: u64) -> Result<KernelSeq> {
    let spec = GroupSpec::cycle(l)?;
    let mu = lazy_law(&spec)?;
    let config = SrrwConfig::new(spec.clone(), alpha, StepDistribution::Discrete(mu.clone()), TransformSpec::Identity)?;
    let forest = grow(n, alpha, derive_key(seed, 0))?;
    let walk = assign_and_assemble(&forest, &config, derive_key(seed, 1))?;
    Ok(kernel_seq_from_forest(&forest, &walk.steps, &spec, &mu)?)
}

fn evoset(seed: u64) -> Result<Vec<Check>> {
    let groups = [
        GroupSpec::Lattice(2),
        GroupSpec::cycle(12)?,
        GroupSpec::free_group(2)?,
        GroupSpec::S3xZ,
        GroupSpec::Lamplighter,
    ];
    let mut rng = StreamRng::new(derive_key(seed, 0));
    let (mut size_err, mut weight_err) = (0.0f64, 0.0f64);
    for i in 0..10_000 {
        let spec = &groups[i % groups.len()];
        let (w, kernel) = random_instance(spec, &mut rng)?;
        let pieces = threshold_pieces(spec, &w, &kernel);
        size_err = size_err.max((expected_size(&pieces) - w.len() as f64).abs());
        let total: f64 = pieces.iter().map(|p| p.length).sum();
        let doob: f64 = doob_weights(spec, &w, &kernel).iter().map(|p| p.0).sum();
        weight_err = weight_err.max((total - 1.0).abs()).max((doob - 1.0).abs());
    }
    let mut rows = vec![
        check("C9 martingale identity sum l_i|A_i| = |W|, 1e4 random instances", 0.0, size_err, 1e-12, size_err <= 1e-12),
        check("C9 piece lengths and Doob weights sum to 1, 1e4 random instances", 0.0, weight_err, 1e-12, weight_err <= 1e-12),
    ];

    // The first forest whose window holds at least two step-law kernels, so
    // the transition is genuinely random.
    let (k, l) = (0, 6);
    let seq = (1..)
        .map(|t| forest_sequence(5, l, 0.3, derive_key(seed, t)))
        .find(|s| s.as_ref().map_or(true, |s| s.kernels.iter().filter(|k| k.is_mu()).count() >= 2))
        .expect("unbounded search")?;
    let random_kernels = seq.kernels.iter().filter(|k| k.is_mu()).count();
    let exact = dense_composition(&seq, k, l)?;
    let x = GroupElement::Cycle(0);
    let mut worst_z = 0.0f64;
    for y in 0..5u32 {
        let est = transition_via_evolving_sets(&seq, &x, &GroupElement::Cycle(y), k, l, 100_000, derive_key(seed, 2 + y as u64))?;
        let p = exact[0][y as usize];
        let z = if est.stderr > 0.0 {
            (est.mean - p).abs() / est.stderr
        } else if (est.mean - p).abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        worst_z = worst_z.max(z);
    }
    rows.push(check(
        format!("C9 Z_5: P(y in W_l | W_k={{x}}) vs dense composition, 1e5 runs, {random_kernels} of {l} kernels random"),
        "max |z| <= 3",
        worst_z,
        3.0,
        worst_z <= 3.0,
    ));

    let (mut lemma_slack, mut member_err) = (f64::INFINITY, 0.0f64);
    for s in 0..10 {
        let seq = forest_sequence(5, 4, 0.4, derive_key(seed, 100 + s))?;
        let start = ElementSet::from([GroupElement::Cycle(0)]);
        for l in 0..=3 {
            let p = dense_composition(&seq, 0, l)?;
            let norm = p[0].iter().map(|v| v * v).sum::<f64>().sqrt();
            lemma_slack = lemma_slack.min(expected_sqrt_size(&seq, &start, 0, l)? - norm);
            let law = evolving_set_law(&seq, &start, 0, l)?;
            for y in 0..5 {
                let member: f64 = law.iter().filter(|(w, _)| w.contains(&GroupElement::Cycle(y))).map(|(_, q)| q).sum();
                member_err = member_err.max((member - p[0][y as usize]).abs());
            }
        }
    }
    rows.push(check("C9 Z_5: sqrt(sum_y P^2) <= E sqrt|W_l| by enumeration, l<=3", ">= 0", lemma_slack, 1e-12, lemma_slack >= -1e-12));
    rows.push(check("C9 Z_5: enumerated membership law equals composition, l<=3", 0.0, member_err, 1e-12, member_err <= 1e-12));
    Ok(rows)
}

fn psi_phi(_seed: u64) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for l in [8u32, 12] {
        let spec = GroupSpec::cycle(l)?;
        let mu = lazy_law(&spec)?;
        let mu0 = mu.mass_of(&spec.identity());
        let (mut worst, mut violations, mut complete) = (f64::INFINITY, 0usize, true);
        for row in iso_profile_table(&spec, &mu, 6, SearchScope::Exhaustive)? {
            complete &= row.status == ProfileStatus::Complete;
            let rhs = mu0 * mu0 * row.phi * row.phi / (2.0 * (1.0 - mu0).powi(2));
            worst = worst.min(row.psi - rhs);
            violations += (row.psi < rhs) as usize;
        }
        rows.push(check(
            format!("C10 Z_{l} lazy: psi(r) >= mu0^2 Phi(r)^2 / (2(1-mu0)^2), r<=6, all subsets"),
            "0 violations",
            json!({ "violations": violations, "min_slack": worst, "complete": complete }),
            0.0,
            violations == 0 && complete,
        ));
    }
    Ok(rows)
}

fn class_function(seed: u64) -> Result<Vec<Check>> {
    let ns = horizons_pow2();
    let (fit, _) = class_function_decay(0.5, &ns, 1_000_000, derive_key(seed, 0))?;
    Ok(vec![check(
        "C11 S3 x Z, alpha=0.5: power-law slope of P(S_n=e), n=2^6..2^10",
        json!([-0.7, -0.3]),
        fit.slope,
        fit_json(fit.slope_ci),
        (-0.7..=-0.3).contains(&fit.slope),
    )])
}

type Artifact = Box<dyn Fn() -> Result<String> + Sync>;

fn walk(group: &str, alpha: f64, mu: &str) -> WalkArgs {
    WalkArgs { group: Some(group.into()), alpha: Some(alpha), mu: Some(mu.into()), transform: None }
}

fn determinism(seed: u64) -> Result<Vec<Check>> {
    let artifacts: Vec<(&str, Artifact)> = vec![
        (
            "simulate zd:2 point mass",
            Box::new(move || {
                let a = SimulateArgs { walk: walk("zd:2", 0.5, "lazy"), n: vec![16, 64], trials: Some(20_000), seed: Some(seed), ..Default::default() };
                Ok(commands::simulate(&a, &FileConfig::default())?.1)
            }),
        ),
        (
            "simulate cycle:3 forest route",
            Box::new(move || {
                let a = SimulateArgs {
                    walk: walk("cycle:3", 0.5, "uniform"),
                    n: vec![6, 12],
                    trials: Some(20_000),
                    seed: Some(seed),
                    route: Some("forest".into()),
                    ..Default::default()
                };
                Ok(commands::simulate(&a, &FileConfig::default())?.1)
            }),
        ),
        (
            "simulate zd:3 ball",
            Box::new(move || {
                let a = SimulateArgs { walk: walk("zd:3", 0.3, "uniform"), n: vec![10, 40], trials: Some(10_000), seed: Some(seed), ball_r: Some(3.0), ..Default::default() };
                Ok(commands::simulate(&a, &FileConfig::default())?.1)
            }),
        ),
        (
            "exact free:2",
            Box::new(|| {
                let a = ExactArgs { walk: walk("free:2", 0.6, "uniform"), n: Some(5), enumeration: Some("tree".into()), ..Default::default() };
                commands::exact(&a, &FileConfig::default())
            }),
        ),
        (
            "evoset trace cycle:12",
            Box::new(move || {
                let a = TraceArgs { walk: walk("cycle:12", 0.4, "lazy"), n: Some(40), seed: Some(seed), ..Default::default() };
                commands::evoset_trace(&a, &FileConfig::default())
            }),
        ),
        (
            "poly decay",
            Box::new(|| {
                let a = PolyArgs { alpha: Some(0.5), nmax: Some(60), ..Default::default() };
                Ok(commands::poly_decay(&a, &FileConfig::default())?.0)
            }),
        ),
    ];
    let mut rows = Vec::new();
    for (name, make) in &artifacts {
        let one = with_threads(Some(1), make)??;
        let three = with_threads(Some(3), make)??;
        rows.push(check(
            format!("C12 {name}: CSV at 1 thread vs 3 threads"),
            "byte-identical",
            json!({ "bytes": one.len(), "identical": one == three }),
            0,
            one == three,
        ));
    }
    Ok(rows)
}

fn lamplighter(seed: u64) -> Result<Vec<Check>> {
    let ns: Vec<usize> = (3..=7).map(|k| 1usize << k).collect();
    let config = uniform_config(GroupSpec::Lamplighter, 0.5)?;
    let curve = mc_point_mass_curve(&config, &ns, &config.group.identity(), 1_000_000, derive_key(seed, 0))?;
    let monotone = curve.windows(2).all(|w| w[1].mean < w[0].mean);
    let logs: Vec<f64> = curve.iter().map(|e| e.mean.ln()).collect();
    let fit = rate_fit(&positive_points(&decay_points(&ns, &curve)), FitModel::StretchedExp)?;
    Ok(vec![
        check("L lamplighter: P(S_n=e) strictly decreasing over n=8..128", "monotone", json!(logs), 0.0, monotone),
        check(
            "L lamplighter: slope of log P(S_n=e) against n^(1/3)",
            "< 0, 95% CI excludes 0",
            fit.slope,
            fit_json(fit.slope_ci),
            fit.slope < 0.0 && fit.slope_ci.1 < 0.0,
        ),
    ])
}
