//! Exact laws of `S_n` for small `n`, by enumerating every step sequence with
//! its probability.
//!
//! The tree route walks all histories depth first and asks the sampler for the
//! exact conditional law of each next step, so it covers every transform kind,
//! including history-dependent ones. When the transform ignores the history,
//! the next-step law depends only on how often each alphabet letter has been
//! used, and the counts route merges histories with equal counts and equal
//! position.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::estimators::Histogram;
use crate::groups::{CanonicalKey, GroupElement};
use crate::sampler::{Sampler, SamplerError, SrrwConfig};
use crate::stats::NeumaierSum;

/// Default horizon cap.
pub const DEFAULT_CAP: usize = 8;

/// Horizon cap of the rational mode.
pub const RATIONAL_CAP: usize = 6;

/// Upper limit on visited histories or states.
pub const MAX_STATES: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("horizon {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("enumeration would visit more than {0} states")]
    StateExplosion(u64),
    #[error("exact laws need a discrete step law")]
    NotDiscrete,
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("alpha = {0} is outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("the counts route needs a transform that ignores the history")]
    RouteUnavailable,
}

/// How the oracle enumerates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Enumeration {
    /// Counts when the transform ignores the history, tree otherwise.
    #[default]
    Auto,
    Tree,
    Counts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub cap: usize,
    pub enumeration: Enumeration,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP, enumeration: Enumeration::Auto }
    }
}

/// The law of `S_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution {
    pub n: usize,
    /// Positive masses keyed by position.
    pub mass: BTreeMap<CanonicalKey, f64>,
    /// Histories (tree route) or state transitions (counts route) visited.
    pub enumeration_count: u64,
}

impl ExactDistribution {
    pub fn get(&self, key: &CanonicalKey) -> f64 {
        self.mass.get(key).copied().unwrap_or(0.0)
    }

    pub fn mass_at(&self, x: &GroupElement) -> f64 {
        self.get(&x.canonical_key())
    }

    pub fn total(&self) -> f64 {
        let mut s = NeumaierSum::default();
        self.mass.values().for_each(|p| s.add(*p));
        s.value()
    }

    pub fn max_mass(&self) -> f64 {
        self.mass.values().copied().fold(0.0, f64::max)
    }
}

type Acc = BTreeMap<GroupElement, NeumaierSum>;

fn merge_acc(into: &mut Acc, other: Acc) {
    for (k, v) in other {
        into.entry(k).or_default().merge(&v);
    }
}

fn finish(n: usize, acc: Acc, enumeration_count: u64) -> ExactDistribution {
    let mass = acc
        .into_iter()
        .map(|(x, s)| (x.canonical_key(), s.value()))
        .filter(|(_, p)| *p > 0.0)
        .collect();
    ExactDistribution { n, mass, enumeration_count }
}

/// Maps `f` over `items`, in parallel when the feature is on. Output order
/// follows input order.
fn map_branches<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

fn compile(config: &SrrwConfig, n: usize, cap: usize) -> Result<Sampler, OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroHorizon);
    }
    if n > cap {
        return Err(OracleError::CapExceeded { n, cap });
    }
    let sampler = Sampler::new(config)?;
    if !sampler.is_discrete() {
        return Err(OracleError::NotDiscrete);
    }
    Ok(sampler)
}

/// Exact law of `S_n` with the default options.
pub fn exact_distribution(config: &SrrwConfig, n: usize) -> Result<ExactDistribution, OracleError> {
    exact_distribution_with(config, n, &OracleOptions::default())
}

pub fn exact_distribution_with(config: &SrrwConfig, n: usize, options: &OracleOptions) -> Result<ExactDistribution, OracleError> {
    let sampler = compile(config, n, options.cap)?;
    match options.enumeration {
        Enumeration::Tree => tree_route(&sampler, n),
        Enumeration::Counts if !sampler.is_static() => Err(OracleError::RouteUnavailable),
        Enumeration::Counts => counts_route(&sampler, n),
        Enumeration::Auto if sampler.is_static() => counts_route(&sampler, n),
        Enumeration::Auto => tree_route(&sampler, n),
    }
}

struct Tree<'a> {
    sampler: &'a Sampler,
    n: usize,
}

impl Tree<'_> {
    fn descend(&self, hist: &mut Vec<u32>, pos: &GroupElement, prob: f64, acc: &mut Acc, count: &mut u64) -> Result<(), OracleError> {
        if hist.len() == self.n {
            *count += 1;
            if *count > MAX_STATES {
                return Err(OracleError::StateExplosion(MAX_STATES));
            }
            acc.entry(pos.clone()).or_default().add(prob);
            return Ok(());
        }
        let spec = &self.sampler.config().group;
        for (i, w) in self.sampler.next_step_law_indices(hist)? {
            let mut next = pos.clone();
            spec.mul_right(&mut next, &self.sampler.alphabet()[i as usize]);
            hist.push(i);
            let r = self.descend(hist, &next, prob * w, acc, count);
            hist.pop();
            r?;
        }
        Ok(())
    }
}

fn tree_route(sampler: &Sampler, n: usize) -> Result<ExactDistribution, OracleError> {
    let tree = Tree { sampler, n };
    let spec = &sampler.config().group;
    let first = sampler.next_step_law_indices(&[])?;
    let parts = map_branches(&first, |&(i, w)| -> Result<(Acc, u64), OracleError> {
        let mut acc = Acc::new();
        let mut count = 0;
        let mut pos = spec.identity();
        spec.mul_right(&mut pos, &sampler.alphabet()[i as usize]);
        tree.descend(&mut vec![i], &pos, w, &mut acc, &mut count)?;
        Ok((acc, count))
    });
    let mut acc = Acc::new();
    let mut total = 0u64;
    for part in parts {
        let (a, c) = part?;
        merge_acc(&mut acc, a);
        total += c;
        if total > MAX_STATES {
            return Err(OracleError::StateExplosion(MAX_STATES));
        }
    }
    Ok(finish(n, acc, total))
}

fn counts_route(sampler: &Sampler, n: usize) -> Result<ExactDistribution, OracleError> {
    let spec = &sampler.config().group;
    let k = sampler.alphabet().len();
    let mut level: BTreeMap<(Vec<u16>, GroupElement), NeumaierSum> = BTreeMap::new();
    let mut start = NeumaierSum::default();
    start.add(1.0);
    level.insert((vec![0; k], spec.identity()), start);
    let mut visited = 0u64;
    let mut hist = Vec::with_capacity(n);
    for _ in 0..n {
        let mut next: BTreeMap<(Vec<u16>, GroupElement), NeumaierSum> = BTreeMap::new();
        for ((counts, pos), p) in &level {
            hist.clear();
            for (i, &c) in counts.iter().enumerate() {
                hist.extend(std::iter::repeat_n(i as u32, c as usize));
            }
            let p = p.value();
            for (i, w) in sampler.next_step_law_indices(&hist)? {
                visited += 1;
                if visited > MAX_STATES {
                    return Err(OracleError::StateExplosion(MAX_STATES));
                }
                let mut c = counts.clone();
                c[i as usize] += 1;
                let mut q = pos.clone();
                spec.mul_right(&mut q, &sampler.alphabet()[i as usize]);
                next.entry((c, q)).or_default().add(p * w);
            }
        }
        level = next;
    }
    let mut acc = Acc::new();
    for ((_, pos), p) in level {
        acc.entry(pos).or_default().merge(&p);
    }
    Ok(finish(n, acc, visited))
}

/// The law of `S_n` in exact rational arithmetic. Every parameter (α and the
/// `mu` and transform weights) enters as the exact value of its double, so the
/// result certifies the rounding of the floating-point routes.
pub fn exact_distribution_rational(config: &SrrwConfig, n: usize) -> Result<BTreeMap<CanonicalKey, BigRational>, OracleError> {
    let sampler = compile(config, n, RATIONAL_CAP)?;
    let rat = |x: f64| BigRational::from_float(x).expect("finite weight");
    let alpha = rat(config.alpha);
    let spec = &config.group;
    let mut acc: BTreeMap<GroupElement, BigRational> = BTreeMap::new();
    let mut stack: Vec<(Vec<u32>, GroupElement, BigRational)> = vec![(Vec::new(), spec.identity(), BigRational::one())];
    let mut visited = 0u64;
    while let Some((hist, pos, prob)) = stack.pop() {
        if hist.len() == n {
            visited += 1;
            if visited > MAX_STATES {
                return Err(OracleError::StateExplosion(MAX_STATES));
            }
            *acc.entry(pos).or_insert_with(BigRational::zero) += prob;
            continue;
        }
        let terms = sampler.step_law_terms(&hist)?;
        let mut law: BTreeMap<u32, BigRational> = BTreeMap::new();
        let fresh_scale = if hist.is_empty() { BigRational::one() } else { BigRational::one() - &alpha };
        for &(i, w) in &terms.fresh {
            *law.entry(i).or_insert_with(BigRational::zero) += &fresh_scale * rat(w);
        }
        if !hist.is_empty() {
            let each = &alpha / BigRational::from_integer(BigInt::from(hist.len()));
            for images in &terms.images {
                for &(i, w) in images {
                    *law.entry(i).or_insert_with(BigRational::zero) += &each * rat(w);
                }
            }
        }
        for (i, w) in law {
            if w.is_zero() {
                continue;
            }
            let mut q = pos.clone();
            spec.mul_right(&mut q, &sampler.alphabet()[i as usize]);
            let mut h = hist.clone();
            h.push(i);
            stack.push((h, q, &prob * w));
        }
    }
    Ok(acc.into_iter().filter(|(_, p)| !p.is_zero()).map(|(x, p)| (x.canonical_key(), p)).collect())
}

/// Rational masses as doubles.
pub fn rational_to_f64(mass: &BTreeMap<CanonicalKey, BigRational>) -> BTreeMap<CanonicalKey, f64> {
    mass.iter().map(|(k, p)| (k.clone(), p.to_f64().unwrap_or(f64::NAN))).collect()
}

/// Law of the isolated-vertex count `I(n)` of the percolated recursive tree.
///
/// Vertex `j` has a retained edge with probability `α`, and then it attaches to
/// a uniform earlier vertex, which stops being isolated if it was; otherwise `j`
/// starts a new isolated root.
pub fn exact_isolated_distribution(alpha: f64, n: usize) -> Result<BTreeMap<usize, f64>, OracleError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(OracleError::InvalidAlpha(alpha));
    }
    if n == 0 {
        return Err(OracleError::ZeroHorizon);
    }
    let mut law = vec![0.0, 1.0];
    for j in 2..=n {
        let earlier = (j - 1) as f64;
        let mut next = vec![0.0; j + 1];
        for (i, &p) in law.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let hit = i as f64 / earlier;
            next[i + 1] += p * (1.0 - alpha);
            next[i] += p * alpha * (1.0 - hit);
            if i > 0 {
                next[i - 1] += p * alpha * hit;
            }
        }
        law = next;
    }
    Ok(law.into_iter().enumerate().filter(|(_, p)| *p > 0.0).collect())
}

/// Total variation distance `½ Σ |p̂ - p|` over the union of keys.
pub fn tv_distance(empirical: &Histogram, exact: &ExactDistribution) -> f64 {
    let total = empirical.total.max(1) as f64;
    let mut s = NeumaierSum::default();
    for (k, &c) in &empirical.counts {
        s.add((c as f64 / total - exact.get(k)).abs());
    }
    for (k, p) in &exact.mass {
        if !empirical.counts.contains_key(k) {
            s.add(*p);
        }
    }
    s.value() / 2.0
}
