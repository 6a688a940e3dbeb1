//! Monte Carlo estimators and decay-rate fits.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::forest::PercolatedForest;
use crate::groups::{word_distance, CanonicalKey, GroupElement, GroupError, GroupSpec, StepDistribution};
use crate::mc;
use crate::rng::StreamRng;
use crate::sampler::{Sampler, SamplerError, SrrwConfig, TransformSpec};
use crate::stats::{weighted_line_fit, wilson_interval, Z95};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("a rate fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("estimate at n = {n} is {value}, not positive")]
    NonPositive { n: f64, value: f64 },
    #[error("{0}")]
    NotApplicable(String),
}

/// A Monte Carlo point estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub trials: u64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    /// Success count for proportions.
    pub hits: Option<u64>,
}

impl Estimate {
    /// `k` successes in `n` trials. The interval is the normal one unless
    /// fewer than 10 successes or failures were seen, where Wilson is used.
    pub fn proportion(k: u64, n: u64) -> Self {
        if n == 0 {
            return Self { mean: 0.0, trials: 0, stderr: 0.0, ci95: (0.0, 1.0), hits: Some(0) };
        }
        let p = k as f64 / n as f64;
        let stderr = (p * (1.0 - p) / n as f64).sqrt();
        let ci95 = if k.min(n - k) < 10 {
            wilson_interval(k, n, Z95)
        } else {
            ((p - Z95 * stderr).max(0.0), (p + Z95 * stderr).min(1.0))
        };
        Self { mean: p, trials: n, stderr, ci95, hits: Some(k) }
    }

    /// Sample mean of `value / scale` from exact integer moments.
    pub fn from_integer_moments(sum: u128, sum_sq: u128, n: u64, scale: f64) -> Self {
        let nf = n as f64;
        let mean = sum as f64 / nf;
        // n * sum_sq - sum^2 is computed exactly before any rounding.
        let centred = (n as u128 * sum_sq).saturating_sub(sum * sum);
        let var = if n > 1 { centred as f64 / (nf * (nf - 1.0)) } else { 0.0 };
        let stderr = (var / nf).sqrt() / scale;
        let mean = mean / scale;
        Self { mean, trials: n, stderr, ci95: (mean - Z95 * stderr, mean + Z95 * stderr), hits: None }
    }

    /// A value known without sampling error.
    pub fn exact(value: f64) -> Self {
        Self { mean: value, trials: 0, stderr: 0.0, ci95: (value, value), hits: None }
    }

    /// Whether the 95% interval excludes zero.
    pub fn excludes_zero(&self) -> bool {
        self.ci95.0 > 0.0 || self.ci95.1 < 0.0
    }

    /// `3 / trials` when no success was seen; the usual 95% upper bound.
    pub fn zero_hit_bound(&self) -> Option<f64> {
        (self.hits == Some(0) && self.trials > 0).then(|| 3.0 / self.trials as f64)
    }
}

/// Rate model for [`rate_fit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitModel {
    /// `log p` against `log n`.
    PowerLaw,
    /// `log p` against `n`.
    Exponential,
    /// `log p` against `n^(1/3)`.
    StretchedExp,
}

impl FitModel {
    fn abscissa(&self, n: f64) -> f64 {
        match self {
            FitModel::PowerLaw => n.ln(),
            FitModel::Exponential => n,
            FitModel::StretchedExp => n.cbrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    /// Weighted residual sum of squares.
    pub residual: f64,
    pub slope_ci: (f64, f64),
    pub points: usize,
}

impl DecayFit {
    pub fn slope_excludes_zero(&self) -> bool {
        self.slope_ci.0 > 0.0 || self.slope_ci.1 < 0.0
    }
}

/// Weighted least squares of `log p` on the model abscissa.
///
/// Weights are `(p / stderr)^2`, the inverse delta-method variance of `log p`;
/// when any point has zero stderr all weights are 1. The slope interval is
/// `1.96 se` inflated by `sqrt(chi2 / (k - 2))` when that exceeds one.
pub fn rate_fit(points: &[(f64, Estimate)], model: FitModel) -> Result<DecayFit, EstimateError> {
    if points.len() < 4 {
        return Err(EstimateError::TooFewPoints(points.len()));
    }
    if let Some((n, e)) = points.iter().find(|(_, e)| !(e.mean > 0.0)) {
        return Err(EstimateError::NonPositive { n: *n, value: e.mean });
    }
    let x: Vec<f64> = points.iter().map(|(n, _)| model.abscissa(*n)).collect();
    let y: Vec<f64> = points.iter().map(|(_, e)| e.mean.ln()).collect();
    let w: Vec<f64> = if points.iter().any(|(_, e)| e.stderr == 0.0) {
        vec![1.0; points.len()]
    } else {
        points.iter().map(|(_, e)| (e.mean / e.stderr).powi(2)).collect()
    };
    let fit = weighted_line_fit(&x, &y, &w);
    let dof = (points.len() - 2) as f64;
    let inflate = (fit.chi2 / dof).max(1.0).sqrt();
    let half = Z95 * fit.slope_se * inflate;
    Ok(DecayFit {
        model,
        slope: fit.slope,
        intercept: fit.intercept,
        residual: fit.chi2,
        slope_ci: (fit.slope - half, fit.slope + half),
        points: points.len(),
    })
}

/// Keeps the points whose interval excludes zero, as required by [`rate_fit`].
pub fn positive_points(points: &[(f64, Estimate)]) -> Vec<(f64, Estimate)> {
    points.iter().copied().filter(|(_, e)| e.mean > 0.0 && e.excludes_zero()).collect()
}

/// Empirical law of `S_n` over canonical keys.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    pub counts: BTreeMap<CanonicalKey, u64>,
    pub total: u64,
}

impl Histogram {
    pub fn record(&mut self, key: CanonicalKey) {
        *self.counts.entry(key).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: Histogram) {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
    }

    pub fn frequency(&self, key: &CanonicalKey) -> f64 {
        self.counts.get(key).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }
}

/// How the walk is generated in Monte Carlo runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Sequential sampling of `xi_j`, `u_j` and values.
    Direct,
    /// Grow the forest first, then assign values along it.
    Forest,
}

fn validate_checkpoints(ns: &[usize]) -> Result<(), EstimateError> {
    if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EstimateError::NotApplicable("horizons must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Counts, for each horizon in `ns`, the trials whose position satisfies
/// `hit`. One walk of length `max(ns)` serves every horizon, since a prefix
/// of the walk is itself a walk of that length.
pub fn mc_curve_counts(
    config: &SrrwConfig,
    ns: &[usize],
    trials: u64,
    seed: u64,
    hit: impl Fn(usize, &GroupElement) -> bool + Sync,
) -> Result<Vec<u64>, EstimateError> {
    validate_checkpoints(ns)?;
    let sampler = Sampler::new(config)?;
    let counts = mc::run_trials(
        trials,
        seed,
        || vec![0u64; ns.len()],
        || sampler.scratch(),
        |acc, scratch, rng| {
            sampler.run_checkpoints(ns, rng, scratch, |i, s| {
                if hit(i, s) {
                    acc[i] += 1;
                }
            })
        },
        |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
    )?;
    Ok(counts)
}

/// `P(S_n = target)` for a single horizon.
pub fn mc_point_mass(config: &SrrwConfig, n: usize, target: &GroupElement, trials: u64, seed: u64) -> Result<Estimate, EstimateError> {
    Ok(mc_point_mass_curve(config, &[n], target, trials, seed)?[0])
}

/// `P(S_n = target)` for every `n` in `ns`, from shared trajectories.
pub fn mc_point_mass_curve(
    config: &SrrwConfig,
    ns: &[usize],
    target: &GroupElement,
    trials: u64,
    seed: u64,
) -> Result<Vec<Estimate>, EstimateError> {
    if !config.group.is_discrete() {
        return Err(EstimateError::NotApplicable("point masses on a continuous group".into()));
    }
    config.group.check(target)?;
    let counts = mc_curve_counts(config, ns, trials, seed, |_, s| s == target)?;
    Ok(counts.into_iter().map(|k| Estimate::proportion(k, trials)).collect())
}

fn euclidean_norm(x: &GroupElement) -> Option<f64> {
    match x {
        GroupElement::Lattice(v) => Some(v.iter().map(|a| (*a as f64).powi(2)).sum::<f64>().sqrt()),
        GroupElement::Real(v) => Some(v.iter().map(|a| a * a).sum::<f64>().sqrt()),
        _ => None,
    }
}

/// `P(|S_n| < r)` on `Z^d` or `R^d`.
pub fn mc_ball(config: &SrrwConfig, n: usize, r: f64, trials: u64, seed: u64) -> Result<Estimate, EstimateError> {
    Ok(mc_ball_curve(config, &[n], r, trials, seed)?[0])
}

pub fn mc_ball_curve(config: &SrrwConfig, ns: &[usize], r: f64, trials: u64, seed: u64) -> Result<Vec<Estimate>, EstimateError> {
    if !matches!(config.group, GroupSpec::Lattice(_) | GroupSpec::Euclidean(_)) {
        return Err(EstimateError::NotApplicable(format!("ball probabilities on {}", config.group)));
    }
    let counts = mc_curve_counts(config, ns, trials, seed, |_, s| euclidean_norm(s).is_some_and(|d| d < r))?;
    Ok(counts.into_iter().map(|k| Estimate::proportion(k, trials)).collect())
}

/// Empirical law of `S_n`. Real vectors are binned with width `bin_width`.
pub fn mc_histogram(config: &SrrwConfig, n: usize, trials: u64, seed: u64, route: Route, bin_width: f64) -> Result<Histogram, EstimateError> {
    let sampler = Sampler::new(config)?;
    let alpha = config.alpha;
    let hist = mc::run_trials(
        trials,
        seed,
        Histogram::default,
        || sampler.scratch(),
        |acc, scratch, rng| {
            let s = match route {
                Route::Direct => sampler.final_position(n, rng, scratch)?,
                Route::Forest => {
                    let forest = PercolatedForest::grow_with(n, alpha, rng)
                        .map_err(|e| SamplerError::Unsupported(e.to_string()))?;
                    sampler.assemble(forest.flags(), forest.parents(), rng)?.last_position().clone()
                }
            };
            acc.record(s.canonical_key_binned(bin_width));
            Ok::<_, SamplerError>(())
        },
        Histogram::merge,
    )?;
    Ok(hist)
}

/// Largest empirical bin frequency of `S_n`. This plug-in estimate is biased
/// upwards; decay checks use [`mc_point_mass`] at the identity instead.
pub fn mc_max_mass(config: &SrrwConfig, n: usize, trials: u64, seed: u64) -> Result<Estimate, EstimateError> {
    if !config.group.is_discrete() {
        return Err(EstimateError::NotApplicable("point masses on a continuous group".into()));
    }
    let hist = mc_histogram(config, n, trials, seed, Route::Direct, 1.0)?;
    Ok(Estimate::proportion(hist.max_count(), trials))
}

/// `E d(e, S_n) / n` for the word metric of the standard generators.
pub fn mc_escape_rate(config: &SrrwConfig, n: usize, trials: u64, seed: u64) -> Result<Estimate, EstimateError> {
    if !config.group.is_discrete() {
        return Err(EstimateError::NotApplicable("word distance on a continuous group".into()));
    }
    let sampler = Sampler::new(config)?;
    let spec = &config.group;
    let (sum, sum_sq) = mc::run_trials(
        trials,
        seed,
        || (0u128, 0u128),
        || sampler.scratch(),
        |acc, scratch, rng| {
            let s = sampler.final_position(n, rng, scratch)?;
            let d = word_distance(spec, &s).map_err(EstimateError::from)? as u128;
            acc.0 += d;
            acc.1 += d * d;
            Ok::<_, EstimateError>(())
        },
        |a, b| {
            a.0 += b.0;
            a.1 += b.1;
        },
    )?;
    Ok(Estimate::from_integer_moments(sum, sum_sq, trials, n as f64))
}

/// One horizon of [`isolated_tail_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct TailReport {
    pub n: usize,
    /// `(1 - alpha) n / 8`.
    pub threshold: f64,
    /// `P(I(n) <= threshold)`.
    pub empirical: Estimate,
    /// `5 exp(-3 (1 - alpha) n / 280)`.
    pub bound: f64,
    pub pass: bool,
}

pub fn isolated_tail_bound(alpha: f64, n: usize) -> f64 {
    5.0 * (-3.0 * (1.0 - alpha) * n as f64 / 280.0).exp()
}

/// Empirical lower tail of the isolated-vertex count against the
/// concentration bound; a horizon passes when the estimate is at most the
/// bound plus three standard errors.
pub fn isolated_tail_check(alpha: f64, ns: &[usize], trials: u64, seed: u64) -> Vec<TailReport> {
    ns.iter()
        .enumerate()
        .map(|(i, &n)| {
            let threshold = (1.0 - alpha) * n as f64 / 8.0;
            let hits = mc::count_hits(trials, crate::rng::derive_key(seed, i as u64), || (), |_, rng| {
                let f = PercolatedForest::grow_with(n, alpha, rng)?;
                Ok::<_, crate::forest::ForestError>(f.isolated_count() as f64 <= threshold)
            })
            .expect("n >= 1");
            let empirical = Estimate::proportion(hits, trials);
            let bound = isolated_tail_bound(alpha, n);
            TailReport { n, threshold, empirical, bound, pass: empirical.mean <= bound + 3.0 * empirical.stderr }
        })
        .collect()
}

/// Counts of `I(n)` values over `trials` forests.
pub fn isolated_histogram(alpha: f64, n: usize, trials: u64, seed: u64) -> BTreeMap<usize, u64> {
    mc::run_trials(
        trials,
        seed,
        BTreeMap::new,
        || (),
        |acc: &mut BTreeMap<usize, u64>, _, rng: &mut StreamRng| {
            let f = PercolatedForest::grow_with(n.max(1), alpha, rng)?;
            *acc.entry(f.isolated_count()).or_insert(0) += 1;
            Ok::<_, crate::forest::ForestError>(())
        },
        |a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
        },
    )
    .expect("n >= 1")
}

/// The `S3 x Z` walk with `mu` uniform on the transpositions and `(Id, ±1)`.
pub fn class_function_config(alpha: f64) -> Result<SrrwConfig, EstimateError> {
    let group = GroupSpec::S3xZ;
    let mu = StepDistribution::uniform(&group)?;
    Ok(SrrwConfig::new(group, alpha, mu, TransformSpec::Identity)?)
}

/// Power-law fit of `P(S_n = e)` for the class-function example.
pub fn class_function_decay(alpha: f64, ns: &[usize], trials: u64, seed: u64) -> Result<(DecayFit, Vec<Estimate>), EstimateError> {
    let config = class_function_config(alpha)?;
    let e = config.group.identity();
    let curve = mc_point_mass_curve(&config, ns, &e, trials, seed)?;
    let points: Vec<(f64, Estimate)> = ns.iter().map(|&n| n as f64).zip(curve.iter().copied()).collect();
    Ok((rate_fit(&positive_points(&points), FitModel::PowerLaw)?, curve))
}
