//! Direct sampling of generalized step-reinforced random walks.
//!
//! Step `j >= 2` flips `xi_j ~ Bernoulli(alpha)` and picks `u_j` uniformly in
//! `1..j`. With `xi_j = 1` the step is `T_j(X_{u_j})`, otherwise a fresh
//! `mu` draw. Discrete walks are run over a finite step alphabet (the `mu`
//! support closed under the transform's maps) so that the history is a list
//! of small integers; continuous walks on `R^d` keep coordinates directly.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::groups::{ContinuousFamily, DiscreteLaw, GroupElement, GroupError, GroupSpec, StepDistribution};
use crate::rng::StreamRng;

/// Upper bound on the closed step alphabet.
pub const MAX_ALPHABET: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("alpha = {0} is outside [0, 1)")]
    InvalidAlpha(f64),
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("history-dependent transform broke its contract at step {step}: {reason}")]
    TransformContract { step: usize, reason: String },
    #[error("step alphabet exceeds {MAX_ALPHABET} elements")]
    AlphabetTooLarge,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Read-only view of `X_1, ..., X_{n-1}` handed to history-dependent transforms.
#[derive(Clone, Copy)]
pub struct HistoryView<'a> {
    alphabet: &'a [GroupElement],
    steps: &'a [u32],
}

impl<'a> HistoryView<'a> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `X_j`, 1-based.
    pub fn step(&self, j: usize) -> &'a GroupElement {
        &self.alphabet[self.steps[j - 1] as usize]
    }

    /// Alphabet index of `X_j`, 1-based.
    pub fn step_index(&self, j: usize) -> u32 {
        self.steps[j - 1]
    }

    pub fn alphabet(&self) -> &'a [GroupElement] {
        self.alphabet
    }
}

/// A transformation law that may depend on the past.
///
/// The alphabet must contain the `mu` support and be closed under every map
/// returned by [`HistoryTransform::maps`]. A map is a vector `m` with
/// `T(alphabet[i]) = alphabet[m[i]]`.
pub trait HistoryTransform: Send + Sync + fmt::Debug {
    fn alphabet(&self) -> Vec<GroupElement>;

    /// Law of `T_step` as `(map, weight)` pairs given `X_1, ..., X_{step-1}`.
    fn maps(&self, step: usize, history: HistoryView<'_>) -> Vec<(Vec<u32>, f64)>;
}

/// Matrix acting on column vectors, row-major.
pub type Matrix = Vec<Vec<f64>>;

/// The law of the transformations `T_n`.
#[derive(Clone, Debug)]
pub enum TransformSpec {
    Identity,
    /// `x -> x^-1`.
    Negation,
    /// Identity with probability `q`, inversion otherwise, independently per step.
    IidSign(f64),
    /// `x -> A x` with `A` drawn from a finite law; `Z^d` and `R^d` only.
    EchoLinear(Vec<(Matrix, f64)>),
    /// Cyclic shift of the ordered `mu` support by a uniform amount in
    /// `1..d`, so `T(g_i)` is uniform on the other `d - 1` atoms.
    ErwRotation(usize),
    HistoryDependent(Arc<dyn HistoryTransform>),
}

impl TransformSpec {
    /// `identity`, `negation`, `iid_sign:q`, `erw_rotation[:d]`,
    /// `echo:[[matrix, weight], ...]`.
    pub fn parse(text: &str, group: &GroupSpec, mu: &StepDistribution) -> Result<Self, SamplerError> {
        let t = text.trim();
        let lower = t.to_ascii_lowercase();
        let bad = |reason: String| SamplerError::InvalidTransform(format!("{t:?}: {reason}"));
        if lower == "identity" {
            return Ok(TransformSpec::Identity);
        }
        if lower == "negation" {
            return Ok(TransformSpec::Negation);
        }
        if let Some(q) = lower.strip_prefix("iid_sign:") {
            let q: f64 = q.trim().parse().map_err(|_| bad("bad probability".into()))?;
            return Ok(TransformSpec::IidSign(q));
        }
        if lower == "erw_rotation" {
            let d = match mu {
                StepDistribution::Discrete(law) => law.len(),
                _ => return Err(bad("needs a discrete step law".into())),
            };
            return Ok(TransformSpec::ErwRotation(d));
        }
        if let Some(d) = lower.strip_prefix("erw_rotation:") {
            return Ok(TransformSpec::ErwRotation(d.trim().parse().map_err(|_| bad("bad generator count".into()))?));
        }
        if let Some(json) = t.strip_prefix("echo:") {
            let value: Vec<(Matrix, f64)> = serde_json::from_str(json).map_err(|e| bad(e.to_string()))?;
            let _ = group;
            return Ok(TransformSpec::EchoLinear(value));
        }
        Err(bad("unknown transform".into()))
    }

    fn name(&self) -> &'static str {
        match self {
            TransformSpec::Identity => "identity",
            TransformSpec::Negation => "negation",
            TransformSpec::IidSign(_) => "iid_sign",
            TransformSpec::EchoLinear(_) => "echo",
            TransformSpec::ErwRotation(_) => "erw_rotation",
            TransformSpec::HistoryDependent(_) => "history",
        }
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformSpec::IidSign(q) => write!(f, "iid_sign:{q}"),
            TransformSpec::ErwRotation(d) => write!(f, "erw_rotation:{d}"),
            TransformSpec::EchoLinear(m) => {
                write!(f, "echo:{}", serde_json::to_string(m).unwrap_or_default())
            }
            other => f.write_str(other.name()),
        }
    }
}

/// A fully specified walk.
#[derive(Clone, Debug)]
pub struct SrrwConfig {
    pub group: GroupSpec,
    pub alpha: f64,
    pub mu: StepDistribution,
    pub transform: TransformSpec,
}

impl SrrwConfig {
    pub fn new(group: GroupSpec, alpha: f64, mu: StepDistribution, transform: TransformSpec) -> Result<Self, SamplerError> {
        let config = Self { group, alpha, mu, transform };
        config.validate()?;
        Ok(config)
    }

    /// `alpha` must lie in `[0, 1)`. The one exception is `alpha = 1` with
    /// [`TransformSpec::ErwRotation`], which is the elephant walk with `p = 0`.
    pub fn validate(&self) -> Result<(), SamplerError> {
        self.group.validate()?;
        self.mu.validate_for(&self.group)?;
        let rotation_one = matches!(self.transform, TransformSpec::ErwRotation(_)) && self.alpha == 1.0;
        if !(self.alpha >= 0.0 && self.alpha < 1.0) && !rotation_one {
            return Err(SamplerError::InvalidAlpha(self.alpha));
        }
        match &self.transform {
            TransformSpec::IidSign(q) if !(0.0..=1.0).contains(q) => {
                Err(SamplerError::InvalidTransform(format!("iid_sign probability {q} outside [0,1]")))
            }
            TransformSpec::EchoLinear(mats) => {
                let total: f64 = mats.iter().map(|m| m.1).sum();
                if mats.is_empty() || (total - 1.0).abs() > 1e-12 || mats.iter().any(|m| !(m.1 >= 0.0)) {
                    return Err(SamplerError::InvalidTransform("echo weights must be >= 0 and sum to 1".into()));
                }
                let d = match self.group {
                    GroupSpec::Lattice(d) | GroupSpec::Euclidean(d) => d,
                    _ => return Err(SamplerError::InvalidTransform("echo law needs Z^d or R^d".into())),
                };
                for (m, _) in mats {
                    if m.len() != d || m.iter().any(|row| row.len() != d) {
                        return Err(SamplerError::InvalidTransform(format!("echo matrix is not {d}x{d}")));
                    }
                    if matches!(self.group, GroupSpec::Lattice(_))
                        && m.iter().flatten().any(|a| (a - a.round()).abs() > 1e-12)
                    {
                        return Err(SamplerError::InvalidTransform("echo matrix on Z^d must be integral".into()));
                    }
                }
                Ok(())
            }
            TransformSpec::ErwRotation(d) => {
                let law = self.mu.as_discrete().ok_or_else(|| {
                    SamplerError::InvalidTransform("erw_rotation needs a discrete step law".into())
                })?;
                if law.len() != *d || *d < 2 {
                    return Err(SamplerError::InvalidTransform(format!(
                        "erw_rotation({d}) needs a step law on exactly {d} >= 2 atoms, found {}",
                        law.len()
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// The elephant random walk on the `d`-regular tree with memory `p`, as a
/// generalized SRRW: identity transforms with `alpha = (dp - 1)/(d - 1)` when
/// `dp >= 1`, rotations with `alpha = 1 - dp` otherwise.
pub fn erw_config(d: usize, p: f64) -> Result<SrrwConfig, SamplerError> {
    if !(0.0..1.0).contains(&p) {
        return Err(SamplerError::InvalidTransform(format!("memory parameter p = {p} outside [0, 1)")));
    }
    let group = GroupSpec::regular_tree(d)?;
    let mu = StepDistribution::uniform(&group)?;
    let dp = d as f64 * p;
    let (alpha, transform) = if dp >= 1.0 {
        ((dp - 1.0) / (d as f64 - 1.0), TransformSpec::Identity)
    } else {
        (1.0 - dp, TransformSpec::ErwRotation(d))
    };
    SrrwConfig::new(group, alpha, mu, transform)
}

/// One sampled walk.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkTrace {
    /// `X_1, ..., X_n`.
    pub steps: Vec<GroupElement>,
    /// `S_0, ..., S_n`.
    pub positions: Vec<GroupElement>,
    /// `xi_2, ..., xi_n`.
    pub reinforcement_flags: Vec<bool>,
    /// `u_2, ..., u_n`, 1-based.
    pub picks: Vec<usize>,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last_position(&self) -> &GroupElement {
        self.positions.last().expect("positions start with S_0")
    }
}

#[derive(Clone, Debug)]
struct MapMixture {
    maps: Vec<Vec<u32>>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl MapMixture {
    fn new(maps: Vec<(Vec<u32>, f64)>) -> Self {
        let maps: Vec<_> = maps.into_iter().filter(|m| m.1 > 0.0).collect();
        let mut acc = 0.0;
        let cumulative = maps
            .iter()
            .map(|m| {
                acc += m.1;
                acc
            })
            .collect();
        let (maps, weights) = maps.into_iter().unzip();
        Self { maps, weights, cumulative }
    }

    #[inline]
    fn apply(&self, idx: u32, rng: &mut StreamRng) -> u32 {
        let m = if self.maps.len() == 1 {
            0
        } else {
            pick(&self.cumulative, rng.next_f64())
        };
        self.maps[m][idx as usize]
    }
}

#[inline]
fn pick(cumulative: &[f64], u: f64) -> usize {
    let scaled = u * cumulative[cumulative.len() - 1];
    cumulative.partition_point(|&c| c <= scaled).min(cumulative.len() - 1)
}

#[derive(Clone, Debug)]
enum TransformLaw {
    Identity,
    Static(MapMixture),
    History(Arc<dyn HistoryTransform>),
}

#[derive(Clone, Debug)]
struct DiscreteEngine {
    alphabet: Vec<GroupElement>,
    /// Alphabet indices of the `mu` atoms and their cumulative weights.
    fresh_atoms: Vec<u32>,
    fresh_weights: Vec<f64>,
    fresh_cumulative: Vec<f64>,
    law: TransformLaw,
}

#[derive(Clone, Debug)]
enum LinearLaw {
    Identity,
    Mixture { mats: Vec<Vec<f64>>, cumulative: Vec<f64> },
}

#[derive(Clone, Debug)]
struct ContinuousEngine {
    dim: usize,
    family: ContinuousFamily,
    law: LinearLaw,
}

#[derive(Clone, Debug)]
enum Engine {
    Discrete(DiscreteEngine),
    Continuous(ContinuousEngine),
}

/// See [`Sampler::step_law_terms`].
#[derive(Clone, Debug)]
pub(crate) struct StepLawTerms {
    pub fresh: Vec<(u32, f64)>,
    pub images: Vec<Vec<(u32, f64)>>,
}

/// Reusable buffers for the hot loop.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    history: Vec<u32>,
    coords: Vec<f64>,
    position: Option<GroupElement>,
}

/// A compiled walk, ready to be sampled many times.
#[derive(Clone, Debug)]
pub struct Sampler {
    config: SrrwConfig,
    engine: Engine,
}

fn close_alphabet(
    spec: &GroupSpec,
    seed: &[GroupElement],
    maps: &[Box<dyn Fn(&GroupElement) -> Option<GroupElement> + '_>],
) -> Result<(Vec<GroupElement>, Vec<Vec<u32>>), SamplerError> {
    let mut alphabet: Vec<GroupElement> = Vec::new();
    let mut index: HashMap<GroupElement, u32> = HashMap::new();
    for x in seed {
        if !index.contains_key(x) {
            index.insert(x.clone(), alphabet.len() as u32);
            alphabet.push(x.clone());
        }
    }
    let mut tables: Vec<Vec<u32>> = vec![Vec::new(); maps.len()];
    let mut next = 0;
    while next < alphabet.len() {
        let x = alphabet[next].clone();
        for (m, f) in maps.iter().enumerate() {
            let y = f(&x).ok_or_else(|| SamplerError::InvalidTransform("echo map overflows Z^d".into()))?;
            spec.check(&y)?;
            let id = match index.get(&y) {
                Some(&id) => id,
                None => {
                    if alphabet.len() >= MAX_ALPHABET {
                        return Err(SamplerError::AlphabetTooLarge);
                    }
                    let id = alphabet.len() as u32;
                    index.insert(y.clone(), id);
                    alphabet.push(y);
                    id
                }
            };
            tables[m].push(id);
        }
        next += 1;
    }
    Ok((alphabet, tables))
}

fn apply_matrix_int(m: &Matrix, v: &[i64]) -> Option<Vec<i64>> {
    m.iter()
        .map(|row| row.iter().zip(v).try_fold(0i64, |acc, (a, x)| acc.checked_add((a.round() as i64).checked_mul(*x)?)))
        .collect()
}

fn apply_matrix_real(m: &Matrix, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum()).collect()
}

/// Cyclic rotations of `0..d` by `1..d`.
fn rotation_maps(d: usize) -> Vec<(Vec<u32>, f64)> {
    let w = 1.0 / (d - 1) as f64;
    (1..d).map(|y| ((0..d).map(|i| ((i + y) % d) as u32).collect(), w)).collect()
}

impl Sampler {
    pub fn new(config: &SrrwConfig) -> Result<Self, SamplerError> {
        config.validate()?;
        let spec = &config.group;
        let engine = match &config.mu {
            StepDistribution::Continuous { family, dim } => {
                let identity: Vec<f64> =
                    (0..dim * dim).map(|k| if k / dim == k % dim { 1.0 } else { 0.0 }).collect();
                let scaled = |s: f64| identity.iter().map(|x| x * s).collect::<Vec<_>>();
                let mixture = |pairs: Vec<(Vec<f64>, f64)>| {
                    let pairs: Vec<_> = pairs.into_iter().filter(|p| p.1 > 0.0).collect();
                    let mut acc = 0.0;
                    let cumulative = pairs
                        .iter()
                        .map(|p| {
                            acc += p.1;
                            acc
                        })
                        .collect();
                    LinearLaw::Mixture { mats: pairs.into_iter().map(|p| p.0).collect(), cumulative }
                };
                let law = match &config.transform {
                    TransformSpec::Identity => LinearLaw::Identity,
                    TransformSpec::Negation => mixture(vec![(scaled(-1.0), 1.0)]),
                    TransformSpec::IidSign(q) => mixture(vec![(scaled(1.0), *q), (scaled(-1.0), 1.0 - q)]),
                    TransformSpec::EchoLinear(mats) => {
                        mixture(mats.iter().map(|(m, w)| (m.iter().flatten().copied().collect(), *w)).collect())
                    }
                    other => {
                        return Err(SamplerError::Unsupported(format!(
                            "{} transform with a continuous step law",
                            other.name()
                        )))
                    }
                };
                Engine::Continuous(ContinuousEngine { dim: *dim, family: *family, law })
            }
            StepDistribution::Discrete(law) => Engine::Discrete(Self::compile_discrete(spec, law, &config.transform)?),
        };
        Ok(Self { config: config.clone(), engine })
    }

    fn compile_discrete(spec: &GroupSpec, law: &DiscreteLaw, transform: &TransformSpec) -> Result<DiscreteEngine, SamplerError> {
        let support: Vec<GroupElement> = law.atoms().to_vec();
        let (alphabet, transform_law) = match transform {
            TransformSpec::Identity => (support.clone(), TransformLaw::Identity),
            TransformSpec::ErwRotation(d) => (support.clone(), TransformLaw::Static(MapMixture::new(rotation_maps(*d)))),
            TransformSpec::HistoryDependent(h) => {
                let alphabet = h.alphabet();
                for x in &alphabet {
                    spec.check(x)?;
                }
                if support.iter().any(|x| !alphabet.contains(x)) {
                    return Err(SamplerError::InvalidTransform("history alphabet misses part of the mu support".into()));
                }
                (alphabet, TransformLaw::History(Arc::clone(h)))
            }
            TransformSpec::Negation | TransformSpec::IidSign(_) | TransformSpec::EchoLinear(_) => {
                let mut fns: Vec<Box<dyn Fn(&GroupElement) -> Option<GroupElement> + '_>> = Vec::new();
                let mut weights = Vec::new();
                match transform {
                    TransformSpec::Negation => {
                        fns.push(Box::new(|x| Some(spec.inverse_unchecked(x))));
                        weights.push(1.0);
                    }
                    TransformSpec::IidSign(q) => {
                        fns.push(Box::new(|x: &GroupElement| Some(x.clone())));
                        weights.push(*q);
                        fns.push(Box::new(|x| Some(spec.inverse_unchecked(x))));
                        weights.push(1.0 - q);
                    }
                    TransformSpec::EchoLinear(mats) => {
                        for (m, w) in mats {
                            fns.push(Box::new(move |x: &GroupElement| match x {
                                GroupElement::Lattice(v) => apply_matrix_int(m, v).map(GroupElement::Lattice),
                                GroupElement::Real(v) => Some(GroupElement::Real(apply_matrix_real(m, v))),
                                other => Some(other.clone()),
                            }));
                            weights.push(*w);
                        }
                    }
                    _ => unreachable!(),
                }
                let (alphabet, tables) = close_alphabet(spec, &support, &fns)?;
                let mixture = MapMixture::new(tables.into_iter().zip(weights).collect());
                (alphabet, TransformLaw::Static(mixture))
            }
        };
        let fresh_atoms: Vec<u32> = support
            .iter()
            .map(|x| alphabet.iter().position(|y| y == x).expect("support is in the alphabet") as u32)
            .collect();
        let fresh_weights = law.weights().to_vec();
        let mut acc = 0.0;
        let fresh_cumulative = fresh_weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(DiscreteEngine { alphabet, fresh_atoms, fresh_weights, fresh_cumulative, law: transform_law })
    }

    pub fn config(&self) -> &SrrwConfig {
        &self.config
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.engine, Engine::Discrete(_))
    }

    /// The closed step alphabet; empty for continuous walks.
    pub fn alphabet(&self) -> &[GroupElement] {
        match &self.engine {
            Engine::Discrete(e) => &e.alphabet,
            Engine::Continuous(_) => &[],
        }
    }

    fn discrete(&self) -> Result<&DiscreteEngine, SamplerError> {
        match &self.engine {
            Engine::Discrete(e) => Ok(e),
            Engine::Continuous(_) => Err(SamplerError::Unsupported("exact step laws for a continuous step law".into())),
        }
    }

    /// Whether the transform law ignores the history.
    pub(crate) fn is_static(&self) -> bool {
        !matches!(&self.engine, Engine::Discrete(DiscreteEngine { law: TransformLaw::History(_), .. }))
    }

    pub fn scratch(&self) -> Scratch {
        Scratch::default()
    }

    #[inline]
    fn fresh_index(e: &DiscreteEngine, rng: &mut StreamRng) -> u32 {
        e.fresh_atoms[pick(&e.fresh_cumulative, rng.next_f64())]
    }

    fn history_maps(e: &DiscreteEngine, h: &dyn HistoryTransform, step: usize, hist: &[u32]) -> Result<MapMixture, SamplerError> {
        let view = HistoryView { alphabet: &e.alphabet, steps: hist };
        let maps = h.maps(step, view);
        let total: f64 = maps.iter().map(|m| m.1).sum();
        let contract = |reason: String| SamplerError::TransformContract { step, reason };
        if maps.is_empty() || (total - 1.0).abs() > 1e-12 || maps.iter().any(|m| !(m.1 >= 0.0)) {
            return Err(contract(format!("map weights sum to {total}")));
        }
        let k = e.alphabet.len();
        if maps.iter().any(|(m, _)| m.len() != k || m.iter().any(|&i| i as usize >= k)) {
            return Err(contract("map is not a function on the alphabet".into()));
        }
        Ok(MapMixture::new(maps))
    }

    /// Index of `X_j` given the forest decision for step `j`.
    #[inline]
    fn next_index(
        &self,
        e: &DiscreteEngine,
        j: usize,
        reinforce: bool,
        pick_u: usize,
        hist: &[u32],
        rng: &mut StreamRng,
    ) -> Result<u32, SamplerError> {
        if !reinforce {
            return Ok(Self::fresh_index(e, rng));
        }
        let src = hist[pick_u - 1];
        Ok(match &e.law {
            TransformLaw::Identity => src,
            TransformLaw::Static(m) => m.apply(src, rng),
            TransformLaw::History(h) => Self::history_maps(e, h.as_ref(), j, hist)?.apply(src, rng),
        })
    }

    fn continuous_fresh(c: &ContinuousEngine, out: &mut [f64], rng: &mut StreamRng) {
        match c.family {
            ContinuousFamily::Gaussian => {
                for x in out.iter_mut() {
                    *x = StandardNormal.sample(rng);
                }
            }
            ContinuousFamily::Sphere => loop {
                let mut norm = 0.0;
                for x in out.iter_mut() {
                    let g: f64 = StandardNormal.sample(rng);
                    *x = g;
                    norm += g * g;
                }
                if norm > 0.0 {
                    let s = norm.sqrt();
                    out.iter_mut().for_each(|x| *x /= s);
                    break;
                }
            },
            ContinuousFamily::Axes => {
                out.iter_mut().for_each(|x| *x = 0.0);
                let k = rng.below(2 * c.dim as u64) as usize;
                out[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
    }

    fn continuous_reinforced(c: &ContinuousEngine, coords: &mut Vec<f64>, src: usize, rng: &mut StreamRng) {
        let d = c.dim;
        let base = coords.len();
        match &c.law {
            LinearLaw::Identity => coords.extend_from_within(src * d..(src + 1) * d),
            LinearLaw::Mixture { mats, cumulative } => {
                let m = &mats[if mats.len() == 1 { 0 } else { pick(cumulative, rng.next_f64()) }];
                coords.resize(base + d, 0.0);
                for r in 0..d {
                    let mut acc = 0.0;
                    for k in 0..d {
                        acc += m[r * d + k] * coords[src * d + k];
                    }
                    coords[base + r] = acc;
                }
            }
        }
    }

    /// Runs one walk of length `checkpoints.last()` and calls `visit(i, S_{checkpoints[i]})`
    /// for each checkpoint in increasing order. `checkpoints` must be sorted and positive.
    pub fn run_checkpoints(
        &self,
        checkpoints: &[usize],
        rng: &mut StreamRng,
        scratch: &mut Scratch,
        mut visit: impl FnMut(usize, &GroupElement),
    ) -> Result<(), SamplerError> {
        let Some(&n) = checkpoints.last() else { return Ok(()) };
        debug_assert!(checkpoints.windows(2).all(|w| w[0] <= w[1]) && checkpoints[0] >= 1);
        let alpha = self.config.alpha;
        let spec = &self.config.group;
        let mut next_cp = 0;
        match &self.engine {
            Engine::Discrete(e) => {
                let pos = scratch.position.get_or_insert_with(|| spec.identity());
                spec.reset_identity(pos);
                scratch.history.clear();
                for j in 1..=n {
                    let idx = if j == 1 {
                        Self::fresh_index(e, rng)
                    } else {
                        let reinforce = rng.bernoulli(alpha);
                        let u = rng.below(j as u64 - 1) as usize + 1;
                        self.next_index(e, j, reinforce, u, &scratch.history, rng)?
                    };
                    scratch.history.push(idx);
                    spec.mul_right(pos, &e.alphabet[idx as usize]);
                    while next_cp < checkpoints.len() && checkpoints[next_cp] == j {
                        visit(next_cp, pos);
                        next_cp += 1;
                    }
                }
            }
            Engine::Continuous(c) => {
                let d = c.dim;
                scratch.coords.clear();
                let mut pos = vec![0.0; d];
                let mut elem = GroupElement::Real(Vec::new());
                for j in 1..=n {
                    let reinforce = j > 1 && rng.bernoulli(alpha);
                    let u = if j > 1 { rng.below(j as u64 - 1) as usize + 1 } else { 0 };
                    if reinforce {
                        Self::continuous_reinforced(c, &mut scratch.coords, u - 1, rng);
                    } else {
                        let base = scratch.coords.len();
                        scratch.coords.resize(base + d, 0.0);
                        Self::continuous_fresh(c, &mut scratch.coords[base..], rng);
                    }
                    let base = (j - 1) * d;
                    for k in 0..d {
                        pos[k] += scratch.coords[base + k];
                    }
                    while next_cp < checkpoints.len() && checkpoints[next_cp] == j {
                        if let GroupElement::Real(v) = &mut elem {
                            v.clone_from(&pos);
                        }
                        visit(next_cp, &elem);
                        next_cp += 1;
                    }
                }
            }
        }
        Ok(())
    }

    /// `S_n` only.
    pub fn final_position(&self, n: usize, rng: &mut StreamRng, scratch: &mut Scratch) -> Result<GroupElement, SamplerError> {
        let mut out = None;
        self.run_checkpoints(&[n], rng, scratch, |_, s| out = Some(s.clone()))?;
        Ok(out.expect("n >= 1 visits one checkpoint"))
    }

    /// A full trace of length `n`.
    pub fn sample(&self, n: usize, rng: &mut StreamRng) -> Result<WalkTrace, SamplerError> {
        let mut flags = Vec::with_capacity(n.saturating_sub(1));
        let mut picks = Vec::with_capacity(n.saturating_sub(1));
        for j in 2..=n {
            flags.push(rng.bernoulli(self.config.alpha));
            picks.push(rng.below(j as u64 - 1) as usize + 1);
        }
        self.assemble(&flags, &picks, rng)
    }

    /// Builds the walk from given reinforcement flags `xi_2..xi_n` and picks
    /// `u_2..u_n`; only values (fresh draws, transform coins) are random.
    pub fn assemble(&self, flags: &[bool], picks: &[usize], rng: &mut StreamRng) -> Result<WalkTrace, SamplerError> {
        assert_eq!(flags.len(), picks.len());
        let n = flags.len() + 1;
        let spec = &self.config.group;
        let steps: Vec<GroupElement> = match &self.engine {
            Engine::Discrete(e) => {
                let mut hist: Vec<u32> = Vec::with_capacity(n);
                for j in 1..=n {
                    let idx = if j == 1 {
                        Self::fresh_index(e, rng)
                    } else {
                        self.next_index(e, j, flags[j - 2], picks[j - 2], &hist, rng)?
                    };
                    hist.push(idx);
                }
                hist.iter().map(|&i| e.alphabet[i as usize].clone()).collect()
            }
            Engine::Continuous(c) => {
                let d = c.dim;
                let mut coords = Vec::with_capacity(n * d);
                for j in 1..=n {
                    if j > 1 && flags[j - 2] {
                        Self::continuous_reinforced(c, &mut coords, picks[j - 2] - 1, rng);
                    } else {
                        let base = coords.len();
                        coords.resize(base + d, 0.0);
                        Self::continuous_fresh(c, &mut coords[base..], rng);
                    }
                }
                coords.chunks(d).map(|v| GroupElement::Real(v.to_vec())).collect()
            }
        };
        let mut positions = Vec::with_capacity(n + 1);
        let mut s = spec.identity();
        positions.push(s.clone());
        for x in &steps {
            spec.mul_right(&mut s, x);
            positions.push(s.clone());
        }
        Ok(WalkTrace { steps, positions, reinforcement_flags: flags.to_vec(), picks: picks.to_vec() })
    }

    /// Exact law of the next step index given past step indices.
    pub(crate) fn next_step_law_indices(&self, hist: &[u32]) -> Result<Vec<(u32, f64)>, SamplerError> {
        let e = self.discrete()?;
        let n = hist.len();
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        let fresh_scale = if n == 0 { 1.0 } else { 1.0 - self.config.alpha };
        if fresh_scale > 0.0 {
            for (&i, &w) in e.fresh_atoms.iter().zip(&e.fresh_weights) {
                *acc.entry(i).or_default() += fresh_scale * w;
            }
        }
        if n > 0 && self.config.alpha > 0.0 {
            let each = self.config.alpha / n as f64;
            let history_law;
            let mixture = match &e.law {
                TransformLaw::Identity => None,
                TransformLaw::Static(m) => Some(m),
                TransformLaw::History(h) => {
                    history_law = Self::history_maps(e, h.as_ref(), n + 1, hist)?;
                    Some(&history_law)
                }
            };
            for &src in hist {
                match mixture {
                    None => *acc.entry(src).or_default() += each,
                    Some(m) => {
                        for (map, w) in m.maps.iter().zip(&m.weights) {
                            *acc.entry(map[src as usize]).or_default() += each * w;
                        }
                    }
                }
            }
        }
        Ok(acc.into_iter().filter(|p| p.1 > 0.0).collect())
    }

    /// Ingredients of the next-step law after `hist`: the fresh atoms with their
    /// `mu` weights, and for every past step the transform images with their
    /// weights. The law is `c·fresh + (α/n)·Σ images`, where `c` is 1 when `hist` is
    /// empty and `1 - α` otherwise.
    pub(crate) fn step_law_terms(&self, hist: &[u32]) -> Result<StepLawTerms, SamplerError> {
        let e = self.discrete()?;
        let fresh = e.fresh_atoms.iter().copied().zip(e.fresh_weights.iter().copied()).collect();
        let history_law;
        let mixture = match &e.law {
            TransformLaw::Identity => None,
            TransformLaw::Static(m) => Some(m),
            TransformLaw::History(h) if !hist.is_empty() => {
                history_law = Self::history_maps(e, h.as_ref(), hist.len() + 1, hist)?;
                Some(&history_law)
            }
            TransformLaw::History(_) => None,
        };
        let images = hist
            .iter()
            .map(|&src| match mixture {
                None => vec![(src, 1.0)],
                Some(m) => m.maps.iter().zip(&m.weights).map(|(map, &w)| (map[src as usize], w)).collect(),
            })
            .collect();
        Ok(StepLawTerms { fresh, images })
    }

    pub(crate) fn index_of(&self, x: &GroupElement) -> Option<u32> {
        self.alphabet().iter().position(|y| y == x).map(|i| i as u32)
    }
}

/// Samples a walk of length `n` from the stream seeded by `seed`.
pub fn sample_walk(config: &SrrwConfig, n: usize, seed: u64) -> Result<WalkTrace, SamplerError> {
    if n == 0 {
        return Err(SamplerError::Unsupported("walk length 0".into()));
    }
    Sampler::new(config)?.sample(n, &mut StreamRng::from_seed(seed))
}

/// Exact conditional law of `X_{n+1}` given `X_1, ..., X_n = history`.
pub fn next_step_distribution(config: &SrrwConfig, history: &[GroupElement]) -> Result<StepDistribution, SamplerError> {
    let sampler = Sampler::new(config)?;
    let hist = history
        .iter()
        .map(|x| {
            sampler.index_of(x).ok_or_else(|| {
                SamplerError::InvalidTransform(format!(
                    "history step {} is outside the step alphabet",
                    config.group.format_element(x)
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let law = sampler.next_step_law_indices(&hist)?;
    let atoms = law.into_iter().map(|(i, w)| (sampler.alphabet()[i as usize].clone(), w)).collect();
    Ok(StepDistribution::discrete(&config.group, atoms)?)
}
