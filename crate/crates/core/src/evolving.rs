//! Evolving sets for the time-inhomogeneous kernels of a forest realization.
//!
//! Given kernels `P_1, ..., P_n`, each either the `mu` step `P_μ(x, y) = μ(x⁻¹y)`
//! or a deterministic right translation, the evolving set moves by
//! `W' = {y : Σ_{x∈W} P(x, y) ≥ U}` with `U` uniform. For a fixed `W` the map
//! `U ↦ W'` is piecewise constant, so every expectation over one step is a
//! finite sum over [`threshold_pieces`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::estimators::Estimate;
use crate::forest::PercolatedForest;
use crate::groups::{DiscreteLaw, GroupElement, GroupError, GroupSpec};
use crate::mc;
use crate::rng::StreamRng;

/// Profile values closer than this are treated as equal.
pub const Q_TOLERANCE: f64 = 1e-12;

/// Default cap on the number of sets examined by [`iso_profile`].
pub const DEFAULT_SET_CAP: usize = 2_000_000;

pub type ElementSet = BTreeSet<GroupElement>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolvingError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("the set is empty")]
    EmptySet,
    #[error("{what} needs a finite group, not {group}")]
    NotFinite { what: &'static str, group: String },
    #[error("more than {0} sets to examine")]
    CapExceeded(usize),
    #[error("forest has {forest} vertices but {steps} steps were given")]
    LengthMismatch { forest: usize, steps: usize },
    #[error("time window {k}..{l} is outside 0..{n}")]
    BadWindow { k: usize, l: usize, n: usize },
}

/// One step kernel.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    /// `P_μ(x, y) = μ(x⁻¹y)`.
    Mu(Arc<DiscreteLaw>),
    /// `P(x, y) = 1` iff `y = x·g`.
    Deterministic(GroupElement),
}

impl Kernel {
    pub fn is_mu(&self) -> bool {
        matches!(self, Kernel::Mu(_))
    }

    /// `P(x, y)`.
    pub fn prob(&self, spec: &GroupSpec, x: &GroupElement, y: &GroupElement) -> f64 {
        let step = spec.multiply(&spec.inverse_unchecked(x), y).expect("elements of the group");
        match self {
            Kernel::Mu(law) => law.mass_of(&step),
            Kernel::Deterministic(g) => (step == *g) as u8 as f64,
        }
    }

    /// The transpose `P^T(x, y) = P(y, x)`.
    pub fn transpose(&self, spec: &GroupSpec) -> Kernel {
        match self {
            Kernel::Mu(law) => Kernel::Mu(Arc::new(law.reflect(spec))),
            Kernel::Deterministic(g) => Kernel::Deterministic(spec.inverse_unchecked(g)),
        }
    }
}

/// Kernels `P_1, ..., P_n` on a group.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSeq {
    pub spec: GroupSpec,
    pub kernels: Vec<Kernel>,
}

impl KernelSeq {
    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }

    /// 1-based step kernel.
    pub fn kernel(&self, j: usize) -> &Kernel {
        &self.kernels[j - 1]
    }

    fn check_window(&self, k: usize, l: usize) -> Result<(), EvolvingError> {
        if k > l || l > self.len() {
            return Err(EvolvingError::BadWindow { k, l, n: self.len() });
        }
        Ok(())
    }
}

/// `P_j = P_μ` for isolated vertices, the translation by `X_j` otherwise.
pub fn kernel_seq_from_forest(
    forest: &PercolatedForest,
    steps: &[GroupElement],
    spec: &GroupSpec,
    mu: &DiscreteLaw,
) -> Result<KernelSeq, EvolvingError> {
    if forest.n() != steps.len() {
        return Err(EvolvingError::LengthMismatch { forest: forest.n(), steps: steps.len() });
    }
    let mu = Arc::new(mu.clone());
    let kernels = forest
        .isolated_flags()
        .iter()
        .skip(1)
        .zip(steps)
        .map(|(&iso, x)| if iso { Kernel::Mu(Arc::clone(&mu)) } else { Kernel::Deterministic(x.clone()) })
        .collect();
    Ok(KernelSeq { spec: spec.clone(), kernels })
}

/// `P̄_j(x, y) = P_{n+1-j}(y, x)`.
pub fn reverse_kernels(seq: &KernelSeq) -> KernelSeq {
    KernelSeq { spec: seq.spec.clone(), kernels: seq.kernels.iter().rev().map(|k| k.transpose(&seq.spec)).collect() }
}

/// `Q(y) = Σ_{x∈W} P(x, y)` on its support.
pub fn profile(spec: &GroupSpec, w: &ElementSet, kernel: &Kernel) -> BTreeMap<GroupElement, f64> {
    let mut q = BTreeMap::new();
    for x in w {
        match kernel {
            Kernel::Mu(law) => {
                for (g, p) in law.iter() {
                    let mut y = x.clone();
                    spec.mul_right(&mut y, g);
                    *q.entry(y).or_insert(0.0) += p;
                }
            }
            Kernel::Deterministic(g) => {
                let mut y = x.clone();
                spec.mul_right(&mut y, g);
                *q.entry(y).or_insert(0.0) += 1.0;
            }
        }
    }
    q
}

/// The set reached for every `U` in an interval of the given length.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdPiece {
    pub length: f64,
    pub set: ElementSet,
}

/// Decomposes `U ↦ W'` into pieces. With distinct profile values
/// `q_1 > ... > q_m`, piece `i` covers `U ∈ (q_{i+1}, q_i]` and yields
/// `{Q ≥ q_i}`; a final empty piece covers `(q_1, 1)` when `q_1 < 1`.
pub fn threshold_pieces(spec: &GroupSpec, w: &ElementSet, kernel: &Kernel) -> Vec<ThresholdPiece> {
    let q = profile(spec, w, kernel);
    let mut entries: Vec<(&GroupElement, f64)> = q.iter().map(|(y, v)| (y, *v)).collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for (i, (_, v)) in entries.iter().enumerate() {
        match levels.last_mut() {
            Some((level, end)) if *level - v <= Q_TOLERANCE => *end = i + 1,
            _ => levels.push((*v, i + 1)),
        }
    }
    let mut pieces = Vec::with_capacity(levels.len() + 1);
    let top = levels.first().map_or(0.0, |l| l.0.min(1.0));
    if top < 1.0 - Q_TOLERANCE {
        pieces.push(ThresholdPiece { length: 1.0 - top, set: ElementSet::new() });
    }
    for (i, &(level, end)) in levels.iter().enumerate() {
        let below = levels.get(i + 1).map_or(0.0, |l| l.0);
        let set = entries[..end].iter().map(|(y, _)| (*y).clone()).collect();
        pieces.push(ThresholdPiece { length: level.min(1.0) - below, set });
    }
    pieces
}

/// `{y : Q(y) ≥ u}`.
pub fn evolve_step(spec: &GroupSpec, w: &ElementSet, kernel: &Kernel, u: f64) -> ElementSet {
    if let Kernel::Deterministic(g) = kernel {
        return translate(spec, w, g);
    }
    profile(spec, w, kernel).into_iter().filter(|(_, q)| *q >= u).map(|(y, _)| y).collect()
}

fn translate(spec: &GroupSpec, w: &ElementSet, g: &GroupElement) -> ElementSet {
    w.iter()
        .map(|x| {
            let mut y = x.clone();
            spec.mul_right(&mut y, g);
            y
        })
        .collect()
}

/// `Σ_i ℓ_i |A_i|`, which equals `|W|` because `|W_j|` is a martingale.
pub fn expected_size(pieces: &[ThresholdPiece]) -> f64 {
    pieces.iter().map(|p| p.length * p.set.len() as f64).sum()
}

/// `ψ(W) = 1 - E √(|W_μ| / |W|)`.
pub fn psi(spec: &GroupSpec, w: &ElementSet, mu: &DiscreteLaw) -> Result<f64, EvolvingError> {
    if w.is_empty() {
        return Err(EvolvingError::EmptySet);
    }
    let kernel = Kernel::Mu(Arc::new(mu.clone()));
    let e: f64 = threshold_pieces(spec, w, &kernel).iter().map(|p| p.length * (p.set.len() as f64).sqrt()).sum();
    Ok(1.0 - e / (w.len() as f64).sqrt())
}

/// `Φ(A) = P_μ(A, A^c) / |A|`.
pub fn bottleneck(spec: &GroupSpec, a: &ElementSet, mu: &DiscreteLaw) -> Result<f64, EvolvingError> {
    if a.is_empty() {
        return Err(EvolvingError::EmptySet);
    }
    let mut out = 0.0;
    for x in a {
        for (g, p) in mu.iter() {
            let mut y = x.clone();
            spec.mul_right(&mut y, g);
            if !a.contains(&y) {
                out += p;
            }
        }
    }
    Ok(out / a.len() as f64)
}

/// Directed Cayley edges `(x, x·γ)` leaving `A`, with `γ` ranging over the
/// support of `mu` minus the identity.
pub fn edge_boundary(spec: &GroupSpec, a: &ElementSet, mu: &DiscreteLaw) -> usize {
    let e = spec.identity();
    let mut edges = HashSet::new();
    for x in a {
        for (g, _) in mu.iter().filter(|(g, _)| **g != e) {
            let mut y = x.clone();
            spec.mul_right(&mut y, g);
            if !a.contains(&y) {
                edges.insert((x.clone(), y));
            }
        }
    }
    edges.len()
}

/// `μ_* · |∂A| / |A|` with `μ_*` the smallest non-identity atom.
pub fn edge_boundary_bound(spec: &GroupSpec, a: &ElementSet, mu: &DiscreteLaw) -> f64 {
    let e = spec.identity();
    let mu_star = mu.iter().filter(|(g, _)| **g != e).map(|(_, w)| w).fold(f64::INFINITY, f64::min);
    if !mu_star.is_finite() {
        return 0.0;
    }
    mu_star * edge_boundary(spec, a, mu) as f64 / a.len() as f64
}

/// Which sets the profile minimizes over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchScope {
    /// Every nonempty subset of a finite group.
    Exhaustive,
    /// Subsets containing the identity that are connected through the
    /// support of `mu`. Both Φ and ψ are invariant under left translation.
    Connected { cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileStatus {
    /// The infimum over all sets of each size was taken.
    Complete,
    /// Only part of the sets were examined; values are upper bounds.
    Restricted,
}

/// `Φ(r)` and `ψ(r)` over the examined sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub r: usize,
    pub phi: f64,
    pub psi: f64,
    pub sets: usize,
    pub status: ProfileStatus,
}

fn all_subsets(elements: &[GroupElement], r: usize, cap: usize) -> Result<Vec<ElementSet>, EvolvingError> {
    let mut out = Vec::new();
    let m = elements.len();
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    while let Some((start, chosen)) = stack.pop() {
        if !chosen.is_empty() {
            out.push(chosen.iter().map(|&i| elements[i].clone()).collect());
            if out.len() > cap {
                return Err(EvolvingError::CapExceeded(cap));
            }
        }
        if chosen.len() < r {
            for i in start..m {
                let mut next = chosen.clone();
                next.push(i);
                stack.push((i + 1, next));
            }
        }
    }
    Ok(out)
}

fn connected_sets(spec: &GroupSpec, mu: &DiscreteLaw, r: usize, cap: usize) -> Result<Vec<ElementSet>, EvolvingError> {
    let e = spec.identity();
    let mut moves: Vec<GroupElement> = Vec::new();
    for (g, _) in mu.iter().filter(|(g, _)| **g != e) {
        moves.push(g.clone());
        moves.push(spec.inverse_unchecked(g));
    }
    let mut seen: HashSet<Vec<GroupElement>> = HashSet::new();
    let mut frontier = vec![ElementSet::from([e])];
    let mut out = frontier.clone();
    for _ in 1..r {
        let mut next = Vec::new();
        for set in &frontier {
            for x in set {
                for g in &moves {
                    let mut y = x.clone();
                    spec.mul_right(&mut y, g);
                    if set.contains(&y) {
                        continue;
                    }
                    let mut grown = set.clone();
                    grown.insert(y);
                    if seen.insert(grown.iter().cloned().collect()) {
                        next.push(grown);
                        if out.len() + next.len() > cap {
                            return Err(EvolvingError::CapExceeded(cap));
                        }
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// `(r, Φ(r), ψ(r))` for `r = 1..=r_max`.
pub fn iso_profile_table(
    spec: &GroupSpec,
    mu: &DiscreteLaw,
    r_max: usize,
    scope: SearchScope,
) -> Result<Vec<ProfileRow>, EvolvingError> {
    let (sets, status) = match scope {
        SearchScope::Exhaustive => {
            let elements = spec
                .enumerate_finite()
                .ok_or_else(|| EvolvingError::NotFinite { what: "exhaustive search", group: spec.to_string() })?;
            (all_subsets(&elements, r_max, DEFAULT_SET_CAP)?, ProfileStatus::Complete)
        }
        SearchScope::Connected { cap } => (connected_sets(spec, mu, r_max, cap)?, ProfileStatus::Restricted),
    };
    let mut phi = vec![f64::INFINITY; r_max + 1];
    let mut psis = vec![f64::INFINITY; r_max + 1];
    let mut counts = vec![0usize; r_max + 1];
    for set in &sets {
        let s = set.len();
        phi[s] = phi[s].min(bottleneck(spec, set, mu)?);
        psis[s] = psis[s].min(psi(spec, set, mu)?);
        counts[s] += 1;
    }
    let mut rows = Vec::with_capacity(r_max);
    let (mut best_phi, mut best_psi, mut total) = (f64::INFINITY, f64::INFINITY, 0);
    for r in 1..=r_max {
        best_phi = best_phi.min(phi[r]);
        best_psi = best_psi.min(psis[r]);
        total += counts[r];
        rows.push(ProfileRow { r, phi: best_phi, psi: best_psi, sets: total, status });
    }
    Ok(rows)
}

/// `Φ(r) = inf{Φ(A) : |A| ≤ r}` over the scope, with `ψ(r)` alongside.
pub fn iso_profile(spec: &GroupSpec, mu: &DiscreteLaw, r: usize, scope: SearchScope) -> Result<ProfileRow, EvolvingError> {
    iso_profile_table(spec, mu, r, scope)?.pop().ok_or(EvolvingError::EmptySet)
}

/// Pieces of the Doob transform with their probabilities `ℓ_i |A_i| / |W|`.
pub fn doob_weights(spec: &GroupSpec, w: &ElementSet, kernel: &Kernel) -> Vec<(f64, ElementSet)> {
    let size = w.len() as f64;
    threshold_pieces(spec, w, kernel)
        .into_iter()
        .filter(|p| !p.set.is_empty())
        .map(|p| (p.length * p.set.len() as f64 / size, p.set))
        .collect()
}

/// One step of the size-biased chain; never empty for nonempty `W`.
pub fn doob_step(spec: &GroupSpec, w: &ElementSet, kernel: &Kernel, rng: &mut StreamRng) -> Result<ElementSet, EvolvingError> {
    if w.is_empty() {
        return Err(EvolvingError::EmptySet);
    }
    if let Kernel::Deterministic(g) = kernel {
        return Ok(translate(spec, w, g));
    }
    let mut pieces = doob_weights(spec, w, kernel);
    let total: f64 = pieces.iter().map(|p| p.0).sum();
    let mut u = rng.next_f64() * total;
    let last = pieces.len() - 1;
    for (i, (p, _)) in pieces.iter().enumerate() {
        if u < *p || i == last {
            return Ok(pieces.swap_remove(i).1);
        }
        u -= p;
    }
    unreachable!("pieces are nonempty")
}

/// `|W_j|` along one run started from `W_k = start`.
pub fn evolving_trace(
    seq: &KernelSeq,
    start: &ElementSet,
    k: usize,
    l: usize,
    doob: bool,
    rng: &mut StreamRng,
) -> Result<Vec<(usize, usize)>, EvolvingError> {
    seq.check_window(k, l)?;
    let mut w = start.clone();
    let mut out = vec![(k, w.len())];
    for j in k + 1..=l {
        w = if doob {
            doob_step(&seq.spec, &w, seq.kernel(j), rng)?
        } else {
            evolve_step(&seq.spec, &w, seq.kernel(j), rng.open01())
        };
        out.push((j, w.len()));
    }
    Ok(out)
}

/// Monte Carlo estimate of `P(y ∈ W_l | W_k = {x})`.
pub fn transition_via_evolving_sets(
    seq: &KernelSeq,
    x: &GroupElement,
    y: &GroupElement,
    k: usize,
    l: usize,
    trials: u64,
    seed: u64,
) -> Result<Estimate, EvolvingError> {
    seq.check_window(k, l)?;
    let hits = mc::count_hits(
        trials,
        seed,
        || (),
        |_, rng| -> Result<bool, EvolvingError> {
            let mut w = ElementSet::from([x.clone()]);
            for j in k + 1..=l {
                if w.is_empty() {
                    return Ok(false);
                }
                w = evolve_step(&seq.spec, &w, seq.kernel(j), rng.open01());
            }
            Ok(w.contains(y))
        },
    )?;
    Ok(Estimate::proportion(hits, trials))
}

/// Exact law of `W_l` given `W_k = start`, by enumerating the pieces of every step.
pub fn evolving_set_law(seq: &KernelSeq, start: &ElementSet, k: usize, l: usize) -> Result<BTreeMap<ElementSet, f64>, EvolvingError> {
    seq.check_window(k, l)?;
    let mut law = BTreeMap::from([(start.clone(), 1.0)]);
    for j in k + 1..=l {
        let mut next: BTreeMap<ElementSet, f64> = BTreeMap::new();
        for (w, p) in &law {
            if w.is_empty() {
                *next.entry(ElementSet::new()).or_insert(0.0) += p;
                continue;
            }
            for piece in threshold_pieces(&seq.spec, w, seq.kernel(j)) {
                *next.entry(piece.set).or_insert(0.0) += p * piece.length;
            }
        }
        law = next;
    }
    Ok(law)
}

/// `E(√|W_l| | W_k = start)`, exactly.
pub fn expected_sqrt_size(seq: &KernelSeq, start: &ElementSet, k: usize, l: usize) -> Result<f64, EvolvingError> {
    Ok(evolving_set_law(seq, start, k, l)?.iter().map(|(w, p)| p * (w.len() as f64).sqrt()).sum())
}

pub type Matrix = Vec<Vec<f64>>;

fn finite_elements(spec: &GroupSpec) -> Result<Vec<GroupElement>, EvolvingError> {
    spec.enumerate_finite().ok_or_else(|| EvolvingError::NotFinite { what: "dense kernels", group: spec.to_string() })
}

/// `P` as a matrix indexed by [`GroupSpec::enumerate_finite`].
pub fn dense_kernel(spec: &GroupSpec, kernel: &Kernel) -> Result<Matrix, EvolvingError> {
    let elements = finite_elements(spec)?;
    Ok(elements.iter().map(|x| elements.iter().map(|y| kernel.prob(spec, x, y)).collect()).collect())
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let m = b[0].len();
    a.iter()
        .map(|row| (0..m).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

/// `P_{k,l} = P_{k+1} ⋯ P_l`, the identity when `k = l`.
pub fn dense_composition(seq: &KernelSeq, k: usize, l: usize) -> Result<Matrix, EvolvingError> {
    seq.check_window(k, l)?;
    let size = finite_elements(&seq.spec)?.len();
    let mut out: Matrix = (0..size).map(|i| (0..size).map(|j| (i == j) as u8 as f64).collect()).collect();
    for j in k + 1..=l {
        out = mat_mul(&out, &dense_kernel(&seq.spec, seq.kernel(j))?);
    }
    Ok(out)
}

/// Position of `x` in [`GroupSpec::enumerate_finite`].
pub fn dense_index(spec: &GroupSpec, x: &GroupElement) -> Result<usize, EvolvingError> {
    finite_elements(spec)?
        .iter()
        .position(|y| y == x)
        .ok_or_else(|| EvolvingError::Group(GroupError::WrongGroup { group: spec.to_string(), element: format!("{x:?}") }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::StepDistribution;

    fn lazy_z() -> (GroupSpec, DiscreteLaw) {
        let spec = GroupSpec::Lattice(1);
        let mu = StepDistribution::lazy(&spec, 0.5).unwrap().as_discrete().unwrap().clone();
        (spec, mu)
    }

    fn lat(v: i64) -> GroupElement {
        GroupElement::Lattice(vec![v])
    }

    #[test]
    fn threshold_example_on_z() {
        let (spec, mu) = lazy_z();
        let k = Kernel::Mu(Arc::new(mu));
        let w = ElementSet::from([lat(0)]);
        assert_eq!(evolve_step(&spec, &w, &k, 0.2), ElementSet::from([lat(-1), lat(0), lat(1)]));
        assert_eq!(evolve_step(&spec, &w, &k, 0.25), ElementSet::from([lat(-1), lat(0), lat(1)]));
        assert_eq!(evolve_step(&spec, &w, &k, 0.3), ElementSet::from([lat(0)]));
        assert_eq!(evolve_step(&spec, &w, &k, 0.5), ElementSet::from([lat(0)]));
        assert!(evolve_step(&spec, &w, &k, 0.51).is_empty());
        let pieces = threshold_pieces(&spec, &w, &k);
        assert_eq!(pieces.len(), 3);
        assert!((expected_size(&pieces) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn psi_example() {
        let (spec, mu) = lazy_z();
        let v = psi(&spec, &ElementSet::from([lat(0)]), &mu).unwrap();
        assert!((v - (1.0 - (3f64.sqrt() + 1.0) / 4.0)).abs() < 1e-15);
        assert!((v - 0.316_987_298_107_780_7).abs() < 1e-12);
        let delta = DiscreteLaw::new(&spec, vec![(lat(0), 1.0)]).unwrap();
        assert_eq!(psi(&spec, &ElementSet::from([lat(3), lat(5)]), &delta).unwrap(), 0.0);
        assert_eq!(psi(&spec, &ElementSet::new(), &delta), Err(EvolvingError::EmptySet));
    }

    #[test]
    fn bottleneck_examples() {
        let spec = GroupSpec::cycle(8).unwrap();
        let mu = StepDistribution::lazy(&spec, 0.5).unwrap().as_discrete().unwrap().clone();
        let single = ElementSet::from([GroupElement::Cycle(0)]);
        assert!((bottleneck(&spec, &single, &mu).unwrap() - 0.5).abs() < 1e-15);
        let arc: ElementSet = (0..4).map(GroupElement::Cycle).collect();
        assert!((bottleneck(&spec, &arc, &mu).unwrap() - 0.125).abs() < 1e-15);
        let all: ElementSet = (0..8).map(GroupElement::Cycle).collect();
        assert_eq!(bottleneck(&spec, &all, &mu).unwrap(), 0.0);
        assert_eq!(edge_boundary(&spec, &arc, &mu), 2);
    }

    #[test]
    fn doob_example() {
        let (spec, mu) = lazy_z();
        let k = Kernel::Mu(Arc::new(mu));
        let weights = doob_weights(&spec, &ElementSet::from([lat(0)]), &k);
        assert_eq!(weights.len(), 2);
        for (p, set) in &weights {
            match set.len() {
                3 => assert!((p - 0.75).abs() < 1e-15),
                1 => assert!((p - 0.25).abs() < 1e-15),
                _ => panic!("unexpected piece"),
            }
        }
        let mut rng = StreamRng::from_seed(3);
        let w = doob_step(&spec, &ElementSet::from([lat(2)]), &Kernel::Deterministic(lat(1)), &mut rng).unwrap();
        assert_eq!(w, ElementSet::from([lat(3)]));
    }

    #[test]
    fn translation_on_cycle() {
        let spec = GroupSpec::cycle(5).unwrap();
        let w = ElementSet::from([GroupElement::Cycle(4), GroupElement::Cycle(1)]);
        let out = evolve_step(&spec, &w, &Kernel::Deterministic(GroupElement::Cycle(1)), 0.99);
        assert_eq!(out, ElementSet::from([GroupElement::Cycle(0), GroupElement::Cycle(2)]));
    }

    #[test]
    fn forest_kernels() {
        let spec = GroupSpec::cycle(5).unwrap();
        let mu = StepDistribution::uniform(&spec).unwrap().as_discrete().unwrap().clone();
        let fig1 = PercolatedForest::from_parts(&[1, 1, 2, 3, 4, 5], &[true, false, false, true, true, true]).unwrap();
        let steps = vec![GroupElement::Cycle(1); 7];
        let seq = kernel_seq_from_forest(&fig1, &steps, &spec, &mu).unwrap();
        assert!(seq.kernels.iter().all(|k| !k.is_mu()));
        let lonely = PercolatedForest::from_parts(&[1, 1, 2], &[false, false, false]).unwrap();
        let seq = kernel_seq_from_forest(&lonely, &steps[..4], &spec, &mu).unwrap();
        assert!(seq.kernels.iter().all(Kernel::is_mu));
        let one = PercolatedForest::from_parts(&[], &[]).unwrap();
        let seq = kernel_seq_from_forest(&one, &steps[..1], &spec, &mu).unwrap();
        assert_eq!(seq.len(), 1);
        assert!(seq.kernel(1).is_mu());
    }

    #[test]
    fn restricted_profile_on_z() {
        let (spec, mu) = lazy_z();
        let rows = iso_profile_table(&spec, &mu, 4, SearchScope::Connected { cap: 1000 }).unwrap();
        for row in &rows {
            // Intervals of length r are optimal on Z.
            assert!((row.phi - 0.5 / row.r as f64).abs() < 1e-15);
            assert_eq!(row.status, ProfileStatus::Restricted);
        }
    }
}
