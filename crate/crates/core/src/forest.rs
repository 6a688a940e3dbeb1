//! Percolated random recursive forests.
//!
//! Vertex `j >= 2` attaches to a uniform earlier vertex `u_j`, and the edge is
//! kept with probability `alpha`. Clusters are the components of the kept
//! edges; each is rooted at its smallest label, which is exactly a vertex
//! whose edge was deleted (vertex 1 has none). Roots receive fresh steps, and
//! every other vertex copies its parent's step through the transformation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::estimators::Estimate;
use crate::mc;
use crate::rng::StreamRng;
use crate::sampler::{Sampler, SamplerError, SrrwConfig, WalkTrace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForestError {
    #[error("forest needs at least one vertex")]
    Empty,
    #[error("invalid parent {parent} for vertex {vertex}")]
    BadParent { vertex: usize, parent: usize },
    #[error("malformed forest dump line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A grown forest on `1..=n`. Index 0 is unused in both arrays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PercolatedForest {
    n: usize,
    parent: Vec<usize>,
    retained: Vec<bool>,
}

/// Cluster structure of a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterStats {
    /// `root_of[j]` for `j` in `1..=n`; entry 0 is unused.
    pub root_of: Vec<usize>,
    /// Root label to cluster size.
    pub sizes: BTreeMap<usize, usize>,
    /// Number of singleton clusters, `I(n)`.
    pub isolated_count: usize,
}

/// Union-find with path compression. Every union links a vertex to a parent
/// with a smaller label, and the representative is always kept at the
/// smaller of the two roots, so each class is represented by its minimum.
struct UnionFind {
    up: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { up: (0..=n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.up[root] != root {
            root = self.up[root];
        }
        while self.up[x] != root {
            let next = self.up[x];
            self.up[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.up[hi] = lo;
        }
    }
}

impl PercolatedForest {
    /// Builds a forest from parents `u_2..u_n` and flags `xi_2..xi_n`.
    pub fn from_parts(parents: &[usize], retained: &[bool]) -> Result<Self, ForestError> {
        assert_eq!(parents.len(), retained.len());
        let n = parents.len() + 1;
        let mut parent = vec![0; n + 1];
        let mut kept = vec![false; n + 1];
        for (k, (&u, &xi)) in parents.iter().zip(retained).enumerate() {
            let j = k + 2;
            if u < 1 || u >= j {
                return Err(ForestError::BadParent { vertex: j, parent: u });
            }
            parent[j] = u;
            kept[j] = xi;
        }
        Ok(Self { n, parent, retained: kept })
    }

    /// Grows a forest with `n` vertices from `rng`.
    pub fn grow_with(n: usize, alpha: f64, rng: &mut StreamRng) -> Result<Self, ForestError> {
        if n == 0 {
            return Err(ForestError::Empty);
        }
        let mut parent = vec![0; n + 1];
        let mut retained = vec![false; n + 1];
        for j in 2..=n {
            retained[j] = rng.bernoulli(alpha);
            parent[j] = rng.below(j as u64 - 1) as usize + 1;
        }
        Ok(Self { n, parent, retained })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `u_j` for `j >= 2`.
    pub fn parent(&self, j: usize) -> usize {
        self.parent[j]
    }

    /// `xi_j`; false for `j = 1`.
    pub fn retained(&self, j: usize) -> bool {
        self.retained[j]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent[2.min(self.n + 1)..]
    }

    pub fn flags(&self) -> &[bool] {
        &self.retained[2.min(self.n + 1)..]
    }

    pub fn is_root(&self, j: usize) -> bool {
        !self.retained[j]
    }

    pub fn clusters(&self) -> ClusterStats {
        let mut uf = UnionFind::new(self.n);
        for j in 2..=self.n {
            if self.retained[j] {
                uf.union(j, self.parent[j]);
            }
        }
        let mut root_of = vec![0; self.n + 1];
        let mut sizes = BTreeMap::new();
        for (j, slot) in root_of.iter_mut().enumerate().skip(1) {
            let r = uf.find(j);
            *slot = r;
            *sizes.entry(r).or_insert(0) += 1;
        }
        let isolated_count = sizes.values().filter(|&&s| s == 1).count();
        ClusterStats { root_of, sizes, isolated_count }
    }

    /// Cluster sizes indexed by root label (zero for non-roots), found in one
    /// backward pass; cheaper than [`PercolatedForest::clusters`].
    pub fn root_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.n + 1];
        size[0] = 0;
        for j in (2..=self.n).rev() {
            if self.retained[j] {
                size[self.parent[j]] += size[j];
                size[j] = 0;
            }
        }
        size
    }

    /// `I(n)` without building the full cluster map.
    pub fn isolated_count(&self) -> usize {
        self.isolated_flags().iter().filter(|&&b| b).count()
    }

    /// `flags[j]` is true when `j` is a singleton cluster.
    pub fn isolated_flags(&self) -> Vec<bool> {
        let mut has_child = vec![false; self.n + 1];
        for j in 2..=self.n {
            if self.retained[j] {
                has_child[self.parent[j]] = true;
            }
        }
        (0..=self.n).map(|j| j >= 1 && !self.retained[j] && !has_child[j]).collect()
    }

    /// CSV dump with header `j,u_j,xi_j`; vertex 1 has `u_1 = 0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,u_j,xi_j\n");
        for j in 1..=self.n {
            let _ = writeln!(out, "{j},{},{}", self.parent[j], self.retained[j] as u8);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ForestError> {
        let mut parents = Vec::new();
        let mut flags = Vec::new();
        let mut expected = 1;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("j,") {
                continue;
            }
            let bad = |reason: &str| ForestError::Parse { line: i + 1, reason: reason.to_string() };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad("expected three fields"));
            }
            let j: usize = fields[0].parse().map_err(|_| bad("bad vertex"))?;
            let u: usize = fields[1].parse().map_err(|_| bad("bad parent"))?;
            let xi = match fields[2] {
                "0" => false,
                "1" => true,
                _ => return Err(bad("flag must be 0 or 1")),
            };
            if j != expected {
                return Err(bad("vertices must be listed in order from 1"));
            }
            if j == 1 {
                if u != 0 || xi {
                    return Err(bad("vertex 1 has no parent"));
                }
            } else {
                parents.push(u);
                flags.push(xi);
            }
            expected += 1;
        }
        if expected == 1 {
            return Err(ForestError::Empty);
        }
        Self::from_parts(&parents, &flags)
    }
}

/// Grows a forest from the stream seeded by `seed`.
pub fn grow(n: usize, alpha: f64, seed: u64) -> Result<PercolatedForest, ForestError> {
    PercolatedForest::grow_with(n, alpha, &mut StreamRng::from_seed(seed))
}

/// Assigns values along a forest and multiplies them in order.
pub fn assign_and_assemble(forest: &PercolatedForest, config: &SrrwConfig, seed: u64) -> Result<WalkTrace, SamplerError> {
    Sampler::new(config)?.assemble(forest.flags(), forest.parents(), &mut StreamRng::from_seed(seed))
}

/// Law of the signs in [`cluster_size_walk`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignLaw {
    /// Uniform on `{-1, +1}`.
    PlusMinus,
    /// Uniform on `{0, 1}`.
    ZeroOne,
}

/// `sum_j |C_j| g_j` over roots with i.i.d. signs `g_j`, straight from
/// cluster sizes.
pub fn cluster_size_walk_with(alpha: f64, n: usize, rng: &mut StreamRng, law: SignLaw) -> i64 {
    let forest = PercolatedForest::grow_with(n.max(1), alpha, rng).expect("n >= 1");
    let mut total = 0i64;
    for &size in &forest.root_sizes()[1..] {
        if size > 0 {
            let bit = (rng.next_word() >> 63) as i64;
            let g = match law {
                SignLaw::PlusMinus => 2 * bit - 1,
                SignLaw::ZeroOne => bit,
            };
            total += size as i64 * g;
        }
    }
    total
}

pub fn cluster_size_walk(alpha: f64, n: usize, seed: u64, law: SignLaw) -> i64 {
    cluster_size_walk_with(alpha, n, &mut StreamRng::from_seed(seed), law)
}

/// Whether every cluster of the forest has even size.
pub fn all_clusters_even(forest: &PercolatedForest) -> bool {
    forest.root_sizes().iter().all(|s| s % 2 == 0)
}

/// Monte Carlo estimate of the probability that every cluster is even. For
/// odd `n` this is exactly zero (the sizes sum to `n`).
pub fn all_clusters_even_probability(alpha: f64, n: usize, trials: u64, seed: u64) -> Estimate {
    if n % 2 == 1 {
        return Estimate::proportion(0, trials);
    }
    let hits = mc::count_hits(trials, seed, || (), |_, rng| {
        let forest = PercolatedForest::grow_with(n, alpha, rng)?;
        Ok::<_, ForestError>(all_clusters_even(&forest))
    })
    .expect("n >= 2");
    Estimate::proportion(hits, trials)
}

/// Isolated vertices among the last `n` labels of a forest on `m + n` vertices.
pub fn suffix_isolated_count_with(m: usize, n: usize, alpha: f64, rng: &mut StreamRng) -> usize {
    let forest = PercolatedForest::grow_with(m + n, alpha, rng).expect("m + n >= 1");
    forest.isolated_flags()[m + 1..].iter().filter(|&&b| b).count()
}

pub fn suffix_isolated_count(m: usize, n: usize, alpha: f64, seed: u64) -> usize {
    suffix_isolated_count_with(m, n, alpha, &mut StreamRng::from_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{GroupElement, GroupSpec, StepDistribution};
    use crate::sampler::TransformSpec;

    fn figure_one() -> PercolatedForest {
        // u_2..u_7 and xi_2..xi_7
        PercolatedForest::from_parts(&[1, 1, 2, 3, 4, 5], &[true, false, false, true, true, true]).unwrap()
    }

    #[test]
    fn figure_one_clusters() {
        let stats = figure_one().clusters();
        assert_eq!(stats.root_of[1..], [1, 1, 3, 4, 3, 4, 3]);
        assert_eq!(stats.sizes, BTreeMap::from([(1, 2), (3, 3), (4, 2)]));
        assert_eq!(stats.isolated_count, 0);
        assert_eq!(figure_one().isolated_count(), 0);
        assert_eq!(figure_one().root_sizes(), vec![0, 2, 0, 3, 2, 0, 0, 0]);
    }

    #[test]
    fn degenerate_forests() {
        let one = grow(1, 0.5, 1).unwrap();
        assert_eq!(one.clusters().isolated_count, 1);
        let all_cut = grow(20, 0.0, 1).unwrap();
        assert_eq!(all_cut.clusters().isolated_count, 20);
        let chain = PercolatedForest::from_parts(&(1..9).collect::<Vec<_>>(), &[true; 8]).unwrap();
        let stats = chain.clusters();
        assert_eq!(stats.sizes, BTreeMap::from([(1, 9)]));
        assert_eq!(stats.isolated_count, 0);
    }

    #[test]
    fn figure_one_assembly() {
        // Identity transforms on Z^3 with three distinct fresh values: the
        // walk position is sum |C_j| g_j over roots.
        let g = GroupSpec::Lattice(3);
        let mu = StepDistribution::lazy(&g, 0.4).unwrap();
        let c = SrrwConfig::new(g.clone(), 0.5, mu, TransformSpec::Identity).unwrap();
        let f = figure_one();
        let trace = assign_and_assemble(&f, &c, 11).unwrap();
        let x = &trace.steps;
        assert_eq!(x[1], x[0]);
        assert_eq!(x[4], x[2]);
        assert_eq!(x[6], x[2]);
        assert_eq!(x[5], x[3]);
        let mut expect = vec![0i64; 3];
        for (root, size) in f.clusters().sizes {
            let GroupElement::Lattice(v) = &x[root - 1] else { unreachable!() };
            for k in 0..3 {
                expect[k] += size as i64 * v[k];
            }
        }
        assert_eq!(trace.last_position(), &GroupElement::Lattice(expect));
    }

    #[test]
    fn csv_roundtrip() {
        let f = grow(40, 0.6, 3).unwrap();
        assert_eq!(PercolatedForest::from_csv(&f.to_csv()).unwrap(), f);
        assert!(PercolatedForest::from_csv("j,u_j,xi_j\n1,0,0\n2,2,1\n").is_err());
    }

    #[test]
    fn invariants_on_random_forests() {
        for seed in 0..200 {
            let f = grow(60, 0.7, seed).unwrap();
            let stats = f.clusters();
            assert_eq!(stats.sizes.values().sum::<usize>(), 60);
            let roots: Vec<usize> = (1..=60).filter(|&j| f.is_root(j)).collect();
            assert_eq!(stats.sizes.keys().copied().collect::<Vec<_>>(), roots);
            for j in 1..=60 {
                assert!(stats.root_of[j] <= j);
            }
            let sizes = f.root_sizes();
            for (&r, &s) in &stats.sizes {
                assert_eq!(sizes[r], s);
            }
            assert_eq!(f.isolated_count(), stats.isolated_count);
        }
    }

    #[test]
    fn parity_of_cluster_walks() {
        for seed in 0..500 {
            let mut rng = StreamRng::from_seed(seed);
            let f = PercolatedForest::grow_with(9, 0.8, &mut rng).unwrap();
            assert!(!all_clusters_even(&f));
            let mut rng = StreamRng::from_seed(seed);
            let s = cluster_size_walk_with(0.8, 10, &mut rng, SignLaw::ZeroOne);
            let mut rng = StreamRng::from_seed(seed);
            let f = PercolatedForest::grow_with(10, 0.8, &mut rng).unwrap();
            if all_clusters_even(&f) {
                assert_eq!(s % 2, 0);
            }
        }
        assert_eq!(all_clusters_even_probability(0.5, 7, 1000, 1).mean, 0.0);
    }

    #[test]
    fn suffix_counts() {
        assert_eq!(suffix_isolated_count(30, 20, 0.0, 4), 20);
        let mut a = StreamRng::from_seed(8);
        let mut b = StreamRng::from_seed(8);
        assert_eq!(
            suffix_isolated_count_with(0, 25, 0.5, &mut a),
            PercolatedForest::grow_with(25, 0.5, &mut b).unwrap().isolated_count()
        );
    }
}
