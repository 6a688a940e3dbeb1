use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use super::{GroupElement, GroupError, GroupSpec};

/// Default radius of the enumerated Cayley ball for BFS-based distances.
pub const DEFAULT_BFS_RADIUS: u32 = 30;

/// Radius used when a lamplighter distance is checked against BFS.
pub const LAMPLIGHTER_BFS_RADIUS: u32 = 12;

/// Ball of the Cayley graph around the identity, with exact distances.
#[derive(Debug)]
pub struct CayleyBall {
    radius: u32,
    distance: HashMap<GroupElement, u32>,
}

impl CayleyBall {
    pub fn build(spec: &GroupSpec, radius: u32) -> Result<Self, GroupError> {
        let gens = spec.generating_set()?;
        let mut distance = HashMap::new();
        let mut queue = VecDeque::new();
        let e = spec.identity();
        distance.insert(e.clone(), 0);
        queue.push_back(e);
        while let Some(x) = queue.pop_front() {
            let d = distance[&x];
            if d == radius {
                continue;
            }
            for g in &gens {
                let mut y = x.clone();
                spec.mul_right(&mut y, g);
                if !distance.contains_key(&y) {
                    distance.insert(y.clone(), d + 1);
                    queue.push_back(y);
                }
            }
        }
        Ok(Self { radius, distance })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.distance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distance.is_empty()
    }

    pub fn distance(&self, a: &GroupElement) -> Result<u32, GroupError> {
        self.distance.get(a).copied().ok_or(GroupError::OutOfBall { radius: self.radius })
    }

    pub fn elements(&self) -> impl Iterator<Item = (&GroupElement, u32)> + '_ {
        self.distance.iter().map(|(x, d)| (x, *d))
    }
}

type BallCache = Mutex<HashMap<(GroupSpec, u32), Arc<CayleyBall>>>;

/// Memoized ball; built once per `(spec, radius)` and shared read-only.
pub fn cayley_ball(spec: &GroupSpec, radius: u32) -> Result<Arc<CayleyBall>, GroupError> {
    static CACHE: OnceLock<BallCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(ball) = cache.lock().expect("ball cache poisoned").get(&(spec.clone(), radius)) {
        return Ok(Arc::clone(ball));
    }
    let ball = Arc::new(CayleyBall::build(spec, radius)?);
    cache
        .lock()
        .expect("ball cache poisoned")
        .entry((spec.clone(), radius))
        .or_insert_with(|| Arc::clone(&ball));
    Ok(ball)
}

/// Graph distance from `e` to `a` in the Cayley graph of the standard
/// generating set.
///
/// Closed forms are used for `Z2`, `Z_L`, `Z^d`, free products and the
/// lamplighter (lamp count plus the shortest marker tour). `S3 × Z` goes
/// through a memoized BFS ball of radius [`DEFAULT_BFS_RADIUS`].
pub fn word_distance(spec: &GroupSpec, a: &GroupElement) -> Result<u32, GroupError> {
    word_distance_within(spec, a, DEFAULT_BFS_RADIUS)
}

/// [`word_distance`] with an explicit BFS radius for ball-based variants.
pub fn word_distance_within(spec: &GroupSpec, a: &GroupElement, radius: u32) -> Result<u32, GroupError> {
    spec.check(a)?;
    match (spec, a) {
        (GroupSpec::Z2, GroupElement::Z2(x)) => Ok(*x as u32),
        (GroupSpec::Cycle(l), GroupElement::Cycle(m)) => Ok((*m).min(l - m)),
        (GroupSpec::Lattice(_), GroupElement::Lattice(v)) => Ok(v.iter().map(|x| x.unsigned_abs()).sum::<u64>() as u32),
        (GroupSpec::FreeProduct { .. }, GroupElement::Word(w)) => Ok(w.len() as u32),
        (GroupSpec::Lamplighter, GroupElement::Lamp(l)) => {
            let lo = l.lit.iter().next().copied().unwrap_or(0).min(0).min(l.marker);
            let hi = l.lit.iter().next_back().copied().unwrap_or(0).max(0).max(l.marker);
            let left_first = -lo + (hi - lo) + (hi - l.marker);
            let right_first = hi + (hi - lo) + (l.marker - lo);
            Ok(l.lit.len() as u32 + left_first.min(right_first) as u32)
        }
        (GroupSpec::S3xZ, _) => cayley_ball(spec, radius)?.distance(a),
        (GroupSpec::Euclidean(_), _) => Err(GroupError::NotDiscrete(spec.to_string())),
        _ => unreachable!("check() rejects mismatched elements"),
    }
}
