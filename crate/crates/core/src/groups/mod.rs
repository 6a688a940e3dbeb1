//! Concrete groups underlying every walk.
//!
//! Elements are stored in a canonical form, so structural equality is group
//! equality for every discrete variant. Real vectors are the exception: they
//! are only ever compared through [`CanonicalKey`] binning.

mod distribution;
mod metric;
mod parse;
mod perm;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

pub use distribution::{ContinuousFamily, DiscreteLaw, StepDistribution, MASS_TOLERANCE};
pub use parse::parse_mu;
pub use metric::{cayley_ball, word_distance, word_distance_within, CayleyBall, DEFAULT_BFS_RADIUS, LAMPLIGHTER_BFS_RADIUS};
pub use perm::Perm3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("invalid group parameter: {0}")]
    InvalidParameter(String),
    #[error("element {element} does not belong to {group}")]
    WrongGroup { group: String, element: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} is not a discrete group")]
    NotDiscrete(String),
    #[error("element lies outside the enumerated ball of radius {radius}")]
    OutOfBall { radius: u32 },
    #[error("cannot parse {what} from {text:?}: {reason}")]
    Parse { what: &'static str, text: String, reason: String },
    #[error("invalid step distribution: {0}")]
    InvalidDistribution(String),
}

/// A concrete group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupSpec {
    /// `Z/2Z`.
    Z2,
    /// `Z/LZ` with `L >= 3`; use [`GroupSpec::cycle`] to route `L = 2` to [`GroupSpec::Z2`].
    Cycle(u32),
    /// The integer lattice `Z^d`.
    Lattice(usize),
    /// Euclidean space `R^d`.
    Euclidean(usize),
    /// Free product of `free` copies of `Z` and `involutions` copies of `Z/2Z`.
    /// Its Cayley graph for the standard generators is the regular tree of
    /// degree `2 * free + involutions`.
    FreeProduct { free: usize, involutions: usize },
    /// The lamplighter group `Z/2 wr Z`, generated by a lamp toggle and `±1` marker moves.
    Lamplighter,
    /// The direct product of the symmetric group on three points with `Z`.
    S3xZ,
}

/// `(lit lamps, marker)` in the lamplighter group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Lamps {
    pub lit: BTreeSet<i64>,
    pub marker: i64,
}

impl Lamps {
    pub fn new(lit: impl IntoIterator<Item = i64>, marker: i64) -> Self {
        Self { lit: lit.into_iter().collect(), marker }
    }

    #[inline]
    fn toggle(&mut self, position: i64) {
        if !self.lit.remove(&position) {
            self.lit.insert(position);
        }
    }
}

/// A group element in canonical form.
///
/// * `Z2`, `Cycle`: residue.
/// * `Lattice`, `Real`: coordinate vector.
/// * `Word`: freely reduced word over letter indices (see [`GroupSpec::letter_name`]).
/// * `Lamp`: lit lamps plus marker.
/// * `S3Z`: permutation and integer.
#[derive(Clone, Debug)]
pub enum GroupElement {
    Z2(u8),
    Cycle(u32),
    Lattice(Vec<i64>),
    Real(Vec<f64>),
    Word(Vec<u8>),
    Lamp(Lamps),
    S3Z(Perm3, i64),
}

impl GroupElement {
    fn rank(&self) -> u8 {
        match self {
            GroupElement::Z2(_) => 0,
            GroupElement::Cycle(_) => 1,
            GroupElement::Lattice(_) => 2,
            GroupElement::Real(_) => 3,
            GroupElement::Word(_) => 4,
            GroupElement::Lamp(_) => 5,
            GroupElement::S3Z(..) => 6,
        }
    }

    /// Key used for histogram bucketing; real vectors fall into bins of width 1.
    pub fn canonical_key(&self) -> CanonicalKey {
        self.canonical_key_binned(1.0)
    }

    /// Key with an explicit bin width for real vectors. Discrete elements map to
    /// themselves; real vectors map to `floor(x_i / width)` per coordinate.
    pub fn canonical_key_binned(&self, width: f64) -> CanonicalKey {
        match self {
            GroupElement::Real(v) => {
                CanonicalKey::Bin(v.iter().map(|x| (x / width).floor() as i64).collect())
            }
            other => CanonicalKey::Exact(other.clone()),
        }
    }
}

// Real coordinates compare by `total_cmp`/bit pattern so elements can live in
// ordered collections; this is storage identity only.
impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for GroupElement {}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        use GroupElement::*;
        match (self, other) {
            (Z2(a), Z2(b)) => a.cmp(b),
            (Cycle(a), Cycle(b)) => a.cmp(b),
            (Lattice(a), Lattice(b)) => a.cmp(b),
            (Real(a), Real(b)) => {
                for (x, y) in a.iter().zip(b) {
                    match x.total_cmp(y) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                a.len().cmp(&b.len())
            }
            (Word(a), Word(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (Lamp(a), Lamp(b)) => a.cmp(b),
            (S3Z(p, a), S3Z(q, b)) => p.cmp(q).then(a.cmp(b)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            GroupElement::Z2(a) => a.hash(state),
            GroupElement::Cycle(a) => a.hash(state),
            GroupElement::Lattice(v) => v.hash(state),
            GroupElement::Real(v) => {
                for x in v {
                    x.to_bits().hash(state);
                }
            }
            GroupElement::Word(w) => w.hash(state),
            GroupElement::Lamp(l) => l.hash(state),
            GroupElement::S3Z(p, z) => {
                p.hash(state);
                z.hash(state);
            }
        }
    }
}

/// Hashable bucket for `P(S_n = x)`-style histograms.
///
/// Discrete elements are their own key. Real vectors are binned, so two keys
/// being equal means "same bin", not "same point".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalKey {
    Exact(GroupElement),
    Bin(Vec<i64>),
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalKey::Exact(e) => write!(f, "{}", parse::format_untyped(e)),
            CanonicalKey::Bin(b) => {
                f.write_str("bin(")?;
                for (i, x) in b.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl GroupSpec {
    /// `Z/LZ`, with `L = 2` routed to [`GroupSpec::Z2`].
    pub fn cycle(length: u32) -> Result<Self, GroupError> {
        match length {
            0 | 1 => Err(GroupError::InvalidParameter(format!("cycle length {length} < 2"))),
            2 => Ok(GroupSpec::Z2),
            l => Ok(GroupSpec::Cycle(l)),
        }
    }

    /// Group whose Cayley graph is the `degree`-regular tree: `degree / 2` free
    /// generators plus one involution when `degree` is odd.
    pub fn regular_tree(degree: usize) -> Result<Self, GroupError> {
        if degree < 2 {
            return Err(GroupError::InvalidParameter(format!("tree degree {degree} < 2")));
        }
        Ok(GroupSpec::FreeProduct { free: degree / 2, involutions: degree % 2 })
    }

    /// The free group on `rank` generators.
    pub fn free_group(rank: usize) -> Result<Self, GroupError> {
        if rank < 1 {
            return Err(GroupError::InvalidParameter("free group of rank 0".into()));
        }
        Ok(GroupSpec::FreeProduct { free: rank, involutions: 0 })
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        let bad = |m: String| Err(GroupError::InvalidParameter(m));
        match *self {
            GroupSpec::Cycle(l) if l < 3 => bad(format!("cycle length {l} < 3 (use Z2 for 2)")),
            GroupSpec::Lattice(0) | GroupSpec::Euclidean(0) => bad("dimension 0".into()),
            GroupSpec::FreeProduct { free, involutions } if 2 * free + involutions < 2 => {
                bad("free product with fewer than 2 letters".into())
            }
            GroupSpec::FreeProduct { free, involutions } if 2 * free + involutions > 52 => {
                bad("free product with more than 52 letters".into())
            }
            _ => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self, GroupSpec::Euclidean(_))
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupSpec::Z2 | GroupSpec::Cycle(_) | GroupSpec::Lattice(_) | GroupSpec::Euclidean(_) => true,
            GroupSpec::FreeProduct { free, involutions } => *free == 0 && *involutions <= 1,
            GroupSpec::Lamplighter | GroupSpec::S3xZ => false,
        }
    }

    /// Order of the group, if finite.
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupSpec::Z2 => Some(2),
            GroupSpec::Cycle(l) => Some(*l as usize),
            _ => None,
        }
    }

    /// All elements of a finite group, in canonical order.
    pub fn enumerate_finite(&self) -> Option<Vec<GroupElement>> {
        match self {
            GroupSpec::Z2 => Some(vec![GroupElement::Z2(0), GroupElement::Z2(1)]),
            GroupSpec::Cycle(l) => Some((0..*l).map(GroupElement::Cycle).collect()),
            _ => None,
        }
    }

    /// Degree of the Cayley tree of a free product.
    pub fn letter_count(&self) -> usize {
        match self {
            GroupSpec::FreeProduct { free, involutions } => 2 * free + involutions,
            _ => 0,
        }
    }

    /// Inverse letter: free generators come in pairs `2i, 2i + 1`; involution
    /// letters are their own inverse.
    #[inline]
    pub fn inverse_letter(&self, letter: u8) -> u8 {
        match self {
            GroupSpec::FreeProduct { free, .. } if (letter as usize) < 2 * free => letter ^ 1,
            _ => letter,
        }
    }

    /// Printable name of a letter: `a`, `a^-1`, `b`, ... with involutions
    /// named after the free generators.
    pub fn letter_name(&self, letter: u8) -> String {
        let free = match self {
            GroupSpec::FreeProduct { free, .. } => *free,
            _ => 0,
        };
        let l = letter as usize;
        let symbol = |i: usize| -> char {
            if i < 26 {
                (b'a' + i as u8) as char
            } else {
                (b'A' + (i - 26) as u8) as char
            }
        };
        if l < 2 * free {
            let base = symbol(l / 2);
            if l % 2 == 0 {
                base.to_string()
            } else {
                format!("{base}^-1")
            }
        } else {
            symbol(free + (l - 2 * free)).to_string()
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::Z2 => GroupElement::Z2(0),
            GroupSpec::Cycle(_) => GroupElement::Cycle(0),
            GroupSpec::Lattice(d) => GroupElement::Lattice(vec![0; *d]),
            GroupSpec::Euclidean(d) => GroupElement::Real(vec![0.0; *d]),
            GroupSpec::FreeProduct { .. } => GroupElement::Word(Vec::new()),
            GroupSpec::Lamplighter => GroupElement::Lamp(Lamps::default()),
            GroupSpec::S3xZ => GroupElement::S3Z(Perm3::IDENTITY, 0),
        }
    }

    /// Resets `a` to the identity, reusing its allocation where possible.
    pub(crate) fn reset_identity(&self, a: &mut GroupElement) {
        match (self, &mut *a) {
            (GroupSpec::Lattice(_), GroupElement::Lattice(v)) => v.iter_mut().for_each(|x| *x = 0),
            (GroupSpec::Euclidean(_), GroupElement::Real(v)) => v.iter_mut().for_each(|x| *x = 0.0),
            (GroupSpec::FreeProduct { .. }, GroupElement::Word(w)) => w.clear(),
            (GroupSpec::Lamplighter, GroupElement::Lamp(l)) => {
                l.lit.clear();
                l.marker = 0;
            }
            _ => *a = self.identity(),
        }
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        *a == self.identity()
    }

    fn wrong(&self, a: &GroupElement) -> GroupError {
        GroupError::WrongGroup { group: self.to_string(), element: format!("{a:?}") }
    }

    /// Checks that `a` is a canonical element of this group.
    pub fn check(&self, a: &GroupElement) -> Result<(), GroupError> {
        match (self, a) {
            (GroupSpec::Z2, GroupElement::Z2(x)) if *x <= 1 => Ok(()),
            (GroupSpec::Cycle(l), GroupElement::Cycle(x)) if x < l => Ok(()),
            (GroupSpec::Lattice(d), GroupElement::Lattice(v)) => {
                if v.len() == *d {
                    Ok(())
                } else {
                    Err(GroupError::DimensionMismatch { expected: *d, found: v.len() })
                }
            }
            (GroupSpec::Euclidean(d), GroupElement::Real(v)) => {
                if v.len() != *d {
                    Err(GroupError::DimensionMismatch { expected: *d, found: v.len() })
                } else if v.iter().any(|x| !x.is_finite()) {
                    Err(self.wrong(a))
                } else {
                    Ok(())
                }
            }
            (GroupSpec::FreeProduct { .. }, GroupElement::Word(w)) => {
                let letters = self.letter_count();
                let in_range = w.iter().all(|&l| (l as usize) < letters);
                let reduced = w.windows(2).all(|p| p[1] != self.inverse_letter(p[0]));
                if in_range && reduced {
                    Ok(())
                } else {
                    Err(self.wrong(a))
                }
            }
            (GroupSpec::Lamplighter, GroupElement::Lamp(_)) => Ok(()),
            (GroupSpec::S3xZ, GroupElement::S3Z(..)) => Ok(()),
            _ => Err(self.wrong(a)),
        }
    }

    /// The product `a · b`.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        let mut out = a.clone();
        self.mul_right(&mut out, b);
        Ok(out)
    }

    /// `a <- a · b` for elements already known to be canonical members.
    #[inline]
    pub(crate) fn mul_right(&self, a: &mut GroupElement, b: &GroupElement) {
        match (self, a, b) {
            (GroupSpec::Z2, GroupElement::Z2(x), GroupElement::Z2(y)) => *x ^= *y,
            (GroupSpec::Cycle(l), GroupElement::Cycle(x), GroupElement::Cycle(y)) => {
                *x = ((*x as u64 + *y as u64) % *l as u64) as u32
            }
            (GroupSpec::Lattice(_), GroupElement::Lattice(x), GroupElement::Lattice(y)) => {
                for (xi, yi) in x.iter_mut().zip(y) {
                    *xi += *yi;
                }
            }
            (GroupSpec::Euclidean(_), GroupElement::Real(x), GroupElement::Real(y)) => {
                for (xi, yi) in x.iter_mut().zip(y) {
                    *xi += *yi;
                }
            }
            (spec @ GroupSpec::FreeProduct { .. }, GroupElement::Word(x), GroupElement::Word(y)) => {
                for &letter in y {
                    if x.last() == Some(&spec.inverse_letter(letter)) {
                        x.pop();
                    } else {
                        x.push(letter);
                    }
                }
            }
            (GroupSpec::Lamplighter, GroupElement::Lamp(x), GroupElement::Lamp(y)) => {
                let shift = x.marker;
                for &p in &y.lit {
                    x.toggle(p + shift);
                }
                x.marker += y.marker;
            }
            (GroupSpec::S3xZ, GroupElement::S3Z(p, z), GroupElement::S3Z(q, w)) => {
                *p = p.then(q);
                *z += *w;
            }
            (spec, a, b) => panic!("mul_right on mismatched elements {a:?}, {b:?} for {spec}"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(self.inverse_unchecked(a))
    }

    pub(crate) fn inverse_unchecked(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (GroupSpec::Z2, GroupElement::Z2(x)) => GroupElement::Z2(*x),
            (GroupSpec::Cycle(l), GroupElement::Cycle(x)) => GroupElement::Cycle((l - x) % l),
            (GroupSpec::Lattice(_), GroupElement::Lattice(v)) => GroupElement::Lattice(v.iter().map(|x| -x).collect()),
            (GroupSpec::Euclidean(_), GroupElement::Real(v)) => GroupElement::Real(v.iter().map(|x| -x).collect()),
            (GroupSpec::FreeProduct { .. }, GroupElement::Word(w)) => {
                GroupElement::Word(w.iter().rev().map(|&l| self.inverse_letter(l)).collect())
            }
            (GroupSpec::Lamplighter, GroupElement::Lamp(l)) => {
                GroupElement::Lamp(Lamps::new(l.lit.iter().map(|p| p - l.marker), -l.marker))
            }
            (GroupSpec::S3xZ, GroupElement::S3Z(p, z)) => GroupElement::S3Z(p.inverse(), -z),
            (spec, a) => panic!("inverse of mismatched element {a:?} for {spec}"),
        }
    }

    /// `a^k` for `k >= 0` by repeated squaring.
    pub fn power(&self, a: &GroupElement, mut k: u64) -> GroupElement {
        let mut result = self.identity();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                self.mul_right(&mut result, &base);
            }
            let b2 = base.clone();
            self.mul_right(&mut base, &b2);
            k >>= 1;
        }
        result
    }

    /// `g^-1 · x · g`.
    pub fn conjugate(&self, x: &GroupElement, g: &GroupElement) -> Result<GroupElement, GroupError> {
        let mut out = self.inverse(g)?;
        self.check(x)?;
        self.mul_right(&mut out, x);
        self.mul_right(&mut out, g);
        Ok(out)
    }

    /// The symmetric generating set used for word metrics and Cayley graphs.
    ///
    /// * `Z2`: `{1}`; `Z_L`: `{1, -1}`; `Z^d`: `{±e_i}`;
    /// * free products: every single letter;
    /// * lamplighter: toggle at the marker, marker moves `±1`;
    /// * `S3 × Z`: the three transpositions and `(Id, ±1)`.
    pub fn generating_set(&self) -> Result<Vec<GroupElement>, GroupError> {
        Ok(match self {
            GroupSpec::Z2 => vec![GroupElement::Z2(1)],
            GroupSpec::Cycle(l) => vec![GroupElement::Cycle(1), GroupElement::Cycle(l - 1)],
            GroupSpec::Lattice(d) => {
                let mut gens = Vec::with_capacity(2 * d);
                for i in 0..*d {
                    for s in [1, -1] {
                        let mut v = vec![0; *d];
                        v[i] = s;
                        gens.push(GroupElement::Lattice(v));
                    }
                }
                gens
            }
            GroupSpec::Euclidean(_) => return Err(GroupError::NotDiscrete(self.to_string())),
            GroupSpec::FreeProduct { .. } => {
                (0..self.letter_count() as u8).map(|l| GroupElement::Word(vec![l])).collect()
            }
            GroupSpec::Lamplighter => vec![
                GroupElement::Lamp(Lamps::new([0], 0)),
                GroupElement::Lamp(Lamps::new([], 1)),
                GroupElement::Lamp(Lamps::new([], -1)),
            ],
            GroupSpec::S3xZ => vec![
                GroupElement::S3Z(Perm3::transposition(1, 2), 0),
                GroupElement::S3Z(Perm3::transposition(1, 3), 0),
                GroupElement::S3Z(Perm3::transposition(2, 3), 0),
                GroupElement::S3Z(Perm3::IDENTITY, 1),
                GroupElement::S3Z(Perm3::IDENTITY, -1),
            ],
        })
    }

    /// Parses an element literal for this group. Syntax per variant:
    ///
    /// * `z2`, `cycle:L`: an integer (reduced mod the order), or `e`;
    /// * `zd:d`, `rd:d`: `(x1,...,xd)`, or `e`;
    /// * `tree:d`, `free:k`: a word such as `a b^-1 a` (`e` for the empty word);
    /// * `lamplighter`: `({0,2},1)`: lit lamps, then marker;
    /// * `s3xz`: `((12),0)`, `(Id,-1)`.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement, GroupError> {
        parse::parse_element(self, text)
    }

    /// Inverse of [`GroupSpec::parse_element`].
    pub fn format_element(&self, a: &GroupElement) -> String {
        parse::format_element(self, a)
    }

    /// Whether `mu(g^-1 x g) = mu(x)` for every support atom `x` and every
    /// generator `g`. Conjugation by generators generates all conjugations, so
    /// this decides the question for finitely supported `mu`.
    pub fn is_class_function(&self, mu: &StepDistribution) -> Result<ClassFunctionCheck, GroupError> {
        let law = match mu {
            StepDistribution::Discrete(law) => law,
            StepDistribution::Continuous { .. } => return Err(GroupError::NotDiscrete(self.to_string())),
        };
        if !self.is_discrete() {
            return Err(GroupError::NotDiscrete(self.to_string()));
        }
        let gens = self.generating_set()?;
        // With a symmetric generating set it suffices to check support atoms:
        // a conjugate landing outside the support shows up as a mass mismatch.
        for (x, mass) in law.iter() {
            for g in &gens {
                let conj = self.conjugate(x, g)?;
                let other = law.mass_of(&conj);
                if (other - mass).abs() > 1e-12 {
                    return Ok(ClassFunctionCheck::Violated {
                        element: x.clone(),
                        conjugator: g.clone(),
                        conjugate: conj,
                        masses: (mass, other),
                    });
                }
            }
        }
        Ok(ClassFunctionCheck::Holds)
    }
}

/// Outcome of [`GroupSpec::is_class_function`].
#[derive(Clone, Debug, PartialEq)]
pub enum ClassFunctionCheck {
    Holds,
    /// `mu(conjugator^-1 · element · conjugator) != mu(element)`.
    Violated { element: GroupElement, conjugator: GroupElement, conjugate: GroupElement, masses: (f64, f64) },
}

impl ClassFunctionCheck {
    pub fn holds(&self) -> bool {
        matches!(self, ClassFunctionCheck::Holds)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Z2 => f.write_str("z2"),
            GroupSpec::Cycle(l) => write!(f, "cycle:{l}"),
            GroupSpec::Lattice(d) => write!(f, "zd:{d}"),
            GroupSpec::Euclidean(d) => write!(f, "rd:{d}"),
            GroupSpec::FreeProduct { free, involutions } => {
                if *involutions <= 1 {
                    write!(f, "tree:{}", 2 * free + involutions)
                } else {
                    write!(f, "freeprod:{free}:{involutions}")
                }
            }
            GroupSpec::Lamplighter => f.write_str("lamplighter"),
            GroupSpec::S3xZ => f.write_str("s3xz"),
        }
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = GroupError;

    /// `z2`, `cycle:L`, `zd:d`, `rd:d`, `tree:d`, `free:k`, `freeprod:k:m`,
    /// `lamplighter`, `s3xz`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_group(s)
    }
}

#[cfg(test)]
mod tests;
