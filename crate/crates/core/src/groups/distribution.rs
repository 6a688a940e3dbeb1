use super::{GroupElement, GroupError, GroupSpec};

/// Tolerance on the total mass of a discrete law.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finitely supported probability measure on a group.
///
/// Atoms are kept in canonical element order, which makes `mass_of` a binary
/// search and gives every law a reproducible iteration order.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteLaw {
    atoms: Vec<GroupElement>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteLaw {
    pub fn new(spec: &GroupSpec, atoms: Vec<(GroupElement, f64)>) -> Result<Self, GroupError> {
        if atoms.is_empty() {
            return Err(GroupError::InvalidDistribution("empty support".into()));
        }
        let mut atoms = atoms;
        for (x, w) in &atoms {
            spec.check(x)?;
            if !(w.is_finite() && *w > 0.0) {
                return Err(GroupError::InvalidDistribution(format!(
                    "weight {w} of {} is not strictly positive",
                    spec.format_element(x)
                )));
            }
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(pair) = atoms.windows(2).find(|p| p[0].0 == p[1].0) {
            return Err(GroupError::InvalidDistribution(format!(
                "atom {} listed twice",
                spec.format_element(&pair[0].0)
            )));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(GroupError::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        let (atoms, weights): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        Ok(Self { atoms, weights, cumulative })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[GroupElement] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, f64)> + '_ {
        self.atoms.iter().zip(self.weights.iter().copied())
    }

    pub fn index_of(&self, x: &GroupElement) -> Option<usize> {
        self.atoms.binary_search(x).ok()
    }

    pub fn mass_of(&self, x: &GroupElement) -> f64 {
        self.index_of(x).map_or(0.0, |i| self.weights[i])
    }

    /// `mu_*`, the smallest atom weight.
    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Atom index for a uniform variate `u` in `[0, 1)`.
    #[inline]
    pub fn index_for(&self, u: f64) -> usize {
        let scaled = u * self.cumulative[self.cumulative.len() - 1];
        self.cumulative.partition_point(|&c| c <= scaled).min(self.atoms.len() - 1)
    }

    /// The law of `x^-1` when `x ~ self`.
    pub fn reflect(&self, spec: &GroupSpec) -> DiscreteLaw {
        let atoms = self.iter().map(|(x, w)| (spec.inverse_unchecked(x), w)).collect();
        DiscreteLaw::new(spec, atoms).expect("reflection of a valid law is valid")
    }

    pub fn is_symmetric(&self, spec: &GroupSpec) -> bool {
        self.iter().all(|(x, w)| (self.mass_of(&spec.inverse_unchecked(x)) - w).abs() <= MASS_TOLERANCE)
    }
}

/// Continuous step laws on `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContinuousFamily {
    /// Standard Gaussian vector.
    Gaussian,
    /// Uniform on the unit sphere.
    Sphere,
    /// Uniform on `{±e_i}`.
    Axes,
}

impl ContinuousFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ContinuousFamily::Gaussian => "gaussian",
            ContinuousFamily::Sphere => "sphere",
            ContinuousFamily::Axes => "axes",
        }
    }
}

/// The step distribution `mu`.
#[derive(Clone, Debug, PartialEq)]
pub enum StepDistribution {
    Discrete(DiscreteLaw),
    Continuous { family: ContinuousFamily, dim: usize },
}

impl StepDistribution {
    pub fn discrete(spec: &GroupSpec, atoms: Vec<(GroupElement, f64)>) -> Result<Self, GroupError> {
        DiscreteLaw::new(spec, atoms).map(StepDistribution::Discrete)
    }

    /// Uniform on the generating set; on `Z2` uniform on both elements.
    pub fn uniform(spec: &GroupSpec) -> Result<Self, GroupError> {
        if *spec == GroupSpec::Z2 {
            return Self::discrete(spec, vec![(GroupElement::Z2(0), 0.5), (GroupElement::Z2(1), 0.5)]);
        }
        let gens = spec.generating_set()?;
        let w = 1.0 / gens.len() as f64;
        Self::discrete(spec, gens.into_iter().map(|g| (g, w)).collect())
    }

    /// Mass `lazy` at the identity, the rest uniform on the generating set.
    pub fn lazy(spec: &GroupSpec, lazy: f64) -> Result<Self, GroupError> {
        if !(lazy > 0.0 && lazy < 1.0) {
            return Err(GroupError::InvalidDistribution(format!("lazy mass {lazy} not in (0,1)")));
        }
        let gens = spec.generating_set()?;
        let w = (1.0 - lazy) / gens.len() as f64;
        let mut atoms: Vec<_> = gens.into_iter().map(|g| (g, w)).collect();
        atoms.push((spec.identity(), lazy));
        Self::discrete(spec, atoms)
    }

    pub fn continuous(spec: &GroupSpec, family: ContinuousFamily) -> Result<Self, GroupError> {
        match spec {
            GroupSpec::Euclidean(d) => Ok(StepDistribution::Continuous { family, dim: *d }),
            other => Err(GroupError::InvalidDistribution(format!(
                "{} law requires a Euclidean group, not {other}",
                family.name()
            ))),
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteLaw> {
        match self {
            StepDistribution::Discrete(law) => Some(law),
            StepDistribution::Continuous { .. } => None,
        }
    }

    /// `mu_0 = mu(e)`; zero for continuous laws.
    pub fn lazy_mass(&self, spec: &GroupSpec) -> f64 {
        self.as_discrete().map_or(0.0, |law| law.mass_of(&spec.identity()))
    }

    /// `mu_*`; zero for continuous laws.
    pub fn min_weight(&self) -> f64 {
        self.as_discrete().map_or(0.0, DiscreteLaw::min_weight)
    }

    pub fn mass_of(&self, x: &GroupElement) -> f64 {
        self.as_discrete().map_or(0.0, |law| law.mass_of(x))
    }

    pub fn reflect(&self, spec: &GroupSpec) -> StepDistribution {
        match self {
            StepDistribution::Discrete(law) => StepDistribution::Discrete(law.reflect(spec)),
            // All three families are symmetric.
            c @ StepDistribution::Continuous { .. } => c.clone(),
        }
    }

    /// Checks the law against the group: atoms belong to it and, for
    /// continuous laws, the dimension matches.
    pub fn validate_for(&self, spec: &GroupSpec) -> Result<(), GroupError> {
        match self {
            StepDistribution::Discrete(law) => law.atoms().iter().try_for_each(|x| spec.check(x)),
            StepDistribution::Continuous { dim, .. } => match spec {
                GroupSpec::Euclidean(d) if d == dim => Ok(()),
                GroupSpec::Euclidean(d) => Err(GroupError::DimensionMismatch { expected: *d, found: *dim }),
                other => Err(GroupError::InvalidDistribution(format!("continuous law on {other}"))),
            },
        }
    }
}
