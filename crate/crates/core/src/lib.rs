//! Generalized step-reinforced random walks on groups.
//!
//! A walk of length `n` starts at the identity. Its first step is drawn from a
//! step distribution `mu`; every later step either re-uses a uniformly chosen
//! earlier step, passed through a (possibly random) transformation, with
//! probability `alpha`, or is a fresh draw from `mu`.
//!
//! The crate is organised as:
//!
//! * [`groups`]: concrete groups, elements, step distributions and word metrics.
//! * [`sampler`]: direct sampling of walks and their exact one-step laws.
//! * [`forest`]: the percolated random recursive tree representation.
//! * [`elephant`]: elephant polynomials, their coefficient table and bounds.
//! * [`oracle`]: brute-force exact laws for short horizons.
//! * [`evolving`]: evolving-set processes driven by a forest realisation.
//! * [`estimators`]: Monte Carlo estimates and decay-rate fits.
//! * [`mc`]: the trial executor (rayon-backed with the `parallel` feature).

pub mod elephant;
pub mod estimators;
pub mod evolving;
pub mod forest;
pub mod groups;
pub mod mc;
pub mod oracle;
pub mod rng;
pub mod sampler;
mod stats;

pub use estimators::{DecayFit, Estimate, FitModel};
pub use groups::{CanonicalKey, GroupElement, GroupError, GroupSpec, StepDistribution};
pub use rng::StreamRng;
pub use sampler::{SrrwConfig, TransformSpec, WalkTrace};
