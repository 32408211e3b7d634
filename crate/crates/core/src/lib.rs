//! Bayes factor functions (BFFs) for z, t, χ² and F test statistics.
//!
//! The crate computes closed-form Bayes factors under non-local
//! (normal-moment and gamma) alternative priors, indexes them by
//! standardized effect size, multiplies them across replicated studies and
//! chooses the prior shape `r` by marginal maximum a posteriori estimation.
//!
//! All numerics are generic over [`Scalar`] (`f32`/`f64`); the `*64` aliases
//! below name the double-precision instantiations used by the CLI.

pub mod bayes_factors;
pub mod effect_map;
pub mod error;
pub mod evidence;
pub mod priors;
mod quadrature;
pub mod scalar;
pub mod specfun;

pub use bayes_factors::{Sidedness, StatFamily, TestStatistic};
pub use effect_map::{DesignKind, EffectSize, LinearModelScale};
pub use error::{BffError, Result};
pub use evidence::{
    BffCurve, BffPoint, Crossing, CrossingDirection, CurveSummary, EffectGrid, MmapFit, RPolicy, Study,
    StudySet,
};
pub use priors::{PriorFamily, PriorSpec};
pub use scalar::Scalar;
pub use specfun::{LogValue, Sign};

pub type LogValue64 = LogValue<f64>;
pub type PriorSpec64 = PriorSpec<f64>;
pub type TestStatistic64 = TestStatistic<f64>;
pub type EffectSize64 = EffectSize<f64>;
pub type StudySet64 = StudySet<f64>;
pub type EffectGrid64 = EffectGrid<f64>;
pub type BffPoint64 = BffPoint<f64>;
pub type BffCurve64 = BffCurve<f64>;
pub type RPolicy64 = RPolicy<f64>;
pub type MmapFit64 = MmapFit<f64>;
pub type Crossing64 = Crossing<f64>;
pub type Study64 = Study<f64>;
pub type CurveSummary64 = CurveSummary<f64>;
