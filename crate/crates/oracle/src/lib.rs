//! Reference implementations for checking the closed-form Bayes factors:
//! adaptive quadrature of marginal likelihoods, a randomized equivalence
//! grid, and a simulation harness for evidence rates.

pub mod densities;
pub mod equivalence;
pub mod error;
pub mod marginal;
pub mod quadrature;
pub mod rates;

pub use equivalence::{run_equivalence, EquivalenceConfig, FamilyReport, OracleFamily};
pub use error::{OracleError, Result};
pub use marginal::{marginal_bf_quadrature, prior_for};
pub use rates::{rate_harness, RateConfig, RateFamily, RateReport};
pub use quadrature::{integrate, Integral, QuadratureSpec};
