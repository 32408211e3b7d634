//! Randomized agreement checks between the closed-form Bayes factors and
//! the quadrature marginals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use bffkit::{Sidedness, TestStatistic64};

use crate::error::{OracleError, Result};
use crate::marginal::{marginal_bf_quadrature, prior_for};
use crate::quadrature::QuadratureSpec;

pub const EQUIVALENCE_TOL: f64 = 1e-7;
pub const DEFAULT_TUPLES: usize = 50;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleFamily {
    ZOne,
    ZTwo,
    TOne,
    TTwo,
    ChiSq,
    F,
}

impl OracleFamily {
    pub const ALL: [OracleFamily; 6] = [
        OracleFamily::ZOne,
        OracleFamily::ZTwo,
        OracleFamily::TOne,
        OracleFamily::TTwo,
        OracleFamily::ChiSq,
        OracleFamily::F,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleFamily::ZOne => "z_one",
            OracleFamily::ZTwo => "z_two",
            OracleFamily::TOne => "t_one",
            OracleFamily::TTwo => "t_two",
            OracleFamily::ChiSq => "chisq",
            OracleFamily::F => "f",
        }
    }

    /// Families named by `token`; `z` and `t` cover both sidednesses.
    pub fn parse(token: &str) -> Result<Vec<OracleFamily>> {
        let t = token.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "z" => vec![OracleFamily::ZOne, OracleFamily::ZTwo],
            "t" => vec![OracleFamily::TOne, OracleFamily::TTwo],
            "chisq" | "chi2" => vec![OracleFamily::ChiSq],
            "f" => vec![OracleFamily::F],
            _ => match OracleFamily::ALL.iter().find(|f| f.name() == t) {
                Some(&f) => vec![f],
                None => return Err(OracleError::Spec(format!("unknown family '{token}'"))),
            },
        })
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuple {
    pub stat: TestStatistic64,
    pub tau_sq: f64,
    pub r: f64,
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn draw<R: Rng>(family: OracleFamily, rng: &mut R) -> Tuple {
    let tau_sq = log_uniform(rng, 0.1, 20.0);
    let r = rng.random_range(1.0..8.0);
    let stat = match family {
        OracleFamily::ZOne | OracleFamily::ZTwo => {
            let sided = if family == OracleFamily::ZOne {
                Sidedness::OneSided
            } else {
                Sidedness::TwoSided
            };
            TestStatistic64::z(rng.random_range(-4.0..5.0), sided, 50.0)
        }
        OracleFamily::TOne | OracleFamily::TTwo => {
            let sided = if family == OracleFamily::TOne {
                Sidedness::OneSided
            } else {
                Sidedness::TwoSided
            };
            let nu = rng.random_range(3..80) as f64;
            TestStatistic64::t(rng.random_range(-4.0..5.0), nu, sided, nu + 1.0)
        }
        OracleFamily::ChiSq => {
            let k = rng.random_range(1..9) as f64;
            TestStatistic64::chisq(rng.random_range(0.05..(20.0 + 3.0 * k)), k, 60.0)
        }
        OracleFamily::F => {
            let k = rng.random_range(1..7) as f64;
            let m = rng.random_range(8..90) as f64;
            TestStatistic64::f(rng.random_range(0.05..7.0), k, m, k + m + 1.0)
        }
    };
    Tuple {
        stat: stat.expect("generated statistic is valid"),
        tau_sq,
        r,
    }
}

/// `count` tuples for `family`, reproducible from `seed`.
pub fn random_tuples(family: OracleFamily, count: usize, seed: u64) -> Vec<Tuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(family.stream());
    (0..count).map(|_| draw(family, &mut rng)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub tuple: Tuple,
    pub closed_form: f64,
    pub quadrature: Option<f64>,
    /// `|closed − quadrature| / max(1, |quadrature|)`; infinite on failure.
    pub rel_err: f64,
    pub failure: Option<String>,
}

impl CheckRecord {
    pub fn passed(&self, tol: f64) -> bool {
        self.failure.is_none() && self.rel_err <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub family: OracleFamily,
    pub tolerance: f64,
    pub records: Vec<CheckRecord>,
}

impl FamilyReport {
    pub fn max_rel_err(&self) -> f64 {
        self.records.iter().map(|r| r.rel_err).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.passed(self.tolerance)).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceConfig {
    pub tuples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub quadrature: QuadratureSpec,
    /// Added to every closed-form value. Non-zero only to exercise the
    /// failure path of the harness.
    pub fault: f64,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig {
            tuples: DEFAULT_TUPLES,
            seed: DEFAULT_SEED,
            tolerance: EQUIVALENCE_TOL,
            quadrature: QuadratureSpec::default(),
            fault: 0.0,
        }
    }
}

pub fn relative_error(closed: f64, reference: f64) -> f64 {
    (closed - reference).abs() / reference.abs().max(1.0)
}

/// Compares the closed form with the quadrature marginal at one tuple.
pub fn check_tuple(tuple: &Tuple, q: &QuadratureSpec, fault: f64) -> Result<CheckRecord> {
    let closed_form = tuple.stat.log_bf10(tuple.tau_sq, tuple.r)? + fault;
    let prior = prior_for(&tuple.stat, tuple.tau_sq, tuple.r)?;
    Ok(match marginal_bf_quadrature(&tuple.stat, &prior, q) {
        Ok(v) => CheckRecord {
            tuple: *tuple,
            closed_form,
            quadrature: Some(v),
            rel_err: relative_error(closed_form, v),
            failure: None,
        },
        Err(e) => CheckRecord {
            tuple: *tuple,
            closed_form,
            quadrature: None,
            rel_err: f64::INFINITY,
            failure: Some(e.to_string()),
        },
    })
}

pub fn run_family(family: OracleFamily, cfg: &EquivalenceConfig) -> Result<FamilyReport> {
    cfg.quadrature.validate()?;
    let tuples = random_tuples(family, cfg.tuples, cfg.seed);
    let records = tuples
        .par_iter()
        .map(|t| check_tuple(t, &cfg.quadrature, cfg.fault))
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyReport {
        family,
        tolerance: cfg.tolerance,
        records,
    })
}

/// Runs every family in `families`, in the given order.
pub fn run_equivalence(families: &[OracleFamily], cfg: &EquivalenceConfig) -> Result<Vec<FamilyReport>> {
    families.iter().map(|&f| run_family(f, cfg)).collect()
}
