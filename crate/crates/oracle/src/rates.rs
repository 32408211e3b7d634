//! Monte Carlo harness for the growth rates of Bayes factors in the sample
//! size, under the null and under a fixed-effect alternative.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;

use bffkit::{Sidedness, TestStatistic64};

use crate::error::{OracleError, Result};

pub const MIN_REPLICATES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFamily {
    Z,
    T,
    ChiSq { k: f64 },
    /// Denominator degrees of freedom are `n − k − 1`.
    F { k: f64 },
}

impl RateFamily {
    pub fn name(self) -> &'static str {
        match self {
            RateFamily::Z => "z",
            RateFamily::T => "t",
            RateFamily::ChiSq { .. } => "chisq",
            RateFamily::F { .. } => "f",
        }
    }

    /// Order of log BF₁₀ in ln n under the null.
    pub fn null_order(self, r: f64) -> f64 {
        match self {
            RateFamily::Z | RateFamily::T => -(r + 0.5),
            RateFamily::ChiSq { k } | RateFamily::F { k } => -(r + k / 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Null,
    Alternative,
}

impl Hypothesis {
    fn stream(self) -> u64 {
        match self {
            Hypothesis::Null => 0,
            Hypothesis::Alternative => 1,
        }
    }
}

/// Settings of one harness run. Under the alternative the z and t
/// non-centrality is `γ√n` and the χ²/F non-centrality is `γn`; the prior
/// scale is `τ² = βn` throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    pub family: RateFamily,
    pub r: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n_grid: Vec<u64>,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub config: RateConfig,
    /// Median log BF₁₀ under the null at each n.
    pub null_median_log_bf10: Vec<f64>,
    /// Median log BF₀₁ under the alternative at each n.
    pub alt_median_log_bf01: Vec<f64>,
    /// Replicates whose Bayes factor could not be evaluated.
    pub failed_replicates: usize,
    pub null_slope_ln_n: f64,
    pub alt_slope_n: f64,
    pub alt_decreasing: bool,
    pub alt_super_logarithmic: bool,
}

impl RateReport {
    pub fn null_target(&self) -> f64 {
        self.config.family.null_order(self.config.r)
    }

    pub fn null_slope_within(&self, band: f64) -> bool {
        (self.null_slope_ln_n - self.null_target()).abs() <= band
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("hypothesis,n,median_log_bf\n");
        for (n, v) in self.config.n_grid.iter().zip(&self.null_median_log_bf10) {
            let _ = writeln!(out, "h0_log_bf10,{n},{v:.10e}");
        }
        for (n, v) in self.config.n_grid.iter().zip(&self.alt_median_log_bf01) {
            let _ = writeln!(out, "h1_log_bf01,{n},{v:.10e}");
        }
        let _ = writeln!(out, "# family={} r={} beta={} gamma={}", self.config.family.name(), self.config.r, self.config.beta, self.config.gamma);
        let _ = writeln!(out, "# h0_slope_ln_n={:.6} target={:.6}", self.null_slope_ln_n, self.null_target());
        let _ = writeln!(out, "# h1_slope_n={:.6e} decreasing={} super_log={}", self.alt_slope_n, self.alt_decreasing, self.alt_super_logarithmic);
        let _ = writeln!(out, "# failed_replicates={}", self.failed_replicates);
        out
    }
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

fn noncentral_chisq(rng: &mut ChaCha8Rng, k: f64, lambda: f64) -> f64 {
    // One shifted normal carries the whole non-centrality.
    let z: f64 = StandardNormal.sample(rng);
    let shifted = (z + lambda.sqrt()).powi(2);
    let rest = if k > 1.0 {
        ChiSquared::new(k - 1.0).expect("positive df").sample(rng)
    } else {
        0.0
    };
    shifted + rest
}

fn simulate(cfg: &RateConfig, n: u64, hyp: Hypothesis, rng: &mut ChaCha8Rng) -> Result<f64> {
    let nf = n as f64;
    let tau_sq = cfg.beta * nf;
    let alt = hyp == Hypothesis::Alternative;
    let stat = match cfg.family {
        RateFamily::Z => {
            let shift = if alt { cfg.gamma * nf.sqrt() } else { 0.0 };
            let z: f64 = StandardNormal.sample(rng);
            TestStatistic64::z(z + shift, Sidedness::TwoSided, nf)?
        }
        RateFamily::T => {
            let nu = nf - 1.0;
            let shift = if alt { cfg.gamma * nf.sqrt() } else { 0.0 };
            let z: f64 = StandardNormal.sample(rng);
            let v: f64 = ChiSquared::new(nu).expect("positive df").sample(rng);
            TestStatistic64::t((z + shift) / (v / nu).sqrt(), nu, Sidedness::TwoSided, nf)?
        }
        RateFamily::ChiSq { k } => {
            let lambda = if alt { cfg.gamma * nf } else { 0.0 };
            TestStatistic64::chisq(noncentral_chisq(rng, k, lambda), k, nf)?
        }
        RateFamily::F { k } => {
            let m = nf - k - 1.0;
            let lambda = if alt { cfg.gamma * nf } else { 0.0 };
            let num = noncentral_chisq(rng, k, lambda) / k;
            let den: f64 = ChiSquared::new(m).expect("positive df").sample(rng);
            TestStatistic64::f(num / (den / m), k, m, nf)?
        }
    };
    Ok(stat.log_bf10(tau_sq, cfg.r)?)
}

fn validate(cfg: &RateConfig) -> Result<()> {
    if cfg.n_grid.len() < 3 || cfg.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OracleError::Spec("n_grid must be increasing with at least 3 points".into()));
    }
    if cfg.replicates == 0 {
        return Err(OracleError::Spec("replicates must be positive".into()));
    }
    if !(cfg.r >= 1.0 && cfg.beta > 0.0 && cfg.gamma > 0.0) {
        return Err(OracleError::Spec(format!(
            "need r >= 1, beta > 0, gamma > 0 (got {}, {}, {})",
            cfg.r, cfg.beta, cfg.gamma
        )));
    }
    let min_n = match cfg.family {
        RateFamily::Z => 1.0,
        RateFamily::T => 2.0,
        RateFamily::ChiSq { k } => k.max(0.0) + 1.0,
        RateFamily::F { k } => k + 2.0,
    };
    if (cfg.n_grid[0] as f64) < min_n {
        return Err(OracleError::Spec(format!("smallest n must be at least {min_n}")));
    }
    Ok(())
}

/// Median log Bayes factors over `replicates` draws at each n.
///
/// Replicate `i` at grid index `j` under hypothesis `h` draws from its own
/// ChaCha stream, so results do not depend on thread scheduling.
pub fn rate_harness(cfg: &RateConfig) -> Result<RateReport> {
    validate(cfg)?;
    let mut failed = 0;
    let mut medians = |hyp: Hypothesis| -> Vec<f64> {
        cfg.n_grid
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let draws: Vec<Option<f64>> = (0..cfg.replicates)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                        rng.set_stream((hyp.stream() << 62) | ((j as u64) << 40) | i as u64);
                        simulate(cfg, n, hyp, &mut rng).ok().filter(|v| v.is_finite())
                    })
                    .collect();
                failed += draws.iter().filter(|d| d.is_none()).count();
                median(draws.into_iter().flatten().collect())
            })
            .collect()
    };
    let null = medians(Hypothesis::Null);
    let alt: Vec<f64> = medians(Hypothesis::Alternative).into_iter().map(|v| -v).collect();
    let ns: Vec<f64> = cfg.n_grid.iter().map(|&n| n as f64).collect();
    let ln_ns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let alt_decreasing = alt.windows(2).all(|w| w[1] < w[0]);
    let per_log: Vec<f64> = alt.iter().zip(&ln_ns).map(|(v, l)| -v / l).collect();
    let alt_super_logarithmic = per_log.windows(2).all(|w| w[1] > w[0]);
    Ok(RateReport {
        config: cfg.clone(),
        null_slope_ln_n: ols_slope(&ln_ns, &null),
        alt_slope_n: ols_slope(&ns, &alt),
        null_median_log_bf10: null,
        alt_median_log_bf01: alt,
        failed_replicates: failed,
        alt_decreasing,
        alt_super_logarithmic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(family: RateFamily) -> RateConfig {
        RateConfig {
            family,
            r: 1.0,
            beta: 1.0,
            gamma: 0.3,
            n_grid: vec![100, 1000, 10_000],
            replicates: MIN_REPLICATES,
            seed: 11,
        }
    }

    #[test]
    fn slope_fit() {
        assert!((ols_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-15);
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn z_null_rate() {
        let rep = rate_harness(&cfg(RateFamily::Z)).unwrap();
        assert!(rep.null_slope_within(0.5), "{}", rep.to_csv());
        assert!(rep.alt_decreasing && rep.alt_super_logarithmic && rep.alt_slope_n < 0.0, "{}", rep.to_csv());
        assert_eq!(rep.failed_replicates, 0);
    }

    #[test]
    fn chisq_null_rate() {
        let rep = rate_harness(&cfg(RateFamily::ChiSq { k: 2.0 })).unwrap();
        assert!(rep.null_slope_within(0.5), "{}", rep.to_csv());
        assert!((rep.null_target() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_and_validated() {
        let mut c = cfg(RateFamily::T);
        c.replicates = 20;
        assert_eq!(rate_harness(&c).unwrap(), rate_harness(&c).unwrap());
        c.n_grid = vec![100, 50, 1000];
        assert!(rate_harness(&c).is_err());
        c.n_grid = vec![100, 1000];
        assert!(rate_harness(&c).is_err());
    }
}
