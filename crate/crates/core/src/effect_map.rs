//! Mapping from standardized effect sizes to the prior scale τ².

use crate::bayes_factors::{Sidedness, StatFamily, TestStatistic};
use crate::error::{BffError, Result};
use crate::priors::{PriorFamily, PriorSpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignKind {
    OneSampleZ { n: u64 },
    OneSampleT { n: u64 },
    TwoSampleZ { n1: u64, n2: u64 },
    TwoSampleT { n1: u64, n2: u64 },
    MultinomialChiSq { n: u64 },
    LinearModelF { n: u64 },
    LikelihoodRatioChiSq { n: u64 },
    /// Fisher-transformed sample correlation from `n` pairs.
    CorrelationZ { n: u64 },
}

impl DesignKind {
    pub fn name(&self) -> &'static str {
        match self {
            DesignKind::OneSampleZ { .. } => "one_sample_z",
            DesignKind::OneSampleT { .. } => "one_sample_t",
            DesignKind::TwoSampleZ { .. } => "two_sample_z",
            DesignKind::TwoSampleT { .. } => "two_sample_t",
            DesignKind::MultinomialChiSq { .. } => "multinomial_chisq",
            DesignKind::LinearModelF { .. } => "linear_model_f",
            DesignKind::LikelihoodRatioChiSq { .. } => "likelihood_ratio_chisq",
            DesignKind::CorrelationZ { .. } => "correlation_z",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DesignKind::TwoSampleZ { n1, n2 } | DesignKind::TwoSampleT { n1, n2 } => {
                n1 > 0 && n2 > 0
            }
            DesignKind::CorrelationZ { n } => n > 3,
            DesignKind::OneSampleZ { n }
            | DesignKind::OneSampleT { n }
            | DesignKind::MultinomialChiSq { n }
            | DesignKind::LinearModelF { n }
            | DesignKind::LikelihoodRatioChiSq { n } => n > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(BffError::invalid(format!("invalid sample size for {}: {self:?}", self.name())))
        }
    }

    /// Sample size entering τ²: `n`, `n₁n₂/(n₁+n₂)`, or `n − 3` for correlations.
    pub fn n_eff<T: Scalar>(&self) -> T {
        let f = |n: u64| T::lit(n as f64);
        match *self {
            DesignKind::TwoSampleZ { n1, n2 } | DesignKind::TwoSampleT { n1, n2 } => {
                f(n1) * f(n2) / (f(n1) + f(n2))
            }
            DesignKind::CorrelationZ { n } => f(n) - T::lit(3.0),
            DesignKind::OneSampleZ { n }
            | DesignKind::OneSampleT { n }
            | DesignKind::MultinomialChiSq { n }
            | DesignKind::LinearModelF { n }
            | DesignKind::LikelihoodRatioChiSq { n } => f(n),
        }
    }

    pub fn stat_family(&self) -> StatFamily {
        match self {
            DesignKind::OneSampleZ { .. }
            | DesignKind::TwoSampleZ { .. }
            | DesignKind::CorrelationZ { .. } => StatFamily::Z,
            DesignKind::OneSampleT { .. } | DesignKind::TwoSampleT { .. } => StatFamily::T,
            DesignKind::MultinomialChiSq { .. } | DesignKind::LikelihoodRatioChiSq { .. } => {
                StatFamily::ChiSq
            }
            DesignKind::LinearModelF { .. } => StatFamily::F,
        }
    }

    /// Errors when the statistic family does not match the design.
    pub fn check_statistic<T: Scalar>(&self, stat: &TestStatistic<T>) -> Result<()> {
        self.validate()?;
        if stat.family() != self.stat_family() {
            return Err(BffError::invalid(format!(
                "{} statistic is incompatible with design {}",
                stat.family().name(),
                self.name()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectSize<T> {
    pub omega: T,
    /// `omega` is a root mean square effect ω̃ over `k` components rather
    /// than the norm of the effect vector.
    pub is_rmses: bool,
}

impl<T: Scalar> EffectSize<T> {
    pub fn new(omega: T) -> Self {
        EffectSize {
            omega,
            is_rmses: false,
        }
    }

    pub fn rmses(omega: T) -> Self {
        EffectSize {
            omega,
            is_rmses: true,
        }
    }

    /// ω′ω for a `k`-dimensional effect.
    fn squared_norm(&self, k: T) -> T {
        let w2 = self.omega * self.omega;
        if self.is_rmses {
            k * w2
        } else {
            w2
        }
    }
}

/// Denominator used for linear-model F designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LinearModelScale {
    /// `n k ω̃² / (4 (k/2 + r − 1))`.
    #[default]
    AsPrinted,
    /// `n k ω̃² / (2 (k/2 + r − 1))`, matching the other χ² designs.
    TwoDenominator,
}

/// τ² for `design` at effect `omega` and shape `r`. `k` is required for χ²
/// and F designs.
pub fn tau_sq_for<T: Scalar>(
    design: &DesignKind,
    omega: EffectSize<T>,
    r: T,
    k: Option<T>,
) -> Result<T> {
    tau_sq_for_scaled(design, omega, r, k, LinearModelScale::AsPrinted)
}

pub fn tau_sq_for_scaled<T: Scalar>(
    design: &DesignKind,
    omega: EffectSize<T>,
    r: T,
    k: Option<T>,
    scale: LinearModelScale,
) -> Result<T> {
    design.validate()?;
    if !omega.omega.is_finite() {
        return Err(BffError::invalid(format!("omega must be finite, got {}", omega.omega)));
    }
    if !(r.is_finite() && r >= T::one()) {
        return Err(BffError::invalid(format!("r must be >= 1, got {r}")));
    }
    let two = T::lit(2.0);
    let n = design.n_eff::<T>();
    match design.stat_family() {
        StatFamily::Z | StatFamily::T => {
            if omega.is_rmses {
                return Err(BffError::invalid(format!(
                    "RMSES effect sizes apply to chi-squared and F designs, not {}",
                    design.name()
                )));
            }
            Ok(n * omega.omega * omega.omega / (two * r))
        }
        StatFamily::ChiSq | StatFamily::F => {
            let k = k.ok_or_else(|| {
                BffError::invalid(format!("design {} requires k", design.name()))
            })?;
            if !(k.is_finite() && k > T::zero()) {
                return Err(BffError::invalid(format!("k must be > 0, got {k}")));
            }
            let shape_m1 = k / two + r - T::one();
            let denom = match (design, scale) {
                (DesignKind::LinearModelF { .. }, LinearModelScale::AsPrinted) => T::lit(4.0),
                _ => two,
            };
            Ok(n * omega.squared_norm(k) / (denom * shape_m1))
        }
    }
}

/// Mode of the prior implied by [`tau_sq_for`]; equals `√n_eff·ω` for z/t
/// designs and `n ω′ω` (or half that for linear models) for χ²/F designs.
pub fn mode_consistency_check<T: Scalar>(
    design: &DesignKind,
    omega: EffectSize<T>,
    r: T,
    k: Option<T>,
) -> Result<T> {
    let tau_sq = tau_sq_for(design, omega, r, k)?;
    let spec = match design.stat_family() {
        StatFamily::Z | StatFamily::T => {
            PriorSpec::normal_moment(PriorFamily::NormalMomentPositive, tau_sq, r)?
        }
        StatFamily::ChiSq | StatFamily::F => {
            PriorSpec::gamma(tau_sq, r, k.expect("checked by tau_sq_for"))?
        }
    };
    Ok(spec.mode())
}

/// Two-sided z statistic `√(n−3)·atanh(ρ̂)` with `n_eff = n − 3`.
pub fn fisher_z<T: Scalar>(rho_hat: T, n: u64) -> Result<TestStatistic<T>> {
    fisher_z_sided(rho_hat, n, Sidedness::TwoSided)
}

pub fn fisher_z_sided<T: Scalar>(rho_hat: T, n: u64, sided: Sidedness) -> Result<TestStatistic<T>> {
    if !(rho_hat.is_finite() && rho_hat.abs() < T::one()) {
        return Err(BffError::domain("fisher_z", format!("|rho| must be < 1, got {rho_hat}")));
    }
    if n <= 3 {
        return Err(BffError::domain("fisher_z", format!("n must be > 3, got {n}")));
    }
    let n_eff = T::lit(n as f64) - T::lit(3.0);
    // atanh is evaluated on |ρ̂| so the transform is exactly odd.
    let magnitude = n_eff.sqrt() * rho_hat.abs().atanh();
    let value = if rho_hat < T::zero() { -magnitude } else { magnitude };
    TestStatistic::z(value, sided, n_eff)
}

/// Root mean square of an effect vector.
pub fn rmses<T: Scalar>(omega: &[T]) -> Result<T> {
    if omega.is_empty() {
        return Err(BffError::invalid("rmses of an empty vector"));
    }
    let ss = omega.iter().fold(T::zero(), |acc, &w| acc + w * w);
    Ok((ss / T::lit(omega.len() as f64)).sqrt())
}
