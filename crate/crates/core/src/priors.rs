//! Non-local priors on the non-centrality parameter λ and the Jeffreys
//! priors on the shape parameter `r`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, StandardNormal};

use crate::error::{BffError, Result};
use crate::scalar::Scalar;
use crate::specfun::{log_gamma, trigamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorFamily {
    NormalMomentTwoSided,
    NormalMomentPositive,
    NormalMomentNegative,
    GammaNonlocal,
}

impl PriorFamily {
    pub fn name(self) -> &'static str {
        match self {
            PriorFamily::NormalMomentTwoSided => "two-sided normal-moment",
            PriorFamily::NormalMomentPositive => "positive normal-moment",
            PriorFamily::NormalMomentNegative => "negative normal-moment",
            PriorFamily::GammaNonlocal => "non-local gamma",
        }
    }

    pub fn is_normal_moment(self) -> bool {
        !matches!(self, PriorFamily::GammaNonlocal)
    }
}

/// Alternative prior on λ: scale `tau_sq` (τ²), shape `r ≥ 1`, and the
/// numerator degrees of freedom `k` for the gamma family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec<T> {
    family: PriorFamily,
    tau_sq: T,
    r: T,
    k: Option<T>,
}

impl<T: Scalar> PriorSpec<T> {
    pub fn normal_moment(family: PriorFamily, tau_sq: T, r: T) -> Result<Self> {
        if !family.is_normal_moment() {
            return Err(BffError::invalid("gamma prior requires k; use PriorSpec::gamma"));
        }
        Self::validate_common(tau_sq, r)?;
        Ok(PriorSpec {
            family,
            tau_sq,
            r,
            k: None,
        })
    }

    /// λ ~ Gamma(shape k/2 + r, rate 1/(2τ²)).
    pub fn gamma(tau_sq: T, r: T, k: T) -> Result<Self> {
        Self::validate_common(tau_sq, r)?;
        if !(k.is_finite() && k > T::zero()) {
            return Err(BffError::invalid(format!("k must be > 0, got {k}")));
        }
        Ok(PriorSpec {
            family: PriorFamily::GammaNonlocal,
            tau_sq,
            r,
            k: Some(k),
        })
    }

    fn validate_common(tau_sq: T, r: T) -> Result<()> {
        if !(tau_sq.is_finite() && tau_sq > T::zero()) {
            return Err(BffError::invalid(format!("tau_sq must be > 0, got {tau_sq}")));
        }
        if !(r.is_finite() && r >= T::one()) {
            return Err(BffError::invalid(format!("r must be >= 1, got {r}")));
        }
        Ok(())
    }

    pub fn family(&self) -> PriorFamily {
        self.family
    }

    pub fn tau_sq(&self) -> T {
        self.tau_sq
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn k(&self) -> Option<T> {
        self.k
    }

    fn gamma_shape(&self) -> T {
        self.k.unwrap_or_else(T::zero) * T::lit(0.5) + self.r
    }

    /// Natural log of the prior density at λ; `-∞` at λ = 0.
    pub fn log_density(&self, lambda: T) -> Result<T> {
        if !lambda.is_finite() {
            return Err(BffError::invalid(format!("lambda must be finite, got {lambda}")));
        }
        let outside = match self.family {
            PriorFamily::NormalMomentTwoSided => false,
            PriorFamily::NormalMomentPositive | PriorFamily::GammaNonlocal => lambda < T::zero(),
            PriorFamily::NormalMomentNegative => lambda > T::zero(),
        };
        if outside {
            return Err(BffError::Support {
                family: self.family.name(),
                lambda: lambda.to_f64_lossy(),
            });
        }
        if lambda == T::zero() {
            return Ok(T::neg_infinity());
        }
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        match self.family {
            PriorFamily::GammaNonlocal => {
                let shape = self.gamma_shape();
                let rate = (two * self.tau_sq).recip();
                Ok(shape * rate.ln() - log_gamma(shape)? + (shape - T::one()) * lambda.ln()
                    - rate * lambda)
            }
            family => {
                let x2 = lambda * lambda;
                let base = self.r * x2.ln()
                    - (self.r + half) * (two * self.tau_sq).ln()
                    - log_gamma(self.r + half)?
                    - x2 / (two * self.tau_sq);
                if family == PriorFamily::NormalMomentTwoSided {
                    Ok(base)
                } else {
                    // One-sided densities are the two-sided one folded onto a half line.
                    Ok(base + T::LN_2())
                }
            }
        }
    }

    /// Prior mode. Two-sided normal-moment priors return the positive mode.
    pub fn mode(&self) -> T {
        match self.family {
            PriorFamily::GammaNonlocal => {
                (self.gamma_shape() - T::one()) * T::lit(2.0) * self.tau_sq
            }
            PriorFamily::NormalMomentNegative => -(T::lit(2.0) * self.r * self.tau_sq).sqrt(),
            _ => (T::lit(2.0) * self.r * self.tau_sq).sqrt(),
        }
    }

    /// A single draw of λ.
    ///
    /// Normal-moment draws are `±τ·sqrt(2G)` with `G ~ Gamma(r + ½, 1)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T
    where
        StandardNormal: Distribution<T>,
        Exp1: Distribution<T>,
        Open01: Distribution<T>,
    {
        let two = T::lit(2.0);
        match self.family {
            PriorFamily::GammaNonlocal => Gamma::new(self.gamma_shape(), two * self.tau_sq)
                .expect("validated gamma parameters")
                .sample(rng),
            family => {
                let g: T = Gamma::new(self.r + T::lit(0.5), T::one())
                    .expect("validated gamma parameters")
                    .sample(rng);
                let magnitude = (two * g * self.tau_sq).sqrt();
                match family {
                    PriorFamily::NormalMomentPositive => magnitude,
                    PriorFamily::NormalMomentNegative => -magnitude,
                    _ => {
                        if rng.random::<bool>() {
                            magnitude
                        } else {
                            -magnitude
                        }
                    }
                }
            }
        }
    }
}

fn radicand_check<T: Scalar>(func: &'static str, radicand: T) -> Result<T> {
    if radicand > T::zero() && radicand.is_finite() {
        Ok(T::lit(0.5) * radicand.ln())
    } else {
        Err(BffError::domain(func, format!("non-positive radicand {radicand}")))
    }
}

/// Unnormalized log Jeffreys prior on `r` for normal-moment priors with a
/// fixed mode: `½ ln(ψ₁(r + ½) − 1/r + 1/(2r²))`.
pub fn jeffreys_log_prior_nm<T: Scalar>(r: T) -> Result<T> {
    if !(r.is_finite() && r >= T::one()) {
        return Err(BffError::domain("jeffreys_log_prior_nm", format!("r must be >= 1, got {r}")));
    }
    let radicand = trigamma(r + T::lit(0.5))? - r.recip() + (T::lit(2.0) * r * r).recip();
    radicand_check("jeffreys_log_prior_nm", radicand)
}

/// Unnormalized log Jeffreys prior on `r` for the gamma prior:
/// `½ ln(ψ₁(k/2 + r) − (k/2 + r − 2)/(k/2 + r − 1)²)`.
pub fn jeffreys_log_prior_gamma<T: Scalar>(r: T, k: T) -> Result<T> {
    if !(r.is_finite() && r >= T::one()) {
        return Err(BffError::domain("jeffreys_log_prior_gamma", format!("r must be >= 1, got {r}")));
    }
    if !(k.is_finite() && k > T::zero()) {
        return Err(BffError::domain("jeffreys_log_prior_gamma", format!("k must be > 0, got {k}")));
    }
    let a = k * T::lit(0.5) + r;
    let am1 = a - T::one();
    let radicand = trigamma(a)? - (a - T::lit(2.0)) / (am1 * am1);
    radicand_check("jeffreys_log_prior_gamma", radicand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn two_sided(tau_sq: f64, r: f64) -> PriorSpec<f64> {
        PriorSpec::normal_moment(PriorFamily::NormalMomentTwoSided, tau_sq, r).unwrap()
    }

    #[test]
    fn density_at_mode_by_substitution() {
        let p = two_sided(1.0, 1.0);
        let x = 2.0_f64.sqrt();
        let gamma_three_halves = PI.sqrt() / 2.0;
        let expect = (2.0 * (-1.0_f64).exp() / (2.0_f64.powf(1.5) * gamma_three_halves)).ln();
        assert_relative_eq!(p.log_density(x).unwrap(), expect, max_relative = 1e-14);
        assert_relative_eq!(p.mode(), x, max_relative = 1e-15);
    }

    #[test]
    fn gamma_density_matches_independent_formula() {
        // shape 1.5, rate 0.25 at 3: rate^shape x^(shape-1) e^(-rate x) / Γ(shape)
        let p = PriorSpec::gamma(2.0_f64, 1.0, 1.0).unwrap();
        let gamma_1_5 = PI.sqrt() / 2.0;
        let expect = 0.25_f64.powf(1.5) * 3.0_f64.sqrt() * (-0.75_f64).exp() / gamma_1_5;
        assert_relative_eq!(p.log_density(3.0).unwrap(), expect.ln(), max_relative = 1e-13);
    }

    #[test]
    fn zero_is_minus_infinity_for_every_family() {
        let specs = [
            two_sided(1.0, 1.0),
            PriorSpec::normal_moment(PriorFamily::NormalMomentPositive, 1.0, 2.0).unwrap(),
            PriorSpec::normal_moment(PriorFamily::NormalMomentNegative, 1.0, 2.0).unwrap(),
            PriorSpec::gamma(1.0, 1.0, 3.0).unwrap(),
        ];
        for s in specs {
            assert_eq!(s.log_density(0.0).unwrap(), f64::NEG_INFINITY);
        }
    }

    #[test]
    fn support_violations() {
        let pos = PriorSpec::normal_moment(PriorFamily::NormalMomentPositive, 1.0_f64, 1.0).unwrap();
        assert!(matches!(pos.log_density(-0.5), Err(BffError::Support { .. })));
        let neg = PriorSpec::normal_moment(PriorFamily::NormalMomentNegative, 1.0_f64, 1.0).unwrap();
        assert!(matches!(neg.log_density(0.5), Err(BffError::Support { .. })));
        let gam = PriorSpec::gamma(1.0_f64, 1.0, 2.0).unwrap();
        assert!(gam.log_density(-1.0).is_err());
    }

    #[test]
    fn negative_family_reflects_positive() {
        let pos = PriorSpec::normal_moment(PriorFamily::NormalMomentPositive, 0.7_f64, 3.0).unwrap();
        let neg = PriorSpec::normal_moment(PriorFamily::NormalMomentNegative, 0.7_f64, 3.0).unwrap();
        for &x in &[0.1, 0.9, 2.5] {
            assert_eq!(pos.log_density(x).unwrap(), neg.log_density(-x).unwrap());
        }
        assert_eq!(neg.mode(), -pos.mode());
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(PriorSpec::normal_moment(PriorFamily::NormalMomentTwoSided, 1.0_f64, 0.5).is_err());
        assert!(PriorSpec::normal_moment(PriorFamily::NormalMomentTwoSided, 0.0_f64, 1.0).is_err());
        assert!(PriorSpec::normal_moment(PriorFamily::GammaNonlocal, 1.0_f64, 1.0).is_err());
        assert!(PriorSpec::gamma(1.0_f64, 1.0, 0.0).is_err());
    }

    #[test]
    fn modes() {
        assert_relative_eq!(two_sided(2.0, 1.0).mode(), 2.0);
        assert_relative_eq!(PriorSpec::gamma(0.5_f64, 1.0, 2.0).unwrap().mode(), 1.0);
        let n = 100.0;
        let omega = 0.11;
        let pos = PriorSpec::normal_moment(
            PriorFamily::NormalMomentPositive,
            n * omega * omega / 2.0,
            1.0_f64,
        )
        .unwrap();
        assert_relative_eq!(pos.mode(), 1.1, max_relative = 1e-14);
    }

    #[test]
    fn mode_dominates_grid() {
        for &(t, r) in &[(0.3, 1.0), (2.0, 4.5), (15.0, 12.0)] {
            let p = two_sided(t, r);
            let at_mode = p.log_density(p.mode()).unwrap();
            for i in 1..400 {
                let x = i as f64 * 0.025 * p.mode();
                assert!(p.log_density(x).unwrap() <= at_mode + 1e-12);
                assert_eq!(p.log_density(x).unwrap(), p.log_density(-x).unwrap());
            }
        }
        let g = PriorSpec::gamma(1.5_f64, 2.0, 3.0).unwrap();
        let at_mode = g.log_density(g.mode()).unwrap();
        for i in 1..400 {
            assert!(g.log_density(i as f64 * 0.05).unwrap() <= at_mode + 1e-12);
        }
    }

    #[test]
    fn vanishes_at_least_quadratically_near_null() {
        for &(t, r) in &[(1.0, 1.0), (0.2, 2.0), (5.0, 7.5)] {
            let p = two_sided(t, r);
            let m = p.mode();
            let peak = p.log_density(m).unwrap();
            for i in 1..=50 {
                let x = m / 10.0 * i as f64 / 50.0;
                let lhs = p.log_density(x).unwrap() - peak;
                let rhs = 2.0 * (x / m).ln() + 1.0;
                assert!(lhs <= rhs, "t={t} r={r} x={x}");
            }
        }
    }

    #[test]
    fn jeffreys_normal_moment() {
        let r1 = jeffreys_log_prior_nm(1.0_f64).unwrap();
        let radicand = PI * PI / 2.0 - 4.0 - 0.5;
        assert!((radicand - 0.434_802_200_5).abs() < 1e-9);
        assert_relative_eq!(r1, 0.5 * radicand.ln(), max_relative = 1e-12);
        let r10 = jeffreys_log_prior_nm(10.0_f64).unwrap();
        assert!(r10 < 0.0 && r10 < r1);
        let mut prev = r1;
        for i in 1..=99 {
            let v = jeffreys_log_prior_nm(1.0 + i as f64).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(jeffreys_log_prior_nm(0.9_f64).is_err());
    }

    #[test]
    fn jeffreys_gamma() {
        let v = jeffreys_log_prior_gamma(1.0_f64, 2.0).unwrap();
        assert_relative_eq!(v, 0.5 * (PI * PI / 6.0 - 1.0).ln(), max_relative = 1e-12);
        let v = jeffreys_log_prior_gamma(1.0_f64, 1.0).unwrap();
        let t15 = PI * PI / 2.0 - 4.0;
        assert_relative_eq!(v, 0.5 * (t15 + 2.0).ln(), max_relative = 1e-12);
        // k=4, r=3: a = 5, ψ₁(5) = π²/6 − (1 + 1/4 + 1/9 + 1/16)
        let t5 = PI * PI / 6.0 - (1.0 + 0.25 + 1.0 / 9.0 + 0.0625);
        let v = jeffreys_log_prior_gamma(3.0_f64, 4.0).unwrap();
        assert_relative_eq!(v, 0.5 * (t5 - 3.0 / 16.0).ln(), max_relative = 1e-11);
    }

    #[test]
    fn jeffreys_radicands_positive_on_grid() {
        let mut r = 1.0_f64;
        while r <= 1000.0 {
            assert!(jeffreys_log_prior_nm(r).is_ok(), "nm r={r}");
            for k in 1..=20 {
                assert!(jeffreys_log_prior_gamma(r, k as f64).is_ok(), "gamma r={r} k={k}");
            }
            r *= 1.05;
        }
    }

    #[test]
    fn normal_moment_second_moment() {
        let p = two_sided(1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| p.sample(&mut rng)).collect();
        let sq: Vec<f64> = draws.iter().map(|x| x * x).collect();
        let mean = sq.iter().sum::<f64>() / n as f64;
        let var = sq.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 3.0).abs() < 3.0 * se, "mean {mean} se {se}");
        assert!(draws.iter().any(|&x| x < 0.0) && draws.iter().any(|&x| x > 0.0));
    }

    #[test]
    fn one_sided_draws_respect_support() {
        let p = PriorSpec::normal_moment(PriorFamily::NormalMomentPositive, 2.0_f64, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!((0..10_000).all(|_| p.sample(&mut rng) > 0.0));
    }

    #[test]
    fn gamma_sample_mean() {
        let p = PriorSpec::gamma(1.0_f64, 1.0, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| p.sample(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 4.0).abs() < 3.0 * se);
    }
}
