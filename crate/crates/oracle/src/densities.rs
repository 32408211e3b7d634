//! Central and noncentral sampling densities of z, t, χ² and F statistics.
//!
//! Noncentral χ² and F densities are Poisson mixtures of central ones; the
//! noncentral t density is a series in the non-centrality when `tλ ≥ 0`
//! and an integral over the scale variable otherwise.

use std::f64::consts::PI;

use bffkit::specfun::log_gamma;
use bffkit::{StatFamily, TestStatistic64};

use crate::error::{OracleError, Result};
use crate::quadrature::{integrate, QuadratureSpec};

const MAX_TERMS: u64 = 1_000_000;
/// Terms below this fraction of the running sum are treated as exhausted.
const TAIL: f64 = 1e-17;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lgamma(x: f64) -> f64 {
    log_gamma(x).expect("positive argument")
}

/// `a ln x` with the convention `0 · ln 0 = 0`.
fn xlogy(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * x.ln()
    }
}

fn log_chisq(h: f64, d: f64) -> f64 {
    -h / 2.0 + xlogy(d / 2.0 - 1.0, h) - (d / 2.0) * std::f64::consts::LN_2 - lgamma(d / 2.0)
}

fn log_f(x: f64, d1: f64, d2: f64) -> f64 {
    let log_beta = lgamma(d1 / 2.0) + lgamma(d2 / 2.0) - lgamma((d1 + d2) / 2.0);
    xlogy(d1 / 2.0 - 1.0, x) + (d1 / 2.0) * d1.ln() + (d2 / 2.0) * d2.ln()
        - ((d1 + d2) / 2.0) * (d1 * x + d2).ln()
        - log_beta
}

fn log_central_t(t: f64, nu: f64) -> f64 {
    lgamma((nu + 1.0) / 2.0) - lgamma(nu / 2.0) - 0.5 * (nu * PI).ln()
        - ((nu + 1.0) / 2.0) * (t * t / nu).ln_1p()
}

fn df(v: Option<f64>) -> f64 {
    v.expect("degrees of freedom present for this family")
}

/// Natural log of the null density of the statistic.
pub fn log_density_null(stat: &TestStatistic64) -> f64 {
    let x = stat.value();
    match stat.family() {
        StatFamily::Z => -x * x / 2.0 - LN_SQRT_2PI,
        StatFamily::T => log_central_t(x, df(stat.nu())),
        StatFamily::ChiSq => log_chisq(x, df(stat.k())),
        StatFamily::F => log_f(x, df(stat.k()), df(stat.m())),
    }
}

pub fn density_null(stat: &TestStatistic64) -> f64 {
    log_density_null(stat).exp()
}

/// `ln Σ_{i≥0} exp(log_term(i))` for a log-concave sequence of terms.
pub fn log_sum_unimodal(log_term: impl Fn(u64) -> f64) -> Result<f64> {
    let rising = |i: u64| log_term(i + 1) > log_term(i);
    let peak = if !rising(0) {
        0
    } else {
        let mut hi = 1u64;
        while rising(hi) {
            hi *= 2;
            if hi > 1 << 50 {
                return Err(OracleError::Truncation { terms: hi });
            }
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if rising(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if rising(lo) {
            hi
        } else {
            lo
        }
    };
    let top = log_term(peak);
    if !top.is_finite() {
        return Ok(top);
    }
    let mut sum = 1.0;
    let mut terms = 1u64;
    let mut i = peak + 1;
    loop {
        let w = (log_term(i) - top).exp();
        sum += w;
        terms += 1;
        if w < TAIL * sum {
            break;
        }
        if terms > MAX_TERMS {
            return Err(OracleError::Truncation { terms });
        }
        i += 1;
    }
    let mut i = peak;
    while i > 0 {
        i -= 1;
        let w = (log_term(i) - top).exp();
        sum += w;
        terms += 1;
        if w < TAIL * sum {
            break;
        }
        if terms > MAX_TERMS {
            return Err(OracleError::Truncation { terms });
        }
    }
    Ok(top + sum.ln())
}

fn log_poisson(i: u64, mu: f64) -> f64 {
    let i = i as f64;
    -mu + i * mu.ln() - lgamma(i + 1.0)
}

fn log_noncentral_t(t: f64, nu: f64, lambda: f64) -> Result<f64> {
    if t * lambda >= 0.0 {
        let x = (t * lambda).abs() * (2.0 / (nu + t * t)).sqrt();
        let prefix = (nu / 2.0) * nu.ln() - lambda * lambda / 2.0 - 0.5 * PI.ln() - lgamma(nu / 2.0)
            - ((nu + 1.0) / 2.0) * (nu + t * t).ln();
        if x == 0.0 {
            return Ok(prefix + lgamma((nu + 1.0) / 2.0));
        }
        let ln_x = x.ln();
        let series = log_sum_unimodal(|j| {
            let j = j as f64;
            lgamma((nu + j + 1.0) / 2.0) - lgamma(j + 1.0) + j * ln_x
        })?;
        return Ok(prefix + series);
    }
    // f(t | λ) = ∫₀^∞ s φ(ts − λ) g(s) ds with s = √(V/ν), V ~ χ²_ν.
    let log_g_norm = std::f64::consts::LN_2 + (nu / 2.0) * (nu / 2.0).ln() - lgamma(nu / 2.0);
    let log_integrand = |s: f64| {
        if s <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let d = t * s - lambda;
        nu * s.ln() - d * d / 2.0 - nu * s * s / 2.0
    };
    let q = nu + t * t;
    let b = t * lambda;
    let root = (b * b + 4.0 * nu * q).sqrt();
    let mode = 2.0 * nu / (root - b);
    let curvature = nu / (mode * mode) + q;
    let reach = (40.0 / curvature.sqrt()).max(12.0 / q.sqrt());
    let peak = log_integrand(mode);
    let spec = QuadratureSpec::default();
    let lo = (mode - reach).max(0.0);
    let hi = mode + reach;
    let area = integrate(|s| (log_integrand(s) - peak).exp(), lo, mode, &spec)?.value
        + integrate(|s| (log_integrand(s) - peak).exp(), mode, hi, &spec)?.value;
    Ok(peak + area.ln() + log_g_norm - LN_SQRT_2PI)
}

/// Natural log of the density of the statistic at non-centrality `lambda`.
///
/// `lambda` is the mean of a z statistic, the non-centrality of a t
/// statistic, and the Poisson-mixture non-centrality of χ²/F statistics.
pub fn log_density_noncentral(stat: &TestStatistic64, lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(OracleError::Support(format!("non-centrality {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(log_density_null(stat));
    }
    let x = stat.value();
    match stat.family() {
        StatFamily::Z => Ok(-(x - lambda) * (x - lambda) / 2.0 - LN_SQRT_2PI),
        StatFamily::T => log_noncentral_t(x, df(stat.nu()), lambda),
        StatFamily::ChiSq | StatFamily::F if lambda < 0.0 => Err(OracleError::Support(format!(
            "{} non-centrality must be >= 0, got {lambda}",
            stat.family().name()
        ))),
        StatFamily::ChiSq => {
            let k = df(stat.k());
            let mu = lambda / 2.0;
            log_sum_unimodal(|i| log_poisson(i, mu) + log_chisq(x, k + 2.0 * i as f64))
        }
        StatFamily::F => {
            let (k, m) = (df(stat.k()), df(stat.m()));
            let mu = lambda / 2.0;
            log_sum_unimodal(|i| {
                let d1 = k + 2.0 * i as f64;
                log_poisson(i, mu) + (k / d1).ln() + log_f(k * x / d1, d1, m)
            })
        }
    }
}

pub fn density_noncentral(stat: &TestStatistic64, lambda: f64) -> Result<f64> {
    log_density_noncentral(stat, lambda).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use bffkit::Sidedness;

    fn z(v: f64) -> TestStatistic64 {
        TestStatistic64::z(v, Sidedness::TwoSided, 10.0).unwrap()
    }

    fn t(v: f64, nu: f64) -> TestStatistic64 {
        TestStatistic64::t(v, nu, Sidedness::TwoSided, nu + 1.0).unwrap()
    }

    fn chisq(h: f64, k: f64) -> TestStatistic64 {
        TestStatistic64::chisq(h, k, 10.0).unwrap()
    }

    fn f(v: f64, k: f64, m: f64) -> TestStatistic64 {
        TestStatistic64::f(v, k, m, 10.0).unwrap()
    }

    #[test]
    fn null_densities() {
        assert_relative_eq!(density_null(&z(0.0)), 1.0 / (2.0 * PI).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(density_null(&chisq(0.0, 2.0)), 0.5, max_relative = 1e-15);
        // t₅ density by the Beta-function form 1/(√ν B(½, ν/2)) (1 + t²/ν)^{-(ν+1)/2}
        let nu: f64 = 5.0;
        let beta = (lgamma(0.5) + lgamma(nu / 2.0) - lgamma((nu + 1.0) / 2.0)).exp();
        let expect = (1.0 + 1.69 / nu).powf(-(nu + 1.0) / 2.0) / (nu.sqrt() * beta);
        assert_relative_eq!(density_null(&t(1.3, 5.0)), expect, max_relative = 1e-13);
        // F(2, 4) density is (1 + x/2)^-3.
        assert_relative_eq!(density_null(&f(1.0, 2.0, 4.0)), 1.5_f64.powi(-3), max_relative = 1e-13);
    }

    #[test]
    fn central_limit_of_noncentral() {
        let stats = [z(1.2), t(-0.7, 9.0), t(2.5, 4.0), chisq(3.1, 3.0), f(1.7, 3.0, 20.0)];
        for s in &stats {
            assert_eq!(density_noncentral(s, 0.0).unwrap(), density_null(s));
            let near = density_noncentral(s, 1e-8).unwrap();
            assert!((near - density_null(s)).abs() < 1e-7 * density_null(s), "{s:?}");
        }
        assert_relative_eq!(density_noncentral(&z(2.0), 2.0).unwrap(), 1.0 / (2.0 * PI).sqrt());
    }

    #[test]
    fn noncentral_chisq_k2_closed_form() {
        // k = 2: ½ e^{-(h+λ)/2} I₀(√(λh)), with I₀ by its power series.
        let (h, lambda): (f64, f64) = (5.0, 4.0);
        let x = (lambda * h).sqrt() / 2.0;
        let mut i0 = 0.0;
        let mut term = 1.0;
        for j in 0..60 {
            if j > 0 {
                term *= x * x / (j as f64 * j as f64);
            }
            i0 += term;
        }
        let expect = 0.5 * (-(h + lambda) / 2.0).exp() * i0;
        assert_relative_eq!(density_noncentral(&chisq(h, 2.0), lambda).unwrap(), expect, max_relative = 1e-13);
    }

    #[test]
    fn t_branches_agree() {
        // At tλ < 0 the integral branch is used; compare with the series
        // evaluated directly, where cancellation is still mild.
        let (tv, nu, lambda): (f64, f64, f64) = (-0.6, 7.0, 0.8);
        let x = tv * lambda * (2.0 / (nu + tv * tv)).sqrt();
        let prefix = (nu / 2.0) * nu.ln() - lambda * lambda / 2.0 - 0.5 * PI.ln() - lgamma(nu / 2.0)
            - ((nu + 1.0) / 2.0) * (nu + tv * tv).ln();
        let mut sum = 0.0;
        for j in 0..200 {
            let jf = j as f64;
            let mag = (lgamma((nu + jf + 1.0) / 2.0) - lgamma(jf + 1.0) + jf * x.abs().ln()).exp();
            sum += if j % 2 == 0 { mag } else { -mag };
        }
        let series = prefix.exp() * sum;
        assert_relative_eq!(density_noncentral(&t(tv, nu), lambda).unwrap(), series, max_relative = 1e-12);
    }

    #[test]
    fn support_errors() {
        assert!(density_noncentral(&chisq(1.0, 2.0), -1.0).is_err());
        assert!(density_noncentral(&f(1.0, 2.0, 5.0), -0.5).is_err());
        assert!(density_noncentral(&z(1.0), f64::NAN).is_err());
    }

    #[test]
    fn unimodal_sum() {
        // Σ e^{-μ} μ^i / i! = 1
        let v = log_sum_unimodal(|i| log_poisson(i, 250.0)).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn noncentral_chisq_matches_monte_carlo() {
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        use rand_distr::{Distribution, StandardNormal};
        use rayon::prelude::*;

        let (k, lambda, h, half): (f64, f64, f64, f64) = (3.0, 4.0, 5.0, 0.05);
        let chunks = 100u64;
        let per = 100_000u64;
        let hits: u64 = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(3);
                rng.set_stream(c);
                let mut hits = 0;
                for _ in 0..per {
                    let shifted: f64 = StandardNormal.sample(&mut rng);
                    let a: f64 = StandardNormal.sample(&mut rng);
                    let b: f64 = StandardNormal.sample(&mut rng);
                    let x = (shifted + lambda.sqrt()).powi(2) + a * a + b * b;
                    if (x - h).abs() < half {
                        hits += 1;
                    }
                }
                hits
            })
            .sum();
        let n = (chunks * per) as f64;
        let p = hits as f64 / n;
        let estimate = p / (2.0 * half);
        let se = (p * (1.0 - p) / n).sqrt() / (2.0 * half);
        let exact = density_noncentral(&chisq(h, k), lambda).unwrap();
        assert!((estimate - exact).abs() < 3.0 * se, "{estimate} vs {exact} (se {se})");
    }
}
