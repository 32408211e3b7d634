//! Bayes factors by direct integration of the sampling density against the
//! prior on the non-centrality.

use bffkit::{PriorFamily, PriorSpec64, StatFamily, TestStatistic64};

use crate::densities::{log_density_noncentral, log_density_null};
use crate::error::{OracleError, Result};
use crate::quadrature::{integrate, QuadratureSpec};

const SCAN: usize = 400;
/// The window edge sits where the integrand has fallen this many nats.
const EDGE_DROP: f64 = 50.0;

/// `ln ∫₀^∞ exp(logf(u)) du` for an integrand concentrated around a single
/// peak lying in `[small, reach]` or somewhat beyond `reach`.
fn log_half_line(
    logf: &dyn Fn(f64) -> Result<f64>,
    small: f64,
    reach: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let mut upper = reach;
    let (ratio, peak_at, peak) = loop {
        let ratio = (upper / small).powf(1.0 / SCAN as f64);
        let mut best = (0.0, f64::NEG_INFINITY);
        let mut u = small;
        for _ in 0..=SCAN {
            let v = logf(u)?;
            if v > best.1 {
                best = (u, v);
            }
            u *= ratio;
        }
        if best.0 < upper * 0.95 || upper > 1e8 {
            break (ratio, best.0, best.1);
        }
        upper *= 2.0;
    };
    if !peak.is_finite() {
        return Err(OracleError::Quadrature(format!("integrand peak is {peak}")));
    }
    // Refine the peak between its scan neighbours.
    let (mut a, mut b) = (peak_at / ratio, peak_at * ratio);
    let step = b - peak_at;
    for _ in 0..80 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if logf(m1)? >= logf(m2)? {
            b = m2;
        } else {
            a = m1;
        }
    }
    let mode = 0.5 * (a + b);
    let top = logf(mode)?.max(peak);
    let mut reach_up = step;
    while logf(mode + reach_up)? > top - EDGE_DROP {
        reach_up *= 2.0;
        if reach_up > 1e12 {
            return Err(OracleError::Quadrature("integrand does not decay".into()));
        }
    }
    let hi = mode + reach_up;
    let mut reach_down = step.min(mode);
    while reach_down < mode && logf(mode - reach_down)? > top - EDGE_DROP {
        reach_down = (2.0 * reach_down).min(mode);
    }
    let lo = mode - reach_down;
    let mut f = |u: f64| match logf(u) {
        Ok(v) => (v - top).exp(),
        Err(_) => f64::NAN,
    };
    let body = integrate(&mut f, lo, mode, q)?.value + integrate(&mut f, mode, hi, q)?.value;
    let tail = integrate(&mut f, hi, 2.0 * hi, q)?.value;
    if !body.is_finite() || body <= 0.0 {
        return Err(OracleError::Quadrature(format!("integral is {body}")));
    }
    if tail > q.tail_tol * body {
        return Err(OracleError::Quadrature(format!(
            "tail mass {:.3e} beyond {hi} exceeds tolerance",
            tail / body
        )));
    }
    Ok(top + (body + tail).ln())
}

/// Rough location of the likelihood peak in λ.
fn statistic_reach(stat: &TestStatistic64) -> f64 {
    let x = stat.value().abs();
    match stat.family() {
        StatFamily::Z | StatFamily::T => x + 6.0,
        StatFamily::ChiSq => x + 10.0 * x.sqrt() + 20.0,
        StatFamily::F => {
            let k = stat.k().unwrap_or(1.0);
            let kf = k * x;
            kf + 10.0 * kf.sqrt() + 20.0
        }
    }
}

/// log BF₁₀ as `ln ∫ f(x | λ) π(λ) dλ − ln f(x | 0)`.
pub fn marginal_bf_quadrature(stat: &TestStatistic64, spec: &PriorSpec64, q: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    let gamma = spec.family() == PriorFamily::GammaNonlocal;
    if gamma != stat.family().uses_gamma_prior() {
        return Err(OracleError::Support(format!(
            "{} prior does not pair with a {} statistic",
            spec.family().name(),
            stat.family().name()
        )));
    }
    let null = log_density_null(stat);
    let (mode, sd) = if gamma {
        let shape = spec.k().unwrap_or(0.0) / 2.0 + spec.r();
        (spec.mode(), shape.sqrt() * 2.0 * spec.tau_sq())
    } else {
        (spec.mode().abs(), (spec.tau_sq() * (2.0 * spec.r() + 1.0)).sqrt())
    };
    let reach = (mode + q.sd_multiple * sd).max(statistic_reach(stat));
    let small = (mode * 1e-3).min(reach * 1e-6);
    let side = |sign: f64| -> Result<f64> {
        let logf = |u: f64| -> Result<f64> {
            let lambda = sign * u;
            let prior = spec.log_density(lambda)?;
            if prior == f64::NEG_INFINITY {
                return Ok(prior);
            }
            Ok(log_density_noncentral(stat, lambda)? - null + prior)
        };
        log_half_line(&logf, small, reach, q)
    };
    match spec.family() {
        PriorFamily::NormalMomentPositive | PriorFamily::GammaNonlocal => side(1.0),
        PriorFamily::NormalMomentNegative => side(-1.0),
        PriorFamily::NormalMomentTwoSided => {
            let (p, n) = (side(1.0)?, side(-1.0)?);
            let top = p.max(n);
            Ok(top + ((p - top).exp() + (n - top).exp()).ln())
        }
    }
}

/// Prior that pairs with `stat` under the closed-form Bayes factors.
pub fn prior_for(stat: &TestStatistic64, tau_sq: f64, r: f64) -> Result<PriorSpec64> {
    let family = stat.prior_family();
    Ok(match family {
        PriorFamily::GammaNonlocal => PriorSpec64::gamma(tau_sq, r, stat.k().unwrap_or(1.0))?,
        _ => PriorSpec64::normal_moment(family, tau_sq, r)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::density_noncentral;
    use bffkit::Sidedness;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn densities_integrate_to_one() {
        let spec = q();
        for &lambda in &[0.0, 0.5, 2.0, 6.0] {
            let total = integrate(
                |x| density_noncentral(&TestStatistic64::z(x, Sidedness::TwoSided, 1.0).unwrap(), lambda).unwrap(),
                -40.0,
                40.0,
                &spec,
            )
            .unwrap()
            .value;
            assert!((total - 1.0).abs() < 1e-8, "z {lambda}");
            // x = tan θ maps the heavy t tails onto a finite range.
            let total = integrate(
                |th: f64| {
                    let s = TestStatistic64::t(th.tan(), 6.0, Sidedness::TwoSided, 7.0).unwrap();
                    density_noncentral(&s, lambda).unwrap() / th.cos().powi(2)
                },
                -std::f64::consts::FRAC_PI_2 + 1e-9,
                std::f64::consts::FRAC_PI_2 - 1e-9,
                &spec,
            )
            .unwrap()
            .value;
            assert!((total - 1.0).abs() < 1e-8, "t {lambda} {total}");
            let total = integrate(
                |x| density_noncentral(&TestStatistic64::chisq(x, 3.0, 1.0).unwrap(), lambda).unwrap(),
                0.0,
                150.0,
                &spec,
            )
            .unwrap()
            .value;
            assert!((total - 1.0).abs() < 1e-8, "chisq {lambda}");
        }
        // F(4, 30): integrate in y = x/(1+x) to keep the range finite.
        for &lambda in &[0.0, 1.0, 5.0] {
            let total = integrate(
                |y: f64| {
                    let x = y / (1.0 - y);
                    let s = TestStatistic64::f(x, 4.0, 30.0, 1.0).unwrap();
                    density_noncentral(&s, lambda).unwrap() / ((1.0 - y) * (1.0 - y))
                },
                0.0,
                1.0 - 1e-12,
                &spec,
            )
            .unwrap()
            .value;
            assert!((total - 1.0).abs() < 1e-8, "f {lambda} {total}");
        }
    }

    #[test]
    fn priors_integrate_to_one() {
        let spec = q();
        let cases = [
            PriorSpec64::normal_moment(PriorFamily::NormalMomentTwoSided, 0.605, 1.0).unwrap(),
            PriorSpec64::normal_moment(PriorFamily::NormalMomentPositive, 3.0, 7.5).unwrap(),
            PriorSpec64::gamma(2.0, 1.0, 3.0).unwrap(),
        ];
        for (p, hi) in cases.iter().zip([40.0, 60.0, 400.0]) {
            let density = |x: f64| p.log_density(x).unwrap().exp();
            let mut total = integrate(density, 0.0, hi, &spec).unwrap().value;
            if p.family() == PriorFamily::NormalMomentTwoSided {
                total += integrate(density, -hi, 0.0, &spec).unwrap().value;
            }
            assert!((total - 1.0).abs() < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn null_prior_limit() {
        let s = TestStatistic64::z(1.5, Sidedness::TwoSided, 100.0).unwrap();
        let p = prior_for(&s, 1e-10, 1.0).unwrap();
        let v = marginal_bf_quadrature(&s, &p, &q()).unwrap();
        assert!(v.abs() < 1e-6, "{v}");
    }

    #[test]
    fn mismatched_prior_rejected() {
        let s = TestStatistic64::chisq(3.0, 2.0, 10.0).unwrap();
        let p = PriorSpec64::normal_moment(PriorFamily::NormalMomentTwoSided, 1.0, 1.0).unwrap();
        assert!(marginal_bf_quadrature(&s, &p, &q()).is_err());
    }
}
