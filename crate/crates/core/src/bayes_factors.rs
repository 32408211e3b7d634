//! Closed-form Bayes factors for z, t, χ² and F statistics under
//! normal-moment and gamma alternative priors, all on the log scale.

use crate::error::{BffError, Result};
use crate::priors::PriorFamily;
use crate::scalar::Scalar;
use crate::quadrature::{log_integrate, refine_mode};
use crate::specfun::{log_1f1, log_2f1, log_gamma, log_gamma_ratio, LogValue, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatFamily {
    Z,
    T,
    ChiSq,
    F,
}

impl StatFamily {
    pub fn name(self) -> &'static str {
        match self {
            StatFamily::Z => "z",
            StatFamily::T => "t",
            StatFamily::ChiSq => "chisq",
            StatFamily::F => "f",
        }
    }

    pub fn uses_gamma_prior(self) -> bool {
        matches!(self, StatFamily::ChiSq | StatFamily::F)
    }
}

/// Direction of the alternative. χ² and F statistics are always
/// [`Sidedness::OneSided`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// An observed test statistic with its degrees of freedom and the
/// effective sample size used to map effect sizes onto τ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestStatistic<T> {
    family: StatFamily,
    sided: Sidedness,
    value: T,
    nu: Option<T>,
    k: Option<T>,
    m: Option<T>,
    n_eff: T,
}

fn require_positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(BffError::invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn require_finite<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(BffError::invalid(format!("{name} must be finite, got {v}")))
    }
}

impl<T: Scalar> TestStatistic<T> {
    pub fn z(value: T, sided: Sidedness, n_eff: T) -> Result<Self> {
        require_finite("z", value)?;
        require_positive("n_eff", n_eff)?;
        Ok(TestStatistic {
            family: StatFamily::Z,
            sided,
            value,
            nu: None,
            k: None,
            m: None,
            n_eff,
        })
    }

    pub fn t(value: T, nu: T, sided: Sidedness, n_eff: T) -> Result<Self> {
        require_finite("t", value)?;
        require_positive("nu", nu)?;
        require_positive("n_eff", n_eff)?;
        Ok(TestStatistic {
            family: StatFamily::T,
            sided,
            value,
            nu: Some(nu),
            k: None,
            m: None,
            n_eff,
        })
    }

    pub fn chisq(h: T, k: T, n_eff: T) -> Result<Self> {
        require_finite("h", h)?;
        if h < T::zero() {
            return Err(BffError::invalid(format!("chi-squared statistic must be >= 0, got {h}")));
        }
        require_positive("k", k)?;
        require_positive("n_eff", n_eff)?;
        Ok(TestStatistic {
            family: StatFamily::ChiSq,
            sided: Sidedness::OneSided,
            value: h,
            nu: None,
            k: Some(k),
            m: None,
            n_eff,
        })
    }

    pub fn f(f: T, k: T, m: T, n_eff: T) -> Result<Self> {
        require_finite("f", f)?;
        if f < T::zero() {
            return Err(BffError::invalid(format!("F statistic must be >= 0, got {f}")));
        }
        require_positive("k", k)?;
        require_positive("m", m)?;
        require_positive("n_eff", n_eff)?;
        Ok(TestStatistic {
            family: StatFamily::F,
            sided: Sidedness::OneSided,
            value: f,
            nu: None,
            k: Some(k),
            m: Some(m),
            n_eff,
        })
    }

    pub fn family(&self) -> StatFamily {
        self.family
    }

    pub fn sided(&self) -> Sidedness {
        self.sided
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn nu(&self) -> Option<T> {
        self.nu
    }

    pub fn k(&self) -> Option<T> {
        self.k
    }

    pub fn m(&self) -> Option<T> {
        self.m
    }

    pub fn n_eff(&self) -> T {
        self.n_eff
    }

    /// Same statistic with a different effective sample size.
    pub fn with_n_eff(mut self, n_eff: T) -> Result<Self> {
        require_positive("n_eff", n_eff)?;
        self.n_eff = n_eff;
        Ok(self)
    }

    pub fn prior_family(&self) -> PriorFamily {
        match (self.family, self.sided) {
            (StatFamily::ChiSq | StatFamily::F, _) => PriorFamily::GammaNonlocal,
            (_, Sidedness::TwoSided) => PriorFamily::NormalMomentTwoSided,
            (_, Sidedness::OneSided) => PriorFamily::NormalMomentPositive,
        }
    }

    pub fn log_bf10(&self, tau_sq: T, r: T) -> Result<T> {
        let df = |o: Option<T>| o.expect("degrees of freedom checked at construction");
        match (self.family, self.sided) {
            (StatFamily::Z, Sidedness::TwoSided) => log_bf10_z_two(self.value, tau_sq, r),
            (StatFamily::Z, Sidedness::OneSided) => log_bf10_z_one(self.value, tau_sq, r),
            (StatFamily::T, Sidedness::TwoSided) => {
                log_bf10_t_two(self.value, df(self.nu), tau_sq, r)
            }
            (StatFamily::T, Sidedness::OneSided) => {
                log_bf10_t_one(self.value, df(self.nu), tau_sq, r)
            }
            (StatFamily::ChiSq, _) => log_bf10_chisq(self.value, df(self.k), tau_sq, r),
            (StatFamily::F, _) => log_bf10_f(self.value, df(self.k), df(self.m), tau_sq, r),
        }
    }

    pub fn log_bf01(&self, tau_sq: T, r: T) -> Result<T> {
        self.log_bf10(tau_sq, r).map(|v| -v)
    }
}

/// Returns `Ok(None)` when τ² = 0, where every Bayes factor is exactly one.
fn check_prior<T: Scalar>(func: &'static str, tau_sq: T, r: T) -> Result<Option<()>> {
    if !(tau_sq.is_finite() && tau_sq >= T::zero()) {
        return Err(BffError::domain(func, format!("tau_sq must be >= 0, got {tau_sq}")));
    }
    if !(r.is_finite() && r >= T::one()) {
        return Err(BffError::domain(func, format!("r must be >= 1, got {r}")));
    }
    Ok(if tau_sq == T::zero() { None } else { Some(()) })
}

fn sign_of<T: Scalar>(y: T) -> Sign {
    if y > T::zero() {
        Sign::Positive
    } else if y < T::zero() {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

fn positive_ln<T: Scalar>(func: &'static str, v: LogValue<T>) -> Result<T> {
    v.ln().ok_or_else(|| {
        BffError::Internal(format!("{func}: bracketed sum is not positive ({:?})", v.sign))
    })
}

pub fn log_bf10_z_two<T: Scalar>(z: T, tau_sq: T, r: T) -> Result<T> {
    if check_prior("log_bf10_z_two", tau_sq, r)?.is_none() {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let x = tau_sq * z * z / (T::lit(2.0) * (T::one() + tau_sq));
    let f = log_1f1(r + half, half, x)?;
    Ok(-(r + half) * tau_sq.ln_1p() + positive_ln("log_bf10_z_two", f)?)
}

pub fn log_bf10_z_one<T: Scalar>(z: T, tau_sq: T, r: T) -> Result<T> {
    if check_prior("log_bf10_z_one", tau_sq, r)?.is_none() {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let y = (tau_sq / (T::lit(2.0) * (T::one() + tau_sq))).sqrt() * z;
    let y2 = y * y;
    let even = log_1f1(r + half, half, y2)?;
    let odd_weight = T::LN_2() + y.abs().ln() + log_gamma_ratio(r + T::one(), r + half)?;
    let odd = LogValue::with_sign(odd_weight, sign_of(y))
        .mul(log_1f1(r + T::one(), T::lit(1.5), y2)?);
    match stable_sum(even, odd) {
        Some(bracket) => Ok(-(r + half) * tau_sq.ln_1p() + bracket),
        None => z_one_by_integral(z, tau_sq, r),
    }
}

/// Sums that cancel by more than this many nats (four digits) are
/// recomputed from the integral form.
const CANCELLATION_LIMIT: f64 = 9.21;

fn stable_sum<T: Scalar>(even: LogValue<T>, odd: LogValue<T>) -> Option<T> {
    let top = even.log_magnitude.max(odd.log_magnitude);
    even.add(odd)
        .ln()
        .filter(|&ln| top - ln <= T::lit(CANCELLATION_LIMIT))
}

/// One-sided z factor through `∫₀^∞ u^{2r} exp(zσu − u²/2) du` with
/// `σ² = τ²/(1+τ²)`, which stays accurate for negative `z`.
fn z_one_by_integral<T: Scalar>(z: T, tau_sq: T, r: T) -> Result<T> {
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let zs = z * (tau_sq / (T::one() + tau_sq)).sqrt();
    let root = (zs * zs + T::lit(8.0) * r).sqrt();
    let mode = if zs <= T::zero() {
        T::lit(4.0) * r / (root - zs)
    } else {
        (zs + root) * half
    };
    let scale = (two * r / (mode * mode) + T::one()).sqrt().recip();
    let log_j = log_integrate(
        |u: T| {
            Ok(if u > T::zero() {
                two * r * u.ln() + zs * u - u * u * half
            } else {
                T::neg_infinity()
            })
        },
        T::zero(),
        mode,
        scale,
    )?;
    Ok(T::LN_2() - (r + half) * (T::LN_2() + tau_sq.ln_1p()) - log_gamma(r + half)? + log_j)
}

fn t_argument<T: Scalar>(t: T, nu: T, tau_sq: T) -> Result<T> {
    let y = t * (tau_sq / ((nu + t * t) * (T::one() + tau_sq))).sqrt();
    if y * y >= T::one() {
        return Err(BffError::Internal(format!("t-test hypergeometric argument {} >= 1", y * y)));
    }
    Ok(y)
}

/// The odd term of the one-sided t bracket integrates to zero against the
/// symmetric prior, so only the even term remains.
pub fn log_bf10_t_two<T: Scalar>(t: T, nu: T, tau_sq: T, r: T) -> Result<T> {
    if !(nu.is_finite() && nu > T::zero()) {
        return Err(BffError::domain("log_bf10_t_two", format!("nu must be > 0, got {nu}")));
    }
    if check_prior("log_bf10_t_two", tau_sq, r)?.is_none() {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let y = t_argument(t, nu, tau_sq)?;
    let f = log_2f1((nu + T::one()) * half, r + half, half, y * y)?;
    Ok(-(r + half) * tau_sq.ln_1p() + positive_ln("log_bf10_t_two", f)?)
}

pub fn log_bf10_t_one<T: Scalar>(t: T, nu: T, tau_sq: T, r: T) -> Result<T> {
    if !(nu.is_finite() && nu > T::zero()) {
        return Err(BffError::domain("log_bf10_t_one", format!("nu must be > 0, got {nu}")));
    }
    if check_prior("log_bf10_t_one", tau_sq, r)?.is_none() {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let one = T::one();
    let y = t_argument(t, nu, tau_sq)?;
    let y2 = y * y;
    let even = log_2f1((nu + one) * half, r + half, half, y2)?;
    let odd_weight = T::LN_2()
        + y.abs().ln()
        + log_gamma_ratio(nu * half + one, (nu + one) * half)?
        + log_gamma_ratio(r + one, r + half)?;
    let odd = LogValue::with_sign(odd_weight, sign_of(y))
        .mul(log_2f1(nu * half + one, r + one, T::lit(1.5), y2)?);
    match stable_sum(even, odd) {
        Some(bracket) => Ok(-(r + half) * tau_sq.ln_1p() + bracket),
        None => t_one_by_mixture(t, nu, tau_sq, r),
    }
}

/// One-sided t factor as the average of the one-sided z factor at `t·s`
/// over the null posterior of the scale `s`, whose square is
/// `Gamma((ν+1)/2, rate (ν+t²)/2)`. Integrating in `s` keeps the
/// integrand analytic near zero.
fn t_one_by_mixture<T: Scalar>(t: T, nu: T, tau_sq: T, r: T) -> Result<T> {
    const SCAN: i32 = 64;
    let half = T::lit(0.5);
    let shape = (nu + T::one()) * half;
    let rate = (nu + t * t) * half;
    let norm = T::LN_2() + shape * rate.ln() - log_gamma(shape)?;
    let mut logf = |s: T| -> Result<T> {
        if s <= T::zero() {
            return Ok(T::neg_infinity());
        }
        let z = log_bf10_z_one(t * s, tau_sq, r)?;
        Ok(norm + nu * s.ln() - rate * s * s + z)
    };
    let center = (shape / rate).sqrt();
    let at = |k: i32| {
        let step = T::lit(8.0) * T::lit(k as f64) / T::lit(SCAN as f64);
        center * (step - T::lit(6.0)).exp()
    };
    let mut best = (0, T::neg_infinity());
    for k in 0..=SCAN {
        let v = logf(at(k))?;
        if v > best.1 {
            best = (k, v);
        }
    }
    let lo = if best.0 == 0 { T::zero() } else { at(best.0 - 1) };
    let hi = at((best.0 + 1).min(SCAN));
    let mode = refine_mode(&mut logf, lo, hi)?;
    log_integrate(logf, T::zero(), mode, (hi - lo) * half)
}

pub fn log_bf10_chisq<T: Scalar>(h: T, k: T, tau_sq: T, r: T) -> Result<T> {
    if !(h.is_finite() && h >= T::zero()) {
        return Err(BffError::domain("log_bf10_chisq", format!("h must be >= 0, got {h}")));
    }
    if !(k.is_finite() && k > T::zero()) {
        return Err(BffError::domain("log_bf10_chisq", format!("k must be > 0, got {k}")));
    }
    if check_prior("log_bf10_chisq", tau_sq, r)?.is_none() {
        return Ok(T::zero());
    }
    let half_k = k * T::lit(0.5);
    let x = tau_sq * h / (T::lit(2.0) * (T::one() + tau_sq));
    let f = log_1f1(half_k + r, half_k, x)?;
    Ok(-(half_k + r) * tau_sq.ln_1p() + positive_ln("log_bf10_chisq", f)?)
}

pub fn log_bf10_f<T: Scalar>(f: T, k: T, m: T, tau_sq: T, r: T) -> Result<T> {
    if !(f.is_finite() && f >= T::zero()) {
        return Err(BffError::domain("log_bf10_f", format!("f must be >= 0, got {f}")));
    }
    if !(k.is_finite() && k > T::zero() && m.is_finite() && m > T::zero()) {
        return Err(BffError::domain("log_bf10_f", format!("k, m must be > 0, got {k}, {m}")));
    }
    if check_prior("log_bf10_f", tau_sq, r)?.is_none() {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let kf = k * f;
    let x = kf * tau_sq / ((T::one() + tau_sq) * (m + kf));
    if x >= T::one() {
        return Err(BffError::Internal(format!("F-test hypergeometric argument {x} >= 1")));
    }
    let v = log_2f1(k * half + r, (k + m) * half, k * half, x)?;
    Ok(-(k * half + r) * tau_sq.ln_1p() + positive_ln("log_bf10_f", v)?)
}
