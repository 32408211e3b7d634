//! Log-domain quadrature for smooth unimodal integrands.

use std::sync::OnceLock;

use crate::error::{BffError, Result};
use crate::scalar::Scalar;

const GL_POINTS: usize = 20;
const PANELS: usize = 24;
/// Window edges sit where the integrand has fallen by this many nats.
const WINDOW_DROP: f64 = 60.0;
const MAX_STEPS: usize = 200;

/// Gauss–Legendre nodes and weights on [-1, 1].
fn gauss_legendre() -> &'static [(f64, f64); GL_POINTS] {
    static NODES: OnceLock<[(f64, f64); GL_POINTS]> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_POINTS;
        let mut out = [(0.0, 0.0); GL_POINTS];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

/// Golden-section refinement of the maximizer of `logf` on `[lo, hi]`.
pub(crate) fn refine_mode<T: Scalar, F: FnMut(T) -> Result<T>>(
    logf: &mut F,
    mut lo: T,
    mut hi: T,
) -> Result<T> {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = logf(x1)?;
    let mut f2 = logf(x2)?;
    for _ in 0..120 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = logf(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = logf(x2)?;
        }
    }
    Ok(if f1 >= f2 { x1 } else { x2 })
}

/// Distance from `mode` in direction `dir` at which `logf` first drops
/// below `peak - WINDOW_DROP`, to within a factor of two.
fn edge<T: Scalar, F: FnMut(T) -> Result<T>>(
    logf: &mut F,
    mode: T,
    peak: T,
    scale: T,
    dir: T,
    limit: Option<T>,
) -> Result<T> {
    let floor = peak - T::lit(WINDOW_DROP);
    let two = T::lit(2.0);
    let clamp = |d: T| match limit {
        Some(l) if d > l => l,
        _ => d,
    };
    let mut d = clamp(scale);
    let mut steps = 0;
    while logf(mode + dir * d)? > floor {
        if limit.is_some_and(|l| d >= l) {
            return Ok(d);
        }
        d = clamp(d * two);
        steps += 1;
        if steps > MAX_STEPS {
            return Err(BffError::Internal("quadrature window did not close".into()));
        }
    }
    while d > scale * T::lit(1e-12) && logf(mode + dir * d / two)? <= floor {
        d = d / two;
        steps += 1;
        if steps > MAX_STEPS {
            break;
        }
    }
    Ok(d)
}

/// `ln ∫_lower^∞ exp(logf(x)) dx` for a unimodal integrand whose maximizer
/// is `mode` and whose width is roughly `scale`.
pub(crate) fn log_integrate<T: Scalar, F: FnMut(T) -> Result<T>>(
    mut logf: F,
    lower: T,
    mode: T,
    scale: T,
) -> Result<T> {
    let peak = logf(mode)?;
    if !peak.is_finite() {
        return Err(BffError::Internal(format!("integrand peak is {peak}")));
    }
    let right = edge(&mut logf, mode, peak, scale, T::one(), None)?;
    let room = mode - lower;
    let left = if room > T::zero() {
        edge(&mut logf, mode, peak, scale, -T::one(), Some(room))?
    } else {
        T::zero()
    };
    let (a, b) = (mode - left, mode + right);
    let width = (b - a) / T::lit(PANELS as f64);
    let half = T::lit(0.5);
    let mut sum = T::zero();
    for p in 0..PANELS {
        let mid = a + width * (T::lit(p as f64) + half);
        for &(x, w) in gauss_legendre() {
            let v = logf(mid + half * width * T::lit(x))?;
            sum = sum + T::lit(w) * (v - peak).exp();
        }
    }
    Ok(peak + (sum * half * width).ln())
}
