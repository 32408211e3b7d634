//! Combining Bayes factors across replicated studies, choosing `r` by
//! marginal maximum a posteriori estimation, and building BFF curves.

use rayon::prelude::*;

use crate::bayes_factors::TestStatistic;
use crate::effect_map::{tau_sq_for_scaled, DesignKind, EffectSize, LinearModelScale};
use crate::error::{BffError, Result};
use crate::priors::{jeffreys_log_prior_gamma, jeffreys_log_prior_nm};
use crate::scalar::Scalar;

pub const DEFAULT_R_MAX: f64 = 200.0;
const SCAN_POINTS: usize = 32;
const R_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Study<T> {
    pub stat: TestStatistic<T>,
    pub design: DesignKind,
}

/// A non-empty collection of studies that share one prior family, and for
/// χ²/F statistics one numerator degrees of freedom `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySet<T> {
    studies: Vec<Study<T>>,
    label: String,
    gamma_k: Option<T>,
    linear_model_scale: LinearModelScale,
}

impl<T: Scalar> StudySet<T> {
    pub fn new(label: impl Into<String>, studies: Vec<Study<T>>) -> Result<Self> {
        let first = studies
            .first()
            .ok_or_else(|| BffError::invalid("study set must contain at least one study"))?;
        let gamma = first.stat.family().uses_gamma_prior();
        let gamma_k = if gamma { first.stat.k() } else { None };
        for (index, s) in studies.iter().enumerate() {
            s.design
                .check_statistic(&s.stat)
                .map_err(|e| BffError::Study { index, source: Box::new(e) })?;
            if s.stat.family().uses_gamma_prior() != gamma {
                return Err(BffError::Study {
                    index,
                    source: Box::new(BffError::invalid(
                        "normal-moment and gamma prior families cannot be mixed in one study set",
                    )),
                });
            }
            if gamma && s.stat.k() != gamma_k {
                return Err(BffError::Study {
                    index,
                    source: Box::new(BffError::invalid(format!(
                        "all chi-squared/F studies must share k; expected {:?}, got {:?}",
                        gamma_k,
                        s.stat.k()
                    ))),
                });
            }
        }
        Ok(StudySet {
            studies,
            label: label.into(),
            gamma_k,
            linear_model_scale: LinearModelScale::default(),
        })
    }

    pub fn with_linear_model_scale(mut self, scale: LinearModelScale) -> Self {
        self.linear_model_scale = scale;
        self
    }

    pub fn studies(&self) -> &[Study<T>] {
        &self.studies
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.studies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.studies.is_empty()
    }

    pub fn uses_gamma_prior(&self) -> bool {
        self.gamma_k.is_some()
    }

    /// Union of two sets; the result must still be homogeneous.
    pub fn concat(&self, other: &StudySet<T>) -> Result<Self> {
        let mut studies = self.studies.clone();
        studies.extend_from_slice(&other.studies);
        Ok(StudySet::new(self.label.clone(), studies)?.with_linear_model_scale(self.linear_model_scale))
    }

    /// Unnormalized Jeffreys log prior on `r` for this set's prior family.
    pub fn log_prior_r(&self, r: T) -> Result<T> {
        match self.gamma_k {
            Some(k) => jeffreys_log_prior_gamma(r, k),
            None => jeffreys_log_prior_nm(r),
        }
    }

    /// Per-study log BF₁₀ at effect `omega` and shape `r`.
    pub fn per_study_log_bf(&self, omega: T, r: T) -> Result<Vec<T>> {
        if !(omega.is_finite() && omega > T::zero()) {
            return Err(BffError::invalid(format!("omega must be > 0, got {omega}")));
        }
        self.studies
            .iter()
            .enumerate()
            .map(|(index, s)| {
                let tau_sq = tau_sq_for_scaled(
                    &s.design,
                    EffectSize::new(omega),
                    r,
                    s.stat.k(),
                    self.linear_model_scale,
                )
                .and_then(|t| s.stat.log_bf10(t, r));
                tau_sq.map_err(|e| BffError::Study { index, source: Box::new(e) })
            })
            .collect()
    }
}

/// Σ log BF₁₀ over the studies of `set`.
pub fn combined_log_bf<T: Scalar>(set: &StudySet<T>, omega: T, r: T) -> Result<T> {
    Ok(sum(&set.per_study_log_bf(omega, r)?))
}

fn sum<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &b| a + b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmapFit<T> {
    pub r_star: T,
    /// `log_bf10 + log_prior` at `r_star`.
    pub objective: T,
    pub log_bf10: T,
    pub log_prior: T,
    pub per_study: Vec<T>,
    pub at_boundary: bool,
}

struct Eval<T> {
    r: T,
    objective: T,
    log_bf10: T,
    log_prior: T,
    per_study: Vec<T>,
}

fn evaluate<T: Scalar>(set: &StudySet<T>, omega: T, r: T) -> Result<Eval<T>> {
    let per_study = set.per_study_log_bf(omega, r)?;
    let log_bf10 = sum(&per_study);
    let log_prior = set.log_prior_r(r)?;
    let objective = log_bf10 + log_prior;
    if !objective.is_finite() {
        return Err(BffError::Optimizer(format!("objective is {objective} at r = {r}")));
    }
    Ok(Eval {
        r,
        objective,
        log_bf10,
        log_prior,
        per_study,
    })
}

/// Maximizes `Σ log BF₁₀ + log π(r)` over `r ∈ [1, r_max]`.
///
/// A log-spaced scan picks the bracket, golden-section search refines it,
/// and the result is compared against the scan points and both endpoints.
pub fn mmap_r<T: Scalar>(set: &StudySet<T>, omega: T, r_max: T) -> Result<MmapFit<T>> {
    let one = T::one();
    if !(r_max.is_finite() && r_max >= one) {
        return Err(BffError::invalid(format!("r_max must be >= 1, got {r_max}")));
    }
    let mut best = evaluate(set, omega, one)?;
    if r_max == one {
        return Ok(finish(best, r_max));
    }
    let ln_max = r_max.ln();
    let last = T::lit((SCAN_POINTS - 1) as f64);
    let grid: Vec<T> = (0..SCAN_POINTS)
        .map(|i| match i {
            0 => one,
            i if i == SCAN_POINTS - 1 => r_max,
            i => (ln_max * T::lit(i as f64) / last).exp(),
        })
        .collect();
    let mut best_i = 0;
    for (i, &r) in grid.iter().enumerate().skip(1) {
        let e = evaluate(set, omega, r)?;
        if e.objective > best.objective {
            best = e;
            best_i = i;
        }
    }
    let mut lo = grid[best_i.saturating_sub(1)];
    let mut hi = grid[(best_i + 1).min(SCAN_POINTS - 1)];
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let tol = T::lit(R_TOLERANCE);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut e1 = evaluate(set, omega, x1)?;
    let mut e2 = evaluate(set, omega, x2)?;
    let mut iterations = 0;
    while hi - lo > tol {
        iterations += 1;
        if iterations > 200 {
            return Err(BffError::Optimizer("golden-section search did not converge".into()));
        }
        if e1.objective >= e2.objective {
            hi = x2;
            x2 = x1;
            e2 = e1;
            x1 = hi - inv_phi * (hi - lo);
            e1 = evaluate(set, omega, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            e1 = e2;
            x2 = lo + inv_phi * (hi - lo);
            e2 = evaluate(set, omega, x2)?;
        }
    }
    for e in [e1, e2] {
        if e.objective > best.objective {
            best = e;
        }
    }
    Ok(finish(best, r_max))
}

fn finish<T: Scalar>(e: Eval<T>, r_max: T) -> MmapFit<T> {
    let at_boundary = r_max > T::one() && e.r >= r_max - T::lit(R_TOLERANCE);
    MmapFit {
        r_star: e.r,
        objective: e.objective,
        log_bf10: e.log_bf10,
        log_prior: e.log_prior,
        per_study: e.per_study,
        at_boundary,
    }
}

/// Strictly increasing, positive effect-size grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectGrid<T> {
    values: Vec<T>,
}

impl<T: Scalar> EffectGrid<T> {
    /// `min, min + step, …` up to and including `max` when it lies on the grid.
    pub fn range(min: T, max: T, step: T) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(BffError::invalid("grid bounds must be finite"));
        }
        if step <= T::zero() {
            return Err(BffError::invalid(format!("grid step must be > 0, got {step}")));
        }
        if max < min {
            return Err(BffError::invalid(format!("grid max {max} is below min {min}")));
        }
        let span = (max - min) / step;
        let count = (span + T::lit(1e-9)).floor().to_usize().unwrap_or(0) + 1;
        Self::from_values((0..count).map(|i| min + step * T::lit(i as f64)).collect())
    }

    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(BffError::invalid("effect grid is empty"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > T::zero())) {
            return Err(BffError::invalid(format!("grid values must be > 0, got {v}")));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(BffError::invalid("grid values must be strictly increasing"));
        }
        Ok(EffectGrid { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<T: Scalar> Default for EffectGrid<T> {
    fn default() -> Self {
        EffectGrid::range(T::lit(0.005), T::lit(1.0), T::lit(0.005)).expect("valid default grid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RPolicy<T> {
    Fixed(T),
    Mmap { r_max: T },
}

impl<T: Scalar> RPolicy<T> {
    pub fn mmap() -> Self {
        RPolicy::Mmap {
            r_max: T::lit(DEFAULT_R_MAX),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BffPoint<T> {
    pub omega: T,
    pub r_star: T,
    /// Σ of `per_study_log_bf`.
    pub log_bf10: T,
    pub per_study_log_bf: Vec<T>,
    /// Jeffreys log prior at `r_star`; present only for MMAP curves.
    pub log_prior_r: Option<T>,
    pub at_boundary: bool,
}

impl<T: Scalar> BffPoint<T> {
    /// Value reported for the curve: log BF₁₀ for a fixed `r`, and the
    /// maximized objective `log BF₁₀ + log π(r*)` under MMAP.
    pub fn curve_value(&self) -> T {
        self.log_bf10 + self.log_prior_r.unwrap_or_else(T::zero)
    }
}

pub fn bff_point<T: Scalar>(set: &StudySet<T>, omega: T, policy: RPolicy<T>) -> Result<BffPoint<T>> {
    match policy {
        RPolicy::Fixed(r) => {
            let per_study = set.per_study_log_bf(omega, r)?;
            Ok(BffPoint {
                omega,
                r_star: r,
                log_bf10: sum(&per_study),
                per_study_log_bf: per_study,
                log_prior_r: None,
                at_boundary: false,
            })
        }
        RPolicy::Mmap { r_max } => {
            let fit = mmap_r(set, omega, r_max)?;
            Ok(BffPoint {
                omega,
                r_star: fit.r_star,
                log_bf10: fit.log_bf10,
                per_study_log_bf: fit.per_study,
                log_prior_r: Some(fit.log_prior),
                at_boundary: fit.at_boundary,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSummary<T> {
    pub omega: T,
    pub r_star: T,
    pub max_value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BffCurve<T> {
    pub points: Vec<BffPoint<T>>,
    pub policy: RPolicy<T>,
}

impl<T: Scalar> BffCurve<T> {
    pub fn omegas(&self) -> Vec<T> {
        self.points.iter().map(|p| p.omega).collect()
    }

    pub fn values(&self) -> Vec<T> {
        self.points.iter().map(BffPoint::curve_value).collect()
    }

    /// Grid point with the largest curve value; the first one on ties.
    pub fn summary(&self) -> Option<CurveSummary<T>> {
        let mut best: Option<&BffPoint<T>> = None;
        for p in &self.points {
            if best.is_none_or(|b| p.curve_value() > b.curve_value()) {
                best = Some(p);
            }
        }
        best.map(|p| CurveSummary {
            omega: p.omega,
            r_star: p.r_star,
            max_value: p.curve_value(),
        })
    }

    pub fn any_at_boundary(&self) -> bool {
        self.points.iter().any(|p| p.at_boundary)
    }
}

/// Evaluates the set at every grid point in parallel. On failure the error
/// for the smallest failing ω is returned.
pub fn bff_curve<T: Scalar>(
    set: &StudySet<T>,
    grid: &EffectGrid<T>,
    policy: RPolicy<T>,
) -> Result<BffCurve<T>> {
    let results: Vec<Result<BffPoint<T>>> = grid
        .values()
        .par_iter()
        .map(|&omega| {
            bff_point(set, omega, policy).map_err(|e| BffError::AtOmega {
                omega: omega.to_f64_lossy(),
                source: Box::new(e),
            })
        })
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BffCurve { points, policy })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossingDirection {
    /// The curve ends below the level.
    Below,
    /// The curve ends at or above the level.
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing<T> {
    pub level: T,
    /// Smallest ω beyond which the curve stays on its final side of the
    /// level; `None` when the curve never crosses.
    pub omega: Option<T>,
    pub direction: CrossingDirection,
}

pub fn evidence_thresholds<T: Scalar>(curve: &BffCurve<T>, levels: &[T]) -> Vec<Crossing<T>> {
    crossings(&curve.omegas(), &curve.values(), levels)
}

/// Crossings of the piecewise-linear curve through `(omegas[i], values[i])`.
pub fn crossings<T: Scalar>(omegas: &[T], values: &[T], levels: &[T]) -> Vec<Crossing<T>> {
    levels
        .iter()
        .map(|&level| {
            let Some(&last) = values.last() else {
                return Crossing {
                    level,
                    omega: None,
                    direction: CrossingDirection::Above,
                };
            };
            let below = last < level;
            let direction = if below {
                CrossingDirection::Below
            } else {
                CrossingDirection::Above
            };
            let other_side = |v: T| if below { v >= level } else { v < level };
            let omega = values.iter().rposition(|&v| other_side(v)).map(|i| {
                let (w0, w1, v0, v1) = (omegas[i], omegas[i + 1], values[i], values[i + 1]);
                w0 + (level - v0) * (w1 - w0) / (v1 - v0)
            });
            Crossing {
                level,
                omega,
                direction,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes_factors::{log_bf10_z_one, Sidedness};
    use crate::effect_map::fisher_z;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn z_study(z: f64, n: u64) -> Study<f64> {
        Study {
            stat: TestStatistic::z(z, Sidedness::OneSided, n as f64).unwrap(),
            design: DesignKind::OneSampleZ { n },
        }
    }

    fn t_study(t: f64, n: u64) -> Study<f64> {
        Study {
            stat: TestStatistic::t(t, (n - 1) as f64, Sidedness::OneSided, n as f64).unwrap(),
            design: DesignKind::OneSampleT { n },
        }
    }

    fn chisq_study(h: f64, k: f64, n: u64) -> Study<f64> {
        Study {
            stat: TestStatistic::chisq(h, k, n as f64).unwrap(),
            design: DesignKind::LikelihoodRatioChiSq { n },
        }
    }

    fn f_study(f: f64, k: f64, n: u64) -> Study<f64> {
        Study {
            stat: TestStatistic::f(f, k, (n - 4) as f64, n as f64).unwrap(),
            design: DesignKind::LinearModelF { n },
        }
    }

    #[test]
    fn single_study_matches_direct_value() {
        let set = StudySet::new("one", vec![z_study(1.5, 100)]).unwrap();
        let direct = log_bf10_z_one(1.5, 0.605, 1.0).unwrap();
        assert_eq!(combined_log_bf(&set, 0.11, 1.0).unwrap(), direct);
    }

    #[test]
    fn duplicated_study_doubles() {
        let one = StudySet::new("a", vec![t_study(2.1, 30)]).unwrap();
        let two = StudySet::new("b", vec![t_study(2.1, 30), t_study(2.1, 30)]).unwrap();
        assert_eq!(
            combined_log_bf(&two, 0.3, 2.0).unwrap(),
            2.0 * combined_log_bf(&one, 0.3, 2.0).unwrap()
        );
    }

    #[test]
    fn product_law_on_concatenation() {
        let a = StudySet::new("a", vec![t_study(2.1, 30), t_study(-0.4, 12)]).unwrap();
        let b = StudySet::new("b", vec![t_study(3.3, 80)]).unwrap();
        let ab = a.concat(&b).unwrap();
        for &(w, r) in &[(0.1, 1.0), (0.5, 3.5), (0.9, 20.0)] {
            let sa = combined_log_bf(&a, w, r).unwrap();
            let sb = combined_log_bf(&b, w, r).unwrap();
            assert_eq!(combined_log_bf(&ab, w, r).unwrap(), sa + sb);
        }
    }

    #[test]
    fn set_construction_rules() {
        assert!(StudySet::<f64>::new("empty", vec![]).is_err());
        let mixed = StudySet::new("m", vec![z_study(1.0, 10), chisq_study(3.0, 2.0, 20)]);
        assert!(matches!(mixed, Err(BffError::Study { index: 1, .. })));
        let k_mismatch = StudySet::new("k", vec![chisq_study(3.0, 2.0, 20), chisq_study(3.0, 3.0, 20)]);
        assert!(k_mismatch.is_err());
        let bad_design = Study {
            stat: TestStatistic::z(1.0, Sidedness::TwoSided, 10.0).unwrap(),
            design: DesignKind::OneSampleT { n: 10 },
        };
        assert!(StudySet::new("d", vec![bad_design]).is_err());
        let zt = StudySet::new("zt", vec![z_study(1.0, 10), t_study(2.0, 10)]);
        assert!(zt.is_ok());
    }

    #[test]
    fn study_index_attached_to_errors() {
        let set = StudySet::new("s", vec![z_study(1.0, 10), z_study(1.0, 10)]).unwrap();
        let err = combined_log_bf(&set, 0.5, 0.5).unwrap_err();
        assert_eq!(err.study_index(), Some(0));
        assert!(combined_log_bf(&set, 0.0, 1.0).is_err());
    }

    #[test]
    fn single_statistic_prefers_r_one() {
        let sets = [
            StudySet::new("z", vec![z_study(2.5, 50)]).unwrap(),
            StudySet::new("t", vec![t_study(4.0, 25)]).unwrap(),
            StudySet::new("c", vec![chisq_study(12.0, 2.0, 60)]).unwrap(),
            StudySet::new("f", vec![f_study(5.0, 3.0, 40)]).unwrap(),
        ];
        for set in &sets {
            for &w in &[0.05, 0.2, 0.5, 1.0] {
                let fit = mmap_r(set, w, 200.0).unwrap();
                assert_eq!(fit.r_star, 1.0, "{} at omega {w}", set.label());
                assert!(!fit.at_boundary);
            }
        }
    }

    #[test]
    fn local_optimality_and_boundary_flag() {
        let set = StudySet::new(
            "consistent",
            (0..12).map(|i| t_study(6.0 + 0.05 * i as f64, 60)).collect(),
        )
        .unwrap();
        let fit = mmap_r(&set, 0.8, 200.0).unwrap();
        assert!(fit.r_star > 1.0);
        let obj = |r: f64| combined_log_bf(&set, 0.8, r).unwrap() + set.log_prior_r(r).unwrap();
        assert_relative_eq!(fit.objective, obj(fit.r_star), max_relative = 1e-14);
        for r in [1.0, fit.r_star - 1e-3, fit.r_star + 1e-3, 200.0] {
            if (1.0..=200.0).contains(&r) {
                assert!(fit.objective >= obj(r), "r {r}");
            }
        }
        let capped = mmap_r(&set, 0.8, 1.5).unwrap();
        assert!(capped.at_boundary);
        assert_eq!(capped.r_star, 1.5);
        assert!(mmap_r(&set, 0.8, 0.5).is_err());
    }

    #[test]
    fn mmap_curve_dominates_fixed_one() {
        let set = StudySet::new(
            "corr",
            [(-0.211, 84), (0.06, 120), (0.11, 60), (0.201, 90)]
                .iter()
                .map(|&(rho, n)| Study {
                    stat: fisher_z(rho, n).unwrap(),
                    design: DesignKind::CorrelationZ { n },
                })
                .collect(),
        )
        .unwrap();
        let grid = EffectGrid::range(0.01, 0.4, 0.01).unwrap();
        let mmap = bff_curve(&set, &grid, RPolicy::mmap()).unwrap();
        let fixed = bff_curve(&set, &grid, RPolicy::Fixed(1.0)).unwrap();
        let lp1 = set.log_prior_r(1.0).unwrap();
        for (m, f) in mmap.points.iter().zip(&fixed.points) {
            assert_eq!(m.omega, f.omega);
            assert!(m.curve_value() >= f.log_bf10 + lp1);
            assert!(m.r_star >= 1.0);
            assert_relative_eq!(m.log_bf10, sum(&m.per_study_log_bf), epsilon = 1e-9);
        }
    }

    #[test]
    fn curve_preserves_grid_order_and_reports_failing_omega() {
        let set = StudySet::new("z", vec![z_study(1.5, 100)]).unwrap();
        let grid = EffectGrid::range(0.01, 0.5, 0.01).unwrap();
        let curve = bff_curve(&set, &grid, RPolicy::Fixed(1.0)).unwrap();
        assert_eq!(curve.omegas(), grid.values());
        let s = curve.summary().unwrap();
        assert!(s.omega > 0.05 && s.omega < 0.2);
        let err = bff_curve(&set, &grid, RPolicy::Fixed(0.5)).unwrap_err();
        match err {
            BffError::AtOmega { omega, .. } => assert_eq!(omega, 0.01),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grids() {
        let g = EffectGrid::<f64>::default();
        assert_eq!(g.len(), 200);
        assert_relative_eq!(*g.values().last().unwrap(), 1.0, max_relative = 1e-12);
        assert!(EffectGrid::range(0.1, 0.05, 0.01).is_err());
        assert!(EffectGrid::range(0.0, 1.0, 0.1).is_err());
        assert!(EffectGrid::range(0.1, 1.0, 0.0).is_err());
        assert!(EffectGrid::from_values(vec![0.1, 0.1]).is_err());
        assert!(EffectGrid::<f64>::from_values(vec![]).is_err());
        assert_eq!(EffectGrid::range(0.2, 0.2, 0.1).unwrap().len(), 1);
    }

    #[test]
    fn threshold_crossings() {
        let w = [0.1, 0.2, 0.3];
        let flat = crossings(&w, &[2.0, 2.0, 2.0], &[-1.0, -3.0]);
        assert!(flat.iter().all(|c| c.omega.is_none()));
        let two = crossings(&[0.1, 0.2], &[0.0, -2.0], &[-1.0]);
        assert_relative_eq!(two[0].omega.unwrap(), 0.15, max_relative = 1e-14);
        assert_eq!(two[0].direction, CrossingDirection::Below);
        // Last crossing wins when the curve wiggles.
        let wiggle = crossings(&[1.0, 2.0, 3.0, 4.0], &[0.0, -2.0, 0.0, -4.0], &[-1.0]);
        assert_relative_eq!(wiggle[0].omega.unwrap(), 3.25, max_relative = 1e-14);
        let rising = crossings(&[1.0, 2.0], &[-3.0, 1.0], &[0.0]);
        assert_eq!(rising[0].direction, CrossingDirection::Above);
        assert_relative_eq!(rising[0].omega.unwrap(), 1.75, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn s1_mmap_is_one_for_z(z in -3.0f64..6.0, n in 5u64..500, w in 0.01f64..1.0) {
            let set = StudySet::new("s", vec![z_study(z, n)]).unwrap();
            prop_assert_eq!(mmap_r(&set, w, 200.0).unwrap().r_star, 1.0);
        }

        #[test]
        fn crossing_lies_between_bracketing_points(v0 in -10.0f64..10.0, v1 in -10.0f64..10.0, level in -10.0f64..10.0) {
            let c = crossings(&[1.0, 2.0], &[v0, v1], &[level]);
            if let Some(w) = c[0].omega {
                prop_assert!((1.0..=2.0).contains(&w));
            }
        }
    }
}
