//! Closed-form estimates from two support points `x`, `y` with counts
//! `n1`, `n2`, obtained by solving `n1/n2 = f(x)/f(y)` for one parameter.

use serde::{Deserialize, Serialize};

use super::{EstimationResult, FitSpec, Method, Status};
use crate::distributions::{Family, ParametricModel};
use crate::error::{Error, Result};
use crate::tables::FrequencyTable;

/// A two-point closed form, with whatever other parameter it needs fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TwoPointSolver {
    ExponentialRate,
    NormalMean { sigma: f64 },
    NormalSigma { mean: f64 },
}

impl TwoPointSolver {
    pub fn solve(&self, x: f64, y: f64, n1: f64, n2: f64) -> Result<EstimationResult> {
        match *self {
            TwoPointSolver::ExponentialRate => exp_rate_two_point(x, y, n1, n2),
            TwoPointSolver::NormalMean { sigma } => normal_mean_two_point(x, y, n1, n2, sigma),
            TwoPointSolver::NormalSigma { mean } => normal_sigma_two_point(x, y, n1, n2, mean),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            TwoPointSolver::ExponentialRate => Family::Exponential,
            _ => Family::Normal,
        }
    }

    /// Position of the estimated parameter in the family's vector.
    pub fn free_index(&self) -> usize {
        match self {
            TwoPointSolver::NormalSigma { .. } => 1,
            _ => 0,
        }
    }

    /// The closed form matching a fit specification, if there is one.
    pub fn for_spec(spec: &FitSpec) -> Option<Self> {
        match (spec.family(), spec.known()) {
            (Family::Exponential, [None]) => Some(TwoPointSolver::ExponentialRate),
            (Family::Normal, [None, Some(sigma)]) => Some(TwoPointSolver::NormalMean { sigma: *sigma }),
            (Family::Normal, [Some(mean), None]) => Some(TwoPointSolver::NormalSigma { mean: *mean }),
            _ => None,
        }
    }

    /// The closed form estimating parameter `index` of `model`, the others
    /// fixed at their values in `model`.
    pub fn for_model(model: &ParametricModel, index: usize) -> Option<Self> {
        let p = model.params();
        match (model.family(), index) {
            (Family::Exponential, 0) => Some(TwoPointSolver::ExponentialRate),
            (Family::Normal, 0) => Some(TwoPointSolver::NormalMean { sigma: p[1] }),
            (Family::Normal, 1) => Some(TwoPointSolver::NormalSigma { mean: p[0] }),
            _ => None,
        }
    }

    fn full_params(&self, value: f64) -> Vec<f64> {
        match *self {
            TwoPointSolver::ExponentialRate => vec![value],
            TwoPointSolver::NormalMean { sigma } => vec![value, sigma],
            TwoPointSolver::NormalSigma { mean } => vec![mean, value],
        }
    }
}

fn check_counts(n1: f64, n2: f64) -> Result<()> {
    if n1 > 0.0 && n2 > 0.0 && n1.is_finite() && n2.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("counts must be positive and finite, got {n1} and {n2}")))
    }
}

fn check_points(x: f64, y: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFiniteSupport(x));
    }
    if !y.is_finite() {
        return Err(Error::NonFiniteSupport(y));
    }
    if x == y {
        return Err(Error::DegenerateSupport(format!("two-point formula needs x ≠ y, both are {x}")));
    }
    Ok(())
}

/// The two-point table in increasing support order, for `d_v` reporting.
fn pair_table(x: f64, y: f64, n1: f64, n2: f64) -> Option<FrequencyTable> {
    let (a, b) = if x < y { ([x, y], [n1, n2]) } else { ([y, x], [n2, n1]) };
    FrequencyTable::new(a.to_vec(), b.to_vec()).ok()
}

fn finish(r: EstimationResult, x: f64, y: f64, n1: f64, n2: f64) -> EstimationResult {
    match pair_table(x, y, n1, n2) {
        Some(t) => r.assess(&t),
        None => r,
    }
}

/// `λ = (ln n1 − ln n2)/(y − x)`. A non-positive value means the counts
/// increase where an exponential density decreases: `NoSolution`.
pub fn exp_rate_two_point(x: f64, y: f64, n1: f64, n2: f64) -> Result<EstimationResult> {
    check_points(x, y)?;
    check_counts(n1, n2)?;
    let rate = (n1.ln() - n2.ln()) / (y - x);
    let r = if rate > 0.0 && rate.is_finite() {
        EstimationResult::new(Family::Exponential, vec![rate], Method::ClosedForm, Status::Converged)
    } else {
        EstimationResult::new(Family::Exponential, vec![rate], Method::ClosedForm, Status::NoSolution).note(
            format!("rate {rate} is not positive: counts {n1} at {x} and {n2} at {y} contradict a decreasing density"),
        )
    };
    Ok(finish(r, x, y, n1, n2))
}

/// Grouped complete-sample MLE `(n1+n2)/(n1·x + n2·y)`.
pub fn exp_rate_classical_two_point(x: f64, y: f64, n1: f64, n2: f64) -> Result<EstimationResult> {
    check_counts(n1, n2)?;
    let denom = n1 * x + n2 * y;
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::DegenerateSupport(format!("n1·x + n2·y = {denom} must be positive")));
    }
    let r = EstimationResult::new(
        Family::Exponential,
        vec![(n1 + n2) / denom],
        Method::ClassicalMle,
        Status::Converged,
    );
    Ok(finish(r, x, y, n1, n2))
}

/// Mean of a normal with known `sigma` from `n1/n2 = f(x)/f(y)`.
pub fn normal_mean_two_point(x: f64, y: f64, n1: f64, n2: f64, sigma: f64) -> Result<EstimationResult> {
    check_points(x, y)?;
    check_counts(n1, n2)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(Family::Normal, format!("sigma must be > 0, got {sigma}")));
    }
    let s2 = sigma * sigma;
    let m = (-(n1.ln() - n2.ln()) - x * x / (2.0 * s2) + y * y / (2.0 * s2)) / ((y - x) / s2);
    let r = EstimationResult::new(Family::Normal, vec![m, sigma], Method::ClosedForm, Status::Converged);
    Ok(finish(r, x, y, n1, n2))
}

/// Standard deviation of a normal with known `mean` from `n1/n2 = f(x)/f(y)`:
/// `σ² = ((y−m)² − (x−m)²) / (2 ln(n1/n2))`.
///
/// With equal counts the ratio is 1, which a normal produces only when `x`
/// and `y` are equidistant from the mean — and then for every `σ`.
pub fn normal_sigma_two_point(x: f64, y: f64, n1: f64, n2: f64, mean: f64) -> Result<EstimationResult> {
    check_points(x, y)?;
    check_counts(n1, n2)?;
    if !mean.is_finite() {
        return Err(Error::invalid(Family::Normal, format!("mean must be finite, got {mean}")));
    }
    let ln_r = n1.ln() - n2.ln();
    let d = -2.0 * mean * x + 2.0 * mean * y + x * x - y * y;
    let scale = x * x + y * y + 2.0 * mean.abs() * (x.abs() + y.abs());
    let undetermined = |status, note: String| {
        EstimationResult::new(Family::Normal, vec![mean, f64::NAN], Method::ClosedForm, status).note(note)
    };

    if ln_r == 0.0 {
        return Ok(if d.abs() <= 1e-12 * scale {
            undetermined(
                Status::Degenerate,
                format!("{x} and {y} are equidistant from {mean}: every sigma fits equal counts"),
            )
        } else {
            undetermined(
                Status::NoSolution,
                format!("equal counts need {x} and {y} equidistant from {mean}"),
            )
        });
    }
    let radicand = -d / (2.0 * ln_r);
    if !(radicand > 0.0 && radicand.is_finite()) {
        return Ok(undetermined(
            Status::NoSolution,
            format!("sigma² = {radicand} is not positive: the count nearer {mean} must be the larger"),
        ));
    }
    let r = EstimationResult::new(
        Family::Normal,
        vec![mean, radicand.sqrt()],
        Method::ClosedForm,
        Status::Converged,
    );
    Ok(finish(r, x, y, n1, n2))
}

/// Average of the two-point closed form over all unordered pairs of support
/// points, each weighted by the pair's total count `n_i + n_j`.
///
/// Pairs where the closed form is inadmissible are left out of both sums and
/// counted in `skipped_pairs`.
pub fn weighted_pairwise(table: &FrequencyTable, solver: TwoPointSolver) -> Result<EstimationResult> {
    let k = table.len();
    if k < 3 {
        return Err(Error::Precondition(format!(
            "pairwise aggregation needs at least 3 support points, got {k}"
        )));
    }
    let (y, n) = (table.support(), table.counts());
    let at = solver.free_index();
    let (mut num, mut den, mut skipped) = (0.0, 0.0, 0usize);
    for i in 0..k {
        for j in i + 1..k {
            match solver.solve(y[i], y[j], n[i], n[j]) {
                Ok(r) if r.status == Status::Converged => {
                    let w = n[i] + n[j];
                    num += w * r.params[at];
                    den += w;
                }
                _ => skipped += 1,
            }
        }
    }
    let mut r = if den > 0.0 {
        EstimationResult::new(
            solver.family(),
            solver.full_params(num / den),
            Method::WeightedPairwise,
            Status::Converged,
        )
        .assess(table)
    } else {
        EstimationResult::new(
            solver.family(),
            solver.full_params(f64::NAN),
            Method::WeightedPairwise,
            Status::NoSolution,
        )
        .note("the closed form is inadmissible on every pair")
    };
    r.skipped_pairs = Some(skipped);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Y3: f64 = -1.5331;
    const Y6: f64 = 0.038690;

    #[test]
    fn exp_rate_examples() {
        let e = std::f64::consts::E;
        let r = exp_rate_two_point(0.0, 1.0, e, 1.0).unwrap();
        assert!((r.params[0] - 1.0).abs() < 1e-15);
        assert!(r.exact);

        let r = exp_rate_two_point(0.0, 1.0, 5.0, 5.0).unwrap();
        assert_eq!(r.status, Status::NoSolution);
        assert_eq!(r.params[0], 0.0);
        assert!(r.dv_at_optimum.is_none());

        let r = exp_rate_two_point(1.0, 3.0, 800.0, 200.0).unwrap();
        assert!((r.params[0] - 4f64.ln() / 2.0).abs() < 1e-15);
        assert!((r.params[0] - 0.6931).abs() < 1e-4);

        assert!(matches!(exp_rate_two_point(2.0, 2.0, 1.0, 2.0), Err(Error::DegenerateSupport(_))));
    }

    #[test]
    fn classical_exp_rate_examples() {
        assert_eq!(exp_rate_classical_two_point(1.0, 1.0, 3.0, 9.0).unwrap().params, vec![1.0]);
        let r = exp_rate_classical_two_point(0.0, 1.0, 7.0, 7.0).unwrap();
        assert_eq!(r.params, vec![2.0]);
        assert_eq!(r.method, Method::ClassicalMle);
        assert!(exp_rate_classical_two_point(0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn normal_mean_published_row() {
        // Columns n3 = 23000 … 27500 against n6 = 89000.
        let expected = [0.11369, 0.08661, 0.03568, 0.01167, -0.000001];
        for (n3, m) in [23000.0, 24000.0, 26000.0, 27000.0, 27500.0].into_iter().zip(expected) {
            let r = normal_mean_two_point(Y3, Y6, n3, 89000.0, 1.0).unwrap();
            assert!((r.params[0] - m).abs() < 5e-3, "{n3}: {}", r.params[0]);
        }
        let r = normal_mean_two_point(Y3, Y6, 27500.0, 89000.0, 1.0).unwrap();
        assert!(r.params[0].abs() < 1e-3);
        let r = normal_mean_two_point(-0.7, 0.7, 4.0, 4.0, 2.0).unwrap();
        assert!(r.params[0].abs() < 1e-15);
        assert!(normal_mean_two_point(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn normal_mean_matches_independent_root() {
        // Solve ln f(x) − ln f(y) = ln(n1/n2) for m by bisection.
        let (x, y, n1, n2, s) = (Y3, Y6, 24000.0, 89000.0, 1.0);
        let g = |m: f64| (-(x - m) * (x - m) + (y - m) * (y - m)) / (2.0 * s * s) - (n1 / n2 as f64).ln();
        let (mut lo, mut hi) = (-5.0, 5.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let r = normal_mean_two_point(x, y, n1, n2, s).unwrap();
        assert!((r.params[0] - lo).abs() < 1e-12);
        assert!((r.params[0] - 0.086610).abs() < 1e-6);
    }

    #[test]
    fn normal_sigma_cases() {
        let expected = [0.93164, 0.94664, 0.97694, 0.99228, 1.0];
        for (n3, s) in [23000.0, 24000.0, 26000.0, 27000.0, 27500.0].into_iter().zip(expected) {
            let r = normal_sigma_two_point(Y3, Y6, n3, 89000.0, 0.0).unwrap();
            assert_eq!(r.status, Status::Converged);
            assert!((r.params[1] - s).abs() < 5e-3, "{n3}: {}", r.params[1]);
        }
        let r = normal_sigma_two_point(Y3, Y6, 23000.0, 89000.0, 0.0).unwrap();
        assert!((r.params[1] - 0.931634).abs() < 1e-6);

        let r = normal_sigma_two_point(-1.0, 2.0, 5.0, 5.0, 0.0).unwrap();
        assert_eq!(r.status, Status::NoSolution);
        let r = normal_sigma_two_point(-1.0, 1.0, 5.0, 5.0, 0.0).unwrap();
        assert_eq!(r.status, Status::Degenerate);
        assert!(r.params[1].is_nan());

        // More mass at the point farther from the mean.
        let r = normal_sigma_two_point(0.0, 2.0, 1.0, 5.0, 0.0).unwrap();
        assert_eq!(r.status, Status::NoSolution);
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn pairwise_on_exact_exponential() {
        let m = ParametricModel::exponential(1.0).unwrap();
        let t = FrequencyTable::exact(&m, &[0.0, 1.0, 2.0], 100.0).unwrap();
        let r = weighted_pairwise(&t, TwoPointSolver::ExponentialRate).unwrap();
        assert!((r.params[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.skipped_pairs, Some(0));
    }

    #[test]
    fn pairwise_weights_by_pair_totals() {
        let (y, n) = ([0.0, 1.0, 2.0], [100.0, 30.0, 14.0]);
        let t = FrequencyTable::new(y.to_vec(), n.to_vec()).unwrap();
        let l01 = (100f64 / 30.0).ln();
        let l02 = (100f64 / 14.0).ln() / 2.0;
        let l12 = (30f64 / 14.0).ln();
        let want = (130.0 * l01 + 114.0 * l02 + 44.0 * l12) / (130.0 + 114.0 + 44.0);
        let r = weighted_pairwise(&t, TwoPointSolver::ExponentialRate).unwrap();
        assert!((r.params[0] - want).abs() < 1e-14);
    }

    #[test]
    fn pairwise_skips_and_fails() {
        // Pair (1,2) has increasing counts.
        let t = FrequencyTable::new(vec![0.0, 1.0, 2.0], vec![100.0, 10.0, 20.0]).unwrap();
        let r = weighted_pairwise(&t, TwoPointSolver::ExponentialRate).unwrap();
        assert_eq!(r.skipped_pairs, Some(1));
        assert_eq!(r.status, Status::Converged);

        let t = FrequencyTable::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let r = weighted_pairwise(&t, TwoPointSolver::ExponentialRate).unwrap();
        assert_eq!(r.status, Status::NoSolution);
        assert_eq!(r.skipped_pairs, Some(3));

        let t = FrequencyTable::new(vec![0.0, 1.0], vec![2.0, 1.0]).unwrap();
        assert!(matches!(
            weighted_pairwise(&t, TwoPointSolver::ExponentialRate),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn solver_lookup() {
        let spec = FitSpec::new(Family::Normal).with_known("sigma", 2.0).unwrap();
        assert_eq!(TwoPointSolver::for_spec(&spec), Some(TwoPointSolver::NormalMean { sigma: 2.0 }));
        assert_eq!(TwoPointSolver::for_spec(&FitSpec::new(Family::Normal)), None);
        assert_eq!(TwoPointSolver::for_spec(&FitSpec::new(Family::Poisson)), None);
        let m = ParametricModel::normal(0.5, 2.0).unwrap();
        assert_eq!(TwoPointSolver::for_model(&m, 1), Some(TwoPointSolver::NormalSigma { mean: 0.5 }));
    }
}
