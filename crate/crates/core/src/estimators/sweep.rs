use serde::Serialize;

use super::TwoPointSolver;
use crate::distributions::ParametricModel;
use crate::error::{Error, Result};

/// Closed-form estimates on two-point tables whose count ratio is the true
/// density ratio plus `ε`, with the affine fit `estimate ≈ intercept + ε·slope`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSweep {
    pub solver: TwoPointSolver,
    pub truth: f64,
    pub epsilons: Vec<f64>,
    pub estimates: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl PerturbationSweep {
    pub fn errors(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| (e - self.truth).abs()).collect()
    }
}

/// Sweeps the first parameter of an exponential or normal model (rate or
/// mean).
pub fn perturbation_sweep(model: &ParametricModel, support: [f64; 2], epsilons: &[f64]) -> Result<PerturbationSweep> {
    perturbation_sweep_with(model, 0, support, epsilons)
}

/// Sweeps parameter `index` of `model`, the others held at their true values.
pub fn perturbation_sweep_with(
    model: &ParametricModel,
    index: usize,
    support: [f64; 2],
    epsilons: &[f64],
) -> Result<PerturbationSweep> {
    let solver = TwoPointSolver::for_model(model, index).ok_or_else(|| {
        Error::Precondition(format!("no two-point closed form for parameter {index} of {}", model.family()))
    })?;
    if epsilons.is_empty() {
        return Err(Error::Domain("no ε values".into()));
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0)) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain(format!("ε must be non-negative and strictly decreasing, got {epsilons:?}")));
    }
    let [x, y] = support;
    let base = (model.ln_density(x) - model.ln_density(y)).exp();

    let mut estimates = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let ratio = base + eps;
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::Domain(format!("f(x)/f(y) + ε = {ratio} is not a positive ratio")));
        }
        let r = solver.solve(x, y, ratio, 1.0)?;
        estimates.push(r.params[solver.free_index()]);
    }

    let (slope, intercept, r_squared) = affine_fit(epsilons, &estimates);
    Ok(PerturbationSweep {
        solver,
        truth: model.params()[index],
        epsilons: epsilons.to_vec(),
        estimates,
        slope,
        intercept,
        r_squared,
    })
}

/// Least-squares `v ≈ a + k·u`; returns `(k, a, R²)`.
fn affine_fit(u: &[f64], v: &[f64]) -> (f64, f64, f64) {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let sxx: f64 = u.iter().map(|a| (a - mu) * (a - mu)).sum();
    let sxy: f64 = u.iter().zip(v).map(|(a, b)| (a - mu) * (b - mv)).sum();
    let syy: f64 = v.iter().map(|b| (b - mv) * (b - mv)).sum();
    if sxx == 0.0 {
        return (0.0, mv, 1.0);
    }
    let k = sxy / sxx;
    let a = mv - k * mu;
    let ss_res: f64 = u.iter().zip(v).map(|(x, y)| (y - a - k * x).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    (k, a, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decade() -> Vec<f64> {
        (1..=6).map(|p| 10f64.powi(-p)).collect()
    }

    #[test]
    fn exponential_sweep_converges_linearly() {
        let m = ParametricModel::exponential(1.0).unwrap();
        let s = perturbation_sweep(&m, [0.0, 1.0], &decade()).unwrap();
        let err = s.errors();
        assert!(err.windows(2).all(|w| w[1] < w[0]));
        // d/dε of ln(e + ε) is 1/(e + ε): about 1/e over this range.
        assert!((s.slope - (-1.0f64).exp()).abs() < 2e-2, "{s:?}");
        assert!(s.r_squared > 0.999);
        assert!(err[5] <= 1.5 * 1e-6 * s.slope.abs());
    }

    #[test]
    fn zero_epsilon_is_exact() {
        let m = ParametricModel::exponential(2.5).unwrap();
        let s = perturbation_sweep(&m, [0.0, 1.0], &[0.0]).unwrap();
        assert!((s.estimates[0] - 2.5).abs() < 1e-14);

        let m = ParametricModel::normal(0.3, 1.0).unwrap();
        let s = perturbation_sweep(&m, [-1.0, 0.5], &[1e-2, 1e-4, 0.0]).unwrap();
        assert!((s.estimates[2] - 0.3).abs() < 1e-12);
        assert!(s.errors()[1] < s.errors()[0]);
    }

    #[test]
    fn rejects_bad_sequences() {
        let m = ParametricModel::exponential(1.0).unwrap();
        assert!(perturbation_sweep(&m, [0.0, 1.0], &[1e-3, 1e-2]).is_err());
        assert!(perturbation_sweep(&m, [0.0, 1.0], &[-1.0]).is_err());
        assert!(perturbation_sweep(&m, [0.0, 1.0], &[]).is_err());
        let p = ParametricModel::poisson(1.0).unwrap();
        assert!(perturbation_sweep(&p, [0.0, 1.0], &[0.1]).is_err());
    }
}
