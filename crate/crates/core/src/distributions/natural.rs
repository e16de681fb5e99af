//! Natural exponential-family parameterization
//! `f(x, θ) = K(x) · exp{ Σ_k θ_k T_k(x) + A(θ) }`.
//!
//! `A` here is the additive normalizing term, i.e. minus the usual log
//! partition function, so that e.g. Poisson has `A(θ) = −e^θ`.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::{is_count, ln_choose, Family, ParametricModel, LN_SQRT_2PI};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NaturalKind {
    /// `θ = −λ`, `T = x`.
    Exponential,
    /// `θ = (m/σ², −1/(2σ²))`, `T = (x, x²)`.
    Normal,
    /// `θ = m/σ²`, `T = x`.
    NormalKnownSigma { sigma: f64 },
    /// `θ = ln λ`, `T = x`.
    Poisson,
    /// `θ = −rate`, `T = x`.
    GammaKnownShape { shape: f64 },
    /// `θ = logit p`, `T = x`.
    BinomialKnownTrials { trials: u64 },
}

/// One coordinate of the natural parameter space; ends are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    pub fn contains(&self, v: f64) -> bool {
        v > self.lo && v < self.hi
    }
}

const REALS: OpenInterval = OpenInterval {
    lo: f64::NEG_INFINITY,
    hi: f64::INFINITY,
};
const NEGATIVE: OpenInterval = OpenInterval {
    lo: f64::NEG_INFINITY,
    hi: 0.0,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaturalForm {
    kind: NaturalKind,
    theta: Vec<f64>,
}

impl NaturalForm {
    /// Natural form of `model`. Gamma is taken with its shape known and
    /// binomial with its trials known; Weibull has none.
    pub fn of(model: &ParametricModel) -> Result<Self> {
        let p = model.params();
        let (kind, theta) = match model.family() {
            Family::Exponential => (NaturalKind::Exponential, vec![-p[0]]),
            Family::Normal => {
                let v = p[1] * p[1];
                (NaturalKind::Normal, vec![p[0] / v, -0.5 / v])
            }
            Family::Poisson => (NaturalKind::Poisson, vec![p[0].ln()]),
            Family::Gamma => (NaturalKind::GammaKnownShape { shape: p[0] }, vec![-p[1]]),
            Family::Binomial => (
                NaturalKind::BinomialKnownTrials { trials: p[0] as u64 },
                vec![(p[1] / (1.0 - p[1])).ln()],
            ),
            Family::Weibull => {
                return Err(Error::UnsupportedFamily(
                    "weibull (not an exponential family in its shape)".into(),
                ))
            }
        };
        Ok(NaturalForm { kind, theta })
    }

    /// Normal family with `σ` held fixed; the mean is the only free parameter.
    pub fn with_known_sigma(model: &ParametricModel) -> Result<Self> {
        if model.family() != Family::Normal {
            return Err(Error::UnsupportedFamily(format!(
                "known-sigma form is only defined for normal, not {}",
                model.family()
            )));
        }
        let (m, s) = (model.params()[0], model.params()[1]);
        Ok(NaturalForm {
            kind: NaturalKind::NormalKnownSigma { sigma: s },
            theta: vec![m / (s * s)],
        })
    }

    pub fn from_theta(kind: NaturalKind, theta: Vec<f64>) -> Result<Self> {
        let nf = NaturalForm { kind, theta };
        if !nf.contains(&nf.theta) {
            return Err(Error::Domain(format!("θ = {:?} is outside Θ for {:?}", nf.theta, kind)));
        }
        Ok(nf)
    }

    pub fn kind(&self) -> NaturalKind {
        self.kind
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.domain().len()
    }

    /// `Θ` as a product of open intervals; always convex.
    pub fn domain(&self) -> Vec<OpenInterval> {
        match self.kind {
            NaturalKind::Exponential | NaturalKind::GammaKnownShape { .. } => vec![NEGATIVE],
            NaturalKind::Normal => vec![REALS, NEGATIVE],
            NaturalKind::NormalKnownSigma { .. }
            | NaturalKind::Poisson
            | NaturalKind::BinomialKnownTrials { .. } => vec![REALS],
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        let dom = self.domain();
        theta.len() == dom.len() && theta.iter().zip(&dom).all(|(t, d)| d.contains(*t))
    }

    /// `ln K(x)`; `-∞` off the support.
    pub fn ln_carrier(&self, x: f64) -> f64 {
        if !x.is_finite() {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            NaturalKind::Exponential => {
                if x >= 0.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            NaturalKind::Normal => -LN_SQRT_2PI,
            NaturalKind::NormalKnownSigma { sigma } => {
                -0.5 * x * x / (sigma * sigma) - sigma.ln() - LN_SQRT_2PI
            }
            NaturalKind::Poisson => {
                if is_count(x) {
                    -ln_gamma(x + 1.0)
                } else {
                    f64::NEG_INFINITY
                }
            }
            NaturalKind::GammaKnownShape { shape } => {
                if x > 0.0 {
                    (shape - 1.0) * x.ln() - ln_gamma(shape)
                } else if x == 0.0 {
                    super::edge_at_zero(shape, 0.0)
                } else {
                    f64::NEG_INFINITY
                }
            }
            NaturalKind::BinomialKnownTrials { trials } => {
                let n = trials as f64;
                if is_count(x) && x <= n {
                    ln_choose(n, x)
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    pub fn carrier(&self, x: f64) -> f64 {
        self.ln_carrier(x).exp()
    }

    /// Sufficient statistics `T_1(x), …, T_s(x)`.
    pub fn statistics(&self, x: f64) -> Vec<f64> {
        match self.kind {
            NaturalKind::Normal => vec![x, x * x],
            _ => vec![x],
        }
    }

    /// `A(θ)`.
    pub fn log_normalizer(&self, theta: &[f64]) -> Result<f64> {
        if !self.contains(theta) {
            return Err(Error::Domain(format!("θ = {theta:?} is outside Θ")));
        }
        let t = theta[0];
        Ok(match self.kind {
            NaturalKind::Exponential => (-t).ln(),
            NaturalKind::Normal => {
                let t2 = theta[1];
                t * t / (4.0 * t2) + 0.5 * (-2.0 * t2).ln()
            }
            NaturalKind::NormalKnownSigma { sigma } => -0.5 * t * t * sigma * sigma,
            NaturalKind::Poisson => -t.exp(),
            NaturalKind::GammaKnownShape { shape } => shape * (-t).ln(),
            NaturalKind::BinomialKnownTrials { trials } => {
                // −n·ln(1 + e^θ), evaluated without overflow.
                let softplus = if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
                -(trials as f64) * softplus
            }
        })
    }

    /// `Σ_k θ_k T_k(x)`.
    pub fn linear_term(&self, theta: &[f64], x: f64) -> f64 {
        theta.iter().zip(self.statistics(x)).map(|(t, s)| t * s).sum()
    }

    pub fn ln_density_at(&self, theta: &[f64], x: f64) -> Result<f64> {
        Ok(self.ln_carrier(x) + self.linear_term(theta, x) + self.log_normalizer(theta)?)
    }

    /// The ordinary model whose natural parameter is `theta`.
    pub fn model(&self, theta: &[f64]) -> Result<ParametricModel> {
        if !self.contains(theta) {
            return Err(Error::Domain(format!("θ = {theta:?} is outside Θ")));
        }
        let t = theta[0];
        match self.kind {
            NaturalKind::Exponential => ParametricModel::exponential(-t),
            NaturalKind::Normal => {
                let var = -0.5 / theta[1];
                ParametricModel::normal(t * var, var.sqrt())
            }
            NaturalKind::NormalKnownSigma { sigma } => ParametricModel::normal(t * sigma * sigma, sigma),
            NaturalKind::Poisson => ParametricModel::poisson(t.exp()),
            NaturalKind::GammaKnownShape { shape } => ParametricModel::gamma(shape, -t),
            NaturalKind::BinomialKnownTrials { trials } => {
                ParametricModel::binomial(trials, 1.0 / (1.0 + (-t).exp()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_reconstructs(model: &ParametricModel, nf: &NaturalForm, xs: &[f64]) {
        for &x in xs {
            let direct = model.density(x);
            let rebuilt = nf.carrier(x)
                * (nf.linear_term(nf.theta(), x) + nf.log_normalizer(nf.theta()).unwrap()).exp();
            let rel = (rebuilt - direct).abs() / direct.max(f64::MIN_POSITIVE);
            assert!(rel < 1e-10, "{model} at {x}: {rebuilt} vs {direct}");
        }
    }

    #[test]
    fn poisson_reconstruction_zero_to_twenty() {
        let m = ParametricModel::poisson(3.7).unwrap();
        let nf = m.natural_form().unwrap();
        assert!((nf.theta()[0] - 3.7f64.ln()).abs() < 1e-15);
        assert_eq!(nf.statistics(4.0), vec![4.0]);
        assert!((nf.log_normalizer(nf.theta()).unwrap() + 3.7).abs() < 1e-14);
        let xs: Vec<f64> = (0..=20).map(f64::from).collect();
        assert_reconstructs(&m, &nf, &xs);
    }

    #[test]
    fn exponential_theta_is_minus_rate() {
        let m = ParametricModel::exponential(2.5).unwrap();
        let nf = m.natural_form().unwrap();
        assert_eq!(nf.theta(), &[-2.5]);
        assert_eq!(nf.domain(), vec![NEGATIVE]);
        assert_reconstructs(&m, &nf, &[0.0, 0.1, 1.0, 3.3, 10.0]);
    }

    #[test]
    fn remaining_families_reconstruct() {
        let xs = [0.3, 1.0, 2.0, 4.5];
        let n = ParametricModel::normal(-0.4, 1.7).unwrap();
        assert_reconstructs(&n, &n.natural_form().unwrap(), &[-3.0, -0.4, 0.0, 2.2]);
        assert_reconstructs(&n, &NaturalForm::with_known_sigma(&n).unwrap(), &[-3.0, 0.0, 2.2]);
        let g = ParametricModel::gamma(2.3, 0.8).unwrap();
        assert_reconstructs(&g, &g.natural_form().unwrap(), &xs);
        let b = ParametricModel::binomial(12, 0.35).unwrap();
        let ks: Vec<f64> = (0..=12).map(f64::from).collect();
        assert_reconstructs(&b, &b.natural_form().unwrap(), &ks);
    }

    #[test]
    fn weibull_is_unsupported() {
        let w = ParametricModel::weibull(1.2, 1.5).unwrap();
        assert!(matches!(w.natural_form(), Err(Error::UnsupportedFamily(_))));
        assert!(NaturalForm::with_known_sigma(&w).is_err());
    }

    #[test]
    fn model_inverts_theta() {
        for m in [
            ParametricModel::normal(0.3, 2.0).unwrap(),
            ParametricModel::binomial(8, 0.1).unwrap(),
            ParametricModel::gamma(2.0, 0.5).unwrap(),
        ] {
            let nf = m.natural_form().unwrap();
            let back = nf.model(nf.theta()).unwrap();
            for (a, b) in back.params().iter().zip(m.params()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outside_domain_is_rejected() {
        let nf = ParametricModel::exponential(1.0).unwrap().natural_form().unwrap();
        assert!(nf.log_normalizer(&[0.5]).is_err());
        assert!(NaturalForm::from_theta(NaturalKind::Exponential, vec![1.0]).is_err());
        assert!(NaturalForm::from_theta(NaturalKind::Normal, vec![0.0, -1.0]).is_ok());
    }
}
