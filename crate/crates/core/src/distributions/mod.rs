//! Parametric families: density or mass, cdf, interval probabilities and
//! seeded sampling.
//!
//! Parameter order follows the usual textbook convention for each family and
//! is what the CLI's `family:p1,p2` syntax expects:
//!
//! | family        | params            | support            |
//! |---------------|-------------------|--------------------|
//! | `exponential` | rate              | `[0, ∞)`           |
//! | `normal`      | mean, sigma       | `ℝ`                |
//! | `binomial`    | trials, p         | `{0, …, trials}`   |
//! | `poisson`     | rate              | `{0, 1, 2, …}`     |
//! | `weibull`     | shape, scale      | `[0, ∞)`           |
//! | `gamma`       | shape, rate       | `[0, ∞)`           |

mod natural;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::region::{Interval, Region};
use crate::rng;

pub use natural::{NaturalForm, NaturalKind, OpenInterval};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Exponential,
    Normal,
    Binomial,
    Poisson,
    Weibull,
    Gamma,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Exponential,
        Family::Normal,
        Family::Binomial,
        Family::Poisson,
        Family::Weibull,
        Family::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Normal => "normal",
            Family::Binomial => "binomial",
            Family::Poisson => "poisson",
            Family::Weibull => "weibull",
            Family::Gamma => "gamma",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Exponential | Family::Poisson => &["rate"],
            Family::Normal => &["mean", "sigma"],
            Family::Binomial => &["trials", "p"],
            Family::Weibull => &["shape", "scale"],
            Family::Gamma => &["shape", "rate"],
        }
    }

    pub fn arity(self) -> usize {
        self.param_names().len()
    }

    /// Position of a named parameter, accepting a few common aliases.
    pub fn param_index(self, name: &str) -> Option<usize> {
        let canonical = match name.to_ascii_lowercase().as_str() {
            "lambda" | "rate" => "rate",
            "m" | "mu" | "mean" => "mean",
            "s" | "sd" | "sigma" => "sigma",
            "n" | "trials" => "trials",
            "p" | "prob" => "p",
            "k" | "shape" => "shape",
            "scale" => "scale",
            _ => return None,
        };
        self.param_names().iter().position(|&p| p == canonical)
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, Family::Binomial | Family::Poisson)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// Where a model puts positive mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Support {
    /// `[0, ∞)`
    HalfLine,
    RealLine,
    /// `{0, 1, …, upper}`
    IntegerRange { upper: u64 },
    NonNegativeIntegers,
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Support::HalfLine => x >= 0.0 && x.is_finite(),
            Support::RealLine => x.is_finite(),
            Support::IntegerRange { upper } => is_count(x) && x <= upper as f64,
            Support::NonNegativeIntegers => is_count(x),
        }
    }
}

fn is_count(x: f64) -> bool {
    x >= 0.0 && x.is_finite() && x.fract() == 0.0
}

/// A fully specified member of one of the supported families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct ParametricModel {
    family: Family,
    params: Vec<f64>,
}

#[derive(Deserialize)]
struct RawModel {
    family: Family,
    params: Vec<f64>,
}

impl TryFrom<RawModel> for ParametricModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        ParametricModel::new(raw.family, raw.params)
    }
}

impl ParametricModel {
    pub fn new(family: Family, params: Vec<f64>) -> Result<Self> {
        validate(family, &params)?;
        Ok(ParametricModel { family, params })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Family::Exponential, vec![rate])
    }

    pub fn normal(mean: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::Normal, vec![mean, sigma])
    }

    pub fn binomial(trials: u64, p: f64) -> Result<Self> {
        Self::new(Family::Binomial, vec![trials as f64, p])
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        Self::new(Family::Poisson, vec![rate])
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Weibull, vec![shape, scale])
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::new(Family::Gamma, vec![shape, rate])
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn support(&self) -> Support {
        match self.family {
            Family::Exponential | Family::Weibull | Family::Gamma => Support::HalfLine,
            Family::Normal => Support::RealLine,
            Family::Binomial => Support::IntegerRange {
                upper: self.params[0] as u64,
            },
            Family::Poisson => Support::NonNegativeIntegers,
        }
    }

    /// Log of the pdf (continuous) or pmf (discrete); `-∞` outside the support.
    ///
    /// At `x = 0` the Weibull and Gamma densities are `+∞` for shape below 1.
    pub fn ln_density(&self, x: f64) -> f64 {
        if !x.is_finite() {
            return f64::NEG_INFINITY;
        }
        let p = &self.params;
        match self.family {
            Family::Exponential => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    p[0].ln() - p[0] * x
                }
            }
            Family::Normal => {
                let z = (x - p[0]) / p[1];
                -0.5 * z * z - p[1].ln() - LN_SQRT_2PI
            }
            Family::Binomial => {
                let n = p[0];
                if !is_count(x) || x > n {
                    return f64::NEG_INFINITY;
                }
                ln_choose(n, x) + x * p[1].ln() + (n - x) * (-p[1]).ln_1p()
            }
            Family::Poisson => {
                if !is_count(x) {
                    return f64::NEG_INFINITY;
                }
                x * p[0].ln() - p[0] - ln_gamma(x + 1.0)
            }
            Family::Weibull => {
                let (k, s) = (p[0], p[1]);
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else if x == 0.0 {
                    edge_at_zero(k, -s.ln())
                } else {
                    let u = x / s;
                    k.ln() - s.ln() + (k - 1.0) * u.ln() - u.powf(k)
                }
            }
            Family::Gamma => {
                let (a, b) = (p[0], p[1]);
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else if x == 0.0 {
                    edge_at_zero(a, b.ln())
                } else {
                    a * b.ln() + (a - 1.0) * x.ln() - b * x - ln_gamma(a)
                }
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.ln_density(x).exp()
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let p = &self.params;
        match self.family {
            Family::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-p[0] * x).exp_m1()
                }
            }
            Family::Normal => 0.5 * erfc(-(x - p[0]) / (p[1] * std::f64::consts::SQRT_2)),
            Family::Binomial => {
                if x < 0.0 {
                    return 0.0;
                }
                if x >= p[0] {
                    return 1.0;
                }
                let upper = x.floor() as u64;
                let s: f64 = (0..=upper).map(|i| self.density(i as f64)).sum();
                s.min(1.0)
            }
            Family::Poisson => {
                if x < 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma_ur(x.floor() + 1.0, p[0])
                }
            }
            Family::Weibull => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-(x / p[1]).powf(p[0])).exp_m1()
                }
            }
            Family::Gamma => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma_lr(p[0], p[1] * x)
                }
            }
        }
    }

    /// Probability of an interval, honouring open and closed ends for the
    /// discrete families.
    pub fn prob_interval(&self, iv: &Interval) -> f64 {
        if !self.family.is_discrete() {
            return (self.cdf(iv.hi) - self.cdf(iv.lo)).max(0.0);
        }
        let first = if iv.lo_closed { iv.lo.ceil() } else { iv.lo.floor() + 1.0 };
        let last = if iv.hi_closed { iv.hi.floor() } else { iv.hi.ceil() - 1.0 };
        if last < first {
            return 0.0;
        }
        let below = if first.is_finite() { self.cdf(first - 1.0) } else { 0.0 };
        (self.cdf(last) - below).max(0.0)
    }

    pub fn prob_region(&self, region: &Region) -> f64 {
        region.intervals().iter().map(|iv| self.prob_interval(iv)).sum()
    }

    pub fn mean(&self) -> f64 {
        let p = &self.params;
        match self.family {
            Family::Exponential => 1.0 / p[0],
            Family::Normal => p[0],
            Family::Binomial => p[0] * p[1],
            Family::Poisson => p[0],
            Family::Weibull => p[1] * gamma(1.0 + 1.0 / p[0]),
            Family::Gamma => p[0] / p[1],
        }
    }

    pub fn variance(&self) -> f64 {
        let p = &self.params;
        match self.family {
            Family::Exponential => 1.0 / (p[0] * p[0]),
            Family::Normal => p[1] * p[1],
            Family::Binomial => p[0] * p[1] * (1.0 - p[1]),
            Family::Poisson => p[0],
            Family::Weibull => {
                let g1 = gamma(1.0 + 1.0 / p[0]);
                p[1] * p[1] * (gamma(1.0 + 2.0 / p[0]) - g1 * g1)
            }
            Family::Gamma => p[0] / (p[1] * p[1]),
        }
    }

    /// `count` draws from the pinned stream for `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        self.sample_with(&mut rng::seeded(seed), count)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let p = &self.params;
        // Parameters were validated at construction, so the samplers accept them.
        match self.family {
            Family::Exponential => draw(rng, rand_distr::Exp::new(p[0]).unwrap(), count),
            Family::Normal => draw(rng, rand_distr::Normal::new(p[0], p[1]).unwrap(), count),
            Family::Binomial => {
                let d = rand_distr::Binomial::new(p[0] as u64, p[1]).unwrap();
                (0..count).map(|_| d.sample(rng) as f64).collect()
            }
            Family::Poisson => draw(rng, rand_distr::Poisson::new(p[0]).unwrap(), count),
            Family::Weibull => draw(rng, rand_distr::Weibull::new(p[1], p[0]).unwrap(), count),
            Family::Gamma => draw(rng, rand_distr::Gamma::new(p[0], 1.0 / p[1]).unwrap(), count),
        }
    }

    /// Natural exponential-family form with every parameter free except the
    /// ones the family requires to be known (gamma shape, binomial trials).
    pub fn natural_form(&self) -> Result<NaturalForm> {
        NaturalForm::of(self)
    }
}

impl fmt::Display for ParametricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family)?;
        for (i, v) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Parses `family:p1,p2`, e.g. `binomial:8,0.1` or `exponential:2`.
impl FromStr for ParametricModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (fam, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected family:params, got {s:?}")))?;
        let family: Family = fam.parse()?;
        let params = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad parameter {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ParametricModel::new(family, params)
    }
}

fn draw<R, D>(rng: &mut R, d: D, count: usize) -> Vec<f64>
where
    R: Rng + ?Sized,
    D: Distribution<f64>,
{
    (0..count).map(|_| d.sample(rng)).collect()
}

/// Log density at the left end of a half-line family with the given shape.
fn edge_at_zero(shape: f64, ln_at_shape_one: f64) -> f64 {
    if shape < 1.0 {
        f64::INFINITY
    } else if shape == 1.0 {
        ln_at_shape_one
    } else {
        f64::NEG_INFINITY
    }
}

pub(crate) fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

fn validate(family: Family, params: &[f64]) -> Result<()> {
    if params.len() != family.arity() {
        return Err(Error::invalid(
            family,
            format!("expected {} parameter(s), got {}", family.arity(), params.len()),
        ));
    }
    if let Some(bad) = params.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(family, format!("non-finite parameter {bad}")));
    }
    let positive = |i: usize| -> Result<()> {
        if params[i] > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(
                family,
                format!("{} must be > 0, got {}", family.param_names()[i], params[i]),
            ))
        }
    };
    match family {
        Family::Exponential | Family::Poisson => positive(0),
        Family::Normal => positive(1),
        Family::Weibull | Family::Gamma => positive(0).and_then(|_| positive(1)),
        Family::Binomial => {
            let n = params[0];
            if !(n >= 1.0 && n.fract() == 0.0 && n <= 2f64.powi(53)) {
                return Err(Error::invalid(family, format!("trials must be a positive integer, got {n}")));
            }
            let p = params[1];
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::invalid(family, format!("p must lie in (0,1), got {p}")));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_density_values() {
        let e = ParametricModel::exponential(1.0).unwrap();
        assert_eq!(e.density(0.0), 1.0);

        // 1/sqrt(2π) to 12 digits.
        let n = ParametricModel::normal(0.0, 1.0).unwrap();
        assert!((n.density(0.0) - 0.398_942_280_401_433).abs() < 1e-13);
        assert!((LN_SQRT_2PI - 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-15);

        let b = ParametricModel::binomial(8, 0.1).unwrap();
        assert_eq!(b.density(9.0), 0.0);
        assert_eq!(b.density(2.5), 0.0);
        assert_eq!(b.density(-1.0), 0.0);
    }

    #[test]
    fn binomial_pmf_matches_direct_formula() {
        let b = ParametricModel::binomial(8, 0.1).unwrap();
        // C(8,2) 0.1^2 0.9^6
        let direct = 28.0 * 0.01 * 0.9f64.powi(6);
        assert!((b.density(2.0) - direct).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ParametricModel::exponential(0.0).is_err());
        assert!(ParametricModel::normal(0.0, -1.0).is_err());
        assert!(ParametricModel::binomial(0, 0.5).is_err());
        assert!(ParametricModel::new(Family::Binomial, vec![2.5, 0.5]).is_err());
        assert!(ParametricModel::binomial(3, 1.0).is_err());
        assert!(ParametricModel::poisson(f64::NAN).is_err());
        assert!(ParametricModel::weibull(1.0, 0.0).is_err());
        assert!(ParametricModel::gamma(-2.0, 1.0).is_err());
        assert!(ParametricModel::new(Family::Normal, vec![0.0]).is_err());
    }

    #[test]
    fn density_zero_outside_support() {
        for m in [
            ParametricModel::exponential(2.0).unwrap(),
            ParametricModel::weibull(1.5, 1.0).unwrap(),
            ParametricModel::gamma(2.0, 1.0).unwrap(),
        ] {
            assert_eq!(m.density(-0.1), 0.0);
            assert!(m.density(0.7) > 0.0);
        }
        let p = ParametricModel::poisson(3.0).unwrap();
        assert_eq!(p.density(-1.0), 0.0);
        assert_eq!(p.density(1.5), 0.0);
        assert!(p.density(40.0) > 0.0);
    }

    #[test]
    fn shape_below_one_blows_up_at_zero() {
        let w = ParametricModel::weibull(0.5, 1.0).unwrap();
        assert_eq!(w.ln_density(0.0), f64::INFINITY);
        let g = ParametricModel::gamma(3.0, 1.0).unwrap();
        assert_eq!(g.density(0.0), 0.0);
        let e = ParametricModel::gamma(1.0, 2.0).unwrap();
        assert!((e.density(0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn parse_and_display() {
        let m: ParametricModel = "binomial:8,0.1".parse().unwrap();
        assert_eq!(m.family(), Family::Binomial);
        assert_eq!(m.params(), &[8.0, 0.1]);
        let back: ParametricModel = m.to_string().parse().unwrap();
        assert_eq!(m, back);
        assert!("cauchy:0,1".parse::<ParametricModel>().is_err());
        assert!("normal:0,x".parse::<ParametricModel>().is_err());
        assert!("normal".parse::<ParametricModel>().is_err());
    }

    #[test]
    fn json_uses_lowercase_family_and_validates() {
        let m = ParametricModel::gamma(2.0, 0.5).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"family":"gamma","params":[2.0,0.5]}"#);
        let bad = r#"{"family":"gamma","params":[2.0,-0.5]}"#;
        assert!(serde_json::from_str::<ParametricModel>(bad).is_err());
    }

    #[test]
    fn discrete_interval_probabilities_respect_endpoints() {
        let b = ParametricModel::binomial(8, 0.1).unwrap();
        let pmf = |k: f64| b.density(k);
        let half_open = Interval::closed_open(1.0, 3.0).unwrap();
        assert!((b.prob_interval(&half_open) - (pmf(1.0) + pmf(2.0))).abs() < 1e-15);
        let closed = Interval::closed(1.0, 3.0).unwrap();
        assert!((b.prob_interval(&closed) - (pmf(1.0) + pmf(2.0) + pmf(3.0))).abs() < 1e-15);
        let pts = Region::points(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let direct: f64 = (0..4).map(|k| pmf(k as f64)).sum();
        assert!((b.prob_region(&pts) - direct).abs() < 1e-15);
        let p = ParametricModel::poisson(2.0).unwrap();
        let tail = Interval::at_least(3.0).unwrap();
        assert!((p.prob_interval(&tail) - (1.0 - p.cdf(2.0))).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = ParametricModel::gamma(2.0, 0.5).unwrap();
        let a = m.sample(50, 99);
        let b = m.sample(50, 99);
        assert_eq!(
            a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_ne!(a, m.sample(50, 100));
    }
}
