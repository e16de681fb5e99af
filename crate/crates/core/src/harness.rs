//! Seeded Monte Carlo studies and the published normal-table comparison.
//!
//! Replicate `r` of generator `g` draws from
//! `seeded_stream(seed ^ r, g)`, so every replicate is reproducible on its
//! own and results do not depend on how rayon schedules the work.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{Family, ParametricModel};
use crate::error::{Error, Result};
use crate::estimators::{
    classical_truncated_mle, min_dv, new_mle, new_moments, normal_mean_two_point, normal_sigma_two_point,
    EstimationResult, FitOptions, FitSpec, Method,
};
use crate::region::{Interval, Region};
use crate::rng::{replicate_seed, seeded_stream};
use crate::selection::select;
use crate::tables::{truncate_samples, Binning, FrequencyTable};

pub const BINOMIAL_DEFAULT_REPLICATES: usize = 2000;
pub const WEIBULL_GAMMA_DEFAULT_REPLICATES: usize = 1000;
pub const FULL_REPLICATES: usize = 10_000;

/// How the second parameter of `G(2, 0.5)` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaConvention {
    /// Shape 2, rate 0.5 (mean 4).
    Rate,
    /// Shape 2, scale 0.5 (mean 1).
    #[default]
    Scale,
}

impl GammaConvention {
    pub fn model(self, shape: f64, second: f64) -> Result<ParametricModel> {
        match self {
            GammaConvention::Rate => ParametricModel::gamma(shape, second),
            GammaConvention::Scale => ParametricModel::gamma(shape, 1.0 / second),
        }
    }
}

/// A model-selection study: draw from each generator, truncate, tabulate,
/// and select among the candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub generators: Vec<ParametricModel>,
    pub candidates: Vec<ParametricModel>,
    pub sample_size: usize,
    pub replicates: usize,
    pub truncation: Option<Region>,
    pub binning: Binning,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_convention: Option<GammaConvention>,
}

/// Mean, median and deciles of a sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub deciles: Vec<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Summary {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: quantile(&v, 0.5),
            deciles: (1..10).map(|d| quantile(&v, d as f64 / 10.0)).collect(),
        })
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorAccuracy {
    pub generator: ParametricModel,
    /// Candidate index that counts as a correct selection.
    pub expected: usize,
    pub correct: usize,
    pub conclusive: usize,
    /// Replicates with fewer than two support values or evaluable
    /// candidates; excluded from the accuracy denominator.
    pub inconclusive: usize,
    pub accuracy: Option<f64>,
    /// Runner-up minus winner `d_v` over conclusive replicates.
    pub margin: Option<Summary>,
}

/// One published value next to its recomputation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub row: String,
    /// The varying count that labels the column.
    pub column: f64,
    pub method: Method,
    pub computed: Option<f64>,
    pub published: f64,
    pub delta: Option<f64>,
    /// `None` for values shown but not checked.
    pub tolerance: Option<f64>,
    pub within: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateRecord {
    pub generator: usize,
    pub replicate: usize,
    pub table: Option<FrequencyTable>,
    /// `d_v` per candidate; `None` when disqualified.
    pub dvs: Vec<Option<f64>>,
    pub winner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<ExperimentSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub accuracy: Vec<GeneratorAccuracy>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<Comparison>,
    #[serde(skip)]
    pub records: Vec<ReplicateRecord>,
    #[serde(skip)]
    pub wall_time: Duration,
}

pub fn binomial_identification_spec(replicates: usize, seed: u64) -> Result<ExperimentSpec> {
    let b8 = ParametricModel::binomial(8, 0.1)?;
    let b15 = ParametricModel::binomial(15, 0.15)?;
    Ok(ExperimentSpec {
        name: "binomial-id".into(),
        generators: vec![b8.clone(), b15.clone()],
        candidates: vec![b8, b15],
        sample_size: 100,
        replicates,
        truncation: Some(Region::points(&[0.0, 1.0, 2.0, 3.0])?),
        binning: Binning::DiscreteIdentity,
        seed,
        gamma_convention: None,
    })
}

pub fn weibull_gamma_spec(replicates: usize, seed: u64, convention: GammaConvention) -> Result<ExperimentSpec> {
    let w = ParametricModel::weibull(1.2, 1.5)?;
    Ok(ExperimentSpec {
        name: "weibull-gamma".into(),
        generators: vec![w.clone()],
        candidates: vec![w, convention.model(2.0, 0.5)?],
        sample_size: 1000,
        replicates,
        truncation: Some(Region::new(vec![Interval::at_least(1.25)?])?),
        binning: Binning::Count(11),
        seed,
        gamma_convention: Some(convention),
    })
}

fn require_replicates(replicates: usize) -> Result<()> {
    if replicates < 100 {
        return Err(Error::Precondition(format!("need at least 100 replicates, got {replicates}")));
    }
    Ok(())
}

/// B(8, 0.1) against B(15, 0.15), samples of 100 kept on `{0, 1, 2, 3}`.
pub fn run_binomial_identification(replicates: usize, seed: u64) -> Result<ExperimentReport> {
    require_replicates(replicates)?;
    run_selection(&binomial_identification_spec(replicates, seed)?)
}

/// W(1.2, 1.5) draws above 1.25 in 11 classes, against W(1.2, 1.5) and G(2, 0.5).
pub fn run_weibull_gamma(replicates: usize, seed: u64, convention: GammaConvention) -> Result<ExperimentReport> {
    require_replicates(replicates)?;
    run_selection(&weibull_gamma_spec(replicates, seed, convention)?)
}

fn one_replicate(spec: &ExperimentSpec, g: usize, r: usize) -> Result<ReplicateRecord> {
    let mut rng = seeded_stream(replicate_seed(spec.seed, r as u64), g as u64);
    let draws = spec.generators[g].sample_with(&mut rng, spec.sample_size);
    let mut record = ReplicateRecord {
        generator: g,
        replicate: r,
        table: None,
        dvs: vec![None; spec.candidates.len()],
        winner: None,
    };
    let kept = match &spec.truncation {
        Some(region) => truncate_samples(&draws, region),
        None => Ok(draws),
    };
    let table = match kept.and_then(|k| FrequencyTable::from_samples(&k, &spec.binning)) {
        Ok(t) => t,
        Err(Error::InsufficientSupport { .. }) => return Ok(record),
        Err(e) => return Err(e),
    };
    match select(&table, &spec.candidates) {
        Ok(report) => {
            for c in &report.candidates {
                record.dvs[c.index] = Some(c.dv);
            }
            record.winner = Some(report.winner_index);
        }
        Err(Error::SelectionImpossible { .. }) => {}
        Err(e) => return Err(e),
    }
    record.table = Some(table);
    Ok(record)
}

pub fn run_selection(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    if spec.replicates == 0 {
        return Err(Error::Precondition("replicates must be ≥ 1".into()));
    }
    let start = Instant::now();
    let expected: Vec<usize> = spec
        .generators
        .iter()
        .map(|g| {
            spec.candidates.iter().position(|c| c == g).ok_or_else(|| {
                Error::Precondition(format!("generator {g} is not among the candidates"))
            })
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(spec.generators.len() * spec.replicates);
    let mut accuracy = Vec::with_capacity(spec.generators.len());
    for (g, generator) in spec.generators.iter().enumerate() {
        let recs = (0..spec.replicates)
            .into_par_iter()
            .map(|r| one_replicate(spec, g, r))
            .collect::<Result<Vec<_>>>()?;

        let mut correct = 0;
        let mut margins = Vec::new();
        for rec in recs.iter().filter(|r| r.winner.is_some()) {
            let w = rec.winner.unwrap();
            correct += usize::from(w == expected[g]);
            let best = rec.dvs[w].unwrap();
            let runner = rec
                .dvs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != w)
                .filter_map(|(_, d)| *d)
                .fold(f64::INFINITY, f64::min);
            margins.push(runner - best);
        }
        let conclusive = margins.len();
        accuracy.push(GeneratorAccuracy {
            generator: generator.clone(),
            expected: expected[g],
            correct,
            conclusive,
            inconclusive: spec.replicates - conclusive,
            accuracy: (conclusive > 0).then(|| correct as f64 / conclusive as f64),
            margin: Summary::of(&margins),
        });
        records.extend(recs);
    }

    Ok(ExperimentReport {
        experiment: spec.name.clone(),
        spec: Some(spec.clone()),
        accuracy,
        comparisons: Vec::new(),
        records,
        wall_time: start.elapsed(),
    })
}

/// Support points and counts of the published normal table.
pub mod normal_table {
    pub const Y3: f64 = -1.5331;
    pub const Y6: f64 = 0.038690;
    pub const Y8: f64 = 1.0863;
    pub const N6: f64 = 89000.0;
    pub const OBSERVED: &str = "[-1.7951,-1.2712),[-0.22335,0.30055)";

    pub const N3: [f64; 5] = [23000.0, 24000.0, 26000.0, 27000.0, 27500.0];
    pub const M_TILDE: [f64; 5] = [0.11369, 0.08661, 0.03568, 0.01167, -0.000001];
    pub const M_MNEW: [f64; 5] = M_TILDE;
    pub const M_CLH: [f64; 5] = [0.11075, 0.08444, 0.03478, 0.01128, 0.000155];
    pub const SIGMA_TILDE: [f64; 5] = [0.93164, 0.94664, 0.97694, 0.99228, 1.0];
    pub const SIGMA_MNEW: [f64; 5] = SIGMA_TILDE;
    pub const SIGMA_CLH: [f64; 5] = [0.92171, 0.93701, 0.967796, 0.98335, 0.991165];

    /// Lower block: `(n3, n8)` per column, estimating mean and sigma jointly.
    pub const LOWER: [(f64, f64); 5] = [
        (23000.0, 43000.0),
        (24000.0, 44444.0),
        (26000.0, 47273.0),
        (27000.0, 48214.0),
        (27500.0, 49371.0),
    ];
    pub const LOWER_M_TILDE: [f64; 5] = [-0.02224, -0.017549, -0.00785, -0.00762, 0.000002];
    pub const LOWER_SIGMA_TILDE: [f64; 5] = [0.91767, 0.93546, 0.97180, 0.98716, 1.0];
    pub const LOWER_M_MNEW: [f64; 5] = [0.036763, 0.051907, 0.088443, 0.10294, 0.0000005];
    pub const LOWER_SIGMA_MNEW: [f64; 5] = [1.0689, 1.1080, 1.1968, 1.242, 1.0];
}

fn compare(
    out: &mut Vec<Comparison>,
    row: &str,
    column: f64,
    result: &Result<EstimationResult>,
    index: usize,
    published: f64,
    tolerance: Option<f64>,
    method: Method,
) {
    let computed = result
        .as_ref()
        .ok()
        .filter(|r| r.status.is_solution())
        .map(|r| r.params[index]);
    let delta = computed.map(|c| c - published);
    out.push(Comparison {
        row: row.into(),
        column,
        method,
        computed,
        published,
        delta,
        tolerance,
        within: tolerance.map(|t| delta.is_some_and(|d| d.abs() <= t)),
    });
}

/// Recomputes every cell of the published normal table.
pub fn run_normal_table() -> Result<ExperimentReport> {
    use normal_table::*;
    let start = Instant::now();
    let region: Region = OBSERVED.parse()?;
    let sigma_known = FitSpec::new(Family::Normal).with_known("sigma", 1.0)?;
    let mean_known = FitSpec::new(Family::Normal).with_known("mean", 0.0)?;
    let both = FitSpec::new(Family::Normal);
    let opts = FitOptions::default();
    let mut out = Vec::new();

    for (i, &n3) in N3.iter().enumerate() {
        let t = FrequencyTable::new(vec![Y3, Y6], vec![n3, N6])?;
        let c = &mut out;
        compare(c, "m_tilde", n3, &normal_mean_two_point(Y3, Y6, n3, N6, 1.0), 0, M_TILDE[i], Some(5e-3), Method::ClosedForm);
        compare(c, "m_mnew", n3, &new_mle(&t, &sigma_known, &opts), 0, M_MNEW[i], Some(5e-3), Method::NewMle);
        compare(
            c,
            "m_clh",
            n3,
            &classical_truncated_mle(&t, &sigma_known, &region, &opts),
            0,
            M_CLH[i],
            Some(2e-2),
            Method::ClassicalTruncatedMle,
        );
        compare(c, "sigma_tilde", n3, &normal_sigma_two_point(Y3, Y6, n3, N6, 0.0), 1, SIGMA_TILDE[i], Some(5e-3), Method::ClosedForm);
        compare(c, "sigma_mnew", n3, &new_mle(&t, &mean_known, &opts), 1, SIGMA_MNEW[i], Some(5e-3), Method::NewMle);
        compare(
            c,
            "sigma_clh",
            n3,
            &classical_truncated_mle(&t, &mean_known, &region, &opts),
            1,
            SIGMA_CLH[i],
            Some(2e-2),
            Method::ClassicalTruncatedMle,
        );
    }

    for (i, &(n3, n8)) in LOWER.iter().enumerate() {
        let t = FrequencyTable::new(vec![Y3, Y6, Y8], vec![n3, N6, n8])?;
        let last = i == LOWER.len() - 1;
        let dv = min_dv(&t, &both, &opts);
        let mom = new_moments(&t, &both, &opts);
        let (tol_dv, tol_mom) = if last { (Some(1e-4), Some(1e-4)) } else { (Some(5e-3), None) };
        let c = &mut out;
        compare(c, "lower_m_tilde", n8, &dv, 0, LOWER_M_TILDE[i], tol_dv, Method::MinDv);
        compare(c, "lower_sigma_tilde", n8, &dv, 1, LOWER_SIGMA_TILDE[i], tol_dv, Method::MinDv);
        compare(c, "lower_m_mnew", n8, &mom, 0, LOWER_M_MNEW[i], tol_mom, Method::NewMoments);
        compare(c, "lower_sigma_mnew", n8, &mom, 1, LOWER_SIGMA_MNEW[i], tol_mom, Method::NewMoments);
    }

    Ok(ExperimentReport {
        experiment: "normal-table".into(),
        spec: None,
        accuracy: Vec::new(),
        comparisons: out,
        records: Vec::new(),
        wall_time: start.elapsed(),
    })
}

/// Writes `replicates.csv` (one row per replicate) and every replicate's
/// table as `tables/g{generator}_r{replicate}.csv` under `dir`.
pub fn write_replicates(report: &ExperimentReport, dir: &Path) -> Result<()> {
    let tables = dir.join("tables");
    fs::create_dir_all(&tables)?;
    let n_cand = report.records.first().map_or(0, |r| r.dvs.len());
    let expected: Vec<usize> = report.accuracy.iter().map(|a| a.expected).collect();

    let mut w = csv::Writer::from_path(dir.join("replicates.csv"))?;
    let mut header = vec!["generator".to_string(), "replicate".into(), "winner".into(), "correct".into()];
    header.extend((0..n_cand).map(|i| format!("dv_{i}")));
    w.write_record(&header)?;

    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for rec in &report.records {
        let mut row = vec![
            rec.generator.to_string(),
            rec.replicate.to_string(),
            rec.winner.map(|v| v.to_string()).unwrap_or_default(),
            rec.winner
                .map(|v| (Some(&v) == expected.get(rec.generator)).to_string())
                .unwrap_or_default(),
        ];
        row.extend(rec.dvs.iter().map(|d| opt(*d)));
        w.write_record(&row)?;
        if let Some(t) = &rec.table {
            let f = fs::File::create(tables.join(format!("g{}_r{}.csv", rec.generator, rec.replicate)))?;
            t.write_csv(f)?;
        }
    }
    w.flush()?;
    Ok(())
}
