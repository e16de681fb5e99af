//! Frequency tables and their theoretical counterparts.
//!
//! A [`FrequencyTable`] is the empirical object every estimator consumes:
//! support points `y_1 < … < y_k` (`k ≥ 2`) with strictly positive counts.
//! Counts are reals because only their ratios matter. An [`AuxiliaryTable`]
//! is a model's density at the same points, renormalized to sum to one.
//!
//! CSV layout is `y,count` with optional `lo,hi` class bounds:
//!
//! ```text
//! y,count,lo,hi
//! -1.5331,23000,-1.7951,-1.2712
//! 0.03869,89000,-0.22335,0.30055
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::distributions::ParametricModel;
use crate::error::{Error, Result};
use crate::region::Region;

/// How raw draws are grouped into a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    /// Equal-width classes spanning `[min, max]` of the draws; class
    /// midpoints become support points.
    Count(usize),
    /// Classes `[e_0, e_1), …, [e_{m-1}, e_m]`; draws outside are dropped.
    Edges(Vec<f64>),
    /// Each distinct value is its own support point.
    DiscreteIdentity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct FrequencyTable {
    support: Vec<f64>,
    counts: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intervals: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
struct RawTable {
    support: Vec<f64>,
    counts: Vec<f64>,
    #[serde(default)]
    intervals: Option<Vec<[f64; 2]>>,
}

impl TryFrom<RawTable> for FrequencyTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        let t = FrequencyTable::new(raw.support, raw.counts)?;
        match raw.intervals {
            Some(iv) => t.with_intervals(iv),
            None => Ok(t),
        }
    }
}

fn check_support(support: &[f64]) -> Result<()> {
    if let Some(&bad) = support.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSupport(bad));
    }
    if support.len() < 2 {
        return Err(Error::InsufficientSupport { found: support.len() });
    }
    if support.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "support points must be strictly increasing".into(),
        ));
    }
    Ok(())
}

impl FrequencyTable {
    pub fn new(support: Vec<f64>, counts: Vec<f64>) -> Result<Self> {
        if support.len() != counts.len() {
            return Err(Error::Precondition(format!(
                "{} support points but {} counts",
                support.len(),
                counts.len()
            )));
        }
        check_support(&support)?;
        if let Some(&bad) = counts.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::Precondition(format!(
                "counts must be finite and > 0, got {bad}"
            )));
        }
        Ok(FrequencyTable {
            support,
            counts,
            intervals: None,
        })
    }

    /// Builds a table from `(y, count)` pairs in any order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut v: Vec<(f64, f64)> = pairs.into_iter().collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (support, counts) = v.into_iter().unzip();
        FrequencyTable::new(support, counts)
    }

    pub fn with_intervals(mut self, intervals: Vec<[f64; 2]>) -> Result<Self> {
        if intervals.len() != self.support.len() {
            return Err(Error::Precondition("one class interval per support point".into()));
        }
        if intervals.iter().any(|[lo, hi]| lo.is_nan() || hi.is_nan() || lo > hi) {
            return Err(Error::Precondition("class interval with lo > hi".into()));
        }
        self.intervals = Some(intervals);
        Ok(self)
    }

    /// The table of exact theoretical frequencies `total · f̄(y_i)`.
    pub fn exact(model: &ParametricModel, support: &[f64], total: f64) -> Result<Self> {
        let aux = auxiliary_of(model, support)?;
        FrequencyTable::new(
            aux.support.clone(),
            aux.probs.iter().map(|p| p * total).collect(),
        )
    }

    pub fn from_samples(samples: &[f64], binning: &Binning) -> Result<Self> {
        if let Some(&bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSupport(bad));
        }
        match binning {
            Binning::DiscreteIdentity => {
                let mut sorted = samples.to_vec();
                sorted.sort_by(f64::total_cmp);
                let mut support: Vec<f64> = Vec::new();
                let mut counts: Vec<f64> = Vec::new();
                for v in sorted {
                    match support.last() {
                        Some(&last) if last == v => *counts.last_mut().unwrap() += 1.0,
                        _ => {
                            support.push(v);
                            counts.push(1.0);
                        }
                    }
                }
                FrequencyTable::new(support, counts)
            }
            Binning::Count(bins) => {
                if *bins == 0 {
                    return Err(Error::Precondition("bin count must be ≥ 1".into()));
                }
                let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !(hi > lo) {
                    let found = usize::from(!samples.is_empty());
                    return Err(Error::InsufficientSupport { found });
                }
                let width = (hi - lo) / *bins as f64;
                let edges: Vec<f64> = (0..=*bins)
                    .map(|i| if i == *bins { hi } else { lo + i as f64 * width })
                    .collect();
                bin_by_edges(samples, &edges)
            }
            Binning::Edges(edges) => {
                if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Precondition(
                        "bin edges must be at least two strictly increasing values".into(),
                    ));
                }
                bin_by_edges(samples, edges)
            }
        }
    }

    /// Keeps the support points inside `region`; counts are untouched.
    pub fn truncate(&self, region: &Region) -> Result<Self> {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| region.contains(self.support[i]))
            .collect();
        if keep.len() < 2 {
            return Err(Error::InsufficientSupport { found: keep.len() });
        }
        Ok(FrequencyTable {
            support: keep.iter().map(|&i| self.support[i]).collect(),
            counts: keep.iter().map(|&i| self.counts[i]).collect(),
            intervals: self
                .intervals
                .as_ref()
                .map(|iv| keep.iter().map(|&i| iv[i]).collect()),
        })
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn intervals(&self) -> Option<&[[f64; 2]]> {
        self.intervals.as_deref()
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn relative_frequencies(&self) -> Vec<f64> {
        let total = self.total();
        self.counts.iter().map(|c| c / total).collect()
    }

    /// Same table with every count multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Precondition(format!("scale factor must be > 0, got {factor}")));
        }
        let mut t = self.clone();
        t.counts.iter_mut().for_each(|c| *c *= factor);
        Ok(t)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (y_col, c_col) = match (col("y"), col("count")) {
            (Some(y), Some(c)) => (y, c),
            _ => return Err(Error::Parse("CSV header must contain `y` and `count`".into())),
        };
        let bounds = match (col("lo"), col("hi")) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            (None, None) => None,
            _ => return Err(Error::Parse("CSV has only one of `lo`/`hi`".into())),
        };

        let num = |rec: &csv::StringRecord, i: usize, line: usize| -> Result<f64> {
            let field = rec.get(i).unwrap_or("");
            field
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {line}: {field:?} is not a number")))
        };
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = line + 2;
            let y = num(&rec, y_col, line)?;
            let c = num(&rec, c_col, line)?;
            let iv = match bounds {
                Some((lo, hi)) => Some([num(&rec, lo, line)?, num(&rec, hi, line)?]),
                None => None,
            };
            rows.push((y, c, iv));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Parse("duplicate support point in CSV".into()));
        }
        let table = FrequencyTable::new(
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
        )?;
        match bounds {
            Some(_) => table.with_intervals(rows.iter().map(|r| r.2.unwrap()).collect()),
            None => Ok(table),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        match &self.intervals {
            Some(iv) => {
                w.write_record(["y", "count", "lo", "hi"])?;
                for i in 0..self.len() {
                    w.write_record([
                        self.support[i].to_string(),
                        self.counts[i].to_string(),
                        iv[i][0].to_string(),
                        iv[i][1].to_string(),
                    ])?;
                }
            }
            None => {
                w.write_record(["y", "count"])?;
                for i in 0..self.len() {
                    w.write_record([self.support[i].to_string(), self.counts[i].to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn bin_by_edges(samples: &[f64], edges: &[f64]) -> Result<FrequencyTable> {
    let bins = edges.len() - 1;
    let last = edges[bins];
    let mut counts = vec![0.0; bins];
    for &x in samples {
        if x < edges[0] || x > last {
            continue;
        }
        // First edge strictly greater than x, minus one; x == last goes to the last class.
        let idx = edges.partition_point(|&e| e <= x).saturating_sub(1).min(bins - 1);
        counts[idx] += 1.0;
    }
    let mut support = Vec::new();
    let mut kept = Vec::new();
    let mut intervals = Vec::new();
    for i in 0..bins {
        if counts[i] > 0.0 {
            support.push(0.5 * (edges[i] + edges[i + 1]));
            kept.push(counts[i]);
            intervals.push([edges[i], edges[i + 1]]);
        }
    }
    if support.len() < 2 {
        return Err(Error::InsufficientSupport { found: support.len() });
    }
    FrequencyTable::new(support, kept)?.with_intervals(intervals)
}

/// Draws that fall in `region`; fails unless at least two distinct values remain.
pub fn truncate_samples(samples: &[f64], region: &Region) -> Result<Vec<f64>> {
    let kept: Vec<f64> = samples.iter().copied().filter(|&x| region.contains(x)).collect();
    let mut distinct = kept.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InsufficientSupport { found: distinct.len() });
    }
    Ok(kept)
}

/// A model's density at `y_1..y_k`, renormalized: `f̄_i = f(y_i) / Σ_j f(y_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryTable {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl AuxiliaryTable {
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Log densities at `support`, rejecting points where the density is 0 or ∞.
pub(crate) fn ln_densities(model: &ParametricModel, support: &[f64]) -> Result<Vec<f64>> {
    support
        .iter()
        .map(|&y| {
            if !y.is_finite() {
                return Err(Error::NonFiniteSupport(y));
            }
            let l = model.ln_density(y);
            if l.is_finite() {
                Ok(l)
            } else {
                Err(Error::ZeroDensity { at: y })
            }
        })
        .collect()
}

pub fn auxiliary_of(model: &ParametricModel, support: &[f64]) -> Result<AuxiliaryTable> {
    check_support(support)?;
    let logs = ln_densities(model, support)?;
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    if let Some(i) = probs.iter().position(|&p| p <= 0.0) {
        return Err(Error::ZeroDensity { at: support[i] });
    }
    Ok(AuxiliaryTable {
        support: support.to_vec(),
        probs,
    })
}
