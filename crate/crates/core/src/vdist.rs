//! The distance in variations.
//!
//! For two positive weight vectors `a`, `b` on the same support,
//! `d_v(a, b) = Σ_{i≠j} |a_i/a_j − b_i/b_j|` over ordered pairs. Both `(i, j)`
//! and `(j, i)` contribute; the diagonal is identically zero and skipped.
//! Pairs are always enumerated row-major so sums are reproducible bit for bit.

use serde::Serialize;

use crate::distributions::{NaturalForm, ParametricModel};
use crate::error::{Error, Result};
use crate::tables::{ln_densities, AuxiliaryTable, FrequencyTable};

/// Anything that assigns a positive weight to each point of a finite support.
pub trait Frequencies {
    fn support(&self) -> &[f64];
    fn weights(&self) -> &[f64];
}

impl Frequencies for FrequencyTable {
    fn support(&self) -> &[f64] {
        FrequencyTable::support(self)
    }

    fn weights(&self) -> &[f64] {
        self.counts()
    }
}

impl Frequencies for AuxiliaryTable {
    fn support(&self) -> &[f64] {
        AuxiliaryTable::support(self)
    }

    fn weights(&self) -> &[f64] {
        self.probs()
    }
}

/// One ordered-pair term `|f̂_i/f̂_j − f(y_i)/f(y_j)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseDelta {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

fn check_weights<F: Frequencies + ?Sized>(f: &F) -> Result<()> {
    for (&y, &w) in f.support().iter().zip(f.weights()) {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::ZeroDensity { at: y });
        }
    }
    Ok(())
}

pub fn dv_tables<A, B>(a: &A, b: &B) -> Result<f64>
where
    A: Frequencies + ?Sized,
    B: Frequencies + ?Sized,
{
    if a.support() != b.support() {
        return Err(Error::SupportMismatch);
    }
    check_weights(a)?;
    check_weights(b)?;
    let (wa, wb) = (a.weights(), b.weights());
    let k = wa.len();
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                total += (wa[i] / wa[j] - wb[i] / wb[j]).abs();
            }
        }
    }
    Ok(total)
}

/// Model ratios `f(y_i)/f(y_j)` as `exp(ln f(y_i) − ln f(y_j))`, row-major,
/// diagonal included.
fn model_ratios(model: &ParametricModel, support: &[f64]) -> Result<Vec<f64>> {
    let logs = ln_densities(model, support)?;
    let k = logs.len();
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let r = (logs[i] - logs[j]).exp();
            if !(r.is_finite() && r > 0.0) {
                // The ratio under- or overflows; the smaller density is the culprit.
                let at = if logs[i] < logs[j] { support[i] } else { support[j] };
                return Err(Error::ZeroDensity { at });
            }
            out.push(r);
        }
    }
    Ok(out)
}

/// All `k(k−1)` ordered-pair terms between a table and a model.
pub fn pairwise_deltas(table: &FrequencyTable, model: &ParametricModel) -> Result<Vec<PairwiseDelta>> {
    let ratios = model_ratios(model, table.support())?;
    let n = table.counts();
    let k = n.len();
    let mut out = Vec::with_capacity(k * (k - 1));
    for i in 0..k {
        for j in 0..k {
            if i != j {
                out.push(PairwiseDelta {
                    i,
                    j,
                    value: (n[i] / n[j] - ratios[i * k + j]).abs(),
                });
            }
        }
    }
    Ok(out)
}

/// `d_v` between a table and a model on the table's support.
pub fn dv_model(table: &FrequencyTable, model: &ParametricModel) -> Result<f64> {
    Ok(pairwise_deltas(table, model)?.iter().map(|d| d.value).sum())
}

/// The `n` largest terms, largest first; ties keep enumeration order.
pub fn largest_terms(deltas: &[PairwiseDelta], n: usize) -> Vec<PairwiseDelta> {
    let mut v = deltas.to_vec();
    v.sort_by(|a, b| b.value.total_cmp(&a.value));
    v.truncate(n);
    v
}

/// Both sides of the convexity inequality for `θ ↦ Σ_{i≠j} δ_ij(θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityWitness {
    /// `Σ δ_ij(w·θ1 + (1−w)·θ2)`
    pub lhs: f64,
    /// `w·Σ δ_ij(θ1) + (1−w)·Σ δ_ij(θ2)`
    pub rhs: f64,
}

/// `Σ_{i≠j} |C_ij · exp{Σ_k θ_k (T_k(y_i) − T_k(y_j))} − A_ij|` with
/// `C_ij = K(y_i)/K(y_j)` and `A_ij = f̂_i/f̂_j`.
fn natural_objective(nf: &NaturalForm, table: &FrequencyTable, theta: &[f64]) -> Result<f64> {
    if !nf.contains(theta) {
        return Err(Error::Domain(format!("θ = {theta:?} is outside Θ")));
    }
    let y = table.support();
    let n = table.counts();
    let ln_k: Vec<f64> = y.iter().map(|&v| nf.ln_carrier(v)).collect();
    if let Some(i) = ln_k.iter().position(|l| !l.is_finite()) {
        return Err(Error::ZeroDensity { at: y[i] });
    }
    let lin: Vec<f64> = y.iter().map(|&v| nf.linear_term(theta, v)).collect();
    let k = y.len();
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let model = (ln_k[i] - ln_k[j] + lin[i] - lin[j]).exp();
                total += (model - n[i] / n[j]).abs();
            }
        }
    }
    Ok(total)
}

pub fn convexity_witness(
    nf: &NaturalForm,
    table: &FrequencyTable,
    theta1: &[f64],
    theta2: &[f64],
    weight: f64,
) -> Result<ConvexityWitness> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::Domain(format!("weight {weight} is outside [0, 1]")));
    }
    if theta1.len() != theta2.len() {
        return Err(Error::Domain("θ1 and θ2 differ in dimension".into()));
    }
    let mix: Vec<f64> = theta1
        .iter()
        .zip(theta2)
        .map(|(a, b)| weight * a + (1.0 - weight) * b)
        .collect();
    let lhs = natural_objective(nf, table, &mix)?;
    let rhs = weight * natural_objective(nf, table, theta1)?
        + (1.0 - weight) * natural_objective(nf, table, theta2)?;
    Ok(ConvexityWitness { lhs, rhs })
}
