//! Choosing, among fully specified candidate models of possibly different
//! families, the one nearest a table in `d_v`.

use serde::Serialize;

use crate::distributions::ParametricModel;
use crate::error::{Error, Result};
use crate::tables::FrequencyTable;
use crate::vdist::dv_model;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scored {
    /// Position in the caller's candidate list.
    pub index: usize,
    pub model: ParametricModel,
    pub dv: f64,
}

/// A candidate with zero density somewhere on the table's support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disqualified {
    pub index: usize,
    pub model: ParametricModel,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub candidates: Vec<Scored>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub disqualified: Vec<Disqualified>,
    /// Index into the caller's candidate list.
    pub winner_index: usize,
    /// Runner-up `d_v` minus winner `d_v`.
    pub margin: f64,
}

impl SelectionReport {
    pub fn winner(&self) -> &Scored {
        self.candidates
            .iter()
            .find(|c| c.index == self.winner_index)
            .expect("winner is among the scored candidates")
    }
}

/// Scores every candidate and picks the smallest `d_v`; exact ties go to the
/// earlier candidate.
pub fn select(table: &FrequencyTable, candidates: &[ParametricModel]) -> Result<SelectionReport> {
    let mut scored = Vec::with_capacity(candidates.len());
    let mut disqualified = Vec::new();
    for (index, model) in candidates.iter().enumerate() {
        match dv_model(table, model) {
            Ok(dv) => scored.push(Scored {
                index,
                model: model.clone(),
                dv,
            }),
            Err(e @ Error::ZeroDensity { .. }) => disqualified.push(Disqualified {
                index,
                model: model.clone(),
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    if scored.len() < 2 {
        return Err(Error::SelectionImpossible {
            evaluable: scored.len(),
        });
    }

    let mut best = 0;
    for (i, c) in scored.iter().enumerate() {
        if c.dv < scored[best].dv {
            best = i;
        }
    }
    let runner_up = scored
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, c)| c.dv)
        .fold(f64::INFINITY, f64::min);
    Ok(SelectionReport {
        winner_index: scored[best].index,
        margin: runner_up - scored[best].dv,
        candidates: scored,
        disqualified,
    })
}
