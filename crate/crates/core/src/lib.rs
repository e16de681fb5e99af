//! Distance in variations between probability distributions on a finite
//! support, and the estimation and model-selection procedures built on it.
//!
//! Everything here starts from a [`FrequencyTable`]: support points
//! `y_1 < … < y_k` with strictly positive counts. A parametric model enters
//! only through the ratios of its density at those points, so continuous
//! and discrete families, complete and type-I censored samples are all
//! handled by the same code paths.
//!
//! The distance between a table `f̂` and a distribution `f` on the support is
//!
//! ```text
//! d_v(f̂, f) = Σ_{i≠j} | f̂_i / f̂_j − f(y_i) / f(y_j) |
//! ```
//!
//! summed over ordered pairs. It is zero exactly when `f̂` and `f` are
//! proportional on the support.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod harness;
mod optimize;
pub mod region;
pub mod rng;
pub mod selection;
pub mod tables;
pub mod vdist;

pub use distributions::{Family, NaturalForm, NaturalKind, ParametricModel, Support};
pub use error::{Error, Result};
pub use estimators::{
    EstimationResult, FitOptions, FitSpec, Method, PerturbationSweep, Status, TwoPointSolver,
};
pub use region::{Interval, Region};
pub use selection::{select, SelectionReport};
pub use tables::{auxiliary_of, AuxiliaryTable, Binning, FrequencyTable};
pub use vdist::{dv_model, dv_tables, Frequencies, PairwiseDelta};
