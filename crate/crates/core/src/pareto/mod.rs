//! Pareto dominance, domination counting and the dominance-count fitness.
//!
//! Every individual is scored by how many members of its population dominate
//! it (its domination count). Counts are mapped linearly onto
//! `[f_min, f_max]`: a count of zero earns `f_max`, the largest count in the
//! population earns `f_min`. No front sorting is involved.

mod archive;

pub use archive::{Archive, ArchiveEntry, Offer};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ObjectiveVector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParetoError {
    #[error("domination counts need at least one objective vector")]
    EmptyInput,
    #[error("fitness parameters must satisfy f_max > f_min >= 0 (got f_max = {f_max}, f_min = {f_min})")]
    InvalidFitnessParams { f_max: f64, f_min: f64 },
}

/// Bounds of the linear fitness mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFitnessParams", into = "RawFitnessParams")]
pub struct FitnessParams {
    f_max: f64,
    f_min: f64,
}

#[derive(Serialize, Deserialize)]
struct RawFitnessParams {
    f_max: f64,
    f_min: f64,
}

impl TryFrom<RawFitnessParams> for FitnessParams {
    type Error = ParetoError;

    fn try_from(raw: RawFitnessParams) -> Result<Self, Self::Error> {
        FitnessParams::new(raw.f_max, raw.f_min)
    }
}

impl From<FitnessParams> for RawFitnessParams {
    fn from(p: FitnessParams) -> Self {
        RawFitnessParams { f_max: p.f_max, f_min: p.f_min }
    }
}

impl FitnessParams {
    pub fn new(f_max: f64, f_min: f64) -> Result<Self, ParetoError> {
        if f_max.is_finite() && f_min.is_finite() && f_min >= 0.0 && f_max > f_min {
            Ok(FitnessParams { f_max, f_min })
        } else {
            Err(ParetoError::InvalidFitnessParams { f_max, f_min })
        }
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }
}

impl Default for FitnessParams {
    fn default() -> Self {
        FitnessParams { f_max: 100.0, f_min: 1.0 }
    }
}

/// Minimisation Pareto dominance over raw component slices: `a` is no worse
/// everywhere and strictly better somewhere.
pub fn dominates_components(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// True iff `a` dominates `b` on all four objectives.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    dominates_components(&a.components(), &b.components())
}

/// For every vector, the number of other vectors that dominate it.
pub fn domination_counts(vectors: &[ObjectiveVector]) -> Result<Vec<usize>, ParetoError> {
    if vectors.is_empty() {
        return Err(ParetoError::EmptyInput);
    }
    let comps: Vec<[f64; 4]> = vectors.iter().map(ObjectiveVector::components).collect();
    let count_for = |i: usize| comps.iter().filter(|other| dominates_components(&other[..], &comps[i][..])).count();
    Ok(if comps.len() >= 256 {
        (0..comps.len()).into_par_iter().map(count_for).collect()
    } else {
        (0..comps.len()).map(count_for).collect()
    })
}

/// Linear fitness from domination counts:
/// `f = f_max - (f_max - f_min) / count_max * count`.
///
/// A population where nobody is dominated gets `f_max` everywhere. The two
/// extremes are pinned to exactly `f_max` and `f_min`.
pub fn assign_fitness(counts: &[usize], params: &FitnessParams) -> Vec<f64> {
    let max_count = counts.iter().copied().max().unwrap_or(0);
    if max_count == 0 {
        return vec![params.f_max; counts.len()];
    }
    let slope = (params.f_max - params.f_min) / max_count as f64;
    counts
        .iter()
        .map(|&c| match c {
            0 => params.f_max,
            c if c == max_count => params.f_min,
            c => (params.f_max - slope * c as f64).clamp(params.f_min, params.f_max),
        })
        .collect()
}

/// Indices of the non-dominated vectors, by exhaustive pairwise comparison.
pub fn brute_force_front(vectors: &[ObjectiveVector]) -> Vec<usize> {
    (0..vectors.len()).filter(|&i| !(0..vectors.len()).any(|j| j != i && dominates(&vectors[j], &vectors[i]))).collect()
}
