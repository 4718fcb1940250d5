//! The front document: the alternatives of a run, with full per-visit timing so
//! violations can be drawn without re-evaluating.
//!
//! Serialised as pretty-printed JSON with keys in struct declaration order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ga::GaConfig;
use crate::model::{evaluate_traced, Instance, ObjectiveVector, RouteTrace, Solution, SolutionError};
use crate::pareto::{dominates, Archive};

pub const FRONT_FORMAT: &str = "moga-vrptw/front/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub objectives: ObjectiveVector,
    pub routes: Vec<Vec<u32>>,
    pub trace: Vec<RouteTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontDocument {
    pub format: String,
    pub instance: String,
    pub config: GaConfig,
    pub seed: u64,
    /// Seconds since the Unix epoch, if recorded.
    pub produced_at: Option<u64>,
    /// Generation the archive was taken at.
    pub generation: usize,
    pub entries: Vec<FrontEntry>,
}

#[derive(Debug, Error)]
pub enum FrontError {
    #[error("front document is not valid JSON: {0}")]
    Syntax(String),
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("entry {dominated} is dominated by entry {by}")]
    Dominated { dominated: usize, by: usize },
    #[error("unsupported front format {0:?}")]
    Format(String),
    #[error("archive entry does not fit the instance: {0}")]
    Solution(#[from] SolutionError),
}

/// A document read back, with the paths of fields that were ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadFront {
    pub document: FrontDocument,
    pub warnings: Vec<String>,
}

impl FrontEntry {
    pub fn from_solution(instance: &Instance, solution: &Solution, config: &GaConfig) -> Result<Self, SolutionError> {
        let (objectives, trace) = evaluate_traced(instance, solution, config.timing_policy)?;
        Ok(FrontEntry { objectives, routes: solution.routes().to_vec(), trace })
    }
}

impl FrontDocument {
    /// Entries sorted by total distance, then by the remaining objectives.
    pub fn from_archive(
        instance: &Instance,
        config: &GaConfig,
        archive: &Archive,
        generation: usize,
        produced_at: Option<u64>,
    ) -> Result<Self, FrontError> {
        let mut entries = archive
            .entries()
            .iter()
            .map(|e| FrontEntry::from_solution(instance, &e.solution, config))
            .collect::<Result<Vec<_>, _>>()?;
        entries.sort_by(|a, b| {
            let (x, y) = (a.objectives.components(), b.objectives.components());
            x.iter().zip(&y).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(FrontDocument {
            format: FRONT_FORMAT.to_owned(),
            instance: instance.name().to_owned(),
            config: config.clone(),
            seed: config.rng_seed,
            produced_at,
            generation,
            entries,
        })
    }

    pub fn check(&self) -> Result<(), FrontError> {
        if self.format != FRONT_FORMAT {
            return Err(FrontError::Format(self.format.clone()));
        }
        for (i, a) in self.entries.iter().enumerate() {
            for (j, b) in self.entries.iter().enumerate() {
                if dominates(&b.objectives, &a.objectives) {
                    return Err(FrontError::Dominated { dominated: i, by: j });
                }
            }
        }
        Ok(())
    }
}

pub fn write_front(doc: &FrontDocument) -> Result<String, FrontError> {
    doc.check()?;
    let mut text = serde_json::to_string_pretty(doc).expect("front documents always serialise");
    text.push('\n');
    Ok(text)
}

pub fn read_front(text: &str) -> Result<ReadFront, FrontError> {
    let mut warnings = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let mut note = |path: serde_ignored::Path<'_>| warnings.push(format!("ignored unknown field `{path}`"));
    let ignoring = serde_ignored::Deserializer::new(&mut de, &mut note);
    let document: FrontDocument = serde_path_to_error::deserialize(ignoring).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            FrontError::Syntax(inner.to_string())
        } else {
            FrontError::Schema { path, message: inner.to_string() }
        }
    })?;
    de.end().map_err(|e| FrontError::Syntax(e.to_string()))?;
    document.check()?;
    Ok(ReadFront { document, warnings })
}
