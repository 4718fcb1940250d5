//! Generational genetic algorithm over giant-tour genotypes.

mod config;
mod engine;
pub mod operators;
pub mod selection;

pub use config::{ConfigError, GaConfig, SelectionScheme};
pub use engine::{
    initialize_population, run, select_parent, step_generation, BestOfObjective, ConfigPatch, Engine,
    GenerationSnapshot, Individual, Population, RunOutcome,
};
pub use operators::{apply_mutation, crossover, mutate, MutationKind};
pub use selection::{binary_tournament, roulette};
