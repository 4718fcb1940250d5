//! Multi-objective genetic algorithm for the vehicle routing problem with time
//! windows.
//!
//! Solutions are scored on four minimisation objectives (total distance,
//! vehicles used, total time-window violation, number of violated windows).
//! Selection pressure comes from each individual's domination count, mapped
//! linearly onto a fitness range. Efficient alternatives that no weighted sum
//! would favour still receive top fitness.

pub mod ga;
pub mod io;
pub mod model;
pub mod pareto;

pub use ga::{ConfigPatch, Engine, GaConfig, GenerationSnapshot, Individual, Population};
pub use model::{
    distance, evaluate, evaluate_traced, Customer, Instance, Objective, ObjectiveVector, Solution, TimingPolicy,
};
pub use pareto::{assign_fitness, brute_force_front, dominates, domination_counts, Archive, FitnessParams};
