use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::TimingPolicy;
use crate::pareto::FitnessParams;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionScheme {
    /// Fitness-proportionate selection.
    #[default]
    Roulette,
    /// Binary tournament on fitness, for experiments.
    BinaryTournament,
}

/// Tunable parameters of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub fitness_params: FitnessParams,
    pub timing_policy: TimingPolicy,
    pub rng_seed: u64,
    pub archive_capacity: Option<NonZeroUsize>,
    pub elitism_count: usize,
    pub selection: SelectionScheme,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            generations: 500,
            crossover_rate: 0.9,
            mutation_rate: 0.2,
            fitness_params: FitnessParams::default(),
            timing_policy: TimingPolicy::WaitAllowed,
            rng_seed: 0,
            archive_capacity: None,
            elitism_count: 1,
            selection: SelectionScheme::Roulette,
        }
    }
}

/// A configuration field failed validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {field}: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    pub(crate) fn new(field: &'static str, reason: impl Into<String>) -> Self {
        ConfigError { field, reason: reason.into() }
    }
}

pub(crate) fn check_rate(field: &'static str, rate: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&rate) {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("{rate} is outside [0, 1]")))
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 2 {
            return Err(ConfigError::new("population_size", "must be at least 2"));
        }
        check_rate("crossover_rate", self.crossover_rate)?;
        check_rate("mutation_rate", self.mutation_rate)?;
        if self.elitism_count >= self.population_size {
            return Err(ConfigError::new("elitism_count", "must be smaller than population_size"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = GaConfig::default();
        c.validate().unwrap();
        assert_eq!((c.population_size, c.generations), (100, 500));
        assert_eq!((c.crossover_rate, c.mutation_rate, c.elitism_count), (0.9, 0.2, 1));
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = GaConfig { population_size: 1, ..GaConfig::default() };
        assert_eq!(c.validate().unwrap_err().field, "population_size");
        c.population_size = 10;
        c.mutation_rate = 1.5;
        assert_eq!(c.validate().unwrap_err().field, "mutation_rate");
        c.mutation_rate = 0.1;
        c.elitism_count = 10;
        assert_eq!(c.validate().unwrap_err().field, "elitism_count");
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: GaConfig = serde_json::from_str(r#"{"population_size": 20, "timing_policy": "no_wait"}"#).unwrap();
        assert_eq!(c.population_size, 20);
        assert_eq!(c.timing_policy, TimingPolicy::NoWait);
        assert_eq!(c.generations, 500);
        assert!(serde_json::from_str::<GaConfig>(r#"{"archive_capacity": 0}"#).is_err());
    }
}
