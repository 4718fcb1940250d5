//! The generational loop.
//!
//! Each generation is evaluated, every individual gets its domination count
//! and the linear fitness derived from it, all individuals are offered to the
//! archive, and a snapshot is emitted. The next generation keeps the
//! `elitism_count` least-dominated individuals and is filled with
//! roulette-selected, recombined and mutated offspring.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{check_rate, ConfigError, GaConfig, SelectionScheme};
use super::operators::{crossover, initial_solutions, mutate};
use super::selection::select_index;
use crate::model::{evaluate, Instance, Objective, ObjectiveVector, Solution};
use crate::pareto::{assign_fitness, domination_counts, Archive, FitnessParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub solution: Solution,
    pub objectives: ObjectiveVector,
    pub domination_count: usize,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Population {
    pub individuals: Vec<Individual>,
}

impl Population {
    /// Evaluates and ranks `solutions` against each other.
    pub fn rank(solutions: Vec<Solution>, instance: &Instance, config: &GaConfig) -> Population {
        let policy = config.timing_policy;
        let objectives: Vec<ObjectiveVector> = solutions
            .par_iter()
            .map(|s| {
                debug_assert!(s.validate(instance).is_ok(), "invalid genotype {s:?}");
                evaluate(instance, s, policy).expect("operators preserve solution invariants")
            })
            .collect();
        let counts = domination_counts(&objectives).expect("population is never empty");
        let fitness = assign_fitness(&counts, &config.fitness_params);
        let individuals = solutions
            .into_iter()
            .zip(objectives)
            .zip(counts.into_iter().zip(fitness))
            .map(|((solution, objectives), (domination_count, fitness))| Individual {
                solution,
                objectives,
                domination_count,
                fitness,
            })
            .collect();
        Population { individuals }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.individuals.iter().map(|i| i.objectives).collect()
    }

    pub fn domination_counts(&self) -> Vec<usize> {
        self.individuals.iter().map(|i| i.domination_count).collect()
    }

    pub fn fitness(&self) -> Vec<f64> {
        self.individuals.iter().map(|i| i.fitness).collect()
    }

    /// Recomputes fitness from the stored counts, e.g. after new bounds were set.
    pub fn reassign_fitness(&mut self, params: &FitnessParams) {
        let f = assign_fitness(&self.domination_counts(), params);
        for (ind, f) in self.individuals.iter_mut().zip(f) {
            ind.fitness = f;
        }
    }

    /// Indices of the `k` least-dominated individuals; ties by total distance,
    /// then by position.
    pub fn elite_indices(&self, k: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&self.individuals[a], &self.individuals[b]);
            x.domination_count
                .cmp(&y.domination_count)
                .then(x.objectives.total_distance.total_cmp(&y.objectives.total_distance))
                .then(a.cmp(&b))
        });
        order.truncate(k);
        order
    }
}

/// Ranks the initial genotypes.
pub fn initialize_population<R: Rng + ?Sized>(instance: &Instance, config: &GaConfig, rng: &mut R) -> Population {
    Population::rank(initial_solutions(instance, config.population_size, rng), instance, config)
}

/// Draws a parent according to `scheme` over the population's fitness.
pub fn select_parent<'a, R: Rng + ?Sized>(
    population: &'a Population,
    scheme: SelectionScheme,
    rng: &mut R,
) -> &'a Individual {
    &population.individuals[select_index(scheme, &population.fitness(), rng)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestOfObjective {
    pub objective: Objective,
    pub objectives: ObjectiveVector,
    /// Position of the individual in the population.
    pub individual: usize,
}

/// What the progress view shows for one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSnapshot {
    pub generation_index: usize,
    pub population_objectives: Vec<ObjectiveVector>,
    pub domination_counts: Vec<usize>,
    pub fitness_values: Vec<f64>,
    pub archive_objectives: Vec<ObjectiveVector>,
    pub best_per_objective: Vec<BestOfObjective>,
    /// Wall-clock time since the run started.
    pub elapsed_ms: f64,
}

impl GenerationSnapshot {
    pub fn capture(generation_index: usize, population: &Population, archive: &Archive, elapsed: Duration) -> Self {
        let best_per_objective = Objective::ALL
            .iter()
            .map(|&objective| {
                let (individual, ind) = population
                    .individuals
                    .iter()
                    .enumerate()
                    .min_by(|(a, x), (b, y)| {
                        x.objectives.get(objective).total_cmp(&y.objectives.get(objective)).then(a.cmp(b))
                    })
                    .expect("population is never empty");
                BestOfObjective { objective, objectives: ind.objectives, individual }
            })
            .collect();
        GenerationSnapshot {
            generation_index,
            population_objectives: population.objectives(),
            domination_counts: population.domination_counts(),
            fitness_values: population.fitness(),
            archive_objectives: archive.objectives(),
            best_per_objective,
            elapsed_ms: elapsed.as_secs_f64() * 1e3,
        }
    }

    /// The snapshot with its wall-clock field zeroed; two runs with equal
    /// inputs produce equal timing-free snapshots.
    pub fn without_timing(&self) -> Self {
        GenerationSnapshot { elapsed_ms: 0.0, ..self.clone() }
    }

    pub fn best(&self, objective: Objective) -> &BestOfObjective {
        &self.best_per_objective[objective as usize]
    }
}

/// Breeds, evaluates and archives the next generation.
pub fn step_generation<R: Rng + ?Sized>(
    population: &Population,
    archive: &mut Archive,
    instance: &Instance,
    config: &GaConfig,
    rng: &mut R,
    generation_index: usize,
) -> (Population, GenerationSnapshot) {
    let size = config.population_size;
    let fitness = population.fitness();
    let mut next: Vec<Solution> = population
        .elite_indices(config.elitism_count)
        .into_iter()
        .map(|i| population.individuals[i].solution.clone())
        .collect();
    while next.len() < size {
        let a = &population.individuals[select_index(config.selection, &fitness, rng)];
        let b = &population.individuals[select_index(config.selection, &fitness, rng)];
        let child = if rng.random_bool(config.crossover_rate) {
            crossover(&a.solution, &b.solution, instance, rng)
        } else {
            a.solution.clone()
        };
        next.push(mutate(&child, instance, config.mutation_rate, rng));
    }
    let ranked = Population::rank(next, instance, config);
    offer_all(archive, &ranked);
    let snapshot = GenerationSnapshot::capture(generation_index, &ranked, archive, Duration::ZERO);
    (ranked, snapshot)
}

fn offer_all(archive: &mut Archive, population: &Population) {
    for ind in &population.individuals {
        archive.offer(&ind.solution, ind.objectives);
    }
}

/// Live-steerable subset of the configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    pub mutation_rate: Option<f64>,
    pub crossover_rate: Option<f64>,
    pub fitness_params: Option<FitnessParams>,
}

impl ConfigPatch {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(r) = self.mutation_rate {
            check_rate("mutation_rate", r)?;
        }
        if let Some(r) = self.crossover_rate {
            check_rate("crossover_rate", r)?;
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        *self == ConfigPatch::default()
    }
}

/// A run in progress: owns the population, the archive and the random stream.
#[derive(Debug, Clone)]
pub struct Engine {
    instance: Arc<Instance>,
    config: GaConfig,
    rng: ChaCha8Rng,
    population: Population,
    archive: Archive,
    generation: usize,
    started: Instant,
}

impl Engine {
    /// Builds and ranks generation 0.
    pub fn new(instance: Arc<Instance>, config: GaConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let population = initialize_population(&instance, &config, &mut rng);
        let mut archive = Archive::with_capacity(config.archive_capacity);
        offer_all(&mut archive, &population);
        Ok(Engine { instance, config, rng, population, archive, generation: 0, started })
    }

    pub fn instance(&self) -> &Arc<Instance> {
        &self.instance
    }

    pub fn config(&self) -> &GaConfig {
        &self.config
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    /// Index of the current generation.
    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn is_done(&self) -> bool {
        self.generation >= self.config.generations
    }

    /// Snapshot of the current generation.
    pub fn snapshot(&self) -> GenerationSnapshot {
        GenerationSnapshot::capture(self.generation, &self.population, &self.archive, self.started.elapsed())
    }

    /// Applies live parameter changes; they shape the next generation.
    pub fn apply(&mut self, patch: &ConfigPatch) -> Result<(), ConfigError> {
        patch.validate()?;
        if let Some(r) = patch.mutation_rate {
            self.config.mutation_rate = r;
        }
        if let Some(r) = patch.crossover_rate {
            self.config.crossover_rate = r;
        }
        if let Some(p) = patch.fitness_params {
            self.config.fitness_params = p;
            self.population.reassign_fitness(&p);
        }
        Ok(())
    }

    /// Advances one generation and returns its snapshot.
    pub fn step(&mut self) -> GenerationSnapshot {
        let next_index = self.generation + 1;
        let (population, mut snapshot) = step_generation(
            &self.population,
            &mut self.archive,
            &self.instance,
            &self.config,
            &mut self.rng,
            next_index,
        );
        self.population = population;
        self.generation = next_index;
        snapshot.elapsed_ms = self.started.elapsed().as_secs_f64() * 1e3;
        snapshot
    }

    pub fn into_archive(self) -> Archive {
        self.archive
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub archive: Archive,
    pub snapshots: Vec<GenerationSnapshot>,
    pub population: Population,
    pub cancelled: bool,
}

/// Runs `config.generations` generations, handing every snapshot (generation 0
/// included) to `sink` in order. `cancel` is polled after each delivery; a
/// cancelled run returns what it has so far.
pub fn run<F>(
    instance: Arc<Instance>,
    config: GaConfig,
    mut sink: F,
    cancel: &AtomicBool,
) -> Result<RunOutcome, ConfigError>
where
    F: FnMut(&GenerationSnapshot),
{
    let mut engine = Engine::new(instance, config)?;
    let mut snapshots = Vec::with_capacity(engine.config.generations + 1);
    let first = engine.snapshot();
    sink(&first);
    snapshots.push(first);
    let mut cancelled = cancel.load(Ordering::Acquire);
    while !cancelled && !engine.is_done() {
        let snap = engine.step();
        sink(&snap);
        snapshots.push(snap);
        cancelled = cancel.load(Ordering::Acquire);
    }
    Ok(RunOutcome { population: engine.population.clone(), archive: engine.into_archive(), snapshots, cancelled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Customer;
    use crate::pareto::brute_force_front;

    fn small(n: u32) -> Arc<Instance> {
        let customers = (1..=n)
            .map(|i| {
                let a = i as f64 * 0.7;
                Customer::new(
                    i,
                    (50.0 + 30.0 * a.cos(), 50.0 + 30.0 * a.sin()),
                    5.0,
                    (i as f64 * 10.0, i as f64 * 10.0 + 40.0),
                    5.0,
                )
            })
            .collect();
        Arc::new(
            Instance::new("ring", Customer::new(0, (50.0, 50.0), 0.0, (0.0, 1000.0), 0.0), customers, 20.0, n).unwrap(),
        )
    }

    fn cfg(pop: usize, gens: usize, seed: u64) -> GaConfig {
        GaConfig { population_size: pop, generations: gens, rng_seed: seed, ..GaConfig::default() }
    }

    #[test]
    fn identical_population_ranks_flat() {
        let inst = small(4);
        let config = cfg(6, 0, 1);
        let s = Solution::new(vec![vec![1, 2, 3, 4]]);
        let pop = Population::rank(vec![s; 6], &inst, &config);
        assert!(pop.domination_counts().iter().all(|&c| c == 0));
        assert!(pop.fitness().iter().all(|&f| f == config.fitness_params.f_max()));
        let mut archive = Archive::new();
        offer_all(&mut archive, &pop);
        assert_eq!(archive.len(), 1);
    }

    #[test]
    fn heavy_elitism_leaves_one_slot() {
        let inst = small(8);
        let config = GaConfig { elitism_count: 9, crossover_rate: 1.0, mutation_rate: 1.0, ..cfg(10, 1, 3) };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pop = initialize_population(&inst, &config, &mut rng);
        let elites: Vec<Solution> =
            pop.elite_indices(9).into_iter().map(|i| pop.individuals[i].solution.clone()).collect();
        let mut archive = Archive::new();
        let (next, _) = step_generation(&pop, &mut archive, &inst, &config, &mut rng, 1);
        let carried = next.individuals.iter().take(9).map(|i| &i.solution).collect::<Vec<_>>();
        assert_eq!(carried, elites.iter().collect::<Vec<_>>());
        assert_eq!(next.len(), 10);
    }

    #[test]
    fn zero_generations_archives_initial_front() {
        let inst = small(10);
        let out = run(inst, cfg(30, 0, 5), |_| {}, &AtomicBool::new(false)).unwrap();
        assert_eq!(out.snapshots.len(), 1);
        let objs = out.population.objectives();
        let mut front: Vec<ObjectiveVector> = Vec::new();
        for i in brute_force_front(&objs) {
            if !front.contains(&objs[i]) {
                front.push(objs[i]);
            }
        }
        assert_eq!(out.archive.len(), front.len());
        assert!(front.iter().all(|v| out.archive.objectives().contains(v)));
    }

    #[test]
    fn cancellation_after_generation_k() {
        let inst = small(6);
        let cancel = AtomicBool::new(false);
        let mut seen = 0;
        let out = run(
            inst,
            cfg(10, 50, 2),
            |s| {
                seen += 1;
                if s.generation_index == 4 {
                    cancel.store(true, Ordering::Release);
                }
            },
            &cancel,
        )
        .unwrap();
        assert!(out.cancelled);
        assert_eq!(seen, 5);
        assert_eq!(out.snapshots.len(), 5);
    }

    #[test]
    fn snapshots_are_deterministic() {
        let go = || {
            run(small(9), cfg(20, 15, 99), |_| {}, &AtomicBool::new(false))
                .unwrap()
                .snapshots
                .iter()
                .map(|s| serde_json::to_string(&s.without_timing()).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(go(), go());
    }

    #[test]
    fn patch_validation_and_fitness_refresh() {
        let mut e = Engine::new(small(5), cfg(8, 3, 0)).unwrap();
        assert_eq!(
            e.apply(&ConfigPatch { mutation_rate: Some(2.0), ..Default::default() }).unwrap_err().field,
            "mutation_rate"
        );
        let p = FitnessParams::new(10.0, 0.0).unwrap();
        e.apply(&ConfigPatch { fitness_params: Some(p), ..Default::default() }).unwrap();
        assert!(e.population().fitness().iter().all(|&f| (0.0..=10.0).contains(&f)));
        assert!(e.population().fitness().contains(&10.0));
    }

    #[test]
    fn every_generation_is_valid_and_ordered() {
        let inst = small(12);
        let mut e = Engine::new(inst.clone(), cfg(16, 30, 17)).unwrap();
        while !e.is_done() {
            e.step();
            let pop = e.population();
            for ind in &pop.individuals {
                ind.solution.validate(&inst).unwrap();
            }
            for a in &pop.individuals {
                for b in &pop.individuals {
                    if a.domination_count < b.domination_count {
                        assert!(a.fitness > b.fitness);
                    }
                }
            }
        }
    }
}
