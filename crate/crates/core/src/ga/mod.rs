//! The evolutionary engine: dispatching-rule initialisation, elitist +
//! roulette-wheel selection, PMX/PBX crossover, SWAP/INSERT mutation,
//! precedence repair, and generational replacement.
//!
//! A run is a pure function of (instance, config): all randomness comes from
//! one seeded stream and every draw happens on the sequential loop.

pub mod crossover;
pub mod dispatch;
pub mod list;
pub mod mutation;
pub mod selection;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{critical_path, ActivityId, Instance, InvalidInstance, Tick};
use crate::sgs::{Decoder, DecodeScratch, Policy, Schedule, SgsError};

pub use crossover::{pbx, pmx, pmx_detailed, PmxDetails};
pub use dispatch::{dispatch_list, initial_rule_allocation, DispatchRule};
pub use list::{repair, ActivityList};
pub use mutation::{insert_mutate, swap_mutate};
pub use selection::{
    cumulative_intervals, elite_indices, pick_interval, reciprocal_fitness, roulette_select,
    selection_probabilities,
};

use list::NetworkView;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GaError {
    #[error(transparent)]
    InvalidInstance(#[from] InvalidInstance),
    #[error(transparent)]
    Sgs(#[from] SgsError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("degenerate zero-makespan instance: every duration is zero")]
    DegenerateInstance,
    #[error("{0}")]
    InvalidOperand(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverKind {
    Pmx,
    Pbx,
}

impl fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossoverKind::Pmx => write!(f, "pmx"),
            CrossoverKind::Pbx => write!(f, "pbx"),
        }
    }
}

impl FromStr for CrossoverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pmx" => Ok(CrossoverKind::Pmx),
            "pbx" => Ok(CrossoverKind::Pbx),
            other => Err(format!("unknown crossover '{other}' (expected pmx or pbx)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    Swap,
    Insert,
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationKind::Swap => write!(f, "swap"),
            MutationKind::Insert => write!(f, "insert"),
        }
    }
}

impl FromStr for MutationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "swap" => Ok(MutationKind::Swap),
            "insert" => Ok(MutationKind::Insert),
            other => Err(format!("unknown mutation '{other}' (expected swap or insert)")),
        }
    }
}

/// Run parameters. `Default` mirrors the setting that performed best in
/// benchmarking: Ps=10, PMX at 0.7, SWAP at 0.1, EST.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover: CrossoverKind,
    pub crossover_prob: f64,
    pub mutation: MutationKind,
    pub mutation_prob: f64,
    pub policy: Policy,
    pub elite_count: usize,
    /// Stop after this many generations.
    pub max_generations: Option<u64>,
    /// Stop once this much wall-clock time has elapsed. Runs stopped by the
    /// clock are not reproducible generation-for-generation; prefer
    /// `max_generations` when artifacts must be byte-stable.
    pub time_limit_ms: Option<u64>,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 10,
            crossover: CrossoverKind::Pmx,
            crossover_prob: 0.7,
            mutation: MutationKind::Swap,
            mutation_prob: 0.1,
            policy: Policy::Est,
            elite_count: 1,
            max_generations: Some(200),
            time_limit_ms: None,
            seed: 42,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        if self.population_size < 2 {
            return Err(GaError::Config("population size must be at least 2".into()));
        }
        if self.elite_count == 0 || self.elite_count >= self.population_size {
            return Err(GaError::Config(format!(
                "elite count must be in 1..population size, got {}",
                self.elite_count
            )));
        }
        for (name, p) in [("crossover", self.crossover_prob), ("mutation", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GaError::Config(format!("{name} probability {p} outside [0, 1]")));
            }
        }
        if self.max_generations.is_none() && self.time_limit_ms.is_none() {
            return Err(GaError::Config(
                "no stopping criterion: set max_generations and/or time_limit_ms".into(),
            ));
        }
        Ok(())
    }
}

/// The current generation's members with cached fitness values.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<ActivityList>,
    pub fitnesses: Vec<Tick>,
    pub generation: u64,
}

impl Population {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn best_fitness(&self) -> Tick {
        self.fitnesses.iter().copied().min().expect("population is never empty")
    }
}

/// One convergence data point per evolved generation.
///
/// `elapsed_ms` is a deterministic work clock, not wall time: it counts
/// schedule decodes performed so far, so identical runs log identical
/// values and artifacts stay byte-stable. Wall time lives in
/// [`GaResult::wall_time`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub generation: u64,
    pub best_ticks: Tick,
    pub mean_ticks: f64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceLog {
    pub records: Vec<ConvergenceRecord>,
}

impl ConvergenceLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Outcome of one evolution run.
#[derive(Debug, Clone)]
pub struct GaResult {
    pub best: ActivityList,
    pub best_makespan: Tick,
    pub best_makespan_days: f64,
    pub best_schedule: Schedule,
    /// Best fitness among the initial dispatching-rule lists.
    pub initial_best: Tick,
    pub generations: u64,
    /// Schedule decodes performed (the work clock's final reading).
    pub evaluations: u64,
    /// Work-clock reading when the final best first appeared.
    pub time_to_best_ms: u64,
    pub wall_time: Duration,
    pub log: ConvergenceLog,
}

/// Fitness evaluation with a cache keyed by the gene sequence. The policy
/// never changes the makespan, so one cache serves both.
struct Evaluator<'d> {
    decoder: &'d Decoder,
    scratch: DecodeScratch,
    cache: HashMap<Vec<ActivityId>, Tick>,
    decodes: u64,
}

// Long time-limited runs would otherwise grow the cache without bound.
const CACHE_CLEAR_AT: usize = 1 << 18;

impl<'d> Evaluator<'d> {
    fn new(decoder: &'d Decoder) -> Self {
        Evaluator { decoder, scratch: decoder.new_scratch(), cache: HashMap::new(), decodes: 0 }
    }

    fn fitness(&mut self, genes: &[ActivityId]) -> Result<Tick, SgsError> {
        if let Some(&cached) = self.cache.get(genes) {
            return Ok(cached);
        }
        let value = self.decoder.makespan(genes, &mut self.scratch)?;
        self.decodes += 1;
        if self.cache.len() >= CACHE_CLEAR_AT {
            self.cache.clear();
        }
        self.cache.insert(genes.to_vec(), value);
        Ok(value)
    }
}

/// Seeds the population round-robin across the five dispatching rules. The
/// first list of each deterministic rule is exact; later rounds break
/// priority ties randomly so duplicates can diversify.
pub fn generate_initial_population<R: Rng>(
    instance: &Instance,
    config: &GaConfig,
    rng: &mut R,
) -> Result<Population, GaError> {
    config.validate()?;
    let view = NetworkView::new(instance)?;
    let tails = tails_by_index(instance, &view)?;
    let decoder = Decoder::new(instance)?;
    let mut evaluator = Evaluator::new(&decoder);
    initial_population(&view, &tails, &mut evaluator, config, rng)
}

fn tails_by_index(instance: &Instance, view: &NetworkView) -> Result<Vec<Tick>, GaError> {
    let info = critical_path(instance)?;
    Ok(view.ids.iter().map(|id| info.tail(*id).expect("tail for every activity")).collect())
}

fn initial_population<R: Rng>(
    view: &NetworkView,
    tails: &[Tick],
    evaluator: &mut Evaluator,
    config: &GaConfig,
    rng: &mut R,
) -> Result<Population, GaError> {
    let rules = initial_rule_allocation(config.population_size);
    let mut members = Vec::with_capacity(rules.len());
    let mut fitnesses = Vec::with_capacity(rules.len());
    for (i, &rule) in rules.iter().enumerate() {
        let perturb = i >= DispatchRule::ALL.len();
        let genes = dispatch::dispatch_order(view, tails, rule, rng, perturb);
        fitnesses.push(evaluator.fitness(&genes)?);
        members.push(ActivityList::known_feasible(genes));
    }
    Ok(Population { members, fitnesses, generation: 0 })
}

/// Runs the full loop: per generation, carry the elites over, draw parent
/// pairs by roulette wheel, cross with probability `crossover_prob` (one
/// draw gates both offspring), mutate each offspring independently with
/// probability `mutation_prob`, repair, evaluate, refill to the population
/// size, and log. Returns the best member ever observed.
pub fn evolve(instance: &Instance, config: &GaConfig) -> Result<GaResult, GaError> {
    config.validate()?;
    let decoder = Decoder::new(instance)?;
    if instance.activities.iter().all(|a| a.duration == 0) {
        return Err(GaError::DegenerateInstance);
    }
    let view = NetworkView::new(instance)?;
    let tails = tails_by_index(instance, &view)?;

    let started = Instant::now();
    let deadline = config.time_limit_ms.map(Duration::from_millis);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut evaluator = Evaluator::new(&decoder);

    let mut population = initial_population(&view, &tails, &mut evaluator, config, &mut rng)?;
    let initial_best = population.best_fitness();
    let mut best_genes = {
        let idx = elite_indices(&population, 1)[0];
        population.members[idx].genes().to_vec()
    };
    let mut best_fitness = initial_best;
    let mut time_to_best = evaluator.decodes;

    let n = view.ids.len();
    let ps = config.population_size;
    let mut log = ConvergenceLog::default();
    let mut generation = 0u64;

    loop {
        if let Some(max) = config.max_generations {
            if generation >= max {
                break;
            }
        }
        if let Some(limit) = deadline {
            if started.elapsed() >= limit {
                break;
            }
        }
        generation += 1;

        let elites = elite_indices(&population, config.elite_count);
        let mut members: Vec<ActivityList> =
            elites.iter().map(|&i| population.members[i].clone()).collect();
        let mut fitnesses: Vec<Tick> = elites.iter().map(|&i| population.fitnesses[i]).collect();

        let cumulative = cumulative_intervals(&selection_probabilities(&population.fitnesses)?);
        let mut offspring: Vec<Vec<ActivityId>> = Vec::with_capacity(ps - elites.len());
        while offspring.len() < ps - elites.len() {
            let p1 = &population.members[pick_interval(&cumulative, rng.random::<f64>())];
            let p2 = &population.members[pick_interval(&cumulative, rng.random::<f64>())];
            let crossed = gate(rng.random::<f64>(), config.crossover_prob) && n >= 2;
            let (mut c1, mut c2) = if crossed {
                apply_crossover(config.crossover, p1.genes(), p2.genes(), n, &mut rng)
            } else {
                (p1.genes().to_vec(), p2.genes().to_vec())
            };
            for child in [&mut c1, &mut c2] {
                if gate(rng.random::<f64>(), config.mutation_prob) && n >= 2 {
                    apply_mutation(config.mutation, child, &mut rng);
                }
            }
            offspring.push(c1);
            offspring.push(c2);
        }
        offspring.truncate(ps - elites.len());

        for genes in offspring {
            let repaired = list::repair_order(&view, &genes);
            fitnesses.push(evaluator.fitness(&repaired)?);
            members.push(ActivityList::known_feasible(repaired));
        }

        population = Population { members, fitnesses, generation };

        let generation_best = population.best_fitness();
        if generation_best < best_fitness {
            best_fitness = generation_best;
            let idx = elite_indices(&population, 1)[0];
            best_genes = population.members[idx].genes().to_vec();
            time_to_best = evaluator.decodes;
        }
        let mean = population.fitnesses.iter().sum::<Tick>() as f64 / ps as f64;
        log.records.push(ConvergenceRecord {
            generation,
            best_ticks: generation_best,
            mean_ticks: mean,
            elapsed_ms: evaluator.decodes,
        });
    }

    let best_schedule = decoder.schedule(&best_genes, config.policy, &mut evaluator.scratch)?;
    Ok(GaResult {
        best: ActivityList::known_feasible(best_genes),
        best_makespan: best_fitness,
        best_makespan_days: best_fitness as f64 / instance.ticks_per_day,
        best_schedule,
        initial_best,
        generations: generation,
        evaluations: evaluator.decodes,
        time_to_best_ms: time_to_best,
        wall_time: started.elapsed(),
        log,
    })
}

fn apply_crossover<R: Rng>(
    kind: CrossoverKind,
    p1: &[ActivityId],
    p2: &[ActivityId],
    n: usize,
    rng: &mut R,
) -> (Vec<ActivityId>, Vec<ActivityId>) {
    match kind {
        CrossoverKind::Pmx => {
            let (cut1, cut2) = distinct_pair(rng, n + 1);
            let a = crossover::pmx(
                &ActivityList::unrepaired(p1.to_vec()),
                &ActivityList::unrepaired(p2.to_vec()),
                cut1.min(cut2),
                cut1.max(cut2),
            )
            .expect("population members are permutations of the same ids");
            (a.0.into_genes(), a.1.into_genes())
        }
        CrossoverKind::Pbx => {
            // Each position kept with probability 1/2; resample the mask if
            // it would keep nothing or everything.
            let keep: Vec<usize> = loop {
                let mask: Vec<usize> = (0..n).filter(|_| rng.random::<bool>()).collect();
                if !mask.is_empty() && mask.len() < n {
                    break mask;
                }
            };
            let a = crossover::pbx(
                &ActivityList::unrepaired(p1.to_vec()),
                &ActivityList::unrepaired(p2.to_vec()),
                &keep,
            )
            .expect("population members are permutations of the same ids");
            (a.0.into_genes(), a.1.into_genes())
        }
    }
}

fn apply_mutation<R: Rng>(kind: MutationKind, genes: &mut Vec<ActivityId>, rng: &mut R) {
    let n = genes.len();
    let (a, b) = distinct_pair(rng, n);
    match kind {
        MutationKind::Swap => genes.swap(a, b),
        MutationKind::Insert => {
            let gene = genes.remove(a);
            genes.insert(b, gene);
        }
    }
}

/// An operator fires when its draw falls strictly below the probability.
fn gate(draw: f64, probability: f64) -> bool {
    draw < probability
}

/// Two distinct uniform draws from `0..bound` (resampling the second).
fn distinct_pair<R: Rng>(rng: &mut R, bound: usize) -> (usize, usize) {
    debug_assert!(bound >= 2);
    let first = rng.random_range(0..bound);
    loop {
        let second = rng.random_range(0..bound);
        if second != first {
            return (first, second);
        }
    }
}
