//! Full-factorial parameter sweeps, best-setting and plan-comparison
//! tables, and the synthetic instance generator.
//!
//! Sweep cells are independent and run in parallel; result rows are merged
//! in cell order no matter which finished first, and every row records the
//! sub-seed that reproduces it.

mod generate;

pub use generate::{generate_instance, GeneratorSpec};

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ga::{evolve, CrossoverKind, GaConfig, GaError, MutationKind};
use crate::io::write_convergence;
use crate::model::{Instance, Tick};
use crate::sgs::{metrics, Policy};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ExperimentError {
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("invalid generator spec: {0}")]
    InvalidGenerator(String),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error("failed to write {path}: {message}")]
    Write { path: String, message: String },
    #[error("comparison needs at least two rows")]
    TooFewPlans,
    #[error("baseline makespan must be positive")]
    ZeroBaseline,
}

/// Factor levels of a full-factorial sweep. The default levels are the
/// benchmark design: Ps in {5, 10, 30, 60, 100}, Pc in {0.7, 0.8, 0.9},
/// Pm in {0.01, 0.05, 0.1}, both crossovers, both mutations, both policies:
/// 360 runs at one seed per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub population_sizes: Vec<usize>,
    pub crossover_probs: Vec<f64>,
    pub mutation_probs: Vec<f64>,
    pub crossover_kinds: Vec<CrossoverKind>,
    pub mutation_kinds: Vec<MutationKind>,
    pub policies: Vec<Policy>,
    pub elite_count: usize,
    /// Per-run wall-clock budget.
    pub time_budget_ms: Option<u64>,
    /// Per-run generation cap. Use this (with no time budget) when sweep
    /// rows must reproduce exactly.
    pub max_generations: Option<u64>,
    pub seeds_per_cell: u32,
    pub base_seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            population_sizes: vec![5, 10, 30, 60, 100],
            crossover_probs: vec![0.7, 0.8, 0.9],
            mutation_probs: vec![0.01, 0.05, 0.1],
            crossover_kinds: vec![CrossoverKind::Pmx, CrossoverKind::Pbx],
            mutation_kinds: vec![MutationKind::Swap, MutationKind::Insert],
            policies: vec![Policy::Est, Policy::West],
            elite_count: 1,
            time_budget_ms: Some(2_000),
            max_generations: None,
            seeds_per_cell: 1,
            base_seed: 42,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |msg: &str| Err(ExperimentError::InvalidSpec(msg.into()));
        if self.population_sizes.is_empty()
            || self.crossover_probs.is_empty()
            || self.mutation_probs.is_empty()
            || self.crossover_kinds.is_empty()
            || self.mutation_kinds.is_empty()
            || self.policies.is_empty()
        {
            return fail("every factor needs at least one level");
        }
        if self.time_budget_ms == Some(0) {
            return fail("time budget must be positive");
        }
        if self.time_budget_ms.is_none() && self.max_generations.is_none() {
            return fail("set time_budget_ms and/or max_generations");
        }
        if self.seeds_per_cell == 0 {
            return fail("seeds_per_cell must be positive");
        }
        let min_ps = *self.population_sizes.iter().min().expect("non-empty");
        if min_ps < 2 {
            return fail("population sizes must be at least 2");
        }
        if self.elite_count == 0 || self.elite_count >= min_ps {
            return fail("elite count must be in 1..smallest population size");
        }
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.population_sizes.len()
            * self.crossover_probs.len()
            * self.mutation_probs.len()
            * self.crossover_kinds.len()
            * self.mutation_kinds.len()
            * self.policies.len()
            * self.seeds_per_cell as usize
    }
}

/// One sweep run: the full parameter tuple, its sub-seed, and what it found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub row: usize,
    pub cell: usize,
    pub policy: Policy,
    pub population_size: usize,
    pub crossover: CrossoverKind,
    pub crossover_prob: f64,
    pub mutation: MutationKind,
    pub mutation_prob: f64,
    pub seed_index: u32,
    /// Seed that reproduces this row when plugged into the same config.
    pub sub_seed: u64,
    pub best_ticks: Tick,
    pub best_days: f64,
    /// Work-clock reading when the final best first appeared.
    pub time_to_best_ms: u64,
    pub generations: u64,
    pub evaluations: u64,
    pub peak_demand: u64,
    pub distinct_units: u64,
    pub unit_moves: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Where per-run convergence CSVs go.
pub enum ConvergenceSink<'a> {
    Discard,
    Directory(&'a Path),
}

/// Runs every cell x seed combination, in parallel, each with an isolated
/// deterministic sub-seed. Per-run failures land in the row's `error`
/// column and the sweep continues.
pub fn run_sweep(
    instance: &Instance,
    spec: &SweepSpec,
    sink: ConvergenceSink<'_>,
) -> Result<SweepResult, ExperimentError> {
    spec.validate()?;

    struct Plan {
        row: usize,
        cell: usize,
        seed_index: u32,
        config: GaConfig,
    }

    let mut plans = Vec::with_capacity(spec.row_count());
    let mut cell = 0usize;
    for &policy in &spec.policies {
        for &population_size in &spec.population_sizes {
            for &crossover_prob in &spec.crossover_probs {
                for &mutation_prob in &spec.mutation_probs {
                    for &crossover in &spec.crossover_kinds {
                        for &mutation in &spec.mutation_kinds {
                            for seed_index in 0..spec.seeds_per_cell {
                                let row = plans.len();
                                plans.push(Plan {
                                    row,
                                    cell,
                                    seed_index,
                                    config: GaConfig {
                                        population_size,
                                        crossover,
                                        crossover_prob,
                                        mutation,
                                        mutation_prob,
                                        policy,
                                        elite_count: spec.elite_count,
                                        max_generations: spec.max_generations,
                                        time_limit_ms: spec.time_budget_ms,
                                        seed: sub_seed(spec.base_seed, row as u64),
                                    },
                                });
                            }
                            cell += 1;
                        }
                    }
                }
            }
        }
    }

    let dir = match &sink {
        ConvergenceSink::Discard => None,
        ConvergenceSink::Directory(path) => Some(*path),
    };

    let rows: Result<Vec<SweepRow>, ExperimentError> = plans
        .par_iter()
        .map(|plan| {
            let mut row = SweepRow {
                row: plan.row,
                cell: plan.cell,
                policy: plan.config.policy,
                population_size: plan.config.population_size,
                crossover: plan.config.crossover,
                crossover_prob: plan.config.crossover_prob,
                mutation: plan.config.mutation,
                mutation_prob: plan.config.mutation_prob,
                seed_index: plan.seed_index,
                sub_seed: plan.config.seed,
                best_ticks: 0,
                best_days: 0.0,
                time_to_best_ms: 0,
                generations: 0,
                evaluations: 0,
                peak_demand: 0,
                distinct_units: 0,
                unit_moves: 0,
                error: None,
            };
            match evolve(instance, &plan.config) {
                Ok(result) => {
                    let m = metrics(&result.best_schedule);
                    row.best_ticks = result.best_makespan;
                    row.best_days = result.best_makespan_days;
                    row.time_to_best_ms = result.time_to_best_ms;
                    row.generations = result.generations;
                    row.evaluations = result.evaluations;
                    row.peak_demand = m.peak_demand;
                    row.distinct_units = m.distinct_units;
                    row.unit_moves = m.unit_moves;
                    if let Some(dir) = dir {
                        let path = dir.join(format!("run_{:04}.csv", plan.row));
                        let csv = write_convergence(&result.log, instance.ticks_per_day);
                        std::fs::write(&path, csv).map_err(|e| ExperimentError::Write {
                            path: path.display().to_string(),
                            message: e.to_string(),
                        })?;
                    }
                }
                Err(err) => row.error = Some(err.to_string()),
            }
            Ok(row)
        })
        .collect();

    Ok(SweepResult { rows: rows? })
}

/// SplitMix64 finalizer over the base seed and row index: well-spread,
/// reproducible sub-seeds.
fn sub_seed(base: u64, row: u64) -> u64 {
    let mut z = base.wrapping_add((row + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per policy: the rows achieving that policy's minimum makespan, ordered
/// by time-to-best. The first row of each policy block is its best setting.
/// The output does not depend on the input row order.
pub fn best_settings(result: &SweepResult) -> SweepResult {
    let mut out = Vec::new();
    for policy in [Policy::Est, Policy::West] {
        let candidates: Vec<&SweepRow> = result
            .rows
            .iter()
            .filter(|r| r.policy == policy && r.error.is_none())
            .collect();
        let Some(minimum) = candidates.iter().map(|r| r.best_ticks).min() else {
            continue;
        };
        let mut winners: Vec<SweepRow> = candidates
            .into_iter()
            .filter(|r| r.best_ticks == minimum)
            .cloned()
            .collect();
        winners.sort_by(|a, b| {
            a.time_to_best_ms
                .cmp(&b.time_to_best_ms)
                .then(a.population_size.cmp(&b.population_size))
                .then(a.crossover_prob.total_cmp(&b.crossover_prob))
                .then(a.mutation_prob.total_cmp(&b.mutation_prob))
                .then((a.crossover as u8).cmp(&(b.crossover as u8)))
                .then((a.mutation as u8).cmp(&(b.mutation as u8)))
                .then(a.seed_index.cmp(&b.seed_index))
                .then(a.sub_seed.cmp(&b.sub_seed))
        });
        out.extend(winners);
    }
    SweepResult { rows: out }
}

const SWEEP_HEADER: &str = "row,cell,policy,population_size,crossover,crossover_prob,mutation,mutation_prob,seed_index,sub_seed,best_ticks,best_days,time_to_best_ms,generations,evaluations,peak_demand,distinct_units,unit_moves,error";

/// Renders sweep rows (or a best-settings table) as CSV.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.row,
            r.cell,
            r.policy,
            r.population_size,
            r.crossover,
            r.crossover_prob,
            r.mutation,
            r.mutation_prob,
            r.seed_index,
            r.sub_seed,
            r.best_ticks,
            r.best_days,
            r.time_to_best_ms,
            r.generations,
            r.evaluations,
            r.peak_demand,
            r.distinct_units,
            r.unit_moves,
            r.error.as_deref().unwrap_or("")
        ));
    }
    out
}

/// A named plan for side-by-side comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanRow {
    pub name: String,
    pub makespan_days: f64,
    pub resource_units: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub makespan_days: f64,
    pub resource_units: u64,
    /// Percent reduction in makespan relative to the baseline row.
    pub makespan_improvement_pct: f64,
    /// Percent reduction in resource units relative to the baseline row.
    pub resource_improvement_pct: f64,
}

/// Compares plans against the row at `baseline`, reporting percentage
/// improvements (positive means smaller than the baseline).
pub fn compare_plans(rows: &[PlanRow], baseline: usize) -> Result<Vec<ComparisonRow>, ExperimentError> {
    if rows.len() < 2 {
        return Err(ExperimentError::TooFewPlans);
    }
    let base = rows.get(baseline).ok_or(ExperimentError::TooFewPlans)?;
    if base.makespan_days <= 0.0 {
        return Err(ExperimentError::ZeroBaseline);
    }
    Ok(rows
        .iter()
        .map(|r| ComparisonRow {
            name: r.name.clone(),
            makespan_days: r.makespan_days,
            resource_units: r.resource_units,
            makespan_improvement_pct: (base.makespan_days - r.makespan_days) / base.makespan_days
                * 100.0,
            resource_improvement_pct: if base.resource_units == 0 {
                0.0
            } else {
                (base.resource_units as f64 - r.resource_units as f64)
                    / base.resource_units as f64
                    * 100.0
            },
        })
        .collect())
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(
        "name,makespan_days,resource_units,makespan_improvement_pct,resource_improvement_pct\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.name, r.makespan_days, r.resource_units, r.makespan_improvement_pct, r.resource_improvement_pct
        ));
    }
    out
}
