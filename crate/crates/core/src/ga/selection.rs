//! Parent selection: reciprocal-fitness roulette wheel plus elitism.

use rand::Rng;

use crate::ga::list::ActivityList;
use crate::ga::{GaError, Population};
use crate::model::Tick;

/// Reciprocal of a makespan, the weight a member gets on the wheel.
/// A zero makespan means every duration is zero and the weights are
/// undefined, so it is rejected as a degenerate instance.
pub fn reciprocal_fitness(fitness: Tick) -> Result<f64, GaError> {
    if fitness == 0 {
        return Err(GaError::DegenerateInstance);
    }
    Ok(1.0 / fitness as f64)
}

/// Normalised selection probabilities: lower makespan, higher probability.
pub fn selection_probabilities(fitnesses: &[Tick]) -> Result<Vec<f64>, GaError> {
    let reciprocals: Vec<f64> =
        fitnesses.iter().map(|&f| reciprocal_fitness(f)).collect::<Result<_, _>>()?;
    let total: f64 = reciprocals.iter().sum();
    Ok(reciprocals.into_iter().map(|r| r / total).collect())
}

/// Running sums of the probabilities: the wheel's interval boundaries.
pub fn cumulative_intervals(probabilities: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    probabilities
        .iter()
        .map(|p| {
            sum += p;
            sum
        })
        .collect()
}

/// Inverts one uniform draw in `[0, 1)` against the cumulative intervals.
pub fn pick_interval(cumulative: &[f64], draw: f64) -> usize {
    for (i, &bound) in cumulative.iter().enumerate() {
        if draw < bound {
            return i;
        }
    }
    // Rounding may leave the last bound a hair under 1.
    cumulative.len() - 1
}

/// Draws one parent with probability proportional to reciprocal fitness.
pub fn roulette_select<'p, R: Rng>(
    population: &'p Population,
    rng: &mut R,
) -> Result<&'p ActivityList, GaError> {
    let cumulative = cumulative_intervals(&selection_probabilities(&population.fitnesses)?);
    let index = pick_interval(&cumulative, rng.random::<f64>());
    Ok(&population.members[index])
}

/// Indices of the `k` lowest-makespan members, ties broken by earlier
/// population index. These are copied unchanged into the next generation.
pub fn elite_indices(population: &Population, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.members.len()).collect();
    order.sort_by_key(|&i| (population.fitnesses[i], i));
    order.truncate(k);
    order
}
