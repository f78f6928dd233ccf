//! Deterministic synthetic instance generator: a layered DAG with
//! configurable size, density, workgroups, and resource shape. Stands in
//! for confidential industrial project networks at any scale.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::experiment::ExperimentError;
use crate::model::{validate_instance, Activity, Instance, ResourceGroup, Tick};

/// Hangar-area names used for the first few workgroups.
const AREA_NAMES: [&str; 5] = ["cockpit", "door", "galley", "interior", "lavatory"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorSpec {
    pub activities: u32,
    pub workgroups: u32,
    pub resource_groups: u32,
    /// Inclusive capacity range sampled per group.
    pub capacity_range: (u32, u32),
    /// Inclusive duration range sampled per activity.
    pub duration_range: (Tick, Tick),
    /// Inclusive units range sampled per demanded group; the maximum must
    /// not exceed the minimum capacity or the spec is unsatisfiable.
    pub demand_range: (u32, u32),
    /// Probability of an arc between activities in increasing layers.
    pub precedence_density: f64,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            activities: 317,
            workgroups: 5,
            resource_groups: 12,
            capacity_range: (2, 6),
            duration_range: (1, 9),
            demand_range: (1, 2),
            precedence_density: 0.05,
            seed: 42,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |msg: String| Err(ExperimentError::InvalidGenerator(msg));
        if self.activities == 0 {
            return fail("activity count must be positive".into());
        }
        if self.workgroups == 0 {
            return fail("workgroup count must be positive".into());
        }
        if self.resource_groups == 0 {
            return fail("resource group count must be positive".into());
        }
        for (name, (lo, hi)) in [
            ("capacity_range", self.capacity_range),
            ("demand_range", self.demand_range),
        ] {
            if lo > hi {
                return fail(format!("{name} is reversed: {lo} > {hi}"));
            }
        }
        if self.duration_range.0 > self.duration_range.1 {
            return fail(format!(
                "duration_range is reversed: {} > {}",
                self.duration_range.0, self.duration_range.1
            ));
        }
        if self.capacity_range.0 == 0 {
            return fail("capacities must be at least 1".into());
        }
        if self.demand_range.1 > self.capacity_range.0 {
            return fail(format!(
                "demand range exceeds capacity range: a demand of {} may not fit capacity {}",
                self.demand_range.1, self.capacity_range.0
            ));
        }
        if !(0.0..=1.0).contains(&self.precedence_density) {
            return fail(format!("precedence density {} outside [0, 1]", self.precedence_density));
        }
        Ok(())
    }
}

/// Generates an instance deterministically from the spec's seed. Arcs only
/// point from lower to higher layers, so the network is acyclic by
/// construction.
pub fn generate_instance(spec: &GeneratorSpec) -> Result<Instance, ExperimentError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.activities as usize;

    let groups: Vec<ResourceGroup> = (0..spec.resource_groups)
        .map(|g| ResourceGroup {
            id: g + 1,
            name: format!("rg{}", g + 1),
            capacity: rng.random_range(spec.capacity_range.0..=spec.capacity_range.1),
        })
        .collect();

    let workgroup_name = |w: u32| -> String {
        AREA_NAMES.get(w as usize).map(|s| s.to_string()).unwrap_or_else(|| format!("area{}", w + 1))
    };

    // Evenly spread layer assignment keeps parallelism at every depth.
    let layer_count = (n as f64).sqrt().round().max(1.0) as usize;
    let layer_of = |i: usize| i * layer_count / n;

    let mut activities = Vec::with_capacity(n);
    for i in 0..n {
        let duration = rng.random_range(spec.duration_range.0..=spec.duration_range.1);
        let group_picks = rng.random_range(1..=spec.resource_groups.min(2));
        let mut picked = BTreeSet::new();
        while picked.len() < group_picks as usize {
            picked.insert(rng.random_range(0..spec.resource_groups));
        }
        let mut demands = BTreeMap::new();
        for g in picked {
            let units = rng.random_range(spec.demand_range.0..=spec.demand_range.1);
            if units > 0 {
                demands.insert(g + 1, units);
            }
        }
        activities.push(Activity {
            id: i as u32 + 1,
            duration,
            workgroup: workgroup_name(i as u32 % spec.workgroups),
            demands,
        });
    }

    let mut precedence = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if layer_of(j) > layer_of(i) && rng.random::<f64>() < spec.precedence_density {
                precedence.insert((i as u32 + 1, j as u32 + 1));
            }
        }
    }

    let instance = Instance {
        name: format!("synthetic-n{}-s{}", spec.activities, spec.seed),
        ticks_per_day: 1.0,
        activities,
        groups,
        precedence,
    };
    debug_assert!(validate_instance(&instance).is_valid());
    Ok(instance)
}
