//! Shared fixtures and random generators for the integration suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rcpsp_ga::ga::{dispatch_list, DispatchRule};
use rcpsp_ga::model::{Activity, ActivityId, Instance, ResourceGroup, Tick};

/// Two parallel starters joining into a chain: 1 -> 3, 2 -> 3, 3 -> 4;
/// durations 2, 3, 2, 1; one capacity-2 group.
pub fn t1() -> Instance {
    let durations = [2, 3, 2, 1];
    Instance {
        name: "t1".into(),
        ticks_per_day: 1.0,
        activities: (1..=4)
            .map(|id| Activity {
                id,
                duration: durations[id as usize - 1],
                workgroup: "default".into(),
                demands: BTreeMap::from([(1, if id == 3 { 2 } else { 1 })]),
            })
            .collect(),
        groups: vec![ResourceGroup { id: 1, name: "crew".into(), capacity: 2 }],
        precedence: BTreeSet::from([(1, 3), (2, 3), (3, 4)]),
    }
}

/// The workgroup-affinity fixture: a1 (W-B) and a2 (W-A) in parallel,
/// a3 (W-A) after both, one capacity-2 group.
pub fn t2() -> Instance {
    let workgroups = ["W-B", "W-A", "W-A"];
    Instance {
        name: "t2".into(),
        ticks_per_day: 1.0,
        activities: (1..=3)
            .map(|id| Activity {
                id,
                duration: 2,
                workgroup: workgroups[id as usize - 1].into(),
                demands: BTreeMap::from([(1, 1)]),
            })
            .collect(),
        groups: vec![ResourceGroup { id: 1, name: "crew".into(), capacity: 2 }],
        precedence: BTreeSet::from([(1, 3), (2, 3)]),
    }
}

/// A random valid instance: up to `max_activities` activities, random DAG
/// arcs (forward edges only), 1-3 groups with capacities 1-3, durations
/// 1-9, demands within capacity, workgroups from a small pool.
pub fn random_instance(rng: &mut ChaCha8Rng, max_activities: usize) -> Instance {
    let n = rng.random_range(1..=max_activities.max(1));
    let group_count = rng.random_range(1..=3u32);
    let groups: Vec<ResourceGroup> = (1..=group_count)
        .map(|id| ResourceGroup {
            id,
            name: format!("g{id}"),
            capacity: rng.random_range(1..=3),
        })
        .collect();
    let workgroups = ["alpha", "beta", "gamma"];
    let density = rng.random_range(0.1..0.6);

    let activities: Vec<Activity> = (1..=n as u32)
        .map(|id| {
            let mut demands = BTreeMap::new();
            for g in &groups {
                if rng.random::<f64>() < 0.7 {
                    let units = rng.random_range(0..=g.capacity);
                    if units > 0 {
                        demands.insert(g.id, units);
                    }
                }
            }
            Activity {
                id,
                duration: rng.random_range(1..=9),
                workgroup: workgroups[rng.random_range(0..workgroups.len())].into(),
                demands,
            }
        })
        .collect();

    let mut precedence = BTreeSet::new();
    for i in 1..=n as u32 {
        for j in (i + 1)..=n as u32 {
            if rng.random::<f64>() < density {
                precedence.insert((i, j));
            }
        }
    }

    Instance { name: format!("random-{n}"), ticks_per_day: 1.0, activities, groups, precedence }
}

/// A uniformly random precedence-feasible list for the instance.
pub fn random_feasible_list(instance: &Instance, rng: &mut ChaCha8Rng) -> Vec<ActivityId> {
    dispatch_list(instance, DispatchRule::Random, rng, true)
        .expect("random instances are valid")
        .into_genes()
}

/// The instance with every capacity raised above the total demand, so
/// resources never constrain a schedule.
pub fn relaxed(instance: &Instance) -> Instance {
    let mut relaxed = instance.clone();
    for group in &mut relaxed.groups {
        let total: u32 =
            instance.activities.iter().map(|a| a.demands.get(&group.id).copied().unwrap_or(0)).sum();
        group.capacity = total.max(group.capacity) + 1;
    }
    relaxed
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Total tick span an instance can possibly need.
pub fn duration_sum(instance: &Instance) -> Tick {
    instance.activities.iter().map(|a| a.duration).sum()
}
