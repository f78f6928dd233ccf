//! Exhaustive ground truth for small instances: enumerate every
//! precedence-feasible activity list and take the best decoded makespan.
//! The optimum is relative to the serial decoder, which is exactly the
//! search space the genetic algorithm can reach.

use std::time::{Duration, Instant};

use crate::ga::ActivityList;
use crate::model::{ActivityId, Instance, Tick};
use crate::sgs::{Decoder, Policy, SgsError};

use crate::ga::list::NetworkView;

pub const DEFAULT_VISIT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    InvalidInstance(#[from] crate::model::InvalidInstance),
    #[error(transparent)]
    Sgs(#[from] SgsError),
    #[error("more than {cap} feasible lists; instance too large for exhaustive search")]
    VisitCapExceeded { cap: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimal_makespan: Tick,
    pub optimal_list: ActivityList,
    /// Number of precedence-feasible permutations of the instance.
    pub feasible_lists: u64,
    pub elapsed: Duration,
}

/// Visits every precedence-feasible permutation exactly once (backtracking
/// over eligible sets) and returns how many there were. Aborts with an error
/// once `cap` lists have been visited.
pub fn enumerate_feasible_lists<F>(
    instance: &Instance,
    cap: u64,
    mut visitor: F,
) -> Result<u64, OracleError>
where
    F: FnMut(&[ActivityId]),
{
    let view = NetworkView::new(instance)?;
    let n = view.ids.len();
    let mut indegree: Vec<u32> = view.preds.iter().map(|p| p.len() as u32).collect();
    let mut eligible: Vec<u32> = (0..n as u32).filter(|&i| indegree[i as usize] == 0).collect();
    let mut current: Vec<ActivityId> = Vec::with_capacity(n);
    let mut count = 0u64;

    fn recurse<F: FnMut(&[ActivityId])>(
        view: &NetworkView,
        indegree: &mut Vec<u32>,
        eligible: &mut Vec<u32>,
        current: &mut Vec<ActivityId>,
        count: &mut u64,
        cap: u64,
        visitor: &mut F,
    ) -> Result<(), OracleError> {
        if current.len() == view.ids.len() {
            *count += 1;
            if *count > cap {
                return Err(OracleError::VisitCapExceeded { cap });
            }
            visitor(current);
            return Ok(());
        }
        // Each eligible activity heads its own branch; the eligible set is
        // restored on backtrack.
        for slot in 0..eligible.len() {
            let idx = eligible[slot];
            current.push(view.ids[idx as usize]);
            let removed = eligible.swap_remove(slot);
            let newly_ready_from = eligible.len();
            for &s in &view.succs[idx as usize] {
                indegree[s as usize] -= 1;
                if indegree[s as usize] == 0 {
                    eligible.push(s);
                }
            }
            recurse(view, indegree, eligible, current, count, cap, visitor)?;
            eligible.truncate(newly_ready_from);
            for &s in &view.succs[idx as usize] {
                indegree[s as usize] += 1;
            }
            eligible.push(removed);
            let last = eligible.len() - 1;
            eligible.swap(slot, last);
            current.pop();
        }
        Ok(())
    }

    recurse(&view, &mut indegree, &mut eligible, &mut current, &mut count, cap, &mut visitor)?;
    Ok(count)
}

/// Minimum makespan over every feasible list under the serial decoder.
/// Start times are allocation-invariant, so EST and WEST oracles agree; the
/// policy only shapes the unit labels of the reported optimal schedule.
pub fn brute_force_optimum(
    instance: &Instance,
    policy: Policy,
    visit_cap: u64,
) -> Result<OracleResult, OracleError> {
    let _ = policy;
    let started = Instant::now();
    let decoder = Decoder::new(instance)?;
    let mut scratch = decoder.new_scratch();
    let mut best: Option<(Tick, Vec<ActivityId>)> = None;
    let mut failure: Option<SgsError> = None;

    let feasible_lists = enumerate_feasible_lists(instance, visit_cap, |list| {
        if failure.is_some() {
            return;
        }
        match decoder.makespan(list, &mut scratch) {
            Ok(makespan) => {
                if best.as_ref().is_none_or(|(b, _)| makespan < *b) {
                    best = Some((makespan, list.to_vec()));
                }
            }
            Err(err) => failure = Some(err),
        }
    })?;
    if let Some(err) = failure {
        return Err(err.into());
    }

    let (optimal_makespan, genes) = best.expect("valid instances admit at least one feasible list");
    Ok(OracleResult {
        optimal_makespan,
        optimal_list: ActivityList::known_feasible(genes),
        feasible_lists,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Activity, ResourceGroup};
    use std::collections::{BTreeMap, BTreeSet};

    fn t1() -> Instance {
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

    fn independent(n: u32) -> Instance {
        Instance {
            name: format!("indep{n}"),
            ticks_per_day: 1.0,
            activities: (1..=n)
                .map(|id| Activity {
                    id,
                    duration: 1,
                    workgroup: "default".into(),
                    demands: BTreeMap::new(),
                })
                .collect(),
            groups: vec![],
            precedence: BTreeSet::new(),
        }
    }

    #[test]
    fn t1_has_exactly_two_feasible_lists() {
        let mut lists = Vec::new();
        let count =
            enumerate_feasible_lists(&t1(), DEFAULT_VISIT_CAP, |l| lists.push(l.to_vec())).unwrap();
        assert_eq!(count, 2);
        lists.sort();
        assert_eq!(lists, vec![vec![1, 2, 3, 4], vec![2, 1, 3, 4]]);
    }

    #[test]
    fn a_chain_has_one_feasible_list() {
        let inst = Instance {
            name: "chain".into(),
            ticks_per_day: 1.0,
            activities: (1..=5)
                .map(|id| Activity {
                    id,
                    duration: 1,
                    workgroup: "default".into(),
                    demands: BTreeMap::new(),
                })
                .collect(),
            groups: vec![],
            precedence: BTreeSet::from([(1, 2), (2, 3), (3, 4), (4, 5)]),
        };
        assert_eq!(enumerate_feasible_lists(&inst, DEFAULT_VISIT_CAP, |_| {}).unwrap(), 1);
    }

    #[test]
    fn independent_activities_have_factorial_many_lists() {
        assert_eq!(enumerate_feasible_lists(&independent(4), DEFAULT_VISIT_CAP, |_| {}).unwrap(), 24);
    }

    #[test]
    fn the_cap_aborts_enumeration() {
        assert_eq!(
            enumerate_feasible_lists(&independent(6), 100, |_| {}).unwrap_err(),
            OracleError::VisitCapExceeded { cap: 100 }
        );
    }

    #[test]
    fn t1_optimum_is_six() {
        let result = brute_force_optimum(&t1(), Policy::Est, DEFAULT_VISIT_CAP).unwrap();
        assert_eq!(result.optimal_makespan, 6);
        assert_eq!(result.feasible_lists, 2);
    }

    #[test]
    fn t2_optimum_runs_the_join_in_parallel() {
        let inst = Instance {
            name: "t2".into(),
            ticks_per_day: 1.0,
            activities: (1..=3)
                .map(|id| Activity {
                    id,
                    duration: 2,
                    workgroup: "default".into(),
                    demands: BTreeMap::from([(1, 1)]),
                })
                .collect(),
            groups: vec![ResourceGroup { id: 1, name: "crew".into(), capacity: 2 }],
            precedence: BTreeSet::from([(1, 3), (2, 3)]),
        };
        assert_eq!(brute_force_optimum(&inst, Policy::Est, DEFAULT_VISIT_CAP).unwrap().optimal_makespan, 4);
    }

    #[test]
    fn relaxed_capacity_optimum_is_the_critical_path() {
        let mut inst = t1();
        inst.groups[0].capacity = 50;
        let result = brute_force_optimum(&inst, Policy::West, DEFAULT_VISIT_CAP).unwrap();
        assert_eq!(result.optimal_makespan, crate::model::critical_path(&inst).unwrap().cp_length);
    }
}
