//! Dispatching rules that seed the initial population with
//! precedence-feasible activity lists.

use std::fmt;

use rand::Rng;

use crate::ga::list::{ActivityList, NetworkView};
use crate::ga::GaError;
use crate::model::{critical_path, ActivityId, Instance, Tick};

/// Eligible-set priority rules. CP rules rank by tail length (longest path
/// from the activity to completion, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispatchRule {
    /// Shortest processing time first.
    Spt,
    /// Longest processing time first.
    Lpt,
    /// Longest tail first, ties by shortest duration.
    CpSpt,
    /// Longest tail first, ties by longest duration.
    CpLpt,
    /// Uniform over the eligible set.
    Random,
}

impl DispatchRule {
    pub const ALL: [DispatchRule; 5] = [
        DispatchRule::Spt,
        DispatchRule::Lpt,
        DispatchRule::CpSpt,
        DispatchRule::CpLpt,
        DispatchRule::Random,
    ];
}

impl fmt::Display for DispatchRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DispatchRule::Spt => "spt",
            DispatchRule::Lpt => "lpt",
            DispatchRule::CpSpt => "cp-spt",
            DispatchRule::CpLpt => "cp-lpt",
            DispatchRule::Random => "random",
        };
        write!(f, "{name}")
    }
}

/// Builds a feasible list by repeatedly taking the rule's favourite from the
/// eligible set. Remaining ties go to the lowest activity id, or uniformly
/// at random when `perturb` is set (used to diversify duplicate seeds).
pub fn dispatch_list<R: Rng>(
    instance: &Instance,
    rule: DispatchRule,
    rng: &mut R,
    perturb: bool,
) -> Result<ActivityList, GaError> {
    let view = NetworkView::new(instance)?;
    let info = critical_path(instance)?;
    let tails: Vec<Tick> = view.ids.iter().map(|id| info.tail(*id).unwrap()).collect();
    Ok(ActivityList::known_feasible(dispatch_order(&view, &tails, rule, rng, perturb)))
}

pub(crate) fn dispatch_order<R: Rng>(
    view: &NetworkView,
    tails: &[Tick],
    rule: DispatchRule,
    rng: &mut R,
    perturb: bool,
) -> Vec<ActivityId> {
    let n = view.ids.len();
    let mut indegree: Vec<u32> = view.preds.iter().map(|p| p.len() as u32).collect();
    let mut eligible: Vec<u32> = (0..n as u32).filter(|&i| indegree[i as usize] == 0).collect();
    let mut out = Vec::with_capacity(n);

    while !eligible.is_empty() {
        let slot = if rule == DispatchRule::Random {
            if eligible.len() == 1 { 0 } else { rng.random_range(0..eligible.len()) }
        } else {
            // Collect the tie set under the rule's priority key, then break
            // remaining ties deterministically or randomly.
            let mut tied: Vec<usize> = vec![0];
            for slot in 1..eligible.len() {
                let cmp = compare(rule, view, tails, eligible[slot], eligible[tied[0]]);
                match cmp {
                    std::cmp::Ordering::Less => {
                        tied.clear();
                        tied.push(slot);
                    }
                    std::cmp::Ordering::Equal => tied.push(slot),
                    std::cmp::Ordering::Greater => {}
                }
            }
            if tied.len() == 1 {
                tied[0]
            } else if perturb {
                tied[rng.random_range(0..tied.len())]
            } else {
                *tied
                    .iter()
                    .min_by_key(|&&slot| view.ids[eligible[slot] as usize])
                    .unwrap()
            }
        };

        let idx = eligible.swap_remove(slot);
        out.push(view.ids[idx as usize]);
        for &s in &view.succs[idx as usize] {
            indegree[s as usize] -= 1;
            if indegree[s as usize] == 0 {
                eligible.push(s);
            }
        }
    }
    debug_assert_eq!(out.len(), n);
    out
}

/// Less = `a` is preferred over `b`.
fn compare(
    rule: DispatchRule,
    view: &NetworkView,
    tails: &[Tick],
    a: u32,
    b: u32,
) -> std::cmp::Ordering {
    let (da, db) = (view.durations[a as usize], view.durations[b as usize]);
    let (ta, tb) = (tails[a as usize], tails[b as usize]);
    match rule {
        DispatchRule::Spt => da.cmp(&db),
        DispatchRule::Lpt => db.cmp(&da),
        DispatchRule::CpSpt => tb.cmp(&ta).then(da.cmp(&db)),
        DispatchRule::CpLpt => tb.cmp(&ta).then(db.cmp(&da)),
        DispatchRule::Random => std::cmp::Ordering::Equal,
    }
}

/// Round-robin rule assignment for a population of the given size, in the
/// order SPT, LPT, CP-SPT, CP-LPT, RANDOM.
pub fn initial_rule_allocation(population_size: usize) -> Vec<DispatchRule> {
    (0..population_size).map(|i| DispatchRule::ALL[i % DispatchRule::ALL.len()]).collect()
}
