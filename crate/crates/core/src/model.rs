//! Project network model: activities, renewable resource groups, precedence
//! arcs, structural validation, and the resource-free critical path.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub type ActivityId = u32;
pub type GroupId = u32;
/// Integer time unit of the scheduler. Conversion to days happens only at
/// reporting boundaries via [`Instance::ticks_per_day`].
pub type Tick = u64;

/// A single project activity (task).
#[derive(Debug, Clone, PartialEq)]
pub struct Activity {
    pub id: ActivityId,
    /// Duration in ticks; zero is allowed for milestone/dummy activities.
    pub duration: Tick,
    /// Hangar-area label used by the WEST unit-allocation policy.
    pub workgroup: String,
    /// Units required per resource group for the whole duration.
    pub demands: BTreeMap<GroupId, u32>,
}

/// A pool of identical, individually identified resource units.
/// Unit ids are dense `1..=capacity`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGroup {
    pub id: GroupId,
    pub name: String,
    pub capacity: u32,
}

/// An immutable scheduling problem: activities, precedence arcs, and
/// resource groups. All solver operations are pure functions over this.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    /// Display scale for rendering makespans in days.
    pub ticks_per_day: f64,
    pub activities: Vec<Activity>,
    pub groups: Vec<ResourceGroup>,
    /// Arcs `(predecessor, successor)`.
    pub precedence: BTreeSet<(ActivityId, ActivityId)>,
}

impl Instance {
    pub fn activity(&self, id: ActivityId) -> Option<&Activity> {
        self.activities.iter().find(|a| a.id == id)
    }

    pub fn group(&self, id: GroupId) -> Option<&ResourceGroup> {
        self.groups.iter().find(|g| g.id == id)
    }

    /// Renders a tick count on the day scale.
    pub fn days(&self, ticks: Tick) -> f64 {
        ticks as f64 / self.ticks_per_day
    }
}

/// One structural problem found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoActivities,
    NonPositiveTickScale { ticks_per_day: f64 },
    DuplicateActivityId { id: ActivityId },
    DuplicateGroupId { id: GroupId },
    ZeroCapacityGroup { id: GroupId },
    /// An arc endpoint does not name an existing activity.
    DanglingArc { pred: ActivityId, succ: ActivityId, missing: ActivityId },
    /// A demand references a group id that does not exist.
    UnknownDemandGroup { activity: ActivityId, group: GroupId },
    /// The activity can never run: it wants more units than the group has.
    DemandExceedsCapacity { activity: ActivityId, group: GroupId, demand: u32, capacity: u32 },
    /// Members of one strongly connected component of the precedence graph.
    Cycle { members: Vec<ActivityId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoActivities => write!(f, "instance has no activities"),
            Violation::NonPositiveTickScale { ticks_per_day } => {
                write!(f, "ticks_per_day must be positive, got {ticks_per_day}")
            }
            Violation::DuplicateActivityId { id } => write!(f, "duplicate activity id {id}"),
            Violation::DuplicateGroupId { id } => write!(f, "duplicate resource group id {id}"),
            Violation::ZeroCapacityGroup { id } => {
                write!(f, "resource group {id} has zero capacity")
            }
            Violation::DanglingArc { pred, succ, missing } => {
                write!(f, "arc {pred} -> {succ} references unknown activity {missing}")
            }
            Violation::UnknownDemandGroup { activity, group } => {
                write!(f, "activity {activity} demands unknown resource group {group}")
            }
            Violation::DemandExceedsCapacity { activity, group, demand, capacity } => write!(
                f,
                "activity {activity} demands {demand} units of group {group} (capacity {capacity})"
            ),
            Violation::Cycle { members } => {
                let ids: Vec<String> = members.iter().map(|m| m.to_string()).collect();
                write!(f, "precedence cycle through activities {{{}}}", ids.join(", "))
            }
        }
    }
}

/// All violations found in an instance; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "instance is valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Error wrapper for operations that require a valid instance.
#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("invalid instance: {0}")]
pub struct InvalidInstance(pub ValidationReport);

/// Checks every structural invariant and reports all problems instead of
/// stopping at the first.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();

    if instance.activities.is_empty() {
        violations.push(Violation::NoActivities);
    }
    if !instance.ticks_per_day.is_finite() || instance.ticks_per_day <= 0.0 {
        violations.push(Violation::NonPositiveTickScale { ticks_per_day: instance.ticks_per_day });
    }

    let mut seen = BTreeSet::new();
    for a in &instance.activities {
        if !seen.insert(a.id) {
            violations.push(Violation::DuplicateActivityId { id: a.id });
        }
    }
    let mut group_ids = BTreeSet::new();
    for g in &instance.groups {
        if !group_ids.insert(g.id) {
            violations.push(Violation::DuplicateGroupId { id: g.id });
        }
        if g.capacity == 0 {
            violations.push(Violation::ZeroCapacityGroup { id: g.id });
        }
    }

    let capacity: BTreeMap<GroupId, u32> =
        instance.groups.iter().map(|g| (g.id, g.capacity)).collect();
    for a in &instance.activities {
        for (&group, &demand) in &a.demands {
            match capacity.get(&group) {
                None => violations.push(Violation::UnknownDemandGroup { activity: a.id, group }),
                Some(&cap) if demand > cap => violations.push(Violation::DemandExceedsCapacity {
                    activity: a.id,
                    group,
                    demand,
                    capacity: cap,
                }),
                Some(_) => {}
            }
        }
    }

    for &(pred, succ) in &instance.precedence {
        for endpoint in [pred, succ] {
            if !seen.contains(&endpoint) {
                violations.push(Violation::DanglingArc { pred, succ, missing: endpoint });
            }
        }
    }

    for mut members in cyclic_components(instance) {
        members.sort_unstable();
        violations.push(Violation::Cycle { members });
    }

    ValidationReport { violations }
}

/// Resource-free longest-path information over the precedence DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPathInfo {
    /// Longest duration-weighted path in the DAG; a makespan lower bound.
    pub cp_length: Tick,
    /// Per activity: longest path from the activity (inclusive) to any
    /// terminal activity. The priority key of the CP dispatching rules.
    pub tail_lengths: BTreeMap<ActivityId, Tick>,
}

impl CriticalPathInfo {
    pub fn tail(&self, id: ActivityId) -> Option<Tick> {
        self.tail_lengths.get(&id).copied()
    }
}

/// Backward longest-path pass over the DAG. Rejects invalid instances.
pub fn critical_path(instance: &Instance) -> Result<CriticalPathInfo, InvalidInstance> {
    let report = validate_instance(instance);
    if !report.is_valid() {
        return Err(InvalidInstance(report));
    }

    let n = instance.activities.len();
    let index: HashMap<ActivityId, usize> =
        instance.activities.iter().enumerate().map(|(i, a)| (a.id, i)).collect();
    let mut successors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for &(pred, succ) in &instance.precedence {
        successors[index[&pred]].push(index[&succ]);
        indegree[index[&succ]] += 1;
    }

    // Kahn order, then accumulate tails in reverse.
    let mut order = Vec::with_capacity(n);
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = ready.pop() {
        order.push(i);
        for &s in &successors[i] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                ready.push(s);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "validated instances are acyclic");

    let mut tails = vec![0 as Tick; n];
    for &i in order.iter().rev() {
        let best_succ = successors[i].iter().map(|&s| tails[s]).max().unwrap_or(0);
        tails[i] = instance.activities[i].duration + best_succ;
    }

    let cp_length = tails.iter().copied().max().unwrap_or(0);
    let tail_lengths = instance
        .activities
        .iter()
        .enumerate()
        .map(|(i, a)| (a.id, tails[i]))
        .collect();
    Ok(CriticalPathInfo { cp_length, tail_lengths })
}

/// Strongly connected components with more than one node, plus self-loops;
/// i.e. the vertex sets witnessing cycles. Iterative Tarjan.
fn cyclic_components(instance: &Instance) -> Vec<Vec<ActivityId>> {
    let n = instance.activities.len();
    let index: HashMap<ActivityId, usize> =
        instance.activities.iter().enumerate().map(|(i, a)| (a.id, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut self_loop = vec![false; n];
    for &(pred, succ) in &instance.precedence {
        if let (Some(&p), Some(&s)) = (index.get(&pred), index.get(&succ)) {
            if p == s {
                self_loop[p] = true;
            } else {
                adj[p].push(s);
            }
        }
    }

    const UNVISITED: usize = usize::MAX;
    let mut low = vec![0usize; n];
    let mut disc = vec![UNVISITED; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut components = Vec::new();

    for root in 0..n {
        if disc[root] != UNVISITED {
            continue;
        }
        // (node, next edge index) explicit DFS frames.
        let mut frames = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut edge)) = frames.last_mut() {
            if *edge == 0 {
                disc[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*edge) {
                *edge += 1;
                if disc[w] == UNVISITED {
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == disc[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if component.len() > 1 || self_loop[component[0]] {
                        components
                            .push(component.iter().map(|&i| instance.activities[i].id).collect());
                    }
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    fn activity(id: ActivityId, duration: Tick, demand: u32) -> Activity {
        Activity {
            id,
            duration,
            workgroup: "default".into(),
            demands: BTreeMap::from([(1, demand)]),
        }
    }

    fn group(capacity: u32) -> ResourceGroup {
        ResourceGroup { id: 1, name: "crew".into(), capacity }
    }

    /// Two parallel activities joining into a chain:
    /// 1 -> 3, 2 -> 3, 3 -> 4 with durations 2, 3, 2, 1.
    fn t1() -> Instance {
        Instance {
            name: "t1".into(),
            ticks_per_day: 1.0,
            activities: vec![activity(1, 2, 1), activity(2, 3, 1), activity(3, 2, 2), activity(4, 1, 1)],
            groups: vec![group(2)],
            precedence: BTreeSet::from([(1, 3), (2, 3), (3, 4)]),
        }
    }

    #[test]
    fn valid_instance_yields_empty_report() {
        assert!(validate_instance(&t1()).is_valid());
    }

    #[test]
    fn smallest_cycle_is_reported_with_members() {
        let mut inst = t1();
        inst.precedence = BTreeSet::from([(1, 2), (2, 1)]);
        let report = validate_instance(&inst);
        assert_eq!(report.violations, vec![Violation::Cycle { members: vec![1, 2] }]);
    }

    #[test]
    fn self_loop_counts_as_cycle() {
        let mut inst = t1();
        inst.precedence.insert((4, 4));
        let report = validate_instance(&inst);
        assert!(report.violations.contains(&Violation::Cycle { members: vec![4] }));
    }

    #[test]
    fn demand_above_capacity_is_reported() {
        let mut inst = t1();
        inst.activities[2].demands.insert(1, 3);
        let report = validate_instance(&inst);
        assert_eq!(
            report.violations,
            vec![Violation::DemandExceedsCapacity { activity: 3, group: 1, demand: 3, capacity: 2 }]
        );
    }

    #[test]
    fn dangling_arcs_and_duplicates_are_reported() {
        let mut inst = t1();
        inst.precedence.insert((4, 9));
        inst.activities.push(activity(1, 5, 1));
        let report = validate_instance(&inst);
        assert!(report.violations.contains(&Violation::DuplicateActivityId { id: 1 }));
        assert!(report
            .violations
            .contains(&Violation::DanglingArc { pred: 4, succ: 9, missing: 9 }));
    }

    #[test]
    fn unknown_demand_group_is_reported() {
        let mut inst = t1();
        inst.activities[0].demands.insert(7, 1);
        let report = validate_instance(&inst);
        assert!(report
            .violations
            .contains(&Violation::UnknownDemandGroup { activity: 1, group: 7 }));
    }

    #[test]
    fn empty_instance_is_invalid() {
        let inst = Instance {
            name: "empty".into(),
            ticks_per_day: 1.0,
            activities: vec![],
            groups: vec![],
            precedence: BTreeSet::new(),
        };
        assert!(validate_instance(&inst).violations.contains(&Violation::NoActivities));
    }

    #[test]
    fn critical_path_of_t1() {
        let info = critical_path(&t1()).unwrap();
        assert_eq!(info.cp_length, 6);
        assert_eq!(info.tail(1), Some(5));
        assert_eq!(info.tail(2), Some(6));
        assert_eq!(info.tail(3), Some(3));
        assert_eq!(info.tail(4), Some(1));
    }

    #[test]
    fn critical_path_single_activity() {
        let inst = Instance {
            name: "one".into(),
            ticks_per_day: 1.0,
            activities: vec![activity(1, 7, 1)],
            groups: vec![group(1)],
            precedence: BTreeSet::new(),
        };
        assert_eq!(critical_path(&inst).unwrap().cp_length, 7);
    }

    #[test]
    fn critical_path_parallel_chains() {
        let inst = Instance {
            name: "par".into(),
            ticks_per_day: 1.0,
            activities: vec![activity(1, 4, 1), activity(2, 9, 1)],
            groups: vec![group(2)],
            precedence: BTreeSet::new(),
        };
        assert_eq!(critical_path(&inst).unwrap().cp_length, 9);
    }

    #[test]
    fn critical_path_rejects_invalid_instances() {
        let mut inst = t1();
        inst.precedence = BTreeSet::from([(1, 2), (2, 1)]);
        assert!(critical_path(&inst).is_err());
    }
}
