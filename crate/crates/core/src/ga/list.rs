//! Activity-list chromosomes and the precedence repair pass.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;

use crate::ga::GaError;
use crate::model::{validate_instance, ActivityId, Instance, InvalidInstance, Tick};

/// A permutation of activity ids. `feasible` records whether every activity
/// is known to appear after all of its predecessors; crossover and mutation
/// outputs carry `false` until repaired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityList {
    genes: Vec<ActivityId>,
    feasible: bool,
}

impl ActivityList {
    /// Builds a list from raw genes, checking that they are a permutation of
    /// the instance's activity ids and flagging precedence feasibility.
    pub fn new(genes: Vec<ActivityId>, instance: &Instance) -> Result<Self, GaError> {
        let view = NetworkView::new(instance)?;
        check_permutation(&genes, &view)?;
        let feasible = is_precedence_feasible(&genes, &view);
        Ok(ActivityList { genes, feasible })
    }

    /// Builds a list from raw genes without an instance, checking only that
    /// the genes are distinct. The feasibility flag starts false; use
    /// [`repair`] to establish it.
    pub fn from_genes(genes: Vec<ActivityId>) -> Result<Self, GaError> {
        let mut sorted = genes.clone();
        sorted.sort_unstable();
        if let Some(pair) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(GaError::InvalidOperand(format!(
                "activity {} appears more than once",
                pair[0]
            )));
        }
        Ok(ActivityList { genes, feasible: false })
    }

    pub(crate) fn known_feasible(genes: Vec<ActivityId>) -> Self {
        ActivityList { genes, feasible: true }
    }

    pub(crate) fn unrepaired(genes: Vec<ActivityId>) -> Self {
        ActivityList { genes, feasible: false }
    }

    pub fn genes(&self) -> &[ActivityId] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub fn into_genes(self) -> Vec<ActivityId> {
        self.genes
    }
}

/// Compiled precedence tables shared by repair, dispatching, and the
/// evolution loop.
pub(crate) struct NetworkView {
    pub ids: Vec<ActivityId>,
    pub idx_of: HashMap<ActivityId, u32>,
    pub preds: Vec<Vec<u32>>,
    pub succs: Vec<Vec<u32>>,
    pub durations: Vec<Tick>,
}

impl NetworkView {
    pub fn new(instance: &Instance) -> Result<Self, InvalidInstance> {
        let report = validate_instance(instance);
        if !report.is_valid() {
            return Err(InvalidInstance(report));
        }
        let n = instance.activities.len();
        let ids: Vec<ActivityId> = instance.activities.iter().map(|a| a.id).collect();
        let idx_of: HashMap<ActivityId, u32> =
            ids.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut succs: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(pred, succ) in &instance.precedence {
            preds[idx_of[&succ] as usize].push(idx_of[&pred]);
            succs[idx_of[&pred] as usize].push(idx_of[&succ]);
        }
        Ok(NetworkView {
            ids,
            idx_of,
            preds,
            succs,
            durations: instance.activities.iter().map(|a| a.duration).collect(),
        })
    }
}

fn check_permutation(genes: &[ActivityId], view: &NetworkView) -> Result<(), GaError> {
    if genes.len() != view.ids.len() {
        return Err(GaError::InvalidOperand(format!(
            "list has {} genes, instance has {} activities",
            genes.len(),
            view.ids.len()
        )));
    }
    let mut seen = vec![false; view.ids.len()];
    for &id in genes {
        let idx = view
            .idx_of
            .get(&id)
            .ok_or_else(|| GaError::InvalidOperand(format!("unknown activity id {id} in list")))?;
        if std::mem::replace(&mut seen[*idx as usize], true) {
            return Err(GaError::InvalidOperand(format!("activity {id} appears more than once")));
        }
    }
    Ok(())
}

pub(crate) fn is_precedence_feasible(genes: &[ActivityId], view: &NetworkView) -> bool {
    let mut pos = vec![0u32; view.ids.len()];
    for (p, &id) in genes.iter().enumerate() {
        pos[view.idx_of[&id] as usize] = p as u32;
    }
    (0..view.ids.len()).all(|i| view.preds[i].iter().all(|&p| pos[p as usize] < pos[i]))
}

/// Greedy order-preserving repair: emit, at each output position, the
/// earliest gene (in input order) whose predecessors have all been emitted.
/// Idempotent on feasible inputs and preserves the gene multiset.
pub fn repair(list: &ActivityList, instance: &Instance) -> Result<ActivityList, GaError> {
    let view = NetworkView::new(instance)?;
    check_permutation(list.genes(), &view)?;
    Ok(ActivityList::known_feasible(repair_order(&view, list.genes())))
}

/// Kahn's algorithm keyed by input position: equivalent to the left-to-right
/// greedy scan but O(n log n + arcs).
pub(crate) fn repair_order(view: &NetworkView, genes: &[ActivityId]) -> Vec<ActivityId> {
    let n = genes.len();
    let mut position = vec![0u32; n];
    for (p, &id) in genes.iter().enumerate() {
        position[view.idx_of[&id] as usize] = p as u32;
    }
    let mut indegree: Vec<u32> = view.preds.iter().map(|p| p.len() as u32).collect();
    let mut ready: BinaryHeap<Reverse<(u32, u32)>> = (0..n)
        .filter(|&i| indegree[i] == 0)
        .map(|i| Reverse((position[i], i as u32)))
        .collect();

    let mut out = Vec::with_capacity(n);
    while let Some(Reverse((_, idx))) = ready.pop() {
        out.push(view.ids[idx as usize]);
        for &s in &view.succs[idx as usize] {
            indegree[s as usize] -= 1;
            if indegree[s as usize] == 0 {
                ready.push(Reverse((position[s as usize], s)));
            }
        }
    }
    debug_assert_eq!(out.len(), n, "validated instances are acyclic");
    out
}
