//! Permutation crossover operators: partially mapped (PMX) and
//! position-based (PBX).

use std::collections::{BTreeSet, HashMap};

use crate::ga::list::ActivityList;
use crate::ga::GaError;
use crate::model::ActivityId;

/// What PMX did to legalise the offspring: the positionwise mapping between
/// the exchanged substrings (identity pairs omitted) and the genes that were
/// duplicated outside each received substring, in position order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmxDetails {
    pub mapping: Vec<(ActivityId, ActivityId)>,
    pub duplicates_first: Vec<ActivityId>,
    pub duplicates_second: Vec<ActivityId>,
}

/// Partially mapped crossover. The cut points are gap indices: the exchanged
/// substring is `cut1..cut2`, so `cut1 = 0, cut2 = len` swaps whole parents.
pub fn pmx(
    parent1: &ActivityList,
    parent2: &ActivityList,
    cut1: usize,
    cut2: usize,
) -> Result<(ActivityList, ActivityList), GaError> {
    pmx_detailed(parent1, parent2, cut1, cut2).map(|(pair, _)| pair)
}

/// PMX with a trace of the mapping and duplicate repairs, for inspection.
pub fn pmx_detailed(
    parent1: &ActivityList,
    parent2: &ActivityList,
    cut1: usize,
    cut2: usize,
) -> Result<((ActivityList, ActivityList), PmxDetails), GaError> {
    check_parents(parent1, parent2)?;
    let n = parent1.len();
    if cut1 >= cut2 || cut2 > n {
        return Err(GaError::InvalidOperand(format!(
            "invalid cut points {cut1}, {cut2} for length {n}"
        )));
    }

    let g1 = parent1.genes();
    let g2 = parent2.genes();
    let (child1, duplicates_first) = pmx_child(g1, g2, cut1, cut2);
    let (child2, duplicates_second) = pmx_child(g2, g1, cut1, cut2);
    let mapping = (cut1..cut2)
        .filter(|&k| g1[k] != g2[k])
        .map(|k| (g1[k], g2[k]))
        .collect();

    Ok((
        (ActivityList::unrepaired(child1), ActivityList::unrepaired(child2)),
        PmxDetails { mapping, duplicates_first, duplicates_second },
    ))
}

/// One PMX offspring: `base` receives `donor`'s substring; outside genes
/// duplicated by the exchange are replaced through the positionwise mapping
/// until they leave the received substring.
fn pmx_child(
    base: &[ActivityId],
    donor: &[ActivityId],
    cut1: usize,
    cut2: usize,
) -> (Vec<ActivityId>, Vec<ActivityId>) {
    let mut child = base.to_vec();
    child[cut1..cut2].copy_from_slice(&donor[cut1..cut2]);

    // received donor gene -> displaced base gene
    let back: HashMap<ActivityId, ActivityId> =
        (cut1..cut2).map(|k| (donor[k], base[k])).collect();

    let mut duplicates = Vec::new();
    for pos in (0..cut1).chain(cut2..child.len()) {
        let mut gene = child[pos];
        if back.contains_key(&gene) {
            duplicates.push(gene);
        }
        let mut steps = 0;
        while let Some(&mapped) = back.get(&gene) {
            gene = mapped;
            steps += 1;
            debug_assert!(steps <= child.len(), "pmx mapping chain did not terminate");
        }
        child[pos] = gene;
    }
    (child, duplicates)
}

/// Position-based crossover: each offspring keeps one parent's genes at the
/// kept positions and fills the rest left to right with the other parent's
/// genes in their order, skipping ids already present.
pub fn pbx(
    parent1: &ActivityList,
    parent2: &ActivityList,
    keep_positions: &[usize],
) -> Result<(ActivityList, ActivityList), GaError> {
    check_parents(parent1, parent2)?;
    let n = parent1.len();
    if keep_positions.is_empty() {
        return Err(GaError::InvalidOperand("position set must not be empty".into()));
    }
    let keep: BTreeSet<usize> = keep_positions.iter().copied().collect();
    if let Some(&out) = keep.iter().find(|&&p| p >= n) {
        return Err(GaError::InvalidOperand(format!("position {out} out of bounds for length {n}")));
    }

    let child1 = pbx_child(parent1.genes(), parent2.genes(), &keep);
    let child2 = pbx_child(parent2.genes(), parent1.genes(), &keep);
    Ok((ActivityList::unrepaired(child1), ActivityList::unrepaired(child2)))
}

fn pbx_child(keeper: &[ActivityId], filler: &[ActivityId], keep: &BTreeSet<usize>) -> Vec<ActivityId> {
    let n = keeper.len();
    let mut child: Vec<Option<ActivityId>> = vec![None; n];
    let mut present: BTreeSet<ActivityId> = BTreeSet::new();
    for &pos in keep {
        child[pos] = Some(keeper[pos]);
        present.insert(keeper[pos]);
    }
    let mut fill = filler.iter().filter(|id| !present.contains(id));
    child
        .into_iter()
        .map(|slot| slot.unwrap_or_else(|| *fill.next().expect("permutation fill exhausted")))
        .collect()
}

fn check_parents(parent1: &ActivityList, parent2: &ActivityList) -> Result<(), GaError> {
    if parent1.len() != parent2.len() {
        return Err(GaError::InvalidOperand(format!(
            "parents have different lengths: {} vs {}",
            parent1.len(),
            parent2.len()
        )));
    }
    let mut a = parent1.genes().to_vec();
    let mut b = parent2.genes().to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a.windows(2).any(|w| w[0] == w[1]) {
        return Err(GaError::InvalidOperand("parent is not a permutation".into()));
    }
    if a != b {
        return Err(GaError::InvalidOperand(
            "parents are not permutations of the same id set".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(genes: &[ActivityId]) -> ActivityList {
        ActivityList::known_feasible(genes.to_vec())
    }

    // The worked ten-gene example: cuts after positions 2 and 7 exchange the
    // five middle genes, duplicating (5, 6, 3) and (1, 4, 8), legalised by
    // the mapping 6<->4, 5<->8, 3<->1.
    #[test]
    fn pmx_ten_gene_vector() {
        let p1 = list(&[5, 6, 4, 2, 8, 1, 7, 9, 3, 10]);
        let p2 = list(&[1, 4, 6, 2, 5, 3, 7, 8, 9, 10]);
        let ((c1, c2), details) = pmx_detailed(&p1, &p2, 2, 7).unwrap();
        assert_eq!(c1.genes(), &[8, 4, 6, 2, 5, 3, 7, 9, 1, 10]);
        assert_eq!(c2.genes(), &[3, 6, 4, 2, 8, 1, 7, 5, 9, 10]);
        assert_eq!(details.duplicates_first, vec![5, 6, 3]);
        assert_eq!(details.duplicates_second, vec![1, 4, 8]);
        assert_eq!(details.mapping, vec![(4, 6), (8, 5), (1, 3)]);
    }

    #[test]
    fn pmx_identical_parents_is_identity() {
        let p = list(&[3, 1, 4, 2, 5]);
        let (c1, c2) = pmx(&p, &p, 1, 3).unwrap();
        assert_eq!(c1.genes(), p.genes());
        assert_eq!(c2.genes(), p.genes());
    }

    #[test]
    fn pmx_whole_string_cuts_swap_parents() {
        let p1 = list(&[1, 2, 3]);
        let p2 = list(&[3, 1, 2]);
        let (c1, c2) = pmx(&p1, &p2, 0, 3).unwrap();
        assert_eq!(c1.genes(), p2.genes());
        assert_eq!(c2.genes(), p1.genes());
    }

    #[test]
    fn pmx_rejects_bad_inputs() {
        let p1 = list(&[1, 2, 3]);
        let p2 = list(&[1, 2, 4]);
        assert!(pmx(&p1, &p2, 0, 2).is_err());
        let p2 = list(&[3, 2, 1]);
        assert!(pmx(&p1, &p2, 2, 2).is_err());
        assert!(pmx(&p1, &p2, 1, 4).is_err());
        assert!(pmx(&p1, &list(&[2, 1]), 0, 1).is_err());
    }

    // Keeping positions 2, 5, 8 (1-indexed in the usual presentation) is
    // keeping indices 1, 4, 7 here.
    #[test]
    fn pbx_ten_gene_vector() {
        let p1 = list(&[5, 6, 4, 2, 8, 1, 7, 9, 3, 10]);
        let p2 = list(&[1, 4, 6, 2, 5, 3, 7, 8, 9, 10]);
        let (c1, c2) = pbx(&p1, &p2, &[1, 4, 7]).unwrap();
        assert_eq!(c1.genes(), &[1, 6, 4, 2, 8, 5, 3, 9, 7, 10]);
        assert_eq!(c2.genes(), &[6, 4, 2, 1, 5, 7, 9, 8, 3, 10]);
    }

    #[test]
    fn pbx_full_position_set_is_identity() {
        let p1 = list(&[4, 1, 3, 2]);
        let p2 = list(&[2, 3, 1, 4]);
        let (c1, c2) = pbx(&p1, &p2, &[0, 1, 2, 3]).unwrap();
        assert_eq!(c1.genes(), p1.genes());
        assert_eq!(c2.genes(), p2.genes());
    }

    #[test]
    fn pbx_identical_parents_is_identity() {
        let p = list(&[2, 4, 1, 3]);
        let (c1, c2) = pbx(&p, &p, &[2]).unwrap();
        assert_eq!(c1.genes(), p.genes());
        assert_eq!(c2.genes(), p.genes());
    }

    #[test]
    fn pbx_rejects_bad_positions() {
        let p1 = list(&[1, 2, 3]);
        let p2 = list(&[3, 2, 1]);
        assert!(pbx(&p1, &p2, &[]).is_err());
        assert!(pbx(&p1, &p2, &[3]).is_err());
    }
}
