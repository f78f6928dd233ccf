//! Mutation operators: SWAP exchanges two genes, INSERT relocates one.

use crate::ga::list::ActivityList;
use crate::ga::GaError;

/// Exchanges the genes at positions `i` and `j` (0-indexed, distinct).
pub fn swap_mutate(list: &ActivityList, i: usize, j: usize) -> Result<ActivityList, GaError> {
    let n = list.len();
    if i >= n || j >= n {
        return Err(GaError::InvalidOperand(format!("swap positions {i}, {j} out of bounds for length {n}")));
    }
    if i == j {
        return Err(GaError::InvalidOperand(format!("swap positions must differ, got {i} twice")));
    }
    let mut genes = list.genes().to_vec();
    genes.swap(i, j);
    Ok(ActivityList::unrepaired(genes))
}

/// Removes the gene at `from` and reinserts it at `to` (0-indexed,
/// distinct); the genes in between shift by one.
pub fn insert_mutate(list: &ActivityList, from: usize, to: usize) -> Result<ActivityList, GaError> {
    let n = list.len();
    if from >= n || to >= n {
        return Err(GaError::InvalidOperand(format!("insert positions {from}, {to} out of bounds for length {n}")));
    }
    if from == to {
        return Err(GaError::InvalidOperand(format!("insert positions must differ, got {from} twice")));
    }
    let mut genes = list.genes().to_vec();
    let gene = genes.remove(from);
    genes.insert(to, gene);
    Ok(ActivityList::unrepaired(genes))
}
