//! Mission-level scoring: information gain on the location belief and the
//! accuracy score against ground truth.

use crate::belief::BeliefState;
use crate::world::WorldState;

/// Information gained between two beliefs, in bits: the drop in summed
/// per-cell location entropy. Antisymmetric in its arguments.
pub fn information_gain(initial: &BeliefState, final_belief: &BeliefState) -> f64 {
    initial.joint_l_entropy() - final_belief.joint_l_entropy()
}

/// Sum over map cells of the belief probability assigned to the true
/// location class. Ranges over `[0, cell_count]`; a uniform belief scores
/// exactly `cell_count / classes`. Unlike an argmax hit rate, this penalizes
/// beliefs that converge confidently to the wrong class.
pub fn accuracy_score(belief: &BeliefState, truth: &WorldState) -> f64 {
    let grid = belief.location_grid();
    debug_assert_eq!(grid.width(), truth.l_truth.width());
    debug_assert_eq!(grid.height(), truth.l_truth.height());
    grid.iter()
        .map(|((x, y), cell)| cell.prob(*truth.l_truth.at(x, y)))
        .sum()
}
