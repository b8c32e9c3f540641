//! Decoupled Vaněk–Mandel–Brezina aggregation.

use super::strength::strength_neighborhood;
use super::{Aggregation, AmgError};
use crate::sparse::CsrMatrix;

const UNASSIGNED: usize = usize::MAX;

/// Greedy two-phase aggregation on the strength graph.
///
/// Phase 1 visits nodes in ascending order; a node with a nonempty strong
/// neighbourhood containing no assigned node seeds an aggregate made of itself
/// and its strong neighbours. Phase 2 attaches every remaining node to the
/// phase-1 aggregate of its strongest assigned strong neighbour (largest
/// |a_ij|, ties to the lowest aggregate id). Nodes without strong neighbours
/// become singletons.
pub fn vmb_aggregate(a: &CsrMatrix, theta: f64) -> Result<Aggregation, AmgError> {
    let n = a.n_rows();
    let strong = strength_neighborhood(a, theta)?;
    let mut assignment = vec![UNASSIGNED; n];
    let mut n_coarse = 0;

    for i in 0..n {
        if assignment[i] != UNASSIGNED || strong[i].is_empty() {
            continue;
        }
        if strong[i].iter().any(|&j| assignment[j] != UNASSIGNED) {
            continue;
        }
        assignment[i] = n_coarse;
        for &j in &strong[i] {
            assignment[j] = n_coarse;
        }
        n_coarse += 1;
    }

    let phase1 = assignment.clone();
    for i in 0..n {
        if phase1[i] != UNASSIGNED {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for (j, v) in a.row(i) {
            if j == i || phase1[j] == UNASSIGNED || !strong[i].contains(&j) {
                continue;
            }
            let cand = (v.abs(), phase1[j]);
            best = match best {
                None => Some(cand),
                Some(b) if cand.0 > b.0 || (cand.0 == b.0 && cand.1 < b.1) => Some(cand),
                keep => keep,
            };
        }
        assignment[i] = match best {
            Some((_, agg)) => agg,
            None => {
                n_coarse += 1;
                n_coarse - 1
            }
        };
    }

    Ok(Aggregation::new(assignment, n_coarse, vec![1.0; n_coarse]))
}
