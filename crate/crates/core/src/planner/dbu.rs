use std::collections::BTreeSet;

use crate::envmodel::LocationTuple;
use crate::ontology::BeliefMatrix;

use super::{PlannerError, Result};

/// Below this `1 − P` an absent object is treated as a contradiction.
const CERTAINTY_SLACK: f64 = 1e-12;

/// Revises every object's row after inspecting `visited`: objects seen there
/// collapse onto it, absent ones lose it and keep their remaining ratios.
pub fn dbu(belief: &BeliefMatrix, visited: &LocationTuple, observed: &BTreeSet<String>) -> Result<BeliefMatrix> {
    let t = belief.tuple_index(visited)?;
    let found: Vec<bool> = belief.objects().iter().map(|o| observed.contains(o)).collect();
    let mut out = belief.clone();
    dbu_in_place(&mut out, t, &found)?;
    Ok(out)
}

/// [`dbu`] addressed by tuple index, with `found[o]` per object.
pub fn dbu_in_place(belief: &mut BeliefMatrix, visited: usize, found: &[bool]) -> Result<()> {
    for (o, &seen) in found.iter().enumerate() {
        let p = belief.get(o, visited);
        if !seen && 1.0 - p <= CERTAINTY_SLACK {
            return Err(PlannerError::Inconsistent {
                object: belief.objects()[o].clone(),
                tuple: belief.tuples()[visited].name(),
            });
        }
        let row = belief.row_mut(o);
        if seen {
            row.iter_mut().for_each(|v| *v = 0.0);
            row[visited] = 1.0;
        } else if p > 0.0 {
            let keep = 1.0 - p;
            row[visited] = 0.0;
            row.iter_mut().for_each(|v| *v /= keep);
        }
    }
    Ok(())
}
