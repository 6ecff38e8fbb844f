use super::{best_by_rule, PlannerError, PlannerState, Result, SearchSpace};

fn exhausted(state: &PlannerState, target: usize) -> PlannerError {
    PlannerError::Exhausted(state.belief.objects()[target].clone())
}

/// Most probable unvisited tuple.
pub fn pks_next(space: &SearchSpace<'_>, state: &PlannerState, target: usize) -> Result<usize> {
    let row = state.effective_row(target).ok_or_else(|| exhausted(state, target))?;
    let dist = space.distances_from(state.agent)?;
    Ok(best_by_rule((0..row.len()).filter(|&t| row[t] > 0.0), &row, &dist).expect("row has mass"))
}

/// `Σ_i dist_i / ((1 + α·p_i)·2^i)` over a route, position `i` from zero.
pub fn wpl_cost(route: &[usize], dist: &[f64], prob: &[f64], alpha: f64) -> f64 {
    route
        .iter()
        .enumerate()
        .map(|(i, &t)| dist[t] / ((1.0 + alpha * prob[t]) * 2f64.powi(i as i32)))
        .sum()
}

/// Best weighted-path-length order over the top-`k` unvisited tuples, with
/// every distance measured from the agent's current cell.
pub fn ltos_route(space: &SearchSpace<'_>, state: &PlannerState, target: usize, k: usize) -> Result<Vec<usize>> {
    let row = state.effective_row(target).ok_or_else(|| exhausted(state, target))?;
    let dist = space.distances_from(state.agent)?;
    let mut cand: Vec<usize> = (0..row.len()).filter(|&t| row[t] > 0.0).collect();
    cand.sort_by(|&a, &b| {
        row[b]
            .total_cmp(&row[a])
            .then(dist[a].total_cmp(&dist[b]))
            .then(a.cmp(&b))
    });
    cand.truncate(k.max(1));
    cand.sort_unstable();

    let mut best = cand.clone();
    let mut best_cost = wpl_cost(&best, &dist, &row, state.alpha);
    let mut perm = cand;
    // lexicographic enumeration; strict improvement keeps the smallest order
    while next_permutation(&mut perm) {
        let c = wpl_cost(&perm, &dist, &row, state.alpha);
        if c < best_cost {
            best_cost = c;
            best.clone_from(&perm);
        }
    }
    Ok(best)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len())
        .rev()
        .find(|&j| v[j] > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Room first, then tuple: keeps sweeping the committed room while it holds
/// unvisited mass, otherwise picks the room maximizing
/// `P(R|O) / (R_s + Dist(R, A))`. Returns the tuple and the room swept.
pub fn hskos_next(space: &SearchSpace<'_>, state: &PlannerState, target: usize) -> Result<(usize, usize)> {
    let env = space.env();
    let row = state.effective_row(target).ok_or_else(|| exhausted(state, target))?;
    let rooms = env.rooms();
    let mut mass = vec![0.0; rooms.len()];
    for (t, p) in row.iter().enumerate() {
        mass[env.room_of_tuple(t)] += p;
    }
    let room = match state.committed_room {
        Some(r) if mass[r] > 0.0 => r,
        _ => {
            let total_cells: usize = rooms.iter().map(|r| r.cells.len()).sum();
            let mut best: Option<(f64, f64, usize)> = None;
            for r in (0..rooms.len()).filter(|&r| mass[r] > 0.0) {
                let size = rooms[r].cells.len() as f64 / total_cells as f64;
                let d = space.room_distance(state.agent, r)?;
                let score = mass[r] / (size + d);
                let better = match best {
                    None => true,
                    Some((bs, bd, _)) => score > bs || (score == bs && d < bd),
                };
                if better {
                    best = Some((score, d, r));
                }
            }
            best.expect("some room has mass").2
        }
    };
    let dist = space.distances_from(state.agent)?;
    let inside = (0..row.len()).filter(|&t| row[t] > 0.0 && env.room_of_tuple(t) == room);
    let t = best_by_rule(inside, &row, &dist).expect("room has mass");
    Ok((t, room))
}
