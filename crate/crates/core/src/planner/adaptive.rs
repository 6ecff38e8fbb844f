use super::{best_by_rule, solve_open_tsp, PlannerError, PlannerState, Result, SearchSpace};

/// Mass a lookahead window must exceed.
pub const WINDOW_MASS: f64 = 0.5;

/// Tuples ordered by probability desc, distance asc, index asc, truncated
/// to the shortest prefix whose cumulative mass exceeds [`WINDOW_MASS`].
/// Zero-probability tuples never enter the window.
pub fn lookahead_window(row: &[f64], dist: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..row.len()).filter(|&t| row[t] > 0.0).collect();
    order.sort_by(|&a, &b| {
        row[b]
            .total_cmp(&row[a])
            .then(dist[a].total_cmp(&dist[b]))
            .then(a.cmp(&b))
    });
    let mut acc = 0.0;
    for (i, &t) in order.iter().enumerate() {
        acc += row[t];
        if acc > WINDOW_MASS {
            order.truncate(i + 1);
            break;
        }
    }
    order
}

/// `p + α/dist` for `dist > 0`.
pub fn utility(p: f64, dist: f64, alpha: f64) -> f64 {
    p + alpha / dist
}

/// The next tuple the adaptive planner commits to.
pub fn next_step_adaptive(space: &SearchSpace<'_>, state: &PlannerState, target: usize) -> Result<usize> {
    let row = state
        .effective_row(target)
        .ok_or_else(|| PlannerError::Exhausted(state.belief.objects()[target].clone()))?;
    let dist = space.distances_from(state.agent)?;
    let candidates = (0..row.len()).filter(|&t| row[t] > 0.0);
    let best = best_by_rule(candidates, &row, &dist).expect("effective row has mass");
    if row[best] > WINDOW_MASS {
        return Ok(best);
    }
    let window = lookahead_window(&row, &dist);
    if let Some(&here) = window.iter().find(|&&t| dist[t] == 0.0) {
        return Ok(here);
    }
    if window.len() == 1 {
        return Ok(window[0]);
    }
    let mut nodes = window;
    nodes.sort_unstable();
    let start: Vec<f64> = nodes.iter().map(|&t| dist[t]).collect();
    let utilities: Vec<f64> = nodes.iter().map(|&t| utility(row[t], dist[t], state.alpha)).collect();
    let pair = nodes
        .iter()
        .map(|&a| {
            nodes
                .iter()
                .map(|&b| space.tuple_distance(a, b))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (order, _) = solve_open_tsp(&start, &pair, &utilities)?;
    Ok(nodes[order[0]])
}
