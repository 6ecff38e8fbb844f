use super::{PlannerError, Result};

/// Largest node count solved exactly; larger instances use nearest
/// neighbour followed by 2-opt.
pub const EXACT_TSP_LIMIT: usize = 12;

/// Cost of visiting `order` from the start: the left-to-right sum of
/// `d(prev, next) / u[next]`.
pub fn open_tour_cost(order: &[usize], start_dist: &[f64], pair: &[Vec<f64>], utilities: &[f64]) -> f64 {
    let mut cost = 0.0;
    let mut prev: Option<usize> = None;
    for &n in order {
        let d = match prev {
            None => start_dist[n],
            Some(p) => pair[p][n],
        };
        cost += d / utilities[n];
        prev = Some(n);
    }
    cost
}

/// Open-path order over nodes `0..n` from a fixed start with destination-
/// discounted leg costs. Equal-cost orders resolve to the lexicographically
/// smallest index sequence.
///
/// `start_dist[i]` is the start-to-node distance, `pair[i][j]` the node-to-node
/// distance, `utilities[i] > 0`. Infinite distances mean unreachable.
pub fn solve_open_tsp(start_dist: &[f64], pair: &[Vec<f64>], utilities: &[f64]) -> Result<(Vec<usize>, f64)> {
    let n = start_dist.len();
    if n == 0 {
        return Err(PlannerError::InvalidParameter("TSP needs at least one node".into()));
    }
    if pair.len() != n || pair.iter().any(|r| r.len() != n) || utilities.len() != n {
        return Err(PlannerError::InvalidParameter("TSP inputs disagree in size".into()));
    }
    if utilities.iter().any(|u| !(*u > 0.0 && u.is_finite())) {
        return Err(PlannerError::InvalidParameter("TSP utilities must be positive".into()));
    }
    let order = if n <= EXACT_TSP_LIMIT {
        held_karp(start_dist, pair, utilities)
    } else {
        two_opt(
            nearest_neighbour(start_dist, pair, utilities),
            start_dist,
            pair,
            utilities,
        )
    };
    let cost = open_tour_cost(&order, start_dist, pair, utilities);
    if !cost.is_finite() {
        let node = (0..n)
            .find(|&j| !start_dist[j].is_finite() && (0..n).all(|i| !pair[i][j].is_finite()))
            .unwrap_or(order[0]);
        return Err(PlannerError::UnreachableNode(node));
    }
    Ok((order, cost))
}

fn held_karp(start_dist: &[f64], pair: &[Vec<f64>], u: &[f64]) -> Vec<usize> {
    let n = start_dist.len();
    let full = (1usize << n) - 1;
    // best[mask * n + last] = (left-fold cost, path)
    let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; (full + 1) * n];
    for j in 0..n {
        best[(1 << j) * n + j] = Some((start_dist[j] / u[j], vec![j]));
    }
    for mask in 1..=full {
        for last in 0..n {
            let Some((cost, path)) = best[mask * n + last].clone() else {
                continue;
            };
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let next_mask = mask | (1 << j);
                let c = cost + pair[last][j] / u[j];
                let slot = &mut best[next_mask * n + j];
                let better = match slot {
                    None => true,
                    Some((bc, bp)) => c < *bc || (c == *bc && path_lt(&path, j, bp)),
                };
                if better {
                    let mut p = path.clone();
                    p.push(j);
                    *slot = Some((c, p));
                }
            }
        }
    }
    (0..n)
        .filter_map(|j| best[full * n + j].clone())
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .map(|(_, p)| p)
        .expect("full mask always reached")
}

/// Whether `prefix ++ [j]` sorts before `other`.
fn path_lt(prefix: &[usize], j: usize, other: &[usize]) -> bool {
    prefix
        .iter()
        .copied()
        .chain(std::iter::once(j))
        .lt(other.iter().copied())
}

fn nearest_neighbour(start_dist: &[f64], pair: &[Vec<f64>], u: &[f64]) -> Vec<usize> {
    let n = start_dist.len();
    let mut left: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut prev: Option<usize> = None;
    while !left.is_empty() {
        let leg = |j: usize| match prev {
            None => start_dist[j] / u[j],
            Some(p) => pair[p][j] / u[j],
        };
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by(|a, b| leg(*a.1).total_cmp(&leg(*b.1)).then(a.1.cmp(b.1)))
            .expect("non-empty");
        let j = left.remove(pos);
        order.push(j);
        prev = Some(j);
    }
    order
}

fn two_opt(mut order: Vec<usize>, start_dist: &[f64], pair: &[Vec<f64>], u: &[f64]) -> Vec<usize> {
    let n = order.len();
    let mut cost = open_tour_cost(&order, start_dist, pair, u);
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for k in i + 1..n {
                order[i..=k].reverse();
                let c = open_tour_cost(&order, start_dist, pair, u);
                if c < cost {
                    cost = c;
                    improved = true;
                } else {
                    order[i..=k].reverse();
                }
            }
        }
        if !improved {
            return order;
        }
    }
}
