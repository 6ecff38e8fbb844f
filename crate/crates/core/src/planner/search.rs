use serde::Serialize;

use crate::envmodel::{Cell, Environment, LocationTuple, WorldState};
use crate::ontology::BeliefMatrix;

use super::{dbu_in_place, next_tuple, PlannerConfig, PlannerError, PlannerState, Result, SearchSpace, SearchTask};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Visit {
    pub tuple: LocationTuple,
    /// Index into the task's targets.
    pub target: usize,
    /// Meters travelled to reach this tuple.
    pub leg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetOutcome {
    pub object: String,
    pub distance: f64,
    pub visits: usize,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub start: Cell,
    pub targets: Vec<TargetOutcome>,
    pub sequence: Vec<Visit>,
}

impl SearchResult {
    /// Cumulative distance over every target.
    pub fn total_distance(&self) -> f64 {
        self.sequence.iter().map(|v| v.leg).sum()
    }

    /// Distance spent on the first target.
    pub fn first_distance(&self) -> f64 {
        self.targets.first().map_or(0.0, |t| t.distance)
    }

    pub fn visits(&self) -> usize {
        self.sequence.len()
    }

    pub fn all_found(&self) -> bool {
        self.targets.iter().all(|t| t.found)
    }
}

/// Searches for each target in turn until it is seen.
///
/// The belief persists across targets while the visited set restarts; the
/// agent stays where the previous target was found. A target whose belief
/// runs out of unvisited mass is reported as not found.
pub fn run_search(
    env: &Environment,
    world: &WorldState,
    task: &SearchTask,
    belief: &BeliefMatrix,
    config: &PlannerConfig,
) -> Result<SearchResult> {
    let space = SearchSpace::new(env);
    run_search_in(&space, world, task, belief, config)
}

/// [`run_search`] reusing precomputed distance fields.
pub fn run_search_in(
    space: &SearchSpace<'_>,
    world: &WorldState,
    task: &SearchTask,
    belief: &BeliefMatrix,
    config: &PlannerConfig,
) -> Result<SearchResult> {
    let env = space.env();
    config.validate()?;
    if task.targets.is_empty() {
        return Err(PlannerError::EmptyTask);
    }
    if belief.objects() != env.objects() || belief.tuples() != env.tuples() {
        return Err(PlannerError::LayoutMismatch);
    }
    let targets = task
        .targets
        .iter()
        .map(|t| env.require_object(t))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut state = PlannerState::new(belief.clone(), task.start, config.alpha);
    let mut outcomes = Vec::with_capacity(targets.len());
    let mut sequence = Vec::new();
    for (k, &target) in targets.iter().enumerate() {
        state.reset_for_next_target();
        let mut outcome = TargetOutcome {
            object: env.objects()[target].clone(),
            distance: 0.0,
            visits: 0,
            found: false,
        };
        while !outcome.found {
            let (t, room) = match next_tuple(space, &state, config, target) {
                Ok(choice) => choice,
                Err(PlannerError::Exhausted(_)) => break,
                Err(e) => return Err(e),
            };
            let leg = space.distance_to(state.agent, t)?;
            state.agent = env.approach_cell(t);
            state.visited.insert(t);
            state.committed_room = room;
            let found: Vec<bool> = (0..env.objects().len()).map(|o| world.placement(o) == t).collect();
            if config.dbu {
                dbu_in_place(&mut state.belief, t, &found)?;
            }
            outcome.distance += leg;
            outcome.visits += 1;
            outcome.found = found[target];
            sequence.push(Visit {
                tuple: env.tuples()[t].clone(),
                target: k,
                leg,
            });
        }
        outcomes.push(outcome);
    }
    Ok(SearchResult {
        start: task.start,
        targets: outcomes,
        sequence,
    })
}
