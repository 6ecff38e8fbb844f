//! Object search over location tuples.
//!
//! The adaptive planner follows a greedy shortcut when one tuple holds more
//! than half of the target's mass; otherwise it takes the shortest
//! descending-probability prefix with cumulative mass above one half, scores
//! each tuple with `p + α/dist`, orders them with an open-path TSP whose leg
//! cost is `distance / utility(destination)`, and commits only to the first
//! tuple before re-planning. Dynamic belief updates revise every object's row
//! after each visit. PKS, LTOS and HSKOS are provided as baselines sharing
//! the same search loop.

mod adaptive;
mod baselines;
mod dbu;
mod search;
mod space;
mod tsp;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envmodel::{Cell, EnvError, LocationTuple};
use crate::ontology::{BeliefMatrix, OntologyError};

pub use adaptive::{lookahead_window, next_step_adaptive, utility, WINDOW_MASS};
pub use baselines::{hskos_next, ltos_route, pks_next, wpl_cost};
pub use dbu::{dbu, dbu_in_place};
pub use search::{run_search, run_search_in, SearchResult, TargetOutcome, Visit};
pub use space::SearchSpace;
pub use tsp::{open_tour_cost, solve_open_tsp, EXACT_TSP_LIMIT};

/// Default utility scale `α`.
pub const DEFAULT_ALPHA: f64 = 0.5;
/// Default LTOS candidate-set size.
pub const DEFAULT_LTOS_K: usize = 6;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error("search for `{0}` exhausted every tuple with positive belief")]
    Exhausted(String),
    #[error("`{object}` is certain to be at {tuple} but was not observed there")]
    Inconsistent { object: String, tuple: String },
    #[error("search task has no targets")]
    EmptyTask,
    #[error("unknown planner `{0}`, expected adaptive|pks|ltos|hskos")]
    UnknownPlanner(String),
    #[error("invalid planner parameter: {0}")]
    InvalidParameter(String),
    #[error("TSP node {0} cannot be reached")]
    UnreachableNode(usize),
    #[error("belief layout does not match the environment")]
    LayoutMismatch,
}

pub type Result<T> = std::result::Result<T, PlannerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Adaptive,
    Pks,
    Ltos,
    Hskos,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 4] = [
        PlannerKind::Adaptive,
        PlannerKind::Pks,
        PlannerKind::Ltos,
        PlannerKind::Hskos,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Adaptive => "adaptive",
            PlannerKind::Pks => "pks",
            PlannerKind::Ltos => "ltos",
            PlannerKind::Hskos => "hskos",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerKind {
    type Err = PlannerError;

    fn from_str(s: &str) -> Result<Self> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| PlannerError::UnknownPlanner(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub kind: PlannerKind,
    pub alpha: f64,
    pub ltos_k: usize,
    /// Revise every object's row after each visit. Without it, visited
    /// tuples are only masked out of the target's row.
    pub dbu: bool,
}

impl PlannerConfig {
    pub fn new(kind: PlannerKind) -> Self {
        Self {
            kind,
            alpha: DEFAULT_ALPHA,
            ltos_k: DEFAULT_LTOS_K,
            dbu: true,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_dbu(mut self, dbu: bool) -> Self {
        self.dbu = dbu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(PlannerError::InvalidParameter(format!(
                "alpha {} must be >= 0",
                self.alpha
            )));
        }
        if self.ltos_k == 0 {
            return Err(PlannerError::InvalidParameter("ltos k must be >= 1".into()));
        }
        Ok(())
    }
}

/// Objects to find, revealed one after the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTask {
    pub targets: Vec<String>,
    pub start: Cell,
}

impl SearchTask {
    pub fn new(targets: Vec<String>, start: Cell) -> Self {
        Self { targets, start }
    }

    pub fn single(target: &str, start: Cell) -> Self {
        Self::new(vec![target.to_string()], start)
    }
}

/// Everything a planner needs to choose the next landmark.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerState {
    pub belief: BeliefMatrix,
    pub agent: Cell,
    /// Tuple indices visited while searching for the current target.
    pub visited: BTreeSet<usize>,
    pub alpha: f64,
    /// Room HSKOS is currently sweeping.
    pub committed_room: Option<usize>,
}

impl PlannerState {
    pub fn new(belief: BeliefMatrix, agent: Cell, alpha: f64) -> Self {
        Self {
            belief,
            agent,
            visited: BTreeSet::new(),
            alpha,
            committed_room: None,
        }
    }

    pub fn visited_tuples(&self) -> Vec<LocationTuple> {
        self.visited.iter().map(|&t| self.belief.tuples()[t].clone()).collect()
    }

    /// The target's row with visited tuples zeroed and the rest renormalized;
    /// `None` once no unvisited tuple carries mass.
    pub fn effective_row(&self, target: usize) -> Option<Vec<f64>> {
        let mut row = self.belief.row(target).to_vec();
        for &t in &self.visited {
            row[t] = 0.0;
        }
        let sum: f64 = row.iter().sum();
        if !(sum > 0.0) {
            return None;
        }
        row.iter_mut().for_each(|p| *p /= sum);
        Some(row)
    }

    /// Clears per-target bookkeeping when the next target is revealed.
    pub fn reset_for_next_target(&mut self) {
        self.visited.clear();
        self.committed_room = None;
    }
}

/// Chooses the next tuple with the configured planner.
pub fn next_tuple(
    space: &SearchSpace<'_>,
    state: &PlannerState,
    config: &PlannerConfig,
    target: usize,
) -> Result<(usize, Option<usize>)> {
    match config.kind {
        PlannerKind::Adaptive => Ok((next_step_adaptive(space, state, target)?, None)),
        PlannerKind::Pks => Ok((pks_next(space, state, target)?, None)),
        PlannerKind::Ltos => {
            let route = ltos_route(space, state, target, config.ltos_k)?;
            Ok((route[0], None))
        }
        PlannerKind::Hskos => {
            let (t, room) = hskos_next(space, state, target)?;
            Ok((t, Some(room)))
        }
    }
}

/// Index of the best entry under probability desc, distance asc, index asc.
pub(crate) fn best_by_rule(candidates: impl Iterator<Item = usize>, prob: &[f64], dist: &[f64]) -> Option<usize> {
    candidates.min_by(|&a, &b| {
        prob[b]
            .total_cmp(&prob[a])
            .then(dist[a].total_cmp(&dist[b]))
            .then(a.cmp(&b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in PlannerKind::ALL {
            assert_eq!(k.as_str().parse::<PlannerKind>().unwrap(), k);
        }
        assert!("astar".parse::<PlannerKind>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(PlannerConfig::new(PlannerKind::Ltos).validate().is_ok());
        assert!(PlannerConfig::new(PlannerKind::Ltos)
            .with_alpha(-1.0)
            .validate()
            .is_err());
        let mut c = PlannerConfig::new(PlannerKind::Ltos);
        c.ltos_k = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn tie_rule() {
        let p = [0.4, 0.4, 0.2];
        let d = [3.0, 1.0, 0.0];
        assert_eq!(best_by_rule(0..3, &p, &d), Some(1));
        let d = [1.0, 1.0, 0.0];
        assert_eq!(best_by_rule(0..3, &p, &d), Some(0));
    }
}
