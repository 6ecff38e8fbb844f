//! Experiment runner: personalization runs and the four studies, with CSV
//! and JSON emission.
//!
//! Every study is a pure function of the environment, the
//! [`ExperimentConfig`] and the seed list. Seeds run in parallel and results
//! are merged in seed order, so output matches a sequential run byte for byte.

mod emit;
mod personalize;
mod report;
mod studies;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::envmodel::EnvError;
use crate::ontology::{OntologyError, PriorKind, PriorSpec, LEARNING_RATE, SMOOTHING_LAMBDA};
use crate::planner::{PlannerError, PlannerKind, DEFAULT_ALPHA};

pub use emit::{emit, parse_csv_table, table_to_csv, OutputFormat};
pub use personalize::{initial_belief, personalize, PersonalizationRun, PersonalizeOptions};
pub use report::{Datum, ExperimentReport, Heatmap, KlCurve, Provenance, Table, TerminationStats};
pub use studies::{
    personalize_seeds, study_ablation, study_compare, study_enhancement, study_initial_estimates, AblationOutcome,
    AblationRecord, AblationVariant, CompareOutcome, CompareRecord, EnhancementOutcome, EnhancementRecord,
    InitialEstimatesOutcome, ABLATION_PAIRS, COMPARE_OBJECTS,
};

/// Exploration probability of the personalization tour.
pub const TOUR_EPSILON: f64 = 0.1;
/// Seeds used when none are given.
pub const DEFAULT_SEED_COUNT: u64 = 20;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Environment document; `None` selects the shipped reference household.
    pub env: Option<PathBuf>,
    pub seeds: Vec<u64>,
    /// Prior personalization starts from.
    pub prior: PriorKind,
    pub planners: Vec<PlannerKind>,
    pub alpha: f64,
    pub max_episodes: u32,
    /// Intermediate snapshot episodes; the termination snapshot is always added.
    pub snapshots: Vec<u32>,
    pub beta: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub insitu_episodes: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            env: None,
            seeds: (0..DEFAULT_SEED_COUNT).collect(),
            prior: PriorKind::Uniform,
            planners: PlannerKind::ALL.to_vec(),
            alpha: DEFAULT_ALPHA,
            max_episodes: 200,
            snapshots: vec![15, 30],
            beta: LEARNING_RATE,
            epsilon: TOUR_EPSILON,
            lambda: SMOOTHING_LAMBDA,
            insitu_episodes: 5,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("at least one seed is required".into()));
        }
        if self.max_episodes == 0 {
            return Err(HarnessError::Config("max episodes must be >= 1".into()));
        }
        if self.planners.is_empty() {
            return Err(HarnessError::Config("at least one planner is required".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(HarnessError::Config(format!("alpha {} must be >= 0", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(HarnessError::Config(format!("beta {} outside [0, 1]", self.beta)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(HarnessError::Config(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.snapshots.contains(&0) {
            return Err(HarnessError::Config("snapshot episodes start at 1".into()));
        }
        self.prior_spec(self.prior).validate()?;
        Ok(())
    }

    pub fn prior_spec(&self, kind: PriorKind) -> PriorSpec {
        PriorSpec {
            kind,
            lambda: self.lambda,
            insitu_episodes: self.insitu_episodes,
        }
    }

    pub fn personalize_options(&self, kind: PriorKind) -> PersonalizeOptions {
        PersonalizeOptions {
            prior: self.prior_spec(kind),
            max_episodes: self.max_episodes,
            beta: self.beta,
            epsilon: self.epsilon,
        }
    }

    /// Hex SHA-256 of the config's JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_degenerate_configs() {
        let bad = [
            ExperimentConfig {
                max_episodes: 0,
                ..Default::default()
            },
            ExperimentConfig {
                seeds: vec![],
                ..Default::default()
            },
            ExperimentConfig {
                snapshots: vec![0],
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn hash_tracks_alpha() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.alpha = 0.75;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
