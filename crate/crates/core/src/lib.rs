//! Personalized object-landmark-room ontologies and belief-driven object
//! search in a simulated household.
//!
//! - [`envmodel`]: grid, rooms, landmarks, objects and their true placement
//!   distributions; seeded sampling of per-episode placements.
//! - [`semantic_map`]: landmark tracking and room labelling.
//! - [`ontology`]: the belief matrix `P(O|T)`, its episodic learning, priors
//!   and the termination test.
//! - [`planner`]: the adaptive planner, dynamic belief updates and baselines.
//! - [`harness`]: personalization runs, studies and report emission.

pub mod envmodel;
pub mod harness;
pub mod ontology;
pub mod planner;
pub mod semantic_map;
