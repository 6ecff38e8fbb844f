use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BeliefMatrix, OntologyError, Result, SMOOTHING_LAMBDA};
use crate::envmodel::LocationTuple;

/// Which initial estimate personalization starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorKind {
    Uniform,
    InSitu,
    Empirical,
}

impl PriorKind {
    pub const ALL: [PriorKind; 3] = [PriorKind::Uniform, PriorKind::InSitu, PriorKind::Empirical];

    pub fn as_str(self) -> &'static str {
        match self {
            PriorKind::Uniform => "uniform",
            PriorKind::InSitu => "insitu",
            PriorKind::Empirical => "empirical",
        }
    }
}

impl fmt::Display for PriorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PriorKind {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(PriorKind::Uniform),
            "insitu" | "in-situ" => Ok(PriorKind::InSitu),
            "empirical" => Ok(PriorKind::Empirical),
            other => Err(OntologyError::InvalidParameter(format!("unknown prior `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub kind: PriorKind,
    /// Additive smoothing for the count-based estimates.
    pub lambda: f64,
    /// Exploration episodes used to build the in-situ estimate.
    pub insitu_episodes: u32,
}

impl PriorSpec {
    pub fn new(kind: PriorKind) -> Self {
        Self {
            kind,
            lambda: SMOOTHING_LAMBDA,
            insitu_episodes: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(OntologyError::InvalidParameter(format!(
                "lambda {} must be > 0",
                self.lambda
            )));
        }
        if self.insitu_episodes == 0 {
            return Err(OntologyError::InvalidParameter(
                "in-situ episode count must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Every object equally likely at every tuple.
pub fn uniform_prior(objects: &[String], tuples: &[LocationTuple]) -> Result<BeliefMatrix> {
    if tuples.is_empty() {
        return Err(OntologyError::EmptyTuples);
    }
    let w = vec![1.0; objects.len() * tuples.len()];
    BeliefMatrix::from_weights(objects.to_vec(), tuples.to_vec(), w)
}

/// Object-at-tuple co-occurrence counts mined offline.
///
/// Counts may mention tuples the current environment lacks; they still
/// contribute to the per-object total `N(O)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmpiricalCounts {
    counts: BTreeMap<String, BTreeMap<LocationTuple, f64>>,
}

#[derive(Debug, Deserialize)]
struct CountRecord {
    object: String,
    landmark: String,
    room: String,
    count: f64,
}

impl EmpiricalCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, object: &str, tuple: LocationTuple, count: f64) {
        *self
            .counts
            .entry(object.to_string())
            .or_default()
            .entry(tuple)
            .or_default() += count;
    }

    pub fn get(&self, object: &str, tuple: &LocationTuple) -> f64 {
        self.counts
            .get(object)
            .and_then(|m| m.get(tuple))
            .copied()
            .unwrap_or(0.0)
    }

    /// `N(O)`, the total count for one object.
    pub fn total(&self, object: &str) -> f64 {
        self.counts.get(object).map_or(0.0, |m| m.values().sum())
    }

    /// Parses CSV with header `object,landmark,room,count`; `#` lines are comments.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> std::result::Result<Self, csv::Error> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut out = Self::new();
        for rec in rdr.deserialize() {
            let rec: CountRecord = rec?;
            let room = rec.room.parse().map_err(|e: crate::envmodel::EnvError| {
                csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))
            })?;
            if !(rec.count >= 0.0 && rec.count.is_finite()) {
                return Err(csv::Error::from(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("negative count for {}", rec.object),
                )));
            }
            out.insert(&rec.object, LocationTuple::new(rec.landmark, room), rec.count);
        }
        Ok(out)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> std::result::Result<Self, csv::Error> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Counts shipped with the crate for the reference household.
    pub fn reference() -> Self {
        Self::from_csv_reader(REFERENCE_COUNTS.as_bytes()).expect("shipped counts parse")
    }
}

const REFERENCE_COUNTS: &str = include_str!("../../data/empirical_counts.csv");

/// `(N(O∩T) + λ) / (N(O) + λn)`, rows renormalized over `tuples`.
pub fn empirical_prior(
    objects: &[String],
    tuples: &[LocationTuple],
    counts: &EmpiricalCounts,
    lambda: f64,
    n: f64,
) -> Result<BeliefMatrix> {
    if !(lambda > 0.0) {
        return Err(OntologyError::InvalidParameter(format!("lambda {lambda} must be > 0")));
    }
    if tuples.is_empty() {
        return Err(OntologyError::EmptyTuples);
    }
    let mut w = Vec::with_capacity(objects.len() * tuples.len());
    for o in objects {
        let denom = counts.total(o) + lambda * n;
        w.extend(tuples.iter().map(|t| (counts.get(o, t) + lambda) / denom));
    }
    BeliefMatrix::from_weights(objects.to_vec(), tuples.to_vec(), w)
}

/// Add-λ relative frequencies of `(object, tuple)` sightings.
pub fn insitu_prior(
    objects: &[String],
    tuples: &[LocationTuple],
    log: &[(String, LocationTuple)],
    lambda: f64,
) -> Result<BeliefMatrix> {
    if !(lambda > 0.0) {
        return Err(OntologyError::InvalidParameter(format!("lambda {lambda} must be > 0")));
    }
    let mut counts = EmpiricalCounts::new();
    for (o, t) in log {
        if !objects.contains(o) {
            return Err(OntologyError::UnknownObject(o.clone()));
        }
        if !tuples.contains(t) {
            return Err(OntologyError::UnknownTuple(t.name()));
        }
        counts.insert(o, t.clone(), 1.0);
    }
    empirical_prior(objects, tuples, &counts, lambda, tuples.len() as f64)
}
