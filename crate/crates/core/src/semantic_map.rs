//! Landmark tracking and room labelling on synthetic detections.
//!
//! New detections are associated with existing tracks through a Euclidean
//! distance matrix and an optimal assignment; matched tracks are refined with
//! a static-position Kalman filter. Regions are labelled by multiplying the
//! per-landmark room likelihoods taken from a co-occurrence frequency table.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envmodel::RoomLabel;

/// Association gate in meters; matched pairs farther apart are dissolved.
pub const ASSOCIATION_GATE: f64 = 0.5;
/// Per-axis variance of a freshly spawned track, m².
pub const INITIAL_VARIANCE: f64 = 1.0;
/// Per-axis detection noise variance, m².
pub const MEASUREMENT_VARIANCE: f64 = 0.04;

#[derive(Debug, Error)]
pub enum SemanticError {
    #[error("track category `{track}` does not match detection category `{detection}`")]
    CategoryMismatch { track: String, detection: String },
    #[error("measurement variance must be positive, got {0}")]
    BadVariance(f64),
    #[error("category `{0}` has no counts in the frequency table")]
    UnknownCategory(String),
    #[error("region is ambiguous: every room label has zero posterior")]
    AmbiguousRegion,
    #[error("frequency table: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SemanticError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub category: String,
    pub position: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub id: usize,
    pub category: String,
    pub mean: Point2,
    /// Per-axis variance.
    pub variance: [f64; 2],
}

/// `D[k][l]`: distance from track `k`'s mean to detection `l`.
pub fn association_matrix(tracks: &[Track], detections: &[Detection]) -> Vec<Vec<f64>> {
    tracks
        .iter()
        .map(|t| detections.iter().map(|d| t.mean.distance(d.position)).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    /// `(row, column)` pairs, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

impl Assignment {
    pub fn total_cost(&self, costs: &[Vec<f64>]) -> f64 {
        self.pairs.iter().map(|&(r, c)| costs[r][c]).sum()
    }
}

/// Minimum-cost matching of size `min(K, L)`; pairs costing more than `gate`
/// are then dissolved into the unmatched sets.
pub fn assign_gated(costs: &[Vec<f64>], gate: f64) -> Assignment {
    let rows = costs.len();
    let cols = costs.first().map_or(0, Vec::len);
    let mut pairs = min_cost_matching(costs);
    pairs.retain(|&(r, c)| costs[r][c] <= gate);
    let unmatched_rows = (0..rows).filter(|r| !pairs.iter().any(|p| p.0 == *r)).collect();
    let unmatched_cols = (0..cols).filter(|c| !pairs.iter().any(|p| p.1 == *c)).collect();
    Assignment {
        pairs,
        unmatched_rows,
        unmatched_cols,
    }
}

/// [`assign_gated`] with [`ASSOCIATION_GATE`].
pub fn assign(costs: &[Vec<f64>]) -> Assignment {
    assign_gated(costs, ASSOCIATION_GATE)
}

/// Hungarian algorithm with row/column potentials, O(n²m) for an `n x m`
/// matrix with `n <= m`; wider-than-tall inputs are transposed.
pub fn min_cost_matching(costs: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = costs.len();
    let cols = costs.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    if rows > cols {
        let transposed: Vec<Vec<f64>> = (0..cols).map(|c| (0..rows).map(|r| costs[r][c]).collect()).collect();
        let mut pairs: Vec<(usize, usize)> = min_cost_matching(&transposed)
            .into_iter()
            .map(|(c, r)| (r, c))
            .collect();
        pairs.sort_unstable();
        return pairs;
    }
    let (n, m) = (rows, cols);
    // 1-based arrays; column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .filter(|&j| owner[j] != 0)
        .map(|j| (owner[j] - 1, j - 1))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Static-position Kalman update applied independently per axis.
pub fn kalman_update(track: &Track, detection: &Detection, meas_var: f64) -> Result<Track> {
    if track.category != detection.category {
        return Err(SemanticError::CategoryMismatch {
            track: track.category.clone(),
            detection: detection.category.clone(),
        });
    }
    if !(meas_var > 0.0) {
        return Err(SemanticError::BadVariance(meas_var));
    }
    let axis = |mean: f64, var: f64, z: f64| {
        let gain = var / (var + meas_var);
        (mean + gain * (z - mean), (1.0 - gain) * var)
    };
    let (mx, vx) = axis(track.mean.x, track.variance[0], detection.position.x);
    let (my, vy) = axis(track.mean.y, track.variance[1], detection.position.y);
    Ok(Track {
        id: track.id,
        category: track.category.clone(),
        mean: Point2::new(mx, my),
        variance: [vx, vy],
    })
}

/// Persistent landmark tracks fed one frame of detections at a time.
#[derive(Debug, Clone, Default)]
pub struct LandmarkTracker {
    tracks: Vec<Track>,
    next_id: usize,
}

impl LandmarkTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    /// Associates per category, refines matched tracks and spawns tracks for
    /// unmatched detections. Unmatched tracks persist.
    pub fn observe(&mut self, detections: &[Detection]) -> Result<()> {
        let mut by_cat: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, d) in detections.iter().enumerate() {
            by_cat.entry(d.category.as_str()).or_default().push(i);
        }
        for (cat, det_idx) in by_cat {
            let track_idx: Vec<usize> = (0..self.tracks.len())
                .filter(|&k| self.tracks[k].category == cat)
                .collect();
            let tracks: Vec<Track> = track_idx.iter().map(|&k| self.tracks[k].clone()).collect();
            let dets: Vec<Detection> = det_idx.iter().map(|&i| detections[i].clone()).collect();
            let a = assign(&association_matrix(&tracks, &dets));
            for &(k, l) in &a.pairs {
                let slot = track_idx[k];
                self.tracks[slot] = kalman_update(&self.tracks[slot], &dets[l], MEASUREMENT_VARIANCE)?;
            }
            let spawn = if tracks.is_empty() {
                (0..dets.len()).collect()
            } else {
                a.unmatched_cols
            };
            for l in spawn {
                self.tracks.push(Track {
                    id: self.next_id,
                    category: dets[l].category.clone(),
                    mean: dets[l].position,
                    variance: [INITIAL_VARIANCE; 2],
                });
                self.next_id += 1;
            }
        }
        Ok(())
    }
}

/// Landmark-category by room-label occurrence counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrequencyTable {
    rows: BTreeMap<String, [f64; RoomLabel::COUNT]>,
}

#[derive(Debug, Deserialize)]
struct FrequencyRecord {
    category: String,
    bedroom: f64,
    living: f64,
    bathroom: f64,
    study: f64,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts in [`RoomLabel::ALL`] order.
    pub fn insert(&mut self, category: &str, counts: [f64; RoomLabel::COUNT]) {
        self.rows.insert(category.to_string(), counts);
    }

    pub fn row(&self, category: &str) -> Option<&[f64; RoomLabel::COUNT]> {
        self.rows.get(category)
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// CSV with header `category,bedroom,living,bathroom,study`; lines
    /// starting with `#` (such as the provenance note) are skipped.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        let expected = ["category", "bedroom", "living", "bathroom", "study"];
        if header.iter().ne(expected) {
            return Err(SemanticError::Csv(csv::Error::from(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("expected header {}", expected.join(",")),
            ))));
        }
        let mut table = Self::new();
        for rec in rdr.deserialize() {
            let r: FrequencyRecord = rec?;
            table.insert(&r.category, [r.bedroom, r.living, r.bathroom, r.study]);
        }
        Ok(table)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(csv::Error::from)?;
        Self::from_csv_reader(file)
    }

    /// Curated table shipped with the crate.
    pub fn reference() -> Self {
        Self::from_csv_reader(REFERENCE_FREQUENCIES.as_bytes()).expect("shipped frequency table parses")
    }

    /// `P(R_j | L_i) = F_ij / Σ_j F_ij`.
    pub fn room_given_landmark(&self, category: &str) -> Result<[f64; RoomLabel::COUNT]> {
        let row = self
            .rows
            .get(category)
            .ok_or_else(|| SemanticError::UnknownCategory(category.to_string()))?;
        let total: f64 = row.iter().sum();
        if !(total > 0.0) {
            return Err(SemanticError::UnknownCategory(category.to_string()));
        }
        Ok(row.map(|f| f / total))
    }
}

const REFERENCE_FREQUENCIES: &str = include_str!("../data/frequency_table.csv");

/// Room-label distribution of a region holding `categories`: the product of
/// per-landmark likelihoods renormalized over the four labels.
pub fn label_room(categories: &[&str], table: &FrequencyTable) -> Result<[f64; RoomLabel::COUNT]> {
    let mut post = [1.0; RoomLabel::COUNT];
    for c in categories {
        let lik = table.room_given_landmark(c)?;
        for (p, l) in post.iter_mut().zip(lik) {
            *p *= l;
        }
    }
    let z: f64 = post.iter().sum();
    if !(z > 0.0) {
        return Err(SemanticError::AmbiguousRegion);
    }
    Ok(post.map(|p| p / z))
}
