use serde::{Deserialize, Serialize};

use super::{OntologyError, Result};
use crate::envmodel::{LocationTuple, RoomLabel};

/// Tolerance on row sums accepted by [`BeliefMatrix::new`].
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Per-object probability rows over location tuples, `P(O|T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefMatrix {
    objects: Vec<String>,
    tuples: Vec<LocationTuple>,
    p: Vec<f64>,
}

impl BeliefMatrix {
    /// Validates shape, non-negativity and row sums.
    pub fn new(objects: Vec<String>, tuples: Vec<LocationTuple>, p: Vec<f64>) -> Result<Self> {
        if tuples.is_empty() {
            return Err(OntologyError::EmptyTuples);
        }
        if p.len() != objects.len() * tuples.len() {
            return Err(OntologyError::ShapeMismatch(format!(
                "{} values for {} objects x {} tuples",
                p.len(),
                objects.len(),
                tuples.len()
            )));
        }
        let m = Self { objects, tuples, p };
        for o in 0..m.objects.len() {
            let row = m.row(o);
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(OntologyError::NotNormalized {
                    object: m.objects[o].clone(),
                    sum: f64::NAN,
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(OntologyError::NotNormalized {
                    object: m.objects[o].clone(),
                    sum,
                });
            }
        }
        Ok(m)
    }

    /// Builds from unnormalized non-negative rows, rescaling each to sum to one.
    pub fn from_weights(objects: Vec<String>, tuples: Vec<LocationTuple>, mut w: Vec<f64>) -> Result<Self> {
        if tuples.is_empty() {
            return Err(OntologyError::EmptyTuples);
        }
        let n = tuples.len();
        for (o, row) in w.chunks_mut(n).enumerate() {
            normalize(row).ok_or_else(|| OntologyError::ZeroMass(objects[o].clone()))?;
        }
        Self::new(objects, tuples, w)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn tuples(&self) -> &[LocationTuple] {
        &self.tuples
    }

    pub fn num_tuples(&self) -> usize {
        self.tuples.len()
    }

    pub fn row(&self, object: usize) -> &[f64] {
        let n = self.tuples.len();
        &self.p[object * n..(object + 1) * n]
    }

    pub(crate) fn row_mut(&mut self, object: usize) -> &mut [f64] {
        let n = self.tuples.len();
        &mut self.p[object * n..(object + 1) * n]
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.p
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.p
    }

    pub fn get(&self, object: usize, tuple: usize) -> f64 {
        self.p[object * self.tuples.len() + tuple]
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| OntologyError::UnknownObject(name.to_string()))
    }

    pub fn tuple_index(&self, tuple: &LocationTuple) -> Result<usize> {
        self.tuples
            .iter()
            .position(|t| t == tuple)
            .ok_or_else(|| OntologyError::UnknownTuple(tuple.name()))
    }

    /// Probability mass an object's row assigns to each room label.
    pub fn room_mass(&self, object: usize) -> [f64; RoomLabel::COUNT] {
        let mut mass = [0.0; RoomLabel::COUNT];
        for (t, p) in self.tuples.iter().zip(self.row(object)) {
            mass[t.room.index()] += p;
        }
        mass
    }

    pub fn same_layout(&self, other: &BeliefMatrix) -> bool {
        self.objects == other.objects && self.tuples == other.tuples
    }

    pub fn snapshot(&self, episode: u32) -> BeliefSnapshot {
        BeliefSnapshot {
            episode,
            objects: self.objects.clone(),
            tuples: self.tuples.iter().map(|t| t.name()).collect(),
            probabilities: (0..self.objects.len()).map(|o| self.row(o).to_vec()).collect(),
        }
    }
}

/// Rescales `row` to sum to one. Returns `None` when the row has no mass.
pub(crate) fn normalize(row: &mut [f64]) -> Option<()> {
    let sum: f64 = row.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return None;
    }
    row.iter_mut().for_each(|p| *p /= sum);
    Some(())
}

/// JSON form of a belief matrix at one episode, used for heatmaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSnapshot {
    pub episode: u32,
    pub objects: Vec<String>,
    pub tuples: Vec<String>,
    pub probabilities: Vec<Vec<f64>>,
}

impl BeliefSnapshot {
    pub fn to_belief(&self) -> Result<BeliefMatrix> {
        let tuples = self
            .tuples
            .iter()
            .map(|s| s.parse().map_err(|_| OntologyError::UnknownTuple(s.clone())))
            .collect::<Result<Vec<LocationTuple>>>()?;
        let p = self.probabilities.iter().flatten().copied().collect();
        BeliefMatrix::new(self.objects.clone(), tuples, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuples() -> Vec<LocationTuple> {
        vec![
            LocationTuple::new("bed", RoomLabel::Bedroom),
            LocationTuple::new("table", RoomLabel::LivingRoom),
        ]
    }

    #[test]
    fn rejects_unnormalized_rows() {
        assert!(BeliefMatrix::new(vec!["a".into()], tuples(), vec![0.5, 0.6]).is_err());
        assert!(BeliefMatrix::new(vec!["a".into()], tuples(), vec![1.5, -0.5]).is_err());
        assert!(BeliefMatrix::new(vec!["a".into()], tuples(), vec![1.0]).is_err());
        assert!(BeliefMatrix::new(vec!["a".into()], vec![], vec![]).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let b = BeliefMatrix::new(vec!["a".into(), "b".into()], tuples(), vec![0.3, 0.7, 1.0, 0.0]).unwrap();
        let json = serde_json::to_string(&b.snapshot(4)).unwrap();
        let back: BeliefSnapshot = serde_json::from_str(&json).unwrap();
        assert_eq!(back.episode, 4);
        assert_eq!(back.to_belief().unwrap(), b);
    }

    #[test]
    fn room_mass_sums_rows_by_label() {
        let b = BeliefMatrix::new(vec!["a".into()], tuples(), vec![0.3, 0.7]).unwrap();
        assert_eq!(b.room_mass(0), [0.3, 0.7, 0.0, 0.0]);
    }
}
