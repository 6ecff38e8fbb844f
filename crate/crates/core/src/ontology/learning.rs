use std::collections::VecDeque;

use super::belief::normalize;
use super::{BeliefMatrix, OntologyError, Result, DISCOUNT, HISTORY_HORIZON, PROBABILITY_FLOOR};
use crate::envmodel::LocationTuple;

/// `2 − [δ(L,L') + δ(R,R')]`: zero for the same tuple, one when only the
/// landmark category or only the room matches, two otherwise.
pub fn similarity(t: &LocationTuple, t2: &LocationTuple) -> u8 {
    2 - u8::from(t.landmark == t2.landmark) - u8::from(t.room == t2.room)
}

/// One multi-resolution P-learning step for `object` seen at `observed`
/// during episode `episode`.
pub fn observe_update(
    belief: &BeliefMatrix,
    object: &str,
    observed: &LocationTuple,
    beta: f64,
    episode: u32,
) -> Result<BeliefMatrix> {
    let o = belief.object_index(object)?;
    let t = belief.tuple_index(observed)?;
    let mut out = belief.clone();
    observe_update_at(&mut out, o, t, beta, episode)?;
    Ok(out)
}

/// In-place form of [`observe_update`] addressed by indices.
///
/// Each entry is floored at `min(previous value, PROBABILITY_FLOOR)`, so an
/// unobserved zero entry stays zero and a step with `β = 0` is the identity.
pub(crate) fn observe_update_at(
    belief: &mut BeliefMatrix,
    object: usize,
    observed: usize,
    beta: f64,
    episode: u32,
) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(OntologyError::InvalidParameter(format!(
            "learning rate {beta} outside [0, 1]"
        )));
    }
    if episode == 0 {
        return Err(OntologyError::InvalidParameter("episode index must be >= 1".into()));
    }
    let step = beta / f64::from(episode).sqrt();
    if step == 0.0 {
        return Ok(());
    }
    let kernel: Vec<f64> = {
        let obs = &belief.tuples()[observed];
        belief.tuples().iter().map(|t| f64::from(similarity(obs, t))).collect()
    };
    let name = belief.objects()[object].clone();
    let row = belief.row_mut(object);
    for (i, p) in row.iter_mut().enumerate() {
        let old = *p;
        let raw = if i == observed {
            old + step * (1.0 - old)
        } else {
            old - step * kernel[i] * (1.0 - old)
        };
        *p = raw.max(old.min(PROBABILITY_FLOOR));
    }
    normalize(row).ok_or(OntologyError::ZeroMass(name))
}

/// Bounded buffer of per-episode belief snapshots, newest first.
#[derive(Debug, Clone)]
pub struct EpisodeHistory {
    buffer: VecDeque<BeliefMatrix>,
    horizon: usize,
    gamma: f64,
}

impl Default for EpisodeHistory {
    fn default() -> Self {
        Self::new(HISTORY_HORIZON, DISCOUNT).expect("default history parameters are valid")
    }
}

impl EpisodeHistory {
    pub fn new(horizon: usize, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(OntologyError::InvalidParameter(format!(
                "discount {gamma} outside (0, 1]"
            )));
        }
        Ok(Self {
            buffer: VecDeque::with_capacity(horizon + 1),
            horizon,
            gamma,
        })
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Adds the newest snapshot, evicting anything older than the horizon.
    pub fn push(&mut self, snapshot: BeliefMatrix) -> Result<()> {
        if let Some(front) = self.buffer.front() {
            if !front.same_layout(&snapshot) {
                return Err(OntologyError::ShapeMismatch(
                    "snapshot objects/tuples differ from history".into(),
                ));
            }
        }
        self.buffer.push_front(snapshot);
        self.buffer.truncate(self.horizon + 1);
        Ok(())
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &BeliefMatrix> {
        self.buffer.iter()
    }

    /// Discounted sum `Σ γ^t P_{τ−t}` over the buffer, rows renormalized.
    pub fn aggregate(&self) -> Result<BeliefMatrix> {
        let newest = self.buffer.front().ok_or(OntologyError::EmptyHistory)?;
        let mut out = newest.clone();
        let mut weight = 1.0;
        for snap in self.buffer.iter().skip(1) {
            weight *= self.gamma;
            for (acc, v) in out.values_mut().iter_mut().zip(snap.values()) {
                *acc += weight * v;
            }
        }
        let n = out.num_tuples();
        for o in 0..out.objects().len() {
            normalize(&mut out.values_mut()[o * n..(o + 1) * n])
                .ok_or_else(|| OntologyError::ZeroMass(newest.objects()[o].clone()))?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envmodel::RoomLabel::*;
    use approx::assert_abs_diff_eq;

    fn tuples() -> Vec<LocationTuple> {
        vec![
            LocationTuple::new("table", LivingRoom),
            LocationTuple::new("sofa", LivingRoom),
            LocationTuple::new("table", StudyRoom),
            LocationTuple::new("bed", Bedroom),
        ]
    }

    fn uniform() -> BeliefMatrix {
        BeliefMatrix::new(vec!["phone".into()], tuples(), vec![0.25; 4]).unwrap()
    }

    #[test]
    fn similarity_cases() {
        let t = tuples();
        assert_eq!(similarity(&t[0], &t[2]), 1);
        assert_eq!(similarity(&t[0], &t[1]), 1);
        assert_eq!(similarity(&t[0], &t[3]), 2);
        assert_eq!(similarity(&t[0], &t[0]), 0);
    }

    #[test]
    fn hand_evaluated_update() {
        // pre-normalization (0.325, 0.175, 0.175, 0.10), sum 0.775
        let b = observe_update(&uniform(), "phone", &tuples()[0], 0.1, 1).unwrap();
        let expected = [0.325 / 0.775, 0.175 / 0.775, 0.175 / 0.775, 0.10 / 0.775];
        for (got, want) in b.row(0).iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(b.row(0)[0], 0.4194, epsilon = 1e-4);
        assert_abs_diff_eq!(b.row(0)[3], 0.1290, epsilon = 1e-4);
    }

    #[test]
    fn certain_row_is_fixed_point() {
        let b = BeliefMatrix::new(vec!["phone".into()], tuples(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let after = observe_update(&b, "phone", &tuples()[0], 0.1, 3).unwrap();
        assert_eq!(after.row(0), b.row(0));
    }

    #[test]
    fn zero_learning_rate_is_identity() {
        let b = BeliefMatrix::new(vec!["phone".into()], tuples(), vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let after = observe_update(&b, "phone", &tuples()[2], 0.0, 1).unwrap();
        assert_eq!(after.row(0), b.row(0));
    }

    #[test]
    fn large_decrements_hit_the_floor() {
        let b = BeliefMatrix::new(vec!["phone".into()], tuples(), vec![0.7, 0.1, 0.1, 0.1]).unwrap();
        let after = observe_update(&b, "phone", &tuples()[1], 1.0, 1).unwrap();
        assert!(after.row(0).iter().all(|&p| p > 0.0));
        let sum: f64 = after.row(0).iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bad_inputs() {
        let b = uniform();
        assert!(observe_update(&b, "cup", &tuples()[0], 0.1, 1).is_err());
        assert!(observe_update(&b, "phone", &LocationTuple::new("tv", LivingRoom), 0.1, 1).is_err());
        assert!(observe_update(&b, "phone", &tuples()[0], 1.5, 1).is_err());
        assert!(observe_update(&b, "phone", &tuples()[0], 0.1, 0).is_err());
    }

    fn two_tuple(p: [f64; 2]) -> BeliefMatrix {
        BeliefMatrix::new(vec!["x".into()], tuples()[..2].to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn aggregate_two_snapshots() {
        let mut h = EpisodeHistory::new(1, 0.9).unwrap();
        h.push(two_tuple([0.2, 0.8])).unwrap();
        h.push(two_tuple([0.6, 0.4])).unwrap();
        let agg = h.aggregate().unwrap();
        assert_abs_diff_eq!(agg.row(0)[0], 0.78 / 1.9, epsilon = 1e-12);
        assert_abs_diff_eq!(agg.row(0)[1], 1.12 / 1.9, epsilon = 1e-12);
        assert_abs_diff_eq!(agg.row(0)[0], 0.4105, epsilon = 1e-4);
    }

    #[test]
    fn aggregate_single_and_identical() {
        let mut h = EpisodeHistory::default();
        assert_eq!(h.aggregate(), Err(OntologyError::EmptyHistory));
        h.push(two_tuple([0.3, 0.7])).unwrap();
        assert_eq!(h.aggregate().unwrap().row(0), &[0.3, 0.7]);
        for _ in 0..10 {
            h.push(two_tuple([0.3, 0.7])).unwrap();
        }
        assert_eq!(h.len(), HISTORY_HORIZON + 1);
        let agg = h.aggregate().unwrap();
        assert_abs_diff_eq!(agg.row(0)[0], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn history_rejects_layout_change() {
        let mut h = EpisodeHistory::default();
        h.push(two_tuple([0.3, 0.7])).unwrap();
        assert!(h.push(uniform()).is_err());
    }
}
