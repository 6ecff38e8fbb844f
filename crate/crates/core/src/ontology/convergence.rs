use serde::Serialize;

use super::{BeliefMatrix, OntologyError, Result, CI_THRESHOLD, Z_95};
use crate::envmodel::RoomLabel;

/// `P(R|O) ∝ P(O|R)·P(R)` per object, with `P(O|R)` the object's row summed
/// over the tuples in each room. Rooms follow [`RoomLabel::ALL`].
pub fn room_posterior(
    belief: &BeliefMatrix,
    room_prior: &[f64; RoomLabel::COUNT],
) -> Result<Vec<[f64; RoomLabel::COUNT]>> {
    let prior_sum: f64 = room_prior.iter().sum();
    if room_prior.iter().any(|p| *p < 0.0) || (prior_sum - 1.0).abs() > 1e-9 {
        return Err(OntologyError::InvalidParameter(format!(
            "room prior must be a distribution, sums to {prior_sum}"
        )));
    }
    (0..belief.objects().len())
        .map(|o| {
            let mass = belief.room_mass(o);
            let mut post = [0.0; RoomLabel::COUNT];
            for r in 0..RoomLabel::COUNT {
                post[r] = mass[r] * room_prior[r];
            }
            let z: f64 = post.iter().sum();
            if z <= 0.0 {
                return Err(OntologyError::ZeroMass(belief.objects()[o].clone()));
            }
            post.iter_mut().for_each(|p| *p /= z);
            Ok(post)
        })
        .collect()
}

/// Wilson score half-width `zN/(z²+N) · sqrt(σ² + z²/(4N²))` with the binomial
/// standard error `σ² = p̂(1−p̂)/N`.
pub fn wilson_halfwidth(p_hat: f64, n: u32, z: f64) -> f64 {
    let n = f64::from(n.max(1));
    let z2 = z * z;
    let var = p_hat * (1.0 - p_hat) / n;
    (z * n / (z2 + n)) * (var + z2 / (4.0 * n * n)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CiEntry {
    pub object: String,
    pub room: RoomLabel,
    pub p_hat: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub episode: u32,
    /// One entry per (object, room), objects outermost.
    pub entries: Vec<CiEntry>,
    pub terminated: bool,
}

impl ConvergenceReport {
    /// Whether every room interval of `object` is within the threshold.
    pub fn object_converged(&self, object: &str) -> bool {
        self.entries
            .iter()
            .filter(|e| e.object == object)
            .all(|e| e.half_width <= CI_THRESHOLD)
    }

    pub fn max_half_width(&self) -> f64 {
        self.entries.iter().map(|e| e.half_width).fold(0.0, f64::max)
    }
}

/// Terminates when the 95% Wilson half-width of `P(R|O)` under a uniform
/// room prior is at most [`CI_THRESHOLD`] for every object and room.
pub fn check_termination(belief: &BeliefMatrix, episode: u32) -> Result<ConvergenceReport> {
    if episode == 0 {
        return Err(OntologyError::InvalidParameter("episode index must be >= 1".into()));
    }
    let prior = [1.0 / RoomLabel::COUNT as f64; RoomLabel::COUNT];
    let posts = room_posterior(belief, &prior)?;
    let mut entries = Vec::with_capacity(posts.len() * RoomLabel::COUNT);
    for (o, post) in posts.iter().enumerate() {
        for room in RoomLabel::ALL {
            let p_hat = post[room.index()];
            entries.push(CiEntry {
                object: belief.objects()[o].clone(),
                room,
                p_hat,
                half_width: wilson_halfwidth(p_hat, episode, Z_95),
            });
        }
    }
    let terminated = entries.iter().all(|e| e.half_width <= CI_THRESHOLD);
    Ok(ConvergenceReport {
        episode,
        entries,
        terminated,
    })
}

/// Smoothed `Σ P·ln((P+ε)/(P_true+ε))`.
///
/// # Panics
/// If the rows differ in length.
pub fn kl_divergence(p: &[f64], p_true: &[f64], eps: f64) -> f64 {
    assert_eq!(p.len(), p_true.len(), "KL rows must have equal length");
    p.iter()
        .zip(p_true)
        .map(|(&a, &b)| {
            if a == 0.0 {
                0.0
            } else {
                a * ((a + eps) / (b + eps)).ln()
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envmodel::LocationTuple;
    use crate::envmodel::RoomLabel::*;
    use approx::assert_abs_diff_eq;

    fn belief(rows: &[&[f64]]) -> BeliefMatrix {
        let tuples = vec![
            LocationTuple::new("bed", Bedroom),
            LocationTuple::new("table", Bedroom),
            LocationTuple::new("table", LivingRoom),
            LocationTuple::new("sink", Bathroom),
        ];
        let objects = (0..rows.len()).map(|i| format!("o{i}")).collect();
        BeliefMatrix::new(objects, tuples, rows.iter().flat_map(|r| r.iter().copied()).collect()).unwrap()
    }

    #[test]
    fn posterior_examples() {
        let uniform = [0.25; 4];
        let b = belief(&[&[0.3, 0.3, 0.4, 0.0]]);
        let p = room_posterior(&b, &uniform).unwrap();
        assert_abs_diff_eq!(p[0][0], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(p[0][1], 0.4, epsilon = 1e-12);

        let b = belief(&[&[0.0, 0.0, 1.0, 0.0]]);
        assert_eq!(room_posterior(&b, &uniform).unwrap()[0], [0.0, 1.0, 0.0, 0.0]);

        let b = belief(&[&[0.25, 0.25, 0.25, 0.25]]);
        let p = room_posterior(&b, &[0.5, 0.25, 0.25, 0.0]).unwrap();
        assert_abs_diff_eq!(
            p[0][0],
            0.5 * 0.5 / (0.5 * 0.5 + 0.25 * 0.25 + 0.25 * 0.25),
            epsilon = 1e-12
        );
        assert!(room_posterior(&b, &[0.5, 0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn wilson_closed_forms() {
        let z: f64 = 1.96;
        for n in [1u32, 7, 35, 200] {
            let nf = f64::from(n);
            let edge = z * z / (2.0 * (z * z + nf));
            assert_abs_diff_eq!(wilson_halfwidth(0.0, n, z), edge, epsilon = 1e-15);
            assert_abs_diff_eq!(wilson_halfwidth(1.0, n, z), edge, epsilon = 1e-15);
        }
        assert_eq!(wilson_halfwidth(0.3, 10, 0.0), 0.0);
        // 1.96·100/103.8416 · sqrt(0.0025 + 3.8416/40000)
        assert_abs_diff_eq!(wilson_halfwidth(0.5, 100, z), 0.096170, epsilon = 1e-5);
    }

    #[test]
    fn termination_needs_every_pair() {
        let b = belief(&[&[1.0, 0.0, 0.0, 0.0]]);
        let r1 = check_termination(&b, 1).unwrap();
        assert!(!r1.terminated);
        assert_abs_diff_eq!(r1.max_half_width(), 3.8416 / (2.0 * 4.8416), epsilon = 1e-12);
        let r = check_termination(&b, 1000).unwrap();
        assert!(r.terminated);
        assert_abs_diff_eq!(r.max_half_width(), 0.0019, epsilon = 1e-4);

        let b = belief(&[&[1.0, 0.0, 0.0, 0.0], &[0.5, 0.0, 0.5, 0.0]]);
        let r = check_termination(&b, 100).unwrap();
        assert!(!r.terminated);
        assert!(r.object_converged("o0"));
        assert!(!r.object_converged("o1"));
    }

    #[test]
    fn earliest_one_hot_termination_is_35() {
        let b = belief(&[&[0.0, 0.0, 0.0, 1.0]]);
        assert!(!check_termination(&b, 34).unwrap().terminated);
        assert!(check_termination(&b, 35).unwrap().terminated);
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence(&[0.2, 0.8], &[0.2, 0.8], 1e-4), 0.0);
        assert_eq!(kl_divergence(&[0.0, 1.0], &[0.0, 1.0], 1e-4), 0.0);
        let expected = 0.5 * (0.5001f64 / 0.2501).ln() + 0.5 * (0.5001f64 / 0.7501).ln();
        let got = kl_divergence(&[0.5, 0.5], &[0.25, 0.75], 1e-4);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(got, 0.1439, epsilon = 1e-3);
    }
}
