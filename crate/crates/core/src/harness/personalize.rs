use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envmodel::{episode_rng, sample_placements, Environment, RngStream};
use crate::ontology::{
    check_termination, empirical_prior, insitu_prior, kl_divergence, observe_update, uniform_prior, BeliefMatrix,
    EmpiricalCounts, EpisodeHistory, PriorKind, PriorSpec, KL_EPSILON,
};
use crate::planner::SearchSpace;

use super::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersonalizeOptions {
    pub prior: PriorSpec,
    pub max_episodes: u32,
    pub beta: f64,
    pub epsilon: f64,
}

/// One seed's personalization trajectory.
#[derive(Debug, Clone)]
pub struct PersonalizationRun {
    pub seed: u64,
    pub prior: PriorKind,
    pub initial: BeliefMatrix,
    /// Aggregated belief after each episode; entry `e − 1` is episode `e`.
    pub timeline: Vec<BeliefMatrix>,
    /// Episode at which every Wilson interval fell under the threshold.
    pub termination: Option<u32>,
    /// Mean KL over objects, per episode.
    pub kl: Vec<f64>,
    /// `object_kl[e − 1][o]`.
    pub object_kl: Vec<Vec<f64>>,
    /// First episode each object's own intervals were all under threshold.
    pub object_threshold: Vec<Option<u32>>,
    /// Meters walked on each episode's tour.
    pub tour_distance: Vec<f64>,
}

impl PersonalizationRun {
    pub fn episodes(&self) -> u32 {
        self.timeline.len() as u32
    }

    pub fn final_belief(&self) -> &BeliefMatrix {
        self.timeline.last().unwrap_or(&self.initial)
    }

    /// Aggregated belief after `episode`, clamped to the last episode run.
    pub fn snapshot(&self, episode: u32) -> &BeliefMatrix {
        if episode == 0 || self.timeline.is_empty() {
            return &self.initial;
        }
        let e = episode.min(self.episodes()) as usize;
        &self.timeline[e - 1]
    }

    /// Per-object L1 distance between the final belief and the truth.
    pub fn l1_to_truth(&self, env: &Environment) -> Vec<f64> {
        let b = self.final_belief();
        (0..env.objects().len())
            .map(|o| b.row(o).iter().zip(env.truth_row(o)).map(|(p, q)| (p - q).abs()).sum())
            .collect()
    }
}

/// The starting belief for a prior kind. In-situ estimates come from
/// `insitu_episodes` exploration tours on their own random stream.
pub fn initial_belief(
    env: &Environment,
    counts: &EmpiricalCounts,
    prior: &PriorSpec,
    seed: u64,
) -> Result<BeliefMatrix> {
    prior.validate()?;
    let objects = env.objects();
    let tuples = env.tuples();
    let b = match prior.kind {
        PriorKind::Uniform => uniform_prior(objects, tuples)?,
        PriorKind::Empirical => empirical_prior(objects, tuples, counts, prior.lambda, tuples.len() as f64)?,
        PriorKind::InSitu => {
            let mut log = Vec::new();
            for e in 1..=prior.insitu_episodes {
                let mut rng = episode_rng(seed, RngStream::InSitu, e);
                let world = sample_placements(env, e, &mut rng)?;
                for (o, &t) in world.placements.iter().enumerate() {
                    log.push((objects[o].clone(), tuples[t].clone()));
                }
            }
            insitu_prior(objects, tuples, &log, prior.lambda)?
        }
    };
    Ok(b)
}

/// Episodic personalization from a prior until the Wilson gate closes or
/// `max_episodes` have run.
///
/// Each episode samples placements, tours every tuple once in ε-greedy order
/// of summed object probability, applies one learning step per object at the
/// tuple it was seen, then aggregates the discounted history.
pub fn personalize(
    env: &Environment,
    counts: &EmpiricalCounts,
    opts: &PersonalizeOptions,
    seed: u64,
) -> Result<PersonalizationRun> {
    if opts.max_episodes == 0 {
        return Err(HarnessError::Config("max episodes must be >= 1".into()));
    }
    let space = SearchSpace::new(env);
    let initial = initial_belief(env, counts, &opts.prior, seed)?;
    let mut learned = initial.clone();
    let mut aggregate = initial.clone();
    let mut history = EpisodeHistory::default();
    let n_obj = env.objects().len();
    let mut run = PersonalizationRun {
        seed,
        prior: opts.prior.kind,
        initial: initial.clone(),
        timeline: Vec::new(),
        termination: None,
        kl: Vec::new(),
        object_kl: Vec::new(),
        object_threshold: vec![None; n_obj],
        tour_distance: Vec::new(),
    };
    let start = env
        .start()
        .or_else(|| env.map().free_cells().next())
        .ok_or_else(|| HarnessError::Config("environment has no free cell".into()))?;

    for episode in 1..=opts.max_episodes {
        let mut rng = episode_rng(seed, RngStream::Placements, episode);
        let world = sample_placements(env, episode, &mut rng)?;

        let mut tour_rng = episode_rng(seed, RngStream::Tour, episode);
        let order = tour_order(&aggregate, opts.epsilon, &mut tour_rng);
        let mut at = start;
        let mut walked = 0.0;
        for &t in &order {
            walked += space.distance_to(at, t)?;
            at = env.approach_cell(t);
        }
        run.tour_distance.push(walked);

        for (o, name) in env.objects().iter().enumerate() {
            let seen = &env.tuples()[world.placement(o)];
            learned = observe_update(&learned, name, seen, opts.beta, episode)?;
        }
        history.push(learned.clone())?;
        aggregate = history.aggregate()?;

        let per_obj: Vec<f64> = (0..n_obj)
            .map(|o| kl_divergence(aggregate.row(o), env.truth_row(o), KL_EPSILON))
            .collect();
        run.kl.push(per_obj.iter().sum::<f64>() / n_obj as f64);
        run.object_kl.push(per_obj);

        let report = check_termination(&aggregate, episode)?;
        for (o, name) in env.objects().iter().enumerate() {
            if run.object_threshold[o].is_none() && report.object_converged(name) {
                run.object_threshold[o] = Some(episode);
            }
        }
        run.timeline.push(aggregate.clone());
        if report.terminated {
            run.termination = Some(episode);
            break;
        }
    }
    Ok(run)
}

/// Full tour: with probability `epsilon` a uniformly random remaining tuple,
/// otherwise the remaining tuple with the most summed object probability.
fn tour_order<R: Rng>(belief: &BeliefMatrix, epsilon: f64, rng: &mut R) -> Vec<usize> {
    let n = belief.num_tuples();
    let score: Vec<f64> = (0..n)
        .map(|t| (0..belief.objects().len()).map(|o| belief.get(o, t)).sum())
        .collect();
    let mut left: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while !left.is_empty() {
        let pos = if rng.gen::<f64>() < epsilon {
            rng.gen_range(0..left.len())
        } else {
            (0..left.len())
                .min_by(|&a, &b| score[left[b]].total_cmp(&score[left[a]]).then(left[a].cmp(&left[b])))
                .expect("non-empty")
        };
        order.push(left.remove(pos));
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(kind: PriorKind, max: u32) -> PersonalizeOptions {
        PersonalizeOptions {
            prior: PriorSpec::new(kind),
            max_episodes: max,
            beta: 0.1,
            epsilon: 0.1,
        }
    }

    #[test]
    fn same_seed_same_timeline() {
        let env = Environment::reference();
        let counts = EmpiricalCounts::reference();
        let a = personalize(&env, &counts, &opts(PriorKind::Uniform, 20), 7).unwrap();
        let b = personalize(&env, &counts, &opts(PriorKind::Uniform, 20), 7).unwrap();
        assert_eq!(a.timeline, b.timeline);
        assert_eq!(a.kl, b.kl);
        let c = personalize(&env, &counts, &opts(PriorKind::Uniform, 20), 8).unwrap();
        assert_ne!(a.timeline, c.timeline);
    }

    #[test]
    fn zero_episodes_rejected() {
        let env = Environment::reference();
        let err = personalize(&env, &EmpiricalCounts::reference(), &opts(PriorKind::Uniform, 0), 1);
        assert!(matches!(err, Err(HarnessError::Config(_))));
    }

    #[test]
    fn tour_visits_every_tuple_once() {
        let env = Environment::reference();
        let b = uniform_prior(env.objects(), env.tuples()).unwrap();
        let mut rng = episode_rng(3, RngStream::Tour, 1);
        let mut order = tour_order(&b, 0.5, &mut rng);
        order.sort_unstable();
        assert_eq!(order, (0..env.tuples().len()).collect::<Vec<_>>());
    }

    #[test]
    fn priors_build_for_reference() {
        let env = Environment::reference();
        let counts = EmpiricalCounts::reference();
        for kind in PriorKind::ALL {
            let b = initial_belief(&env, &counts, &PriorSpec::new(kind), 0).unwrap();
            assert_eq!(b.objects(), env.objects());
        }
    }
}
