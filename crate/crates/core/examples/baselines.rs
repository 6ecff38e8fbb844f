//! Every planner on the same scenario: the generic prior for the baselines,
//! the personalized ontology for the adaptive planner.

use ontosearch::envmodel::{Environment, WorldState};
use ontosearch::harness::{initial_belief, personalize, ExperimentConfig};
use ontosearch::ontology::{EmpiricalCounts, PriorKind};
use ontosearch::planner::{run_search, PlannerConfig, PlannerKind, SearchTask};

fn main() {
    let env = Environment::reference();
    let counts = EmpiricalCounts::reference();
    let cfg = ExperimentConfig::default();
    let seed = 11;
    let personal =
        personalize(&env, &counts, &cfg.personalize_options(PriorKind::Uniform), seed).expect("personalization");
    let generic = initial_belief(&env, &counts, &cfg.prior_spec(PriorKind::Empirical), seed).expect("prior");

    let target = "cup";
    let o = env.object_index(target).unwrap();
    let task = SearchTask::single(target, env.start().unwrap());
    for (rank, &t) in env.most_likely_tuples(o, 3).iter().enumerate() {
        let mut placements = vec![0; env.objects().len()];
        placements[o] = t;
        let world = WorldState { episode: 1, placements };
        println!("{target} at {} (rank {})", env.tuples()[t].name(), rank + 1);
        for kind in PlannerKind::ALL {
            let belief = if kind == PlannerKind::Adaptive {
                personal.final_belief()
            } else {
                &generic
            };
            let r = run_search(&env, &world, &task, belief, &PlannerConfig::new(kind)).expect("search");
            println!(
                "  {:>8}: {:6.2} m, {} visits",
                kind.as_str(),
                r.total_distance(),
                r.visits()
            );
        }
    }
}
