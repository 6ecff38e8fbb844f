//! Sequential two-object search with the adaptive planner, with and without
//! dynamic belief updates.

use ontosearch::envmodel::{Environment, WorldState};
use ontosearch::harness::{personalize, ExperimentConfig};
use ontosearch::ontology::{EmpiricalCounts, PriorKind};
use ontosearch::planner::{run_search, PlannerConfig, PlannerKind, SearchTask};

fn main() {
    let env = Environment::reference();
    let counts = EmpiricalCounts::reference();
    let opts = ExperimentConfig::default().personalize_options(PriorKind::Uniform);
    let run = personalize(&env, &counts, &opts, 3).expect("personalization");

    // Both objects sit at their second most likely spot.
    let mut placements: Vec<usize> = (0..env.objects().len())
        .map(|o| env.most_likely_tuples(o, 1)[0])
        .collect();
    for name in ["phone", "book"] {
        let o = env.object_index(name).unwrap();
        placements[o] = env.most_likely_tuples(o, 2)[1];
    }
    let world = WorldState { episode: 1, placements };
    let task = SearchTask::new(vec!["phone".into(), "book".into()], env.start().unwrap());

    for dbu in [false, true] {
        let cfg = PlannerConfig::new(PlannerKind::Adaptive).with_dbu(dbu);
        let r = run_search(&env, &world, &task, run.final_belief(), &cfg).expect("search");
        println!(
            "dbu={dbu}: D1 {:.2} m, DT {:.2} m",
            r.first_distance(),
            r.total_distance()
        );
        for v in &r.sequence {
            println!(
                "  {:<14} +{:.2} m (looking for {})",
                v.tuple.name(),
                v.leg,
                task.targets[v.target]
            );
        }
    }
}
