//! Personalizes a uniform ontology for one seed and prints how it converged.

use ontosearch::envmodel::Environment;
use ontosearch::harness::{personalize, ExperimentConfig};
use ontosearch::ontology::{EmpiricalCounts, PriorKind};

fn main() {
    let env = Environment::reference();
    let counts = EmpiricalCounts::reference();
    let opts = ExperimentConfig::default().personalize_options(PriorKind::Uniform);
    let run = personalize(&env, &counts, &opts, 7).expect("personalization");

    match run.termination {
        Some(e) => println!("Wilson gate closed after {e} episodes"),
        None => println!("no termination within {} episodes", run.episodes()),
    }
    let first = run.kl[0];
    let last = *run.kl.last().unwrap();
    println!("mean KL: episode 1 {first:.3} -> final {last:.4}");

    let belief = run.final_belief();
    let l1 = run.l1_to_truth(&env);
    for (o, name) in env.objects().iter().enumerate() {
        let best = (0..env.tuples().len())
            .max_by(|&a, &b| belief.get(o, a).total_cmp(&belief.get(o, b)))
            .unwrap();
        println!(
            "{name:>10}: {} ({:.3}), object gate at {:?}, L1 to truth {:.3}",
            env.tuples()[best].name(),
            belief.get(o, best),
            run.object_threshold[o],
            l1[o]
        );
    }
}
