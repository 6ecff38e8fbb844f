//! Runs the planner comparison on a few seeds and writes CSV tables.
//!
//! ```text
//! cargo run --release --example studies -- /tmp/ontosearch-out
//! ```

use std::path::PathBuf;

use ontosearch::envmodel::Environment;
use ontosearch::harness::{emit, study_compare, ExperimentConfig, OutputFormat};
use ontosearch::ontology::EmpiricalCounts;

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("ontosearch-studies"));
    let env = Environment::reference();
    let counts = EmpiricalCounts::reference();
    let cfg = ExperimentConfig {
        seeds: (0..5).collect(),
        ..ExperimentConfig::default()
    };

    let outcome = study_compare(&env, &counts, &cfg).expect("study");
    for label in &outcome.labels {
        println!(
            "{label:>14}: {:6.2} m, {:.2} visits",
            outcome.mean_distance(label),
            outcome.mean_visits(label)
        );
    }
    let report = outcome.report(&env, &cfg);
    for f in emit(&report, &out, OutputFormat::Csv).expect("write") {
        println!("wrote {}", f.display());
    }
}
