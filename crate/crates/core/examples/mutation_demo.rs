//! Switches off each of the protocol's two guards and shows the check that
//! notices, with the shortest offending run.
//!
//! ```bash
//! cargo run --release -p mapmerge --example mutation_demo
//! ```

use mapmerge::explorer::{explore, ExploreOptions};
use mapmerge::protocol::Mutations;
use mapmerge::{Model, ModelOptions};

fn main() -> mapmerge::Result<()> {
    let mutants = [
        ("priority guard off", Mutations { skip_priority_guard: true, ..Default::default() }),
        ("active guard off", Mutations { skip_active_guard: true, ..Default::default() }),
    ];
    for (label, mutations) in mutants {
        let model = Model::new(3, ModelOptions { mutations, ..Default::default() })?;
        let graph = explore(&model, &model.initial_config(), &ExploreOptions::default());
        println!("{label}: {:?}", graph.violation_counts);
        for v in &graph.violations {
            println!("  {}: {}", v.check, v.detail);
            for e in &v.witness.events {
                println!("      {e}");
            }
        }
    }
    Ok(())
}
