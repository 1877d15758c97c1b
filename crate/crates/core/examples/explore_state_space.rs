//! Explores the full state space and runs every safety and liveness check.
//!
//! ```bash
//! cargo run --release -p mapmerge --example explore_state_space -- 3
//! ```

use std::time::Instant;

use mapmerge::explorer::{
    check_inevitable, explore, find_deadlocks, find_hidden_divergence, internal_events, ExploreOptions,
    NondeterminismReport,
};
use mapmerge::Model;

fn main() -> mapmerge::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let model = Model::with_agents(n)?;

    let start = Instant::now();
    let graph = explore(&model, &model.initial_config(), &ExploreOptions::default());
    println!(
        "{n} agents: {} states, {} transitions, depth {} ({:.2?})",
        graph.state_count(),
        graph.transition_count(),
        graph.max_depth(),
        start.elapsed()
    );
    for v in &graph.violations {
        println!("violation {}: {} ({} steps)", v.check, v.detail, v.witness.events.len());
    }

    println!("deadlocks: {}", find_deadlocks(&graph).len());
    let internal = internal_events();
    let divergence = find_hidden_divergence(&graph, |e| internal.contains(&e.kind()));
    println!("hidden divergence over {internal:?}: {}", if divergence.is_some() { "found" } else { "none" });
    let any_cycle = find_hidden_divergence(&graph, |_| true);
    println!("graph has cycles: {}", any_cycle.is_some());
    let goal = check_inevitable(&graph, |c| model.goal_reached(c));
    println!("full merge always reachable: {}", goal.holds());
    println!("{:?}", NondeterminismReport::of(&graph));
    Ok(())
}
