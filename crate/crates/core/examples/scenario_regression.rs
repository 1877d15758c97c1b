//! Runs the built-in scenarios against the plain model and both mutants.
//!
//!     cargo run --release --example scenario_regression -- 4

use mapmerge::protocol::Mutations;
use mapmerge::scenarios::{builtin_scenarios, check_scenario_with};
use mapmerge::ModelOptions;

fn main() -> mapmerge::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let variants = [
        ("model", Mutations::default()),
        ("no-priority-guard", Mutations { skip_priority_guard: true, ..Default::default() }),
        ("no-active-guard", Mutations { skip_active_guard: true, ..Default::default() }),
    ];
    for (label, mutations) in variants {
        println!("{label} (n = {n})");
        for s in builtin_scenarios() {
            let opts = ModelOptions { mutations, ..Default::default() };
            let r = check_scenario_with(&s, n, opts)?;
            println!(
                "  {:<11} {:<4} {:<4} explored {:>7}  {:>8.1} ms",
                r.name,
                format!("{:?}", r.requirement_tag).to_uppercase(),
                if r.pass { "PASS" } else { "FAIL" },
                r.explored,
                r.duration_ms
            );
        }
    }
    Ok(())
}
